//! Closed-form quadratic and quartic normal forms and their partials.
//!
//! Every quartic form here is a quadratic polynomial in the Hopf
//! coordinates (or in the Dirichlet actions `I_k`), so each `*_partials`
//! function is exact and the Hessians are constant.

use crate::error::{Error, Result};
use crate::normalform::hopf::{pair_count, HopfCoordinates, HopfPair, HopfPartials};
use crate::phonon::FrequencySpectrum;

fn check_sizes(h: &HopfCoordinates, w: &FrequencySpectrum) -> Result<()> {
    if h.n != w.len() || h.pairs.len() != pair_count(h.n) {
        return Err(Error::DimensionMismatch {
            expected: h.n,
            found: w.len(),
        });
    }
    if (h.n % 2 == 0) != h.a_half.is_some() {
        return Err(Error::Precondition(format!(
            "a_(N/2) must be present exactly when N is even (N = {})",
            h.n
        )));
    }
    Ok(())
}

/// `H₂ = Σ_{k<N/2} ω_k a_k + ω_{N/2} a_{N/2} + ω_N a_N`.
pub fn h2_hopf(h: &HopfCoordinates, w: &FrequencySpectrum) -> Result<f64> {
    check_sizes(h, w)?;
    let n = h.n;
    let pairs: f64 = h
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| w.omega(i + 1) * p.a)
        .sum();
    let half = h.a_half.map_or(0.0, |x| w.omega(n / 2) * x);
    Ok(pairs + half + w.omega(n) * h.a_n)
}

pub fn h2_partials(h: &HopfCoordinates, w: &FrequencySpectrum) -> Result<HopfPartials> {
    check_sizes(h, w)?;
    let n = h.n;
    let mut d = HopfPartials::zeros(n);
    for (i, p) in d.pairs.iter_mut().enumerate() {
        p.a = w.omega(i + 1);
    }
    if n % 2 == 0 {
        d.a_half = w.omega(n / 2);
    }
    d.a_n = w.omega(n);
    Ok(d)
}

/// Quartic normal form of the periodic lattice, evaluated literally. The
/// `N/2` terms enter for even `N` and the `N/4` term when `4 | N`.
pub fn h4bar_periodic(h: &HopfCoordinates, w: &FrequencySpectrum, beta: f64) -> Result<f64> {
    check_sizes(h, w)?;
    let n = h.n;
    let om = |k: usize| w.omega(k);
    let p = |k: usize| &h.pairs[k - 1];
    let m = h.pairs.len();

    let s: f64 = (1..=m).map(|k| p(k).a / om(k)).sum();
    let an = h.a_n / om(n);
    let ah = h.a_half.map_or(0.0, |x| x / om(n / 2));

    let mut body = 1.5 * (ah * ah + an * an) + 6.0 * ah * an + 6.0 * (ah + an) * s;
    body += 0.75
        * (1..=m)
            .map(|k| (3.0 * p(k).a * p(k).a - p(k).b * p(k).b) / (om(k) * om(k)))
            .sum::<f64>();
    for k in 1..=m {
        for l in k + 1..=m {
            body += 6.0 * p(k).a * p(l).a / (om(k) * om(l));
        }
    }
    if n % 2 == 0 {
        for k in (1..).take_while(|k| 4 * k < n) {
            let l = n / 2 - k;
            body += 3.0 * (p(k).c * p(l).c - p(k).d * p(l).d) / (om(k) * om(l));
        }
    }
    if n % 4 == 0 {
        let q = n / 4;
        body += 0.75 * (p(q).c * p(q).c - p(q).d * p(q).d) / (om(q) * om(q));
    }
    Ok(beta / (2.0 * n as f64) * body)
}

pub fn h4bar_periodic_partials(
    h: &HopfCoordinates,
    w: &FrequencySpectrum,
    beta: f64,
) -> Result<HopfPartials> {
    check_sizes(h, w)?;
    let n = h.n;
    let om = |k: usize| w.omega(k);
    let m = h.pairs.len();
    let pre = beta / (2.0 * n as f64);

    let s: f64 = (1..=m).map(|k| h.pairs[k - 1].a / om(k)).sum();
    let an = h.a_n / om(n);
    let ah = h.a_half.map_or(0.0, |x| x / om(n / 2));

    let mut d = HopfPartials::zeros(n);
    for k in 1..=m {
        let pk = h.pairs[k - 1];
        let dk = &mut d.pairs[k - 1];
        let ok = om(k);
        dk.a = 6.0 * (ah + an) / ok + 4.5 * pk.a / (ok * ok) + 6.0 * (s - pk.a / ok) / ok;
        dk.b = -1.5 * pk.b / (ok * ok);
    }
    if n % 2 == 0 {
        let oh = om(n / 2);
        d.a_half = (3.0 * ah + 6.0 * an + 6.0 * s) / oh;
        for k in (1..).take_while(|k| 4 * k < n) {
            let l = n / 2 - k;
            let (pk, pl) = (h.pairs[k - 1], h.pairs[l - 1]);
            let den = om(k) * om(l);
            d.pairs[k - 1].c += 3.0 * pl.c / den;
            d.pairs[l - 1].c += 3.0 * pk.c / den;
            d.pairs[k - 1].d -= 3.0 * pl.d / den;
            d.pairs[l - 1].d -= 3.0 * pk.d / den;
        }
    }
    if n % 4 == 0 {
        let q = n / 4;
        let pq = h.pairs[q - 1];
        let oq2 = om(q) * om(q);
        d.pairs[q - 1].c += 1.5 * pq.c / oq2;
        d.pairs[q - 1].d -= 1.5 * pq.d / oq2;
    }
    d.a_n = (3.0 * an + 6.0 * ah + 6.0 * s) / om(n);
    scale_partials(&mut d, pre);
    Ok(d)
}

fn scale_partials(d: &mut HopfPartials, f: f64) {
    for p in &mut d.pairs {
        *p = HopfPair {
            a: p.a * f,
            b: p.b * f,
            c: p.c * f,
            d: p.d * f,
        };
    }
    d.a_half *= f;
    d.a_n *= f;
}

fn require_odd(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::Precondition(format!("N must be odd, got {n}")));
    }
    Ok(())
}

/// Quartic normal form for odd `N`, in terms of `a_j`, `b_j`, `a_N` only.
pub fn h4bar_odd(h: &HopfCoordinates, w: &FrequencySpectrum, beta: f64) -> Result<f64> {
    require_odd(h.n)?;
    check_sizes(h, w)?;
    let n = h.n;
    let om = |k: usize| w.omega(k);
    let m = h.pairs.len();
    let p = |k: usize| &h.pairs[k - 1];

    let an = h.a_n / om(n);
    let s: f64 = (1..=m).map(|k| p(k).a / om(k)).sum();
    let mut body = 0.75
        * (1..=m)
            .map(|k| (3.0 * p(k).a * p(k).a - p(k).b * p(k).b) / (om(k) * om(k)))
            .sum::<f64>()
        + 1.5 * an * an
        + 6.0 * an * s;
    for k in 1..=m {
        for l in k + 1..=m {
            body += 6.0 * p(k).a * p(l).a / (om(k) * om(l));
        }
    }
    Ok(beta / (2.0 * n as f64) * body)
}

pub fn h4bar_odd_partials(
    h: &HopfCoordinates,
    w: &FrequencySpectrum,
    beta: f64,
) -> Result<HopfPartials> {
    require_odd(h.n)?;
    // on odd N the periodic form has no N/2, N/4 terms and coincides
    h4bar_periodic_partials(h, w, beta)
}

/// Parameters of the even-`N` quartic integral `K_k`.
fn check_quartic_index(n: usize, k: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("K_k needs even N, got {n}")));
    }
    if k == 0 || 4 * k >= n {
        return Err(Error::InvalidParameter(format!(
            "K_k needs 1 <= k < N/4, got k = {k} for N = {n}"
        )));
    }
    Ok(())
}

/// `K_k = 3 (c_k c_l - d_k d_l)/(ω_k ω_l) - ¾ (b_k²/ω_k² + b_l²/ω_l²)` with
/// `l = N/2 - k`.
pub fn quartic_k(h: &HopfCoordinates, w: &FrequencySpectrum, k: usize) -> Result<f64> {
    check_quartic_index(h.n, k)?;
    check_sizes(h, w)?;
    let l = h.n / 2 - k;
    let (pk, pl) = (h.pairs[k - 1], h.pairs[l - 1]);
    let (ok, ol) = (w.omega(k), w.omega(l));
    Ok(3.0 * (pk.c * pl.c - pk.d * pl.d) / (ok * ol)
        - 0.75 * (pk.b * pk.b / (ok * ok) + pl.b * pl.b / (ol * ol)))
}

pub fn quartic_k_partials(
    h: &HopfCoordinates,
    w: &FrequencySpectrum,
    k: usize,
) -> Result<HopfPartials> {
    check_quartic_index(h.n, k)?;
    check_sizes(h, w)?;
    let l = h.n / 2 - k;
    let (pk, pl) = (h.pairs[k - 1], h.pairs[l - 1]);
    let (ok, ol) = (w.omega(k), w.omega(l));
    let mut d = HopfPartials::zeros(h.n);
    d.pairs[k - 1].c = 3.0 * pl.c / (ok * ol);
    d.pairs[l - 1].c = 3.0 * pk.c / (ok * ol);
    d.pairs[k - 1].d = -3.0 * pl.d / (ok * ol);
    d.pairs[l - 1].d = -3.0 * pk.d / (ok * ol);
    d.pairs[k - 1].b = -1.5 * pk.b / (ok * ok);
    d.pairs[l - 1].b = -1.5 * pl.b / (ol * ol);
    Ok(d)
}

fn check_dirichlet(actions: &[f64], w: &FrequencySpectrum) -> Result<usize> {
    let n = actions.len();
    if w.len() != 2 * n + 2 {
        return Err(Error::DimensionMismatch {
            expected: 2 * n + 2,
            found: w.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one action".into()));
    }
    Ok(n)
}

/// Quartic normal form of the `n`-particle fixed-endpoint lattice in the
/// actions `I_1..I_n`; `w` is the spectrum of the periodic cover `2n + 2`.
pub fn h4bar_dirichlet(actions: &[f64], w: &FrequencySpectrum, beta: f64) -> Result<f64> {
    let n = check_dirichlet(actions, w)?;
    let om = |k: usize| w.omega(k);
    let i = |k: usize| actions[k - 1];
    let mut body = 2.25 * (1..=n).map(|k| i(k) * i(k) / (om(k) * om(k))).sum::<f64>();
    for k in 1..=n {
        for l in k + 1..=n {
            body += 6.0 * i(k) * i(l) / (om(k) * om(l));
        }
    }
    for k in (1..).take_while(|k| 2 * k < n + 1) {
        let l = n + 1 - k;
        body += 3.0 * i(k) * i(l) / (om(k) * om(l));
    }
    if n % 2 == 1 {
        let mid = (n + 1) / 2;
        body += 0.75 * i(mid) * i(mid) / (om(mid) * om(mid));
    }
    Ok(beta / (2.0 * (2 * n + 2) as f64) * body)
}

/// Constant Hessian of [`h4bar_dirichlet`] in the actions, obtained by
/// differentiating each term.
pub fn h4bar_dirichlet_hessian(
    n: usize,
    w: &FrequencySpectrum,
    beta: f64,
) -> Result<nalgebra::DMatrix<f64>> {
    check_dirichlet(&vec![0.0; n], w)?;
    let lam = |k: usize| 1.0 / w.omega(k);
    let pre = beta / (2.0 * (2 * n + 2) as f64);
    let mut hess = nalgebra::DMatrix::zeros(n, n);
    for k in 1..=n {
        for l in 1..=n {
            let mut v = if k == l { 4.5 } else { 6.0 };
            if k + l == n + 1 {
                v += if k == l { 1.5 } else { 3.0 };
            }
            hess[(k - 1, l - 1)] = pre * v * lam(k) * lam(l);
        }
    }
    Ok(hess)
}

/// Full truncated normal form `H₂ + H̄₄` for the periodic lattice.
pub fn hbar_periodic(h: &HopfCoordinates, w: &FrequencySpectrum, beta: f64) -> Result<f64> {
    Ok(h2_hopf(h, w)? + h4bar_periodic(h, w, beta)?)
}

/// `|ν(Θ, θ)| = |Σ_k ω_k (Θ_k - θ_k)|` for the monomial `z^Θ ξ^θ`.
pub fn resonance_exponent(
    big_theta: &[u32],
    theta: &[u32],
    w: &FrequencySpectrum,
) -> Result<f64> {
    for len in [big_theta.len(), theta.len()] {
        if len != w.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                found: len,
            });
        }
    }
    let nu: f64 = w
        .as_slice()
        .iter()
        .zip(big_theta.iter().zip(theta))
        .map(|(om, (&up, &down))| om * (up as f64 - down as f64))
        .sum();
    Ok(nu.abs())
}

/// All monomials `z^Θ ξ^θ` of total degree `degree` with `|ν| < tol`.
pub fn resonant_monomials(
    w: &FrequencySpectrum,
    degree: u32,
    tol: f64,
) -> Vec<(Vec<u32>, Vec<u32>)> {
    let n = w.len();
    let mut out = Vec::new();
    let mut exps = vec![0u32; 2 * n];
    fn rec(
        pos: usize,
        left: u32,
        exps: &mut Vec<u32>,
        n: usize,
        w: &FrequencySpectrum,
        tol: f64,
        out: &mut Vec<(Vec<u32>, Vec<u32>)>,
    ) {
        if pos == exps.len() - 1 {
            exps[pos] = left;
            let (up, down) = exps.split_at(n);
            if resonance_exponent(up, down, w).map_or(false, |nu| nu < tol) {
                out.push((up.to_vec(), down.to_vec()));
            }
            exps[pos] = 0;
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(pos + 1, left - e, exps, n, w, tol, out);
        }
        exps[pos] = 0;
    }
    rec(0, degree, &mut exps, n, w, tol, &mut out);
    out
}
