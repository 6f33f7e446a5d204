//! Observables on scaled phonon space and their Poisson brackets.

use crate::error::{Error, Result};
use crate::normalform::forms;
use crate::normalform::hopf::{hopf_from_modal, pair_count, Gradient, HopfPartials};
use crate::phonon::{FrequencySpectrum, ModalState};

/// Central-difference step used when an observable has no analytic gradient.
pub const FD_STEP: f64 = 1e-6;

/// A smooth function of the scaled phonon coordinates `(Q, P)`.
pub trait Observable {
    fn value(&self, m: &ModalState) -> Result<f64>;

    /// Analytic gradient, if the observable provides one.
    fn gradient(&self, _m: &ModalState) -> Result<Option<Gradient>> {
        Ok(None)
    }
}

/// Gradient by central differences with step [`FD_STEP`].
pub fn finite_difference_gradient(f: &dyn Observable, m: &ModalState) -> Result<Gradient> {
    let n = m.len();
    let mut g = Gradient::zeros(n);
    let mut probe = m.clone();
    for i in 0..n {
        let x = m.q[i];
        probe.q[i] = x + FD_STEP;
        let up = f.value(&probe)?;
        probe.q[i] = x - FD_STEP;
        let down = f.value(&probe)?;
        probe.q[i] = x;
        g.dq[i] = (up - down) / (2.0 * FD_STEP);

        let y = m.p[i];
        probe.p[i] = y + FD_STEP;
        let up = f.value(&probe)?;
        probe.p[i] = y - FD_STEP;
        let down = f.value(&probe)?;
        probe.p[i] = y;
        g.dp[i] = (up - down) / (2.0 * FD_STEP);
    }
    Ok(g)
}

fn gradient_of(f: &dyn Observable, m: &ModalState) -> Result<Gradient> {
    match f.gradient(m)? {
        Some(g) => Ok(g),
        None => finite_difference_gradient(f, m),
    }
}

/// `{F, G} = Σ ∂F/∂Q_k ∂G/∂P_k - ∂F/∂P_k ∂G/∂Q_k`.
pub fn poisson_bracket(f: &dyn Observable, g: &dyn Observable, m: &ModalState) -> Result<f64> {
    let gf = gradient_of(f, m)?;
    let gg = gradient_of(g, m)?;
    if gf.dq.len() != m.len() || gg.dq.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: gf.dq.len().min(gg.dq.len()),
        });
    }
    Ok((0..m.len())
        .map(|i| gf.dq[i] * gg.dp[i] - gf.dp[i] * gg.dq[i])
        .sum())
}

/// Wraps a closure as an observable without analytic gradient.
pub struct FnObservable<F>(pub F);

impl<F: Fn(&ModalState) -> f64> Observable for FnObservable<F> {
    fn value(&self, m: &ModalState) -> Result<f64> {
        Ok((self.0)(m))
    }
}

/// The named quadratic and quartic functions of the normal-form theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integral {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    /// `a_{N/2}`, even `N` only.
    AHalf,
    AN,
    /// `b_k - b_{N/2-k}`.
    BDiff(usize),
    /// Quartic `K_k` of the even case.
    K(usize),
    H2,
    H4Bar,
    H4BarOdd,
    /// `H₂ + H̄₄`.
    HBar,
}

impl std::fmt::Display for Integral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Integral::A(k) => write!(f, "a_{k}"),
            Integral::B(k) => write!(f, "b_{k}"),
            Integral::C(k) => write!(f, "c_{k}"),
            Integral::D(k) => write!(f, "d_{k}"),
            Integral::AHalf => write!(f, "a_half"),
            Integral::AN => write!(f, "a_N"),
            Integral::BDiff(k) => write!(f, "b_{k}-b_half-{k}"),
            Integral::K(k) => write!(f, "K_{k}"),
            Integral::H2 => write!(f, "H2"),
            Integral::H4Bar => write!(f, "H4bar"),
            Integral::H4BarOdd => write!(f, "H4bar_odd"),
            Integral::HBar => write!(f, "Hbar"),
        }
    }
}

/// Frequencies and coupling shared by every [`Integral`].
#[derive(Debug, Clone)]
pub struct NormalFormContext {
    pub spectrum: FrequencySpectrum,
    pub beta: f64,
}

impl NormalFormContext {
    pub fn new(spectrum: FrequencySpectrum, beta: f64) -> Self {
        Self { spectrum, beta }
    }

    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    pub fn bind(&self, integral: Integral) -> BoundIntegral<'_> {
        BoundIntegral {
            integral,
            ctx: self,
        }
    }

    fn check_pair(&self, k: usize) -> Result<()> {
        if k == 0 || k > pair_count(self.n()) {
            return Err(Error::InvalidParameter(format!(
                "pair index {k} outside 1..={} for N = {}",
                pair_count(self.n()),
                self.n()
            )));
        }
        Ok(())
    }

    fn check_state(&self, m: &ModalState) -> Result<()> {
        if m.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: m.len(),
            });
        }
        Ok(())
    }

    fn check_integral(&self, i: Integral) -> Result<()> {
        let n = self.n();
        match i {
            Integral::A(k) | Integral::B(k) | Integral::C(k) | Integral::D(k) => {
                self.check_pair(k)
            }
            Integral::AHalf if n % 2 != 0 => {
                Err(Error::Precondition(format!("a_(N/2) needs even N, got {n}")))
            }
            Integral::BDiff(k) | Integral::K(k) if n % 2 != 0 || k == 0 || 4 * k >= n => {
                Err(Error::InvalidParameter(format!(
                    "{i} needs even N and 1 <= k < N/4 (N = {n})"
                )))
            }
            Integral::H4BarOdd if n % 2 == 0 => {
                Err(Error::Precondition(format!("N must be odd, got {n}")))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, i: Integral, m: &ModalState) -> Result<f64> {
        self.check_state(m)?;
        self.check_integral(i)?;
        let h = hopf_from_modal(m)?;
        let w = &self.spectrum;
        let n = self.n();
        Ok(match i {
            Integral::A(k) => h.pair(k).a,
            Integral::B(k) => h.pair(k).b,
            Integral::C(k) => h.pair(k).c,
            Integral::D(k) => h.pair(k).d,
            Integral::AHalf => h.a_half.unwrap_or(0.0),
            Integral::AN => h.a_n,
            Integral::BDiff(k) => h.pair(k).b - h.pair(n / 2 - k).b,
            Integral::K(k) => forms::quartic_k(&h, w, k)?,
            Integral::H2 => forms::h2_hopf(&h, w)?,
            Integral::H4Bar => forms::h4bar_periodic(&h, w, self.beta)?,
            Integral::H4BarOdd => forms::h4bar_odd(&h, w, self.beta)?,
            Integral::HBar => forms::hbar_periodic(&h, w, self.beta)?,
        })
    }

    /// Partials with respect to the Hopf coordinates.
    pub fn hopf_partials(&self, i: Integral, m: &ModalState) -> Result<HopfPartials> {
        self.check_state(m)?;
        self.check_integral(i)?;
        let n = self.n();
        let w = &self.spectrum;
        let mut d = HopfPartials::zeros(n);
        match i {
            Integral::A(k) => d.pairs[k - 1].a = 1.0,
            Integral::B(k) => d.pairs[k - 1].b = 1.0,
            Integral::C(k) => d.pairs[k - 1].c = 1.0,
            Integral::D(k) => d.pairs[k - 1].d = 1.0,
            Integral::AHalf => d.a_half = 1.0,
            Integral::AN => d.a_n = 1.0,
            Integral::BDiff(k) => {
                d.pairs[k - 1].b = 1.0;
                d.pairs[n / 2 - k - 1].b = -1.0;
            }
            Integral::K(k) => d = forms::quartic_k_partials(&hopf_from_modal(m)?, w, k)?,
            Integral::H2 => d = forms::h2_partials(&hopf_from_modal(m)?, w)?,
            Integral::H4Bar => {
                d = forms::h4bar_periodic_partials(&hopf_from_modal(m)?, w, self.beta)?
            }
            Integral::H4BarOdd => {
                d = forms::h4bar_odd_partials(&hopf_from_modal(m)?, w, self.beta)?
            }
            Integral::HBar => {
                let h = hopf_from_modal(m)?;
                d = forms::h4bar_periodic_partials(&h, w, self.beta)?;
                let d2 = forms::h2_partials(&h, w)?;
                for (x, y) in d.pairs.iter_mut().zip(&d2.pairs) {
                    x.a += y.a;
                }
                d.a_half += d2.a_half;
                d.a_n += d2.a_n;
            }
        }
        Ok(d)
    }

    pub fn gradient(&self, i: Integral, m: &ModalState) -> Result<Gradient> {
        Ok(self.hopf_partials(i, m)?.pullback(m))
    }

    /// Quadratic integrals `a_j, b_j, a_N` of the odd case.
    pub fn odd_integrals(&self) -> Result<Vec<Integral>> {
        let n = self.n();
        if n % 2 == 0 {
            return Err(Error::Precondition(format!("N must be odd, got {n}")));
        }
        let m = pair_count(n);
        let mut out: Vec<Integral> = (1..=m).map(Integral::A).collect();
        out.extend((1..=m).map(Integral::B));
        out.push(Integral::AN);
        Ok(out)
    }

    /// The `N` integrals of the even case: `a_k (k <= N/2)`, `a_N`,
    /// `b_k - b_{N/2-k}` and `K_k` for `k < N/4`, and `c_{N/4}` if `4 | N`.
    pub fn even_integrals(&self) -> Result<Vec<Integral>> {
        let n = self.n();
        if n % 2 != 0 {
            return Err(Error::Precondition(format!("N must be even, got {n}")));
        }
        let mut out: Vec<Integral> = (1..=pair_count(n)).map(Integral::A).collect();
        out.push(Integral::AHalf);
        out.push(Integral::AN);
        let quarter: Vec<usize> = (1..).take_while(|k| 4 * k < n).collect();
        out.extend(quarter.iter().map(|&k| Integral::BDiff(k)));
        if n % 4 == 0 {
            out.push(Integral::C(n / 4));
        }
        out.extend(quarter.iter().map(|&k| Integral::K(k)));
        Ok(out)
    }

    /// [`Self::odd_integrals`] or [`Self::even_integrals`] by parity.
    pub fn integrals(&self) -> Vec<Integral> {
        if self.n() % 2 == 0 {
            self.even_integrals()
        } else {
            self.odd_integrals()
        }
        .expect("parity matched")
    }

    /// The normal form appropriate to the parity of `N`.
    pub fn normal_form(&self) -> Integral {
        if self.n() % 2 == 0 {
            Integral::H4Bar
        } else {
            Integral::H4BarOdd
        }
    }

    pub fn bracket(&self, f: Integral, g: Integral, m: &ModalState) -> Result<f64> {
        poisson_bracket(&self.bind(f), &self.bind(g), m)
    }
}

/// An [`Integral`] together with its context, usable as an [`Observable`].
#[derive(Debug, Clone, Copy)]
pub struct BoundIntegral<'a> {
    pub integral: Integral,
    pub ctx: &'a NormalFormContext,
}

impl Observable for BoundIntegral<'_> {
    fn value(&self, m: &ModalState) -> Result<f64> {
        self.ctx.evaluate(self.integral, m)
    }

    fn gradient(&self, m: &ModalState) -> Result<Option<Gradient>> {
        self.ctx.gradient(self.integral, m).map(Some)
    }
}
