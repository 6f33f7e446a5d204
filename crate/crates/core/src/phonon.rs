//! Phonon coordinates: the real Fourier transform that diagonalizes the
//! quadratic part of the periodic lattice, and the frequency scaling.
//!
//! Modal index `k` runs over `1..=N` and is stored at `k - 1`. For
//! `1 <= k < N/2` column `k` of the transform is a cosine wave and column
//! `N - k` the matching sine wave; column `N/2` (even `N` only) is the
//! alternating vector and column `N` the constant vector.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{self, Boundary, LatticeParams, LatticeState};

/// Phonon frequencies `ω_k = sqrt(a + 4 sin²(kπ/N))`, `k = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    omega: Vec<f64>,
    a: f64,
}

impl FrequencySpectrum {
    /// `ω_k` for `1 <= k <= N`.
    pub fn omega(&self, k: usize) -> f64 {
        self.omega[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn max(&self) -> f64 {
        self.omega.iter().copied().fold(0.0, f64::max)
    }
}

/// `ω_k` evaluated through the class representative `min(k, N - k)` so
/// that `ω_k` and `ω_{N-k}` are the same floating-point number.
pub(crate) fn omega_value(n: usize, a: f64, k: usize) -> f64 {
    let r = (k % n).min(n - k % n) % n;
    let s = (r as f64 * PI / n as f64).sin();
    (a + 4.0 * s * s).sqrt()
}

pub fn frequencies(n: usize, a: f64) -> Result<FrequencySpectrum> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N must be >= 2, got {n}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
    }
    Ok(FrequencySpectrum {
        omega: (1..=n).map(|k| omega_value(n, a, k)).collect(),
        a,
    })
}

/// The circulant matrix `L_N`: `2 + a` on the diagonal, `-1` for each
/// nearest neighbour (so `N = 2` gets `-2` off the diagonal).
pub fn build_lattice_matrix(n: usize, a: f64) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        l[(j, j)] += 2.0 + a;
        l[(j, (j + 1) % n)] -= 1.0;
        l[(j, (j + n - 1) % n)] -= 1.0;
    }
    l
}

/// Orthogonal matrix `M` with `q = M Q`, `p = M P`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    entries: DMatrix<f64>,
}

impl TransformMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// `x = M y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(y))
            .as_slice()
            .to_vec()
    }

    /// `y = Mᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        (self.entries.tr_mul(&DVector::from_column_slice(x)))
            .as_slice()
            .to_vec()
    }
}

pub fn build_transform(n: usize) -> TransformMatrix {
    let nf = n as f64;
    let amp = (2.0 / nf).sqrt();
    let mut m = DMatrix::zeros(n, n);
    for j in 1..=n {
        let row = j - 1;
        for k in (1..).take_while(|k| 2 * k < n) {
            let phase = 2.0 * PI * ((k * j) % n) as f64 / nf;
            m[(row, k - 1)] = amp * phase.cos();
            m[(row, n - k - 1)] = amp * phase.sin();
        }
        if n % 2 == 0 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            m[(row, n / 2 - 1)] = sign / nf.sqrt();
        }
        m[(row, n - 1)] = 1.0 / nf.sqrt();
    }
    TransformMatrix { entries: m }
}

/// Phonon coordinates. `scaled` records whether `Q_k → √ω_k Q_k`,
/// `P_k → P_k / √ω_k` has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub scaled: bool,
    pub t: f64,
}

impl ModalState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, scaled: bool) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        Ok(Self {
            q,
            p,
            scaled,
            t: 0.0,
        })
    }

    pub fn zeros(n: usize, scaled: bool) -> Self {
        Self {
            q: vec![0.0; n],
            p: vec![0.0; n],
            scaled,
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `Q_k` for `1 <= k <= N`.
    #[inline]
    pub fn qk(&self, k: usize) -> f64 {
        self.q[k - 1]
    }

    /// `P_k` for `1 <= k <= N`.
    #[inline]
    pub fn pk(&self, k: usize) -> f64 {
        self.p[k - 1]
    }

    pub fn max_abs_diff(&self, other: &ModalState) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .chain(self.p.iter().zip(&other.p))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Transform plus spectrum for repeated conversions at fixed `N`, `a`.
#[derive(Debug, Clone)]
pub struct PhononBasis {
    transform: TransformMatrix,
    spectrum: FrequencySpectrum,
}

impl PhononBasis {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        Ok(Self {
            spectrum: frequencies(n, a)?,
            transform: build_transform(n),
        })
    }

    /// Basis of the periodic lattice (or of the periodic cover for a
    /// Dirichlet lattice).
    pub fn for_params(params: &LatticeParams) -> Result<Self> {
        match params.boundary {
            Boundary::Periodic => Self::new(params.n_particles, params.a),
            Boundary::Dirichlet => Self::new(2 * params.n_particles + 2, params.a),
        }
    }

    pub fn n(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &FrequencySpectrum {
        &self.spectrum
    }

    pub fn transform(&self) -> &TransformMatrix {
        &self.transform
    }

    pub fn to_modal(&self, s: &LatticeState) -> Result<ModalState> {
        s.check_len(self.n())?;
        Ok(ModalState {
            q: self.transform.apply_transpose(&s.q),
            p: self.transform.apply_transpose(&s.p),
            scaled: false,
            t: s.t,
        })
    }

    pub fn from_modal(&self, m: &ModalState) -> Result<LatticeState> {
        check_modal(m, self.n())?;
        let m = if m.scaled {
            unscale_modal(m, &self.spectrum)?
        } else {
            m.clone()
        };
        Ok(LatticeState {
            q: self.transform.apply(&m.q),
            p: self.transform.apply(&m.p),
            t: m.t,
        })
    }

    /// Lattice state to frequency-scaled phonons.
    pub fn to_scaled(&self, s: &LatticeState) -> Result<ModalState> {
        scale_modal(&self.to_modal(s)?, &self.spectrum)
    }
}

fn check_modal(m: &ModalState, n: usize) -> Result<()> {
    for len in [m.q.len(), m.p.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    Ok(())
}

/// Lattice state to (unscaled) phonons. Dirichlet states are first embedded
/// in their periodic cover, so the result has `2n + 2` modes.
pub fn to_modal(params: &LatticeParams, s: &LatticeState) -> Result<ModalState> {
    s.check_len(params.n_particles)?;
    let basis = PhononBasis::for_params(params)?;
    match params.boundary {
        Boundary::Periodic => basis.to_modal(s),
        Boundary::Dirichlet => basis.to_modal(&lattice::embed_dirichlet(s)),
    }
}

/// Inverse of [`to_modal`]. For Dirichlet params the periodic state is
/// restricted back to the interior sites.
pub fn from_modal(params: &LatticeParams, m: &ModalState) -> Result<LatticeState> {
    let basis = PhononBasis::for_params(params)?;
    let s = basis.from_modal(m)?;
    match params.boundary {
        Boundary::Periodic => Ok(s),
        Boundary::Dirichlet => lattice::restrict_dirichlet(&s),
    }
}

/// Applies `Q_k → √ω_k Q_k`, `P_k → P_k / √ω_k`, after which the quadratic
/// energy reads `Σ ω_k (P_k² + Q_k²)/2`.
pub fn scale_modal(m: &ModalState, w: &FrequencySpectrum) -> Result<ModalState> {
    if m.scaled {
        return Err(Error::Precondition("modal state is already scaled".into()));
    }
    check_modal(m, w.len())?;
    let root: Vec<f64> = w.omega.iter().map(|x| x.sqrt()).collect();
    Ok(ModalState {
        q: m.q.iter().zip(&root).map(|(x, r)| x * r).collect(),
        p: m.p.iter().zip(&root).map(|(x, r)| x / r).collect(),
        scaled: true,
        t: m.t,
    })
}

pub fn unscale_modal(m: &ModalState, w: &FrequencySpectrum) -> Result<ModalState> {
    if !m.scaled {
        return Err(Error::Precondition("modal state is not scaled".into()));
    }
    check_modal(m, w.len())?;
    let root: Vec<f64> = w.omega.iter().map(|x| x.sqrt()).collect();
    Ok(ModalState {
        q: m.q.iter().zip(&root).map(|(x, r)| x / r).collect(),
        p: m.p.iter().zip(&root).map(|(x, r)| x * r).collect(),
        scaled: false,
        t: m.t,
    })
}

/// Quadratic energy in modal form: `½PᵀP + ½QᵀΩQ` when unscaled,
/// `Σ ω_k (P_k² + Q_k²)/2` when scaled.
pub fn modal_quadratic_energy(m: &ModalState, w: &FrequencySpectrum) -> Result<f64> {
    check_modal(m, w.len())?;
    let e = w
        .omega
        .iter()
        .zip(m.q.iter().zip(&m.p))
        .map(|(om, (q, p))| {
            if m.scaled {
                0.5 * om * (p * p + q * q)
            } else {
                0.5 * (p * p + om * om * q * q)
            }
        })
        .sum();
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_examples() {
        let w = frequencies(3, 1.0).unwrap();
        assert!((w.omega(1) - 2.0).abs() < 1e-15);
        assert!((w.omega(2) - 2.0).abs() < 1e-15);
        assert_eq!(w.omega(3), 1.0);
        let w = frequencies(4, 1.0).unwrap();
        assert!((w.omega(1) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(w.omega(2), 5f64.sqrt());
        assert_eq!(w.omega(4), 1.0);
        let w = frequencies(2, 3.0).unwrap();
        assert_eq!(w.as_slice(), &[7f64.sqrt(), 3f64.sqrt()]);
    }

    #[test]
    fn frequency_errors() {
        assert!(frequencies(1, 1.0).is_err());
        assert!(frequencies(4, 0.0).is_err());
        assert!(frequencies(4, -1.0).is_err());
    }

    #[test]
    fn pairing_is_exact() {
        for n in 2..40 {
            let w = frequencies(n, 1.3).unwrap();
            for k in 1..n {
                assert_eq!(w.omega(k), w.omega(n - k));
                assert!(w.omega(k) >= 1.3f64.sqrt() && w.omega(k) <= (1.3f64 + 4.0).sqrt());
            }
            assert_eq!(w.omega(n), 1.3f64.sqrt());
        }
    }

    #[test]
    fn lattice_matrix_n3() {
        let l = build_lattice_matrix(3, 1.0);
        let expected = DMatrix::from_row_slice(3, 3, &[3., -1., -1., -1., 3., -1., -1., -1., 3.]);
        assert_eq!(l, expected);
        let l2 = build_lattice_matrix(2, 1.0);
        assert_eq!(l2[(0, 1)], -2.0);
    }

    #[test]
    fn transform_examples() {
        let basis = PhononBasis::new(5, 1.0).unwrap();
        let s = LatticeState::new(vec![0.3; 5], vec![0.0; 5]).unwrap();
        let m = basis.to_modal(&s).unwrap();
        assert!((m.qk(5) - 5f64.sqrt() * 0.3).abs() < 1e-15);
        assert!(m.q[..4].iter().all(|x| x.abs() < 1e-15));

        let basis = PhononBasis::new(4, 1.0).unwrap();
        let s = LatticeState::new(vec![-1.0, 1.0, -1.0, 1.0], vec![0.0; 4]).unwrap();
        let m = basis.to_modal(&s).unwrap();
        assert!((m.qk(2) - 2.0).abs() < 1e-15);
        for k in [1, 3, 4] {
            assert!(m.qk(k).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_example_and_double_scaling() {
        let w = frequencies(3, 1.0).unwrap();
        let m = ModalState::new(vec![1.0, 0.0, 0.0], vec![0.0; 3], false).unwrap();
        let s = scale_modal(&m, &w).unwrap();
        assert!((s.q[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(scale_modal(&s, &w).is_err());
        assert!(unscale_modal(&m, &w).is_err());
        // energy ω² Q²/2 = 2 before, ω Q²/2 = 2 after
        assert!((modal_quadratic_energy(&m, &w).unwrap() - 2.0).abs() < 1e-15);
        assert!((modal_quadratic_energy(&s, &w).unwrap() - 2.0).abs() < 1e-14);
        let z = scale_modal(&ModalState::zeros(3, false), &w).unwrap();
        assert_eq!(z, ModalState::zeros(3, true));
    }

    #[test]
    fn dirichlet_modal_lives_on_sine_modes() {
        let params = LatticeParams::dirichlet(3, 1.0, 0.0).unwrap();
        let s = LatticeState::new(vec![0.1, -0.4, 0.25], vec![0.3, 0.0, -0.2]).unwrap();
        let m = to_modal(&params, &s).unwrap();
        assert_eq!(m.len(), 8);
        for k in 1..=4 {
            assert!(m.qk(k).abs() < 1e-15 && m.pk(k).abs() < 1e-15);
        }
        assert!(m.qk(8).abs() < 1e-15);
        let back = from_modal(&params, &m).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-14);
    }
}
