//! Physical-space lattice: parameters, states, energy and symmetries.
//!
//! Sites are numbered `1..=N` in the documentation and stored at `0..N`.
//! Periodic indices wrap modulo `N`; Dirichlet states hold only the `n`
//! interior particles and the endpoints `q_0 = q_{n+1} = 0` are implicit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// Lattice size, on-site coefficients and boundary kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub n_particles: usize,
    /// Quadratic on-site coefficient, `a > 0`.
    pub a: f64,
    /// Quartic on-site coefficient; any sign.
    pub beta: f64,
    pub boundary: Boundary,
}

impl LatticeParams {
    pub fn new(n_particles: usize, a: f64, beta: f64, boundary: Boundary) -> Result<Self> {
        let min = match boundary {
            Boundary::Periodic => 2,
            Boundary::Dirichlet => 1,
        };
        if n_particles < min {
            return Err(Error::InvalidParameter(format!(
                "{boundary:?} lattice needs at least {min} particles, got {n_particles}"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
        }
        Ok(Self {
            n_particles,
            a,
            beta,
            boundary,
        })
    }

    pub fn periodic(n: usize, a: f64, beta: f64) -> Result<Self> {
        Self::new(n, a, beta, Boundary::Periodic)
    }

    pub fn dirichlet(n: usize, a: f64, beta: f64) -> Result<Self> {
        Self::new(n, a, beta, Boundary::Dirichlet)
    }

    /// Same lattice with a different quartic coefficient.
    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    /// Periodic lattice with `2n + 2` sites whose `S`-fixed set carries this
    /// Dirichlet lattice.
    pub fn periodic_cover(&self) -> Result<Self> {
        match self.boundary {
            Boundary::Dirichlet => Self::periodic(2 * self.n_particles + 2, self.a, self.beta),
            Boundary::Periodic => Err(Error::Precondition(
                "periodic cover is defined for Dirichlet lattices only".into(),
            )),
        }
    }

    fn check(&self, s: &LatticeState) -> Result<()> {
        s.check_len(self.n_particles)
    }
}

/// Displacements, momenta and time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl LatticeState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        Ok(Self { q, p, t: 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            q: vec![0.0; n],
            p: vec![0.0; n],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        for len in [self.q.len(), self.p.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// Largest absolute componentwise difference in `q` and `p`.
    pub fn max_abs_diff(&self, other: &LatticeState) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .chain(self.p.iter().zip(&other.p))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Neighbour displacements `(q_{j-1}, q_{j+1})` with wrap or zero padding.
#[inline]
fn neighbours(boundary: Boundary, q: &[f64], j: usize) -> (f64, f64) {
    let n = q.len();
    match boundary {
        Boundary::Periodic => (q[(j + n - 1) % n], q[(j + 1) % n]),
        Boundary::Dirichlet => (
            if j == 0 { 0.0 } else { q[j - 1] },
            if j + 1 == n { 0.0 } else { q[j + 1] },
        ),
    }
}

/// Total energy `Σ p²/2 + (q_{j+1}-q_j)²/2 + a q²/2 + β q⁴/4`.
pub fn hamiltonian(params: &LatticeParams, s: &LatticeState) -> Result<f64> {
    params.check(s)?;
    Ok(kinetic(&s.p) + potential(params, &s.q))
}

pub(crate) fn kinetic(p: &[f64]) -> f64 {
    0.5 * p.iter().map(|x| x * x).sum::<f64>()
}

pub(crate) fn potential(params: &LatticeParams, q: &[f64]) -> f64 {
    let n = q.len();
    let coupling: f64 = match params.boundary {
        Boundary::Periodic => (0..n).map(|j| (q[(j + 1) % n] - q[j]).powi(2)).sum(),
        // bonds j = 0..=n with q_0 = q_{n+1} = 0
        Boundary::Dirichlet => {
            let inner: f64 = q.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
            inner + q[0].powi(2) + q[n - 1].powi(2)
        }
    };
    let onsite: f64 = q
        .iter()
        .map(|&x| 0.5 * params.a * x * x + 0.25 * params.beta * x.powi(4))
        .sum();
    0.5 * coupling + onsite
}

/// Quadratic part of the energy (the `β = 0` Hamiltonian).
pub fn quadratic_energy(params: &LatticeParams, s: &LatticeState) -> Result<f64> {
    hamiltonian(&params.with_beta(0.0), s)
}

/// `-∂H/∂q_j = q_{j+1} - 2 q_j + q_{j-1} - a q_j - β q_j³`.
pub fn forces(params: &LatticeParams, s: &LatticeState) -> Result<Vec<f64>> {
    params.check(s)?;
    let mut out = vec![0.0; s.len()];
    forces_into(params, &s.q, &mut out);
    Ok(out)
}

/// Allocation-free force evaluation. The neighbour sum is formed first so
/// the result is bitwise equivariant under `R` and `S`.
#[inline]
pub(crate) fn forces_into(params: &LatticeParams, q: &[f64], out: &mut [f64]) {
    for (j, f) in out.iter_mut().enumerate() {
        let (prev, next) = neighbours(params.boundary, q, j);
        let x = q[j];
        *f = (prev + next) - 2.0 * x - params.a * x - params.beta * (x * x * x);
    }
}

/// Cyclic shift `q_j ↦ q_{j+1}` (and likewise for momenta).
pub fn apply_r(s: &LatticeState) -> LatticeState {
    let n = s.len();
    let shift = |v: &[f64]| (0..n).map(|j| v[(j + 1) % n]).collect::<Vec<_>>();
    LatticeState {
        q: shift(&s.q),
        p: shift(&s.p),
        t: s.t,
    }
}

/// Inverse of [`apply_r`].
pub fn apply_r_inv(s: &LatticeState) -> LatticeState {
    let n = s.len();
    let shift = |v: &[f64]| (0..n).map(|j| v[(j + n - 1) % n]).collect::<Vec<_>>();
    LatticeState {
        q: shift(&s.q),
        p: shift(&s.p),
        t: s.t,
    }
}

/// Reversal with negation: `(q_1..q_N) ↦ -(q_{N-1}, .., q_1, q_N)`.
pub fn apply_s(s: &LatticeState) -> LatticeState {
    let n = s.len();
    // 1-based: new q_j = -q_{(N - j) mod N}, index 0 meaning N
    let flip = |v: &[f64]| {
        (1..=n)
            .map(|j| {
                let src = (n - j + n - 1) % n;
                -v[src]
            })
            .collect::<Vec<_>>()
    };
    LatticeState {
        q: flip(&s.q),
        p: flip(&s.p),
        t: s.t,
    }
}

/// Embeds an `n`-particle Dirichlet state into the `S`-fixed set of the
/// periodic lattice with `2n + 2` sites.
pub fn embed_dirichlet(s: &LatticeState) -> LatticeState {
    let n = s.len();
    let big = 2 * n + 2;
    let lift = |v: &[f64]| {
        let mut out = vec![0.0; big];
        for j in 1..=n {
            out[j - 1] = v[j - 1];
            out[big - j - 1] = -v[j - 1];
        }
        out
    };
    LatticeState {
        q: lift(&s.q),
        p: lift(&s.p),
        t: s.t,
    }
}

/// Inverse of [`embed_dirichlet`] on the fixed set: keeps sites `1..=n`.
pub fn restrict_dirichlet(s: &LatticeState) -> Result<LatticeState> {
    let big = s.len();
    if big < 4 || big % 2 != 0 {
        return Err(Error::Precondition(format!(
            "periodic cover must have an even number of sites >= 4, got {big}"
        )));
    }
    let n = (big - 2) / 2;
    Ok(LatticeState {
        q: s.q[..n].to_vec(),
        p: s.p[..n].to_vec(),
        t: s.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(q: &[f64]) -> LatticeState {
        LatticeState::new(q.to_vec(), vec![0.0; q.len()]).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let p = LatticeParams::periodic(3, 1.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&p, &st(&[1.0, 0.0, 0.0])).unwrap(), 1.5);
        assert_eq!(hamiltonian(&p, &st(&[0.0; 3])).unwrap(), 0.0);
        let p4 = p.with_beta(4.0);
        assert_eq!(hamiltonian(&p4, &st(&[1.0, 0.0, 0.0])).unwrap(), 2.5);
    }

    #[test]
    fn dirichlet_hamiltonian_has_two_end_bonds() {
        let p = LatticeParams::dirichlet(1, 1.0, 0.0).unwrap();
        // bonds (q1 - 0)² and (0 - q1)², on-site q²/2
        assert_eq!(hamiltonian(&p, &st(&[1.0])).unwrap(), 1.5);
    }

    #[test]
    fn forces_examples() {
        let p = LatticeParams::periodic(3, 1.0, 0.0).unwrap();
        assert_eq!(forces(&p, &st(&[1.0, 0.0, 0.0])).unwrap(), vec![-3.0, 1.0, 1.0]);
        assert_eq!(forces(&p, &st(&[0.0; 3])).unwrap(), vec![0.0; 3]);
        let p4 = p.with_beta(4.0);
        assert_eq!(forces(&p4, &st(&[1.0, 0.0, 0.0])).unwrap(), vec![-7.0, 1.0, 1.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = LatticeParams::periodic(3, 1.0, 0.0).unwrap();
        assert!(matches!(
            hamiltonian(&p, &st(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(forces(&p, &st(&[1.0])).is_err());
        assert!(LatticeState::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(LatticeParams::periodic(1, 1.0, 0.0).is_err());
        assert!(LatticeParams::dirichlet(1, 1.0, 0.0).is_ok());
        assert!(LatticeParams::periodic(3, 0.0, 0.0).is_err());
        assert!(LatticeParams::periodic(3, -1.0, 0.0).is_err());
        assert!(LatticeParams::periodic(3, 1.0, -2.0).is_ok());
    }

    #[test]
    fn r_and_s_examples() {
        let s = LatticeState::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        let r = apply_r(&s);
        assert_eq!(r.q, vec![2.0, 3.0, 1.0]);
        assert_eq!(r.p, vec![5.0, 6.0, 4.0]);
        assert_eq!(apply_r_inv(&r), s);
        let sv = apply_s(&s);
        assert_eq!(sv.q, vec![-2.0, -1.0, -3.0]);
        assert_eq!(apply_s(&sv), s);
    }

    #[test]
    fn embed_example() {
        let s = st(&[0.7]);
        let e = embed_dirichlet(&s);
        assert_eq!(e.q, vec![0.7, 0.0, -0.7, 0.0]);
        assert_eq!(apply_s(&e), e);
        assert_eq!(restrict_dirichlet(&e).unwrap(), s);
    }
}
