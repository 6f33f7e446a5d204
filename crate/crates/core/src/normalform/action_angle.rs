//! Action–angle chart of the odd-`N` normal form on the regular set
//! `a_j > 0, |b_j| < a_j, a_N > 0`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::normalform::hopf::{hopf_from_modal, pair_count};
use crate::phonon::ModalState;

#[derive(Debug, Clone, PartialEq)]
pub struct ActionAngleChart {
    /// `a_1 .. a_m` with `m = (N-1)/2`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_n: f64,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi_n: f64,
}

impl ActionAngleChart {
    /// Positions first, then momenta: `(φ, ψ, φ_N, a, b, a_N)`. In this order
    /// the chart pulls `Σ dP ∧ dQ` back to `Σ da ∧ dφ + db ∧ dψ + da_N ∧ dφ_N`.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.phi.clone();
        v.extend(&self.psi);
        v.push(self.phi_n);
        v.extend(&self.a);
        v.extend(&self.b);
        v.push(self.a_n);
        v
    }
}

/// Argument of `(x, y)` in `[0, 2π)`.
fn arg(x: f64, y: f64) -> f64 {
    y.atan2(x).rem_euclid(TAU)
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn action_angle(m: &ModalState) -> Result<ActionAngleChart> {
    let h = hopf_from_modal(m)?;
    let n = m.len();
    if n % 2 == 0 {
        return Err(Error::Precondition(format!("N must be odd, got {n}")));
    }
    for (i, p) in h.pairs.iter().enumerate() {
        let j = i + 1;
        if !(p.a > 0.0) {
            return Err(Error::NotRegular(format!("a_{j} = {} is not positive", p.a)));
        }
        if !(p.b.abs() < p.a) {
            return Err(Error::NotRegular(format!(
                "|b_{j}| = {} is not below a_{j} = {}",
                p.b.abs(),
                p.a
            )));
        }
    }
    if !(h.a_n > 0.0) {
        return Err(Error::NotRegular(format!("a_N = {} is not positive", h.a_n)));
    }

    let mp = pair_count(n);
    let mut phi = Vec::with_capacity(mp);
    let mut psi = Vec::with_capacity(mp);
    for j in 1..=mp {
        let (qj, pj, ql, pl) = (m.qk(j), m.pk(j), m.qk(n - j), m.pk(n - j));
        let u = arg(-pl - qj, pj - ql);
        let v = arg(pl - qj, pj + ql);
        phi.push(wrap(0.5 * (u + v)));
        psi.push(wrap(0.5 * (u - v)));
    }
    Ok(ActionAngleChart {
        a: h.pairs.iter().map(|p| p.a).collect(),
        b: h.pairs.iter().map(|p| p.b).collect(),
        a_n: h.a_n,
        phi,
        psi,
        // clockwise, so that (φ_N, a_N) is a canonical pair
        phi_n: arg(m.qk(n), -m.pk(n)),
    })
}

/// Difference of two angle readings whose half-angle branches may differ
/// by `π`, reduced to `(-π/2, π/2]`.
fn angle_step(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    if d > PI / 2.0 {
        d - PI
    } else {
        d
    }
}

/// Finite-difference Jacobian of the chart in the order of
/// [`ActionAngleChart::flat`] with respect to `(Q, P)`.
pub fn chart_jacobian(m: &ModalState, step: f64) -> Result<nalgebra::DMatrix<f64>> {
    let n = m.len();
    let dim = 2 * n;
    let angles = n;
    let mut jac = nalgebra::DMatrix::zeros(dim, dim);
    let mut probe = m.clone();
    for col in 0..dim {
        fn slot(s: &mut ModalState, col: usize, n: usize) -> &mut f64 {
            if col < n {
                &mut s.q[col]
            } else {
                &mut s.p[col - n]
            }
        }
        let x0 = *slot(&mut probe, col, n);
        *slot(&mut probe, col, n) = x0 + step;
        let up = action_angle(&probe)?.flat();
        *slot(&mut probe, col, n) = x0 - step;
        let down = action_angle(&probe)?.flat();
        *slot(&mut probe, col, n) = x0;
        for row in 0..dim {
            let d = if row < angles {
                angle_step(up[row], down[row])
            } else {
                up[row] - down[row]
            };
            jac[(row, col)] = d / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Standard symplectic matrix `[[0, I], [-I, 0]]` of size `2n`.
pub fn omega_matrix(n: usize) -> nalgebra::DMatrix<f64> {
    let mut o = nalgebra::DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = 1.0;
        o[(n + i, i)] = -1.0;
    }
    o
}

/// `max |JᵀΩJ - Ω|` for the chart at `m`.
pub fn canonicity_defect(m: &ModalState, step: f64) -> Result<f64> {
    let j = chart_jacobian(m, step)?;
    let o = omega_matrix(m.len());
    let d = j.transpose() * &o * &j - o;
    Ok(d.amax())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_example() {
        // pair 2 is excited as well so the point lies in the regular set
        let m = ModalState::new(
            vec![1.0, 0.5, 0.0, 0.0, 1.0],
            vec![0.0; 5],
            true,
        )
        .unwrap();
        let c = action_angle(&m).unwrap();
        assert_eq!(c.a[0], 0.5);
        assert_eq!(c.b[0], 0.0);
        assert!((c.phi[0] - PI).abs() < 1e-15);
        assert_eq!(c.psi[0], 0.0);
        assert_eq!(c.phi_n, 0.0);
    }

    #[test]
    fn boundary_rejected() {
        let m = ModalState::new(vec![1.0, 0.0, 0.0, 0.0, 1.0], vec![0.0; 5], true).unwrap();
        match action_angle(&m) {
            Err(Error::NotRegular(msg)) => assert!(msg.contains("a_2")),
            other => panic!("{other:?}"),
        }
        let m = ModalState::new(vec![1.0, 1.0, 0.0, 0.0, 0.0], vec![0.0; 5], true).unwrap();
        assert!(matches!(action_angle(&m), Err(Error::NotRegular(msg)) if msg.contains("a_N")));
        assert!(action_angle(&ModalState::zeros(4, true)).is_err());
    }
}
