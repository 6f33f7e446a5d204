//! KAM nondegeneracy Hessians of the quartic normal forms.
//!
//! For odd `N` the actions are ordered `(a_1, …, a_m, a_N)` with
//! `m = (N-1)/2`, followed by `(b_1, …, b_m)`; for the fixed-endpoint lattice
//! they are `(I_1, …, I_n)`.
//!
//! The printed `a`-block is kept verbatim next to the Hessian obtained by
//! differentiating the odd normal form. The two differ by an overall factor
//! of two, while the `b`-block agrees. The published determinant expression
//! equals `2^m · det(a-block) · det(b-block)` with the printed blocks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::normalform::forms;
use crate::normalform::hopf::pair_count;
use crate::phonon::FrequencySpectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct KamReport {
    /// Action Hessian as printed (odd case) or as built from `F_n`.
    pub hessian_a: DMatrix<f64>,
    /// `b`-block; empty for the fixed-endpoint lattice.
    pub hessian_b: DMatrix<f64>,
    pub det_a: f64,
    /// Product of the `b`-block diagonal; 1 when the block is empty.
    pub det_b: f64,
    /// Closed-form determinant expression, when one is published.
    pub closed_form_det: Option<f64>,
    /// Hessian obtained by differentiating the normal form itself.
    pub true_hessian: DMatrix<f64>,
    pub true_det: f64,
    /// Integer template `F_n` (fixed endpoints only) and its exact determinant.
    pub f_matrix: Option<DMatrix<i64>>,
    pub f_det: Option<i128>,
    pub nondegenerate: bool,
}

/// Relative threshold for calling a determinant nonzero, measured against
/// the Hadamard bound of the matrix.
pub const DET_REL_TOL: f64 = 1e-12;

fn hadamard(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}

fn nonzero_det(m: &DMatrix<f64>, det: f64) -> bool {
    m.nrows() == 0 || det.abs() > DET_REL_TOL * hadamard(m)
}

fn lambdas(w: &FrequencySpectrum) -> Vec<f64> {
    w.as_slice().iter().map(|x| 1.0 / x).collect()
}

/// Action indices of the odd case: `1..=m` then `N`.
fn odd_action_index(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=pair_count(n)).collect();
    v.push(n);
    v
}

/// `a`-block exactly as displayed for odd `N`.
pub fn printed_hessian_a(w: &FrequencySpectrum, beta: f64) -> Result<DMatrix<f64>> {
    let n = require_odd(w)?;
    let lam = lambdas(w);
    let idx = odd_action_index(n);
    let pre = 3.0 * beta / (2.0 * n as f64);
    let size = idx.len();
    Ok(DMatrix::from_fn(size, size, |r, c| {
        let (j, k) = (idx[r], idx[c]);
        let lj = lam[j - 1];
        let lk = lam[k - 1];
        let f = if r != c {
            1.0
        } else if j == n {
            0.5
        } else {
            0.75
        };
        pre * f * lj * lk
    }))
}

/// `b`-block as displayed: `-(3β/4N) diag(λ_j²)`.
pub fn printed_hessian_b(w: &FrequencySpectrum, beta: f64) -> Result<DMatrix<f64>> {
    let n = require_odd(w)?;
    let lam = lambdas(w);
    let m = pair_count(n);
    let pre = -3.0 * beta / (4.0 * n as f64);
    Ok(DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            pre * lam[r] * lam[r]
        } else {
            0.0
        }
    }))
}

/// Full Hessian of the odd normal form in `(a_1..a_m, a_N, b_1..b_m)`,
/// derived term by term; the mixed `a`/`b` block vanishes.
pub fn odd_form_hessian(w: &FrequencySpectrum, beta: f64) -> Result<DMatrix<f64>> {
    let n = require_odd(w)?;
    let lam = lambdas(w);
    let idx = odd_action_index(n);
    let m = pair_count(n);
    let pre = beta / (2.0 * n as f64);
    let mut h = DMatrix::zeros(2 * m + 1, 2 * m + 1);
    for (r, &j) in idx.iter().enumerate() {
        for (c, &k) in idx.iter().enumerate() {
            let f = if r != c {
                6.0
            } else if j == n {
                3.0
            } else {
                4.5
            };
            h[(r, c)] = pre * f * lam[j - 1] * lam[k - 1];
        }
    }
    for j in 1..=m {
        h[(m + j, m + j)] = -1.5 * pre * lam[j - 1] * lam[j - 1];
    }
    Ok(h)
}

/// `(3β/2N)^N (2N-1)/2^N Π_{j=1}^{N} λ_j²`.
pub fn closed_form_det(w: &FrequencySpectrum, beta: f64) -> Result<f64> {
    let n = require_odd(w)?;
    let pre = 3.0 * beta / (2.0 * n as f64);
    let prod: f64 = lambdas(w).iter().map(|l| l * l).product();
    Ok(pre.powi(n as i32) * (2.0 * n as f64 - 1.0) / 2f64.powi(n as i32) * prod)
}

fn require_odd(w: &FrequencySpectrum) -> Result<usize> {
    let n = w.len();
    if n % 2 == 0 {
        return Err(Error::Precondition(format!("N must be odd, got {n}")));
    }
    Ok(n)
}

pub fn kam_hessians_odd(w: &FrequencySpectrum, beta: f64) -> Result<KamReport> {
    let hessian_a = printed_hessian_a(w, beta)?;
    let hessian_b = printed_hessian_b(w, beta)?;
    let det_a = hessian_a.determinant();
    let det_b = hessian_b.diagonal().product();
    let true_hessian = odd_form_hessian(w, beta)?;
    let true_det = true_hessian.determinant();
    let nondegenerate = nonzero_det(&hessian_a, det_a) && nonzero_det(&hessian_b, det_b);
    Ok(KamReport {
        hessian_a,
        hessian_b,
        det_a,
        det_b,
        closed_form_det: Some(closed_form_det(w, beta)?),
        true_hessian,
        true_det,
        f_matrix: None,
        f_det: None,
        nondegenerate,
    })
}

/// Integer template: 3 on the diagonal, 4 elsewhere, 6 on the
/// anti-diagonal, and 4 along the middle row and column when `n` is odd.
pub fn f_matrix(n: usize) -> DMatrix<i64> {
    DMatrix::from_fn(n, n, |i, j| {
        let mid = n % 2 == 1 && (i == n / 2 || j == n / 2);
        if mid {
            4
        } else if i + j == n - 1 {
            6
        } else if i == j {
            3
        } else {
            4
        }
    })
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &DMatrix<i64>) -> i128 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix expected");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn kam_hessian_dirichlet(w: &FrequencySpectrum, beta: f64, n: usize) -> Result<KamReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    if w.len() != 2 * n + 2 {
        return Err(Error::DimensionMismatch {
            expected: 2 * n + 2,
            found: w.len(),
        });
    }
    let lam = lambdas(w);
    let f = f_matrix(n);
    let pre = beta / (2.0 * (2 * n + 2) as f64);
    let hessian_a =
        DMatrix::from_fn(n, n, |i, j| pre * 1.5 * f[(i, j)] as f64 * lam[i] * lam[j]);
    let det_a = hessian_a.determinant();
    let f_det = det_exact(&f);
    let true_hessian = forms::h4bar_dirichlet_hessian(n, w, beta)?;
    let true_det = true_hessian.determinant();
    Ok(KamReport {
        nondegenerate: f_det != 0 && nonzero_det(&hessian_a, det_a),
        hessian_a,
        hessian_b: DMatrix::zeros(0, 0),
        det_a,
        det_b: 1.0,
        closed_form_det: None,
        true_hessian,
        true_det,
        f_matrix: Some(f),
        f_det: Some(f_det),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonon::frequencies;

    #[test]
    fn n3_closed_form() {
        let w = frequencies(3, 1.0).unwrap();
        let r = kam_hessians_odd(&w, 1.0).unwrap();
        assert!((r.closed_form_det.unwrap() - 5.0 / 1024.0).abs() < 1e-15);
        assert!((r.hessian_b[(0, 0)] + 1.0 / 16.0).abs() < 1e-15);
        assert!((2.0 * r.det_a * r.det_b - 5.0 / 1024.0).abs() < 1e-15);
        assert!(r.nondegenerate);
    }

    #[test]
    fn f_templates() {
        assert_eq!(f_matrix(2), DMatrix::from_row_slice(2, 2, &[3, 6, 6, 3]));
        assert_eq!(
            f_matrix(3),
            DMatrix::from_row_slice(3, 3, &[3, 4, 6, 4, 4, 4, 6, 4, 3])
        );
        assert_eq!(det_exact(&f_matrix(2)), -27);
        assert_eq!(det_exact(&f_matrix(3)), -12);
        assert_eq!(det_exact(&f_matrix(1)), 4);
    }

    #[test]
    fn bareiss_matches_float() {
        for n in 1..=12 {
            let f = f_matrix(n);
            let fl = f.map(|x| x as f64).determinant();
            let ex = det_exact(&f) as f64;
            assert!((fl - ex).abs() <= 1e-9 * ex.abs().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn even_rejected() {
        assert!(kam_hessians_odd(&frequencies(4, 1.0).unwrap(), 1.0).is_err());
    }
}
