//! Hopf variables of the 1:1 resonant mode pairs `(k, N - k)`.

use crate::error::{Error, Result};
use crate::phonon::ModalState;

/// Quadratic invariants of one resonant pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HopfPair {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HopfPair {
    /// `a² - (b² + c² + d²)`, zero on every state.
    pub fn relation_defect(&self) -> f64 {
        self.a * self.a - (self.b * self.b + self.c * self.c + self.d * self.d)
    }

    fn scale(self, f: f64) -> Self {
        Self {
            a: self.a * f,
            b: self.b * f,
            c: self.c * f,
            d: self.d * f,
        }
    }
}

/// Hopf coordinates of a scaled modal state with `N` modes.
///
/// `pairs[k - 1]` holds `(a_k, b_k, c_k, d_k)` for `1 <= k < N/2`;
/// `a_half` is `a_{N/2}` and exists only for even `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfCoordinates {
    pub n: usize,
    pub pairs: Vec<HopfPair>,
    pub a_half: Option<f64>,
    pub a_n: f64,
}

/// Number of resonant pairs, i.e. of `k` with `1 <= k < N/2`.
pub fn pair_count(n: usize) -> usize {
    (n - 1) / 2
}

impl HopfCoordinates {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            pairs: vec![HopfPair::default(); pair_count(n)],
            a_half: (n % 2 == 0).then_some(0.0),
            a_n: 0.0,
        }
    }

    /// Pair `k`, `1 <= k < N/2`.
    pub fn pair(&self, k: usize) -> &HopfPair {
        &self.pairs[k - 1]
    }

    /// Multiplies every coordinate by `f` (the coordinates are quadratic, so
    /// this is the image of the phase-space dilation by `sqrt(f)`).
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            n: self.n,
            pairs: self.pairs.iter().map(|p| p.scale(f)).collect(),
            a_half: self.a_half.map(|x| x * f),
            a_n: self.a_n * f,
        }
    }

    /// Largest `|a_k² - b_k² - c_k² - d_k²|` over the pairs.
    pub fn max_relation_defect(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.relation_defect().abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn require_scaled(m: &ModalState) -> Result<()> {
    if !m.scaled {
        return Err(Error::Precondition(
            "Hopf variables need frequency-scaled phonons".into(),
        ));
    }
    if m.q.len() < 2 || m.p.len() != m.q.len() {
        return Err(Error::DimensionMismatch {
            expected: m.q.len().max(2),
            found: m.p.len(),
        });
    }
    Ok(())
}

pub(crate) fn pair_at(m: &ModalState, k: usize) -> HopfPair {
    let n = m.len();
    let (qk, pk) = (m.qk(k), m.pk(k));
    let (ql, pl) = (m.qk(n - k), m.pk(n - k));
    HopfPair {
        a: 0.5 * (qk * qk + pk * pk + ql * ql + pl * pl),
        b: qk * pl - ql * pk,
        c: 0.5 * (qk * qk + pk * pk - ql * ql - pl * pl),
        d: qk * ql + pk * pl,
    }
}

pub fn hopf_from_modal(m: &ModalState) -> Result<HopfCoordinates> {
    require_scaled(m)?;
    let n = m.len();
    let action = |k: usize| 0.5 * (m.qk(k).powi(2) + m.pk(k).powi(2));
    Ok(HopfCoordinates {
        n,
        pairs: (1..=pair_count(n)).map(|k| pair_at(m, k)).collect(),
        a_half: (n % 2 == 0).then(|| action(n / 2)),
        a_n: action(n),
    })
}

/// Partial derivatives of a function of the Hopf coordinates, laid out like
/// [`HopfCoordinates`].
#[derive(Debug, Clone, PartialEq)]
pub struct HopfPartials {
    pub pairs: Vec<HopfPair>,
    pub a_half: f64,
    pub a_n: f64,
}

impl HopfPartials {
    pub fn zeros(n: usize) -> Self {
        Self {
            pairs: vec![HopfPair::default(); pair_count(n)],
            a_half: 0.0,
            a_n: 0.0,
        }
    }

    /// Chain rule: gradient in `(Q, P)` of the function whose Hopf partials
    /// are `self`, at the scaled modal state `m`.
    pub fn pullback(&self, m: &ModalState) -> Gradient {
        let n = m.len();
        let mut g = Gradient::zeros(n);
        for (i, dp) in self.pairs.iter().enumerate() {
            let k = i + 1;
            let l = n - k;
            let (qk, pk, ql, pl) = (m.qk(k), m.pk(k), m.qk(l), m.pk(l));
            // a: (Qk, Pk, Ql, Pl); b: (Pl, -Ql, -Pk, Qk);
            // c: (Qk, Pk, -Ql, -Pl); d: (Ql, Pl, Qk, Pk)
            g.dq[k - 1] += dp.a * qk + dp.b * pl + dp.c * qk + dp.d * ql;
            g.dp[k - 1] += dp.a * pk - dp.b * ql + dp.c * pk + dp.d * pl;
            g.dq[l - 1] += dp.a * ql - dp.b * pk - dp.c * ql + dp.d * qk;
            g.dp[l - 1] += dp.a * pl + dp.b * qk - dp.c * pl + dp.d * pk;
        }
        if n % 2 == 0 {
            g.dq[n / 2 - 1] += self.a_half * m.qk(n / 2);
            g.dp[n / 2 - 1] += self.a_half * m.pk(n / 2);
        }
        g.dq[n - 1] += self.a_n * m.qk(n);
        g.dp[n - 1] += self.a_n * m.pk(n);
        g
    }
}

/// Gradient in phonon coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
}

impl Gradient {
    pub fn zeros(n: usize) -> Self {
        Self {
            dq: vec![0.0; n],
            dp: vec![0.0; n],
        }
    }

    pub fn max_abs_diff(&self, other: &Gradient) -> f64 {
        self.dq
            .iter()
            .zip(&other.dq)
            .chain(self.dp.iter().zip(&other.dp))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}
