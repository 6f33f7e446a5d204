//! Low-order resonance relations among the phonon frequencies.
//!
//! Frequencies only depend on the class `{j, N-j}` of an index, so the
//! search runs over classes and expands each hit to all index tuples. A
//! relation is first screened in `f64` and then decided in software floating
//! point with [`DEFAULT_PRECISION_BITS`] bits. A relation whose two sides
//! contain the same classes is resonant by the pairing `ω_j = ω_{N-j}` alone;
//! such relations are *trivial* and their residual is exactly zero.
//!
//! A PASS is numerical evidence at the stated precision, not a proof.

use std::collections::BTreeSet;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

pub const DEFAULT_PRECISION_BITS: usize = 256;
/// Largest `N` searched without an explicit budget increase.
pub const DEFAULT_BUDGET: usize = 64;
/// Absolute `f64` screening threshold; far above double rounding error.
const PREFILTER: f64 = 1e-8;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `ω_k = 2 ω_k′` (order 3).
    TwoToOne,
    /// `ω_k = ω_k′ + ω_k″` (order 3).
    ThreeWave,
    /// `ω_k = 3 ω_k′`.
    Type1,
    /// `ω_k = ω_k′ + ω_k″ + ω_k‴`.
    Type2,
    /// `ω_k + ω_k′ = 2 ω_k″`.
    Type3,
    /// `ω_k + ω_k′ = ω_k″ + ω_k‴`.
    Type4,
}

impl Relation {
    pub fn order(self) -> u32 {
        match self {
            Relation::TwoToOne | Relation::ThreeWave => 3,
            _ => 4,
        }
    }

    /// Number of indices on the left-hand side.
    pub fn lhs_len(self) -> usize {
        match self {
            Relation::Type3 | Relation::Type4 => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::TwoToOne => "two-to-one",
            Relation::ThreeWave => "three-wave",
            Relation::Type1 => "type1",
            Relation::Type2 => "type2",
            Relation::Type3 => "type3",
            Relation::Type4 => "type4",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceTuple {
    /// Left-hand indices then right-hand indices, each side sorted.
    pub indices: Vec<usize>,
    pub relation: Relation,
    /// `|Σ_lhs ω - Σ_rhs ω|`.
    pub residual: f64,
    pub trivial: bool,
}

impl ResonanceTuple {
    pub fn lhs(&self) -> &[usize] {
        &self.indices[..self.relation.lhs_len()]
    }

    pub fn rhs(&self) -> &[usize] {
        &self.indices[self.relation.lhs_len()..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub max_order: u32,
    pub tol: f64,
    pub precision_bits: usize,
    pub budget: usize,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_order: 4,
            tol: 1e-20,
            precision_bits: DEFAULT_PRECISION_BITS,
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

/// `min(j, N - j)` with `N` (and `0`) mapped to `N`.
pub fn class_of(j: usize, n: usize) -> usize {
    let j = j % n;
    if j == 0 {
        n
    } else {
        j.min(n - j)
    }
}

fn members(c: usize, n: usize) -> Vec<usize> {
    if c == n || 2 * c == n {
        vec![c]
    } else {
        vec![c, n - c]
    }
}

fn classes(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=n / 2).collect();
    v.push(n);
    v
}

/// Trivial iff both sides carry the same multiset of frequency classes.
/// For index tuples of a type-4 relation this contains the family
/// `(k, k′, N-k, N-k′)` and all its permutations.
pub fn is_trivial_tuple(t: [usize; 4], n: usize) -> bool {
    let mut l = [class_of(t[0], n), class_of(t[1], n)];
    let mut r = [class_of(t[2], n), class_of(t[3], n)];
    l.sort_unstable();
    r.sort_unstable();
    l == r
}

/// Frequencies in extended precision, indexed by `j = 1..=N` at `j - 1`.
pub struct BigSpectrum {
    omega: Vec<BigFloat>,
    bits: usize,
}

impl BigSpectrum {
    pub fn new(n: usize, a: f64, bits: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        let mut cc = Consts::new()
            .map_err(|e| Error::Precondition(format!("extended precision unavailable: {e:?}")))?;
        let pi = cc.pi(bits, RM);
        let big_n = BigFloat::from_u64(n as u64, bits);
        let a_big = BigFloat::from_f64(a, bits);
        let four = BigFloat::from_u32(4, bits);
        let omega = (1..=n)
            .map(|j| {
                let r = j.min(n - j) as u64;
                let x = pi.mul(&BigFloat::from_u64(r, bits), bits, RM).div(&big_n, bits, RM);
                let s = x.sin(bits, RM, &mut cc);
                a_big
                    .add(&four.mul(&s.mul(&s, bits, RM), bits, RM), bits, RM)
                    .sqrt(bits, RM)
            })
            .collect();
        Ok(Self { omega, bits })
    }

    pub fn omega(&self, j: usize) -> &BigFloat {
        &self.omega[j - 1]
    }

    pub fn omega_f64(&self, j: usize) -> f64 {
        big_to_f64(self.omega(j))
    }

    /// `|Σ_lhs ω - Σ_rhs ω|` after cancelling common classes, so that
    /// class-balanced relations come out exactly zero.
    pub fn residual(&self, lhs: &[usize], rhs: &[usize]) -> BigFloat {
        let n = self.omega.len();
        let mut l: Vec<usize> = lhs.iter().map(|&j| class_of(j, n)).collect();
        let mut r: Vec<usize> = rhs.iter().map(|&j| class_of(j, n)).collect();
        l.retain(|c| match r.iter().position(|x| x == c) {
            Some(i) => {
                r.swap_remove(i);
                false
            }
            None => true,
        });
        let p = self.bits;
        let mut acc = BigFloat::from_u32(0, p);
        for c in l {
            acc = acc.add(&self.omega[c - 1], p, RM);
        }
        for c in r {
            acc = acc.sub(&self.omega[c - 1], p, RM);
        }
        acc.abs()
    }
}

/// Nearest `f64` (truncated to the top 64 mantissa bits first).
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let top = *words.last().expect("nonzero mantissa") as f64 / 2f64.powi(64);
            let v = top * 2f64.powi(e);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

fn check_search(n: usize, cfg: &SearchConfig) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
    }
    if n > cfg.budget {
        return Err(Error::Budget {
            n,
            limit: cfg.budget,
        });
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", cfg.tol)));
    }
    if !(3..=4).contains(&cfg.max_order) {
        return Err(Error::InvalidParameter(format!(
            "max_order must be 3 or 4, got {}",
            cfg.max_order
        )));
    }
    if cfg.precision_bits < 128 {
        return Err(Error::InvalidParameter(
            "need at least 128 bits (about 38 digits)".into(),
        ));
    }
    Ok(())
}

/// A relation between frequency classes, before expansion to indices.
#[derive(Debug, Clone)]
struct ClassHit {
    relation: Relation,
    lhs: Vec<usize>,
    rhs: Vec<usize>,
    trivial: bool,
}

fn classify(lhs: &[usize], rhs: &[usize]) -> (Relation, bool) {
    match (lhs.len(), rhs.len()) {
        (1, 2) if rhs[0] == rhs[1] => (Relation::TwoToOne, false),
        (1, 2) => (Relation::ThreeWave, false),
        (1, 3) if rhs[0] == rhs[1] && rhs[1] == rhs[2] => (Relation::Type1, false),
        (1, 3) => (Relation::Type2, false),
        (2, 2) if lhs == rhs => (Relation::Type4, true),
        (2, 2) if lhs[0] == lhs[1] || rhs[0] == rhs[1] => (Relation::Type3, false),
        _ => (Relation::Type4, false),
    }
}

fn class_hits_from(
    lead: usize,
    cls: &[usize],
    w64: &[f64],
    big: &BigSpectrum,
    tol: &BigFloat,
    max_order: u32,
) -> Vec<ClassHit> {
    let om = |c: usize| w64[c - 1];
    let mut out = Vec::new();
    let mut consider = |lhs: Vec<usize>, rhs: Vec<usize>| {
        let d: f64 = lhs.iter().map(|&c| om(c)).sum::<f64>() - rhs.iter().map(|&c| om(c)).sum::<f64>();
        if d.abs() > PREFILTER {
            return;
        }
        if big.residual(&lhs, &rhs).cmp(tol).is_some_and(|o| o < 0) {
            let (relation, trivial) = classify(&lhs, &rhs);
            out.push(ClassHit {
                relation,
                lhs,
                rhs,
                trivial,
            });
        }
    };
    let m = cls.len();
    // single on the left: ω_lead = sum of two (order 3) or three (order 4)
    for i in 0..m {
        for j in i..m {
            if max_order >= 3 {
                consider(vec![lead], vec![cls[i], cls[j]]);
            }
            if max_order >= 4 {
                for k in j..m {
                    consider(vec![lead], vec![cls[i], cls[j], cls[k]]);
                }
            }
        }
    }
    // pair against pair, lead is the smallest class on the left
    if max_order >= 4 {
        let li = cls.iter().position(|&c| c == lead).expect("lead is a class");
        for j in li..m {
            let lhs = [lead, cls[j]];
            for x in 0..m {
                for y in x..m {
                    let rhs = [cls[x], cls[y]];
                    if rhs < lhs {
                        continue;
                    }
                    consider(lhs.to_vec(), rhs.to_vec());
                }
            }
        }
    }
    out
}

fn expand(hit: &ClassHit, n: usize) -> Vec<Vec<usize>> {
    let slots: Vec<usize> = hit.lhs.iter().chain(&hit.rhs).copied().collect();
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for c in slots {
        acc = acc
            .into_iter()
            .flat_map(|v| {
                members(c, n).into_iter().map(move |j| {
                    let mut v = v.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    let ll = hit.lhs.len();
    let mut out = BTreeSet::new();
    for mut v in acc {
        v[..ll].sort_unstable();
        v[ll..].sort_unstable();
        if ll == 2 {
            let (l, r) = v.split_at(2);
            if l == r {
                // ω_k + ω_k′ = ω_k + ω_k′ is an identity, not a relation
                continue;
            }
            // type 3 keeps its doubled side on the right
            let doubled_left = class_of(l[0], n) == class_of(l[1], n);
            let doubled_right = class_of(r[0], n) == class_of(r[1], n);
            let swap = if hit.relation == Relation::Type3 {
                doubled_left && !doubled_right
            } else {
                r < l
            };
            if swap {
                v.rotate_left(2);
            }
        }
        out.insert(v);
    }
    out.into_iter().collect()
}

/// All relations of order 3 and 4 (up to `cfg.max_order`) with residual
/// below `cfg.tol`, as index tuples sorted by relation and indices.
pub fn find_resonances(n: usize, a: f64, cfg: &SearchConfig) -> Result<Vec<ResonanceTuple>> {
    check_search(n, cfg)?;
    let big = BigSpectrum::new(n, a, cfg.precision_bits)?;
    let w64: Vec<f64> = (1..=n).map(|j| big.omega_f64(j)).collect();
    let mut cc = Consts::new().map_err(|e| Error::Precondition(format!("{e:?}")))?;
    let tol = BigFloat::parse(
        &format!("{:e}", cfg.tol),
        astro_float::Radix::Dec,
        cfg.precision_bits,
        RM,
        &mut cc,
    );
    let cls = classes(n);
    let hits = par::flat_map_range(cfg.exec, cls.len(), |i| {
        class_hits_from(cls[i], &cls, &w64, &big, &tol, cfg.max_order)
    });
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for hit in &hits {
        for idx in expand(hit, n) {
            if !seen.insert((hit.relation, idx.clone())) {
                continue;
            }
            let (l, r) = idx.split_at(hit.relation.lhs_len());
            out.push(ResonanceTuple {
                residual: big_to_f64(&big.residual(l, r)),
                indices: idx,
                relation: hit.relation,
                trivial: hit.trivial,
            });
        }
    }
    out.sort_by(|x, y| (x.relation, &x.indices).cmp(&(y.relation, &y.indices)));
    Ok(out)
}

/// Residual of an index relation recomputed at `bits` of precision.
pub fn residual_at(n: usize, a: f64, lhs: &[usize], rhs: &[usize], bits: usize) -> Result<f64> {
    if lhs.iter().chain(rhs).any(|&j| j == 0 || j > n) {
        return Err(Error::InvalidParameter(format!("indices must lie in 1..={n}")));
    }
    Ok(big_to_f64(&BigSpectrum::new(n, a, bits)?.residual(lhs, rhs)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertionReport {
    pub n: usize,
    pub a: f64,
    pub tol: f64,
    pub precision_bits: usize,
    /// Every type-3/type-4 solution found (type 3 being the doubled case).
    pub type4: Vec<ResonanceTuple>,
    pub nontrivial: Vec<ResonanceTuple>,
    /// Lower-order (or single-vs-triple) relations also present.
    pub other: Vec<ResonanceTuple>,
    /// Type-4 tuples with `k + k′ + k″ + k‴ ≡ 0 (mod N)`.
    pub sum_filter_hits: usize,
    /// Whether each trivial class relation has an index representative
    /// passing the sum filter.
    pub sum_filter_covers_trivial: bool,
    pub pass: bool,
}

impl AssertionReport {
    pub fn note(&self) -> &'static str {
        "numerical evidence at the stated precision; not a proof"
    }
}

/// All fourth-order pair relations are of the trivial family.
pub fn verify_assertion(n: usize, a: f64, cfg: &SearchConfig) -> Result<AssertionReport> {
    let cfg = SearchConfig {
        max_order: 4,
        ..*cfg
    };
    let all = find_resonances(n, a, &cfg)?;
    let (type4, other): (Vec<_>, Vec<_>) = all
        .into_iter()
        .partition(|t| matches!(t.relation, Relation::Type3 | Relation::Type4));
    let nontrivial: Vec<ResonanceTuple> = type4.iter().filter(|t| !t.trivial).cloned().collect();
    let sum_ok = |t: &ResonanceTuple| t.indices.iter().sum::<usize>() % n == 0;
    let sum_filter_hits = type4.iter().filter(|t| sum_ok(t)).count();
    let key = |t: &ResonanceTuple| {
        let mut c: Vec<usize> = t.indices.iter().map(|&j| class_of(j, n)).collect();
        let (l, r) = c.split_at_mut(2);
        l.sort_unstable();
        r.sort_unstable();
        if r < l {
            c.rotate_left(2);
        }
        c
    };
    let trivial_classes: BTreeSet<Vec<usize>> =
        type4.iter().filter(|t| t.trivial).map(key).collect();
    let covered: BTreeSet<Vec<usize>> = type4
        .iter()
        .filter(|t| t.trivial && sum_ok(t))
        .map(key)
        .collect();
    Ok(AssertionReport {
        n,
        a,
        tol: cfg.tol,
        precision_bits: cfg.precision_bits,
        pass: nontrivial.is_empty(),
        type4,
        nontrivial,
        other,
        sum_filter_hits,
        sum_filter_covers_trivial: covered == trivial_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn trivial_examples() {
        assert!(is_trivial_tuple([1, 2, 4, 3], 5));
        assert!(!is_trivial_tuple([1, 1, 2, 3], 5));
        for t in [[1, 2, 4, 3], [1, 1, 2, 3], [2, 5, 3, 1]] {
            let m = t.map(|j| 5 - j % 5);
            assert_eq!(is_trivial_tuple(t, 5), is_trivial_tuple(m, 5));
        }
    }

    #[test]
    fn n5_pairing_tuple() {
        let r = find_resonances(5, 1.0, &cfg()).unwrap();
        let t = r.iter().find(|t| t.indices == [1, 2, 3, 4]).unwrap();
        assert_eq!(t.relation, Relation::Type4);
        assert_eq!(t.residual, 0.0);
        assert!(t.trivial);
    }

    #[test]
    fn n3_two_to_one() {
        let r = find_resonances(3, 1.0, &cfg()).unwrap();
        assert!(r
            .iter()
            .any(|t| t.relation == Relation::TwoToOne && t.indices == [1, 3, 3]));
    }

    #[test]
    fn n2_incommensurable() {
        let rep = verify_assertion(2, 1.0, &cfg()).unwrap();
        assert!(rep.pass);
        assert!(rep.other.is_empty());
    }

    #[test]
    fn budget_refusal() {
        match find_resonances(65, 1.0, &cfg()) {
            Err(Error::Budget { n: 65, limit: 64 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn special_values() {
        let b = BigSpectrum::new(4, 1.0, 256).unwrap();
        assert_eq!(b.omega_f64(4), 1.0);
        assert!((b.omega_f64(2) - 5f64.sqrt()).abs() < 1e-15);
        let b = BigSpectrum::new(3, 1.0, 256).unwrap();
        let two = BigFloat::from_u32(2, 256);
        assert!(big_to_f64(&b.omega(1).sub(&two, 256, RM)).abs() < 1e-70);
    }
}
