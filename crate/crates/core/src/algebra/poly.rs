//! Sparse polynomials in `a` and `g3` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;
use crate::error::{Error, Result};

/// `Σ c_{ij} a^i g3^j`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n, 1))
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// `c · a^i · g3^j`.
    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Self { terms }
    }

    pub fn a() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn g3() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_a(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_g3(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, key: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn eval(&self, a: &Rational, g3: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, ((i, j), c)| {
            acc + c * pow(a, *i) * pow(g3, *j)
        })
    }

    /// Substitutes a rational value for `g3`.
    pub fn subs_g3(&self, g3: &Rational) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in &self.terms {
            out.add_term((*i, 0), c * pow(g3, *j));
        }
        out
    }

    /// `Some(q)` when `self = q · other` for a rational constant `q`.
    pub fn ratio_to(&self, other: &Polynomial) -> Option<Rational> {
        if other.is_zero() {
            return self.is_zero().then(Rational::zero);
        }
        let (k, c) = other.terms.iter().next().expect("nonzero");
        let q = self.coeff(k.0, k.1) / c;
        (*self == other.scale(&q)).then_some(q)
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: terms in decreasing lexicographic order of
/// `(deg_a, deg_g3)`, e.g. `1/252*a^3 + 3/7*a*g3 - 16/63`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, ((i, j), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            let var = |name: &str, e: u32| match e {
                0 => None,
                1 => Some(name.to_string()),
                _ => Some(format!("{name}^{e}")),
            };
            factors.extend(var("a", *i));
            factors.extend(var("g3", *j));
            if factors.is_empty() || !mag.is_one() {
                factors.insert(0, fmt_rational(&mag));
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Accepts the canonical form and, more loosely, any sum of terms
    /// `coef*a^i*g3^j` with factors in any order.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty polynomial".into()));
        }
        let mut out = Polynomial::zero();
        // split into signed terms; a term may carry several leading signs
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for ch in s.chars() {
            match ch {
                '+' | '-' if cur.trim().is_empty() => neg ^= ch == '-',
                '+' | '-' => {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = ch == '-';
                }
                c => cur.push(c),
            }
        }
        if cur.trim().is_empty() {
            return Err(Error::InvalidParameter(format!("dangling sign in {s:?}")));
        }
        terms.push((neg, cur));
        for (neg, t) in terms {
            let mut c = Rational::one();
            let (mut i, mut j) = (0u32, 0u32);
            let mut have_coef = false;
            for fac in t.split('*').map(str::trim) {
                let (base, exp) = match fac.split_once('^') {
                    Some((b, e)) => (
                        b.trim(),
                        e.trim().parse::<u32>().map_err(|_| {
                            Error::InvalidParameter(format!("bad exponent in {fac:?}"))
                        })?,
                    ),
                    None => (fac, 1),
                };
                match base {
                    "a" => i += exp,
                    "g3" => j += exp,
                    _ if !have_coef && fac == base => {
                        c = parse_rational(base)?;
                        have_coef = true;
                    }
                    _ => {
                        return Err(Error::InvalidParameter(format!("unknown factor {fac:?}")))
                    }
                }
            }
            if neg {
                c = -c;
            }
            out.add_term((i, j), c);
        }
        Ok(out)
    }
}
