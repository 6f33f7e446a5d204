//! Truncated Laurent series in `s` with polynomial coefficients.

use std::fmt;

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};

/// `Σ_{i} coeffs[i] · s^{lead + i}`, known exactly for exponents below
/// `order`; everything from `s^order` on is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    lead: i32,
    coeffs: Vec<Polynomial>,
    order: i32,
}

impl LaurentSeries {
    /// Builds a series and normalizes it: trailing entries at or beyond
    /// `order` are dropped and leading zeros are absorbed into `lead`.
    pub fn new(lead: i32, coeffs: Vec<Polynomial>, order: i32) -> Result<Self> {
        if order < lead {
            return Err(Error::Truncation {
                requested: order,
                minimum: lead,
            });
        }
        let mut s = Self {
            lead,
            coeffs,
            order,
        };
        s.normalize();
        Ok(s)
    }

    pub fn zero(order: i32) -> Self {
        Self {
            lead: order,
            coeffs: Vec::new(),
            order,
        }
    }

    /// `c · s^e + O(s^order)`.
    pub fn monomial(c: Polynomial, e: i32, order: i32) -> Result<Self> {
        Self::new(e, vec![c], order)
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.lead).max(0) as usize;
        self.coeffs.truncate(keep);
        let zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..zeros);
        self.lead += zeros as i32;
        while self.coeffs.last().is_some_and(Polynomial::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lead = self.order;
        }
    }

    pub fn lead(&self) -> i32 {
        self.lead
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `s^e`; an error if `e` is beyond the truncation.
    pub fn coeff(&self, e: i32) -> Result<Polynomial> {
        if e >= self.order {
            return Err(Error::Truncation {
                requested: e,
                minimum: self.order,
            });
        }
        if e < self.lead {
            return Ok(Polynomial::zero());
        }
        Ok(self
            .coeffs
            .get((e - self.lead) as usize)
            .cloned()
            .unwrap_or_default())
    }

    /// Exponents with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = i32> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, _)| self.lead + i as i32)
    }

    pub fn truncate(&self, order: i32) -> Self {
        let mut s = self.clone();
        s.order = s.order.min(order);
        s.normalize();
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let lead = self.lead.min(other.lead).min(order);
        let coeffs = (lead..order)
            .map(|e| {
                let x = self.coeff(e).unwrap_or_default();
                let y = other.coeff(e).unwrap_or_default();
                &x + &y
            })
            .collect();
        Self::new(lead, coeffs, order).expect("lead <= order")
    }

    pub fn neg(&self) -> Self {
        self.scale(&Polynomial::int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Polynomial) -> Self {
        Self::new(
            self.lead,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.order,
        )
        .expect("unchanged orders")
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&Polynomial::constant(c.clone()))
    }

    /// Product; known through `min(o₁ + l₂, o₂ + l₁)`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.lead).min(other.order + self.lead);
        if self.is_zero() || other.is_zero() {
            return Self::zero(order);
        }
        let lead = self.lead + other.lead;
        let len = (order - lead).max(0) as usize;
        let mut coeffs = vec![Polynomial::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !y.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(x * y);
                }
            }
        }
        Self::new(lead, coeffs, order.max(lead)).expect("order >= lead")
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.clone();
        for _ in 1..e.max(1) {
            acc = acc.mul(self);
        }
        if e == 0 {
            return Self::monomial(Polynomial::one(), 0, self.order - self.lead)
                .expect("order >= 0");
        }
        acc
    }

    /// `d/ds`, mapping `c s^k ↦ k c s^{k-1}`.
    pub fn differentiate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&crate::algebra::poly::rat((self.lead + i as i32) as i64, 1)))
            .collect();
        Self::new(self.lead - 1, coeffs, self.order - 1).expect("shifted together")
    }

    /// Substitutes rational values for both symbols.
    pub fn eval_coeffs(&self, a: &Rational, g3: &Rational) -> Vec<(i32, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (self.lead + i as i32, c.eval(a, g3)))
            .collect()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.support().collect::<Vec<_>>() {
            let c = self.coeff(e).expect("inside truncation");
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let pow = match e {
                0 => String::new(),
                1 => "s".to_string(),
                _ => format!("s^{e}"),
            };
            match (c.len() > 1, pow.is_empty()) {
                (_, true) => write!(f, "({c})")?,
                (true, false) => write!(f, "({c})*{pow}")?,
                (false, false) if c == Polynomial::one() => f.write_str(&pow)?,
                (false, false) => write!(f, "({c})*{pow}")?,
            }
        }
        if !first {
            f.write_str(" + ")?;
        }
        write!(f, "O(s^{})", self.order)
    }
}
