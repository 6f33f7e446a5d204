//! Pole expansion of the synchronous solution, the Lamé fundamental system
//! around the pole, and the logarithmic residue of the second variational
//! equation.
//!
//! The pole series solves `u'' = -A_p u + 2u³` with `u = 1/s + …`. The
//! expansion this module reproduces has `A_p = a + 4`
//! ([`pole_coefficient`]); the plain `A_p = a` is available through
//! [`u_series_with`]. In both cases the recursion factor `k(k-1) - 6`
//! vanishes at `k = 3`, where the coefficient stays free as `g3`.
//!
//! Lamé channels solve `y'' + (C - 6u²) y = 0`; the indicial roots are `-2`
//! and `3`, and the free coefficient of `y1` at `s³` is set to zero after
//! the obstruction there has been checked to vanish.

use num_traits::{One, Signed, Zero};

use crate::algebra::poly::rat;
use crate::algebra::{LaurentSeries, Polynomial, Rational};
use crate::error::{Error, Result};

/// Smallest truncation order accepted by [`u_series`].
pub const MIN_U_ORDER: i32 = 6;
/// Smallest truncation order at which [`residue_with`] can extract the
/// residue: `u·y1³` needs `u` through `s⁵` and `y1` through `s⁴`.
pub const MIN_RESIDUE_ORDER: i32 = 6;
/// Smallest order accepted by [`residue_certificate`], leaving margin
/// beyond [`MIN_RESIDUE_ORDER`].
pub const MIN_CERTIFICATE_ORDER: i32 = 10;
pub const DEFAULT_ORDER: i32 = 12;

/// `A_p = a + 4`.
pub fn pole_coefficient() -> Polynomial {
    &Polynomial::a() + &Polynomial::int(4)
}

/// Coefficient of `s^e` in `u'' + A_p u - 2u³`.
pub fn ode_residual(u: &LaurentSeries, ap: &Polynomial) -> LaurentSeries {
    let u3 = u.pow(3).scale(&Polynomial::int(-2));
    u.differentiate().differentiate().add(&u.scale(ap)).add(&u3)
}

fn indicial(k: i32) -> Rational {
    rat((k * (k - 1) - 6) as i64, 1)
}

/// Solves `L(y) = 0` term by term starting from `lead`, where `L(y)` at
/// exponent `k - 2` is `(k(k-1) - 6) y_k + (terms in lower y)`. At `k = 3`
/// the coefficient is set to `free` after checking the obstruction.
fn recurse(
    lead: i32,
    lead_coeff: Polynomial,
    order: i32,
    free: Polynomial,
    residual: impl Fn(&LaurentSeries) -> LaurentSeries,
) -> Result<LaurentSeries> {
    let mut coeffs = vec![lead_coeff];
    for k in lead + 1..order {
        // y with y_k = 0 and known through s^k
        let trial = LaurentSeries::new(lead, coeffs.clone(), k + 1)?;
        let r = residual(&trial).coeff(k - 2)?;
        let f = indicial(k);
        let yk = if f.is_zero() {
            if !r.is_zero() {
                return Err(Error::Obstruction {
                    exponent: k - 2,
                    value: r.to_string(),
                });
            }
            free.clone()
        } else {
            r.scale(&(-Rational::one() / f))
        };
        coeffs.push(yk);
    }
    LaurentSeries::new(lead, coeffs, order)
}

/// Pole series of `u'' = -A_p u + 2u³` through `s^{order-1}`.
pub fn u_series_with(ap: &Polynomial, order: i32) -> Result<LaurentSeries> {
    if order < MIN_U_ORDER {
        return Err(Error::Truncation {
            requested: order,
            minimum: MIN_U_ORDER,
        });
    }
    recurse(-1, Polynomial::one(), order, Polynomial::g3(), |u| {
        ode_residual(u, ap)
    })
}

/// [`u_series_with`] at `A_p = a + 4`:
/// `u = 1/s + (4+a)/6·s + g3·s³ + γ₅·s⁵ + …`.
pub fn u_series(order: i32) -> Result<LaurentSeries> {
    u_series_with(&pole_coefficient(), order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeCheck {
    pub order: i32,
    /// `u'' + A_p u - 2u³` through its truncation order.
    pub residual: LaurentSeries,
}

/// Substitutes the pole series back into its ODE; any nonzero coefficient
/// is reported with its exponent.
pub fn verify_u_ode(order: i32) -> Result<OdeCheck> {
    let u = u_series(order)?;
    check_residual(&u, &pole_coefficient(), order)
}

pub fn check_residual(u: &LaurentSeries, ap: &Polynomial, order: i32) -> Result<OdeCheck> {
    let residual = ode_residual(u, ap);
    if let Some(e) = residual.support().next() {
        return Err(Error::Obstruction {
            exponent: e,
            value: residual.coeff(e)?.to_string(),
        });
    }
    Ok(OdeCheck { order, residual })
}

/// `y'' + (C - 6u²) y`.
pub fn lame_residual(y: &LaurentSeries, u: &LaurentSeries, channel: &Polynomial) -> LaurentSeries {
    let pot = u.pow(2).scale(&Polynomial::int(-6));
    let pot = pot.add(&LaurentSeries::monomial(channel.clone(), 0, pot.order()).expect("order"));
    y.differentiate().differentiate().add(&pot.mul(y))
}

/// Channel constant `a + 4 sin²(πj/N)` is not rational in general; the
/// certificate uses the uniform channel `C = a`.
pub fn uniform_channel() -> Polynomial {
    Polynomial::a()
}

/// Fundamental system `(y1, y2)` with `y1 = s⁻² + …`, `y2 = s³/5 + …` and
/// `y1 y2' - y1' y2 = 1`, around the pole series `u`.
pub fn lame_fundamental_with(
    u: &LaurentSeries,
    channel: &Polynomial,
    order: i32,
) -> Result<(LaurentSeries, LaurentSeries)> {
    if order < 4 {
        return Err(Error::Truncation {
            requested: order,
            minimum: 4,
        });
    }
    // y_k pairs with the s^k coefficient of u², which needs u through s^{k+1}
    if u.order() < order + 1 {
        return Err(Error::Truncation {
            requested: u.order(),
            minimum: order + 1,
        });
    }
    let res = |y: &LaurentSeries| lame_residual(y, u, channel);
    let y1 = recurse(-2, Polynomial::one(), order, Polynomial::zero(), res)?;
    let y2 = recurse(3, Polynomial::constant(rat(1, 5)), order, Polynomial::zero(), res)?;
    Ok((y1, y2))
}

/// [`lame_fundamental_with`] around [`u_series`].
pub fn lame_fundamental(channel: &Polynomial, order: i32) -> Result<(LaurentSeries, LaurentSeries)> {
    let u = u_series((order + 1).max(MIN_U_ORDER))?;
    lame_fundamental_with(&u, channel, order)
}

pub fn wronskian(y1: &LaurentSeries, y2: &LaurentSeries) -> LaurentSeries {
    y1.mul(&y2.differentiate()).sub(&y1.differentiate().mul(y2))
}

/// The displayed residue bracket
/// `a³/252 + a²/21 + 4a/21 + 3a·g3/7 + (73g3 + 16)/63`.
pub fn printed_bracket() -> Polynomial {
    "1/252*a^3 + 1/21*a^2 + 3/7*a*g3 + 4/21*a + 73/63*g3 + 16/63"
        .parse()
        .expect("valid literal")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueCertificate {
    pub order: i32,
    /// Coefficient of `s⁻¹` in `-u·y1³`.
    pub residue: Polynomial,
    pub bracket: Polynomial,
    /// `q` with `residue = q · bracket`, if such a constant exists.
    pub factor: Option<Rational>,
    /// `residue` at `g3 = 1`.
    pub residue_g3_one: Polynomial,
    /// All coefficients of `residue_g3_one` are positive, so it cannot
    /// vanish for `a > 0`.
    pub positive_for_positive_a: bool,
}

impl ResidueCertificate {
    /// Nonvanishing residue: the second variational equation has a
    /// logarithmic term.
    pub fn certifies(&self) -> bool {
        !self.residue.is_zero()
    }
}

/// Residue of `-u·y1³` at the pole for pole coefficient `ap` and channel
/// constant `channel`.
pub fn residue_with(ap: &Polynomial, channel: &Polynomial, order: i32) -> Result<Polynomial> {
    if order < MIN_RESIDUE_ORDER {
        return Err(Error::Truncation {
            requested: order,
            minimum: MIN_RESIDUE_ORDER,
        });
    }
    let u = u_series_with(ap, (order + 1).max(MIN_U_ORDER))?;
    let (y1, _) = lame_fundamental_with(&u, channel, order)?;
    let integrand = u.mul(&y1.pow(3)).neg();
    integrand.coeff(-1)
}

pub fn residue_certificate(order: i32) -> Result<ResidueCertificate> {
    if order < MIN_CERTIFICATE_ORDER {
        return Err(Error::Truncation {
            requested: order,
            minimum: MIN_CERTIFICATE_ORDER,
        });
    }
    let residue = residue_with(&pole_coefficient(), &uniform_channel(), order)?;
    let bracket = printed_bracket();
    let residue_g3_one = residue.subs_g3(&Rational::one());
    let positive_for_positive_a =
        !residue_g3_one.is_zero() && residue_g3_one.terms().all(|(_, c)| c.is_positive());
    Ok(ResidueCertificate {
        order,
        factor: residue.ratio_to(&bracket),
        residue,
        bracket,
        residue_g3_one,
        positive_for_positive_a,
    })
}
