//! Exact arithmetic over `ℚ[a, g3]`: polynomials, truncated Laurent series
//! and the series solutions around the pole of the synchronous solution.
//!
//! Nothing in this module uses floating point.

pub mod lame;
pub mod poly;
pub mod series;

pub use lame::{
    lame_fundamental, residue_certificate, u_series, verify_u_ode, ResidueCertificate,
};
pub use poly::{rat, Polynomial};
pub use series::LaurentSeries;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;
