//! Resonant normal forms of the lattice up to order four.
//!
//! Everything works on frequency-scaled phonon states. The 1:1 resonant
//! pairs `(k, N-k)` are described by Hopf variables, in terms of which the
//! quartic normal forms are quadratic polynomials.

pub mod action_angle;
pub mod bracket;
pub mod forms;
pub mod hopf;
pub mod kam;

pub use action_angle::{action_angle, ActionAngleChart};
pub use bracket::{poisson_bracket, FnObservable, Integral, NormalFormContext, Observable};
pub use forms::{
    h2_hopf, h4bar_dirichlet, h4bar_odd, h4bar_periodic, hbar_periodic, quartic_k,
    resonance_exponent, resonant_monomials,
};
pub use hopf::{hopf_from_modal, Gradient, HopfCoordinates, HopfPair, HopfPartials};
pub use kam::{kam_hessian_dirichlet, kam_hessians_odd, KamReport};
