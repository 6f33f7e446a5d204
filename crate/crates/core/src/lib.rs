//! Klein–Gordon φ⁴ lattice laboratory.
//!
//! The crate covers the periodic and fixed-endpoint lattice with on-site
//! potential `V(x) = a x²/2 + β x⁴/4`:
//!
//! * [`lattice`]: physical states, Hamiltonian, forces, the dihedral
//!   symmetries `R`, `S` and the Dirichlet-to-periodic embedding.
//! * [`phonon`]: the real Fourier transform diagonalizing the quadratic part
//!   and the frequency scaling to `Σ ω_k (P_k² + Q_k²)/2`.
//! * [`normalform`]: Hopf variables, the quartic resonant normal forms and
//!   their integrals, Poisson brackets with analytic gradients, the
//!   action–angle chart and KAM Hessians.
//! * [`dynamics`]: symplectic integrators and drift experiments.
//! * [`resonance`]: extended-precision search for low-order frequency
//!   relations.
//! * [`algebra`]: exact Laurent-series kernel over `ℚ[a, g3]`.
//!
//! Data-parallel loops (drift sweeps, resonance enumeration, batch checks)
//! go through [`par`], which uses rayon when the `parallel` feature is on
//! and plain iterators otherwise.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod normalform;
pub mod par;
pub mod phonon;
pub mod resonance;

pub use error::{Error, Result};
