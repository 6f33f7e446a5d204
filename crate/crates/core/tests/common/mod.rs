#![allow(dead_code)]

use kg_lattice::lattice::LatticeState;
use kg_lattice::phonon::ModalState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * r.random_range(-1.0..1.0)).collect()
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize, scale: f64) -> LatticeState {
    LatticeState::new(uniform_vec(r, n, scale), uniform_vec(r, n, scale)).unwrap()
}

pub fn random_scaled(r: &mut ChaCha8Rng, n: usize) -> ModalState {
    ModalState::new(uniform_vec(r, n, 1.0), uniform_vec(r, n, 1.0), true).unwrap()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
}

/// Relative error with an absolute floor, for values that may be zero.
pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}
