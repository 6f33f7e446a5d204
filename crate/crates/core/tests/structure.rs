mod common;

use common::{random_state, rel_err, rng};
use kg_lattice::lattice::{forces, hamiltonian, quadratic_energy, LatticeParams, LatticeState};
use kg_lattice::phonon::{
    build_lattice_matrix, build_transform, frequencies, modal_quadratic_energy, scale_modal,
    unscale_modal, ModalState, PhononBasis,
};
use kg_lattice::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn state(q: &[f64]) -> LatticeState {
    LatticeState::new(q.to_vec(), vec![0.0; q.len()]).unwrap()
}

#[test]
fn energy_examples() {
    let p = LatticeParams::periodic(3, 1.0, 0.0).unwrap();
    assert_eq!(hamiltonian(&p, &state(&[1.0, 0.0, 0.0])).unwrap(), 1.5);
    assert_eq!(hamiltonian(&p, &LatticeState::zeros(3)).unwrap(), 0.0);
    let p4 = p.with_beta(4.0);
    assert_eq!(hamiltonian(&p4, &state(&[1.0, 0.0, 0.0])).unwrap(), 2.5);
    assert!(matches!(
        hamiltonian(&p, &LatticeState::zeros(4)),
        Err(Error::DimensionMismatch { expected: 3, found: 4 })
    ));
}

#[test]
fn force_examples() {
    let p = LatticeParams::periodic(3, 1.0, 0.0).unwrap();
    assert_eq!(forces(&p, &state(&[1.0, 0.0, 0.0])).unwrap(), vec![-3.0, 1.0, 1.0]);
    assert_eq!(forces(&p, &LatticeState::zeros(3)).unwrap(), vec![0.0; 3]);
    let p4 = p.with_beta(4.0);
    assert_eq!(forces(&p4, &state(&[1.0, 0.0, 0.0])).unwrap(), vec![-7.0, 1.0, 1.0]);
}

#[test]
fn forces_are_minus_energy_gradient() {
    let mut r = rng(11);
    for params in [
        LatticeParams::periodic(5, 1.3, 0.7).unwrap(),
        LatticeParams::dirichlet(4, 0.8, -0.4).unwrap(),
    ] {
        for _ in 0..20 {
            let s = random_state(&mut r, params.n_particles, 1.0);
            let f = forces(&params, &s).unwrap();
            for j in 0..s.len() {
                let h = 1e-5;
                let mut up = s.clone();
                up.q[j] += h;
                let mut dn = s.clone();
                dn.q[j] -= h;
                let fd = -(hamiltonian(&params, &up).unwrap() - hamiltonian(&params, &dn).unwrap())
                    / (2.0 * h);
                assert!((fd - f[j]).abs() <= 1e-6 * f[j].abs().max(1.0), "{fd} vs {}", f[j]);
            }
        }
    }
}

#[test]
fn frequency_examples() {
    let w = frequencies(3, 1.0).unwrap();
    for (x, y) in w.as_slice().iter().zip([2.0, 2.0, 1.0]) {
        assert!((x - y).abs() < 1e-15);
    }
    let w = frequencies(4, 1.0).unwrap();
    let want = [3f64.sqrt(), 5f64.sqrt(), 3f64.sqrt(), 1.0];
    for (x, y) in w.as_slice().iter().zip(want) {
        assert!((x - y).abs() < 1e-15);
    }
    let w = frequencies(2, 3.0).unwrap();
    assert!((w.omega(1) - 7f64.sqrt()).abs() < 1e-15);
    assert!((w.omega(2) - 3f64.sqrt()).abs() < 1e-15);
    assert!(frequencies(3, 0.0).is_err());
    assert!(frequencies(3, -1.0).is_err());
}

#[test]
fn frequency_bounds_and_pairing() {
    for n in 2..=40 {
        for a in [0.3, 1.0, 2.5] {
            let w = frequencies(n, a).unwrap();
            for k in 1..=n {
                let o = w.omega(k);
                assert!(o >= a.sqrt() - 1e-15 && o <= (a + 4.0).sqrt() + 1e-15);
                if k < n {
                    assert_eq!(o.to_bits(), w.omega(n - k).to_bits());
                }
            }
            assert_eq!(w.omega(n), a.sqrt());
        }
    }
}

#[test]
fn lattice_matrix() {
    let l = build_lattice_matrix(3, 1.0);
    let want = DMatrix::from_row_slice(3, 3, &[3.0, -1.0, -1.0, -1.0, 3.0, -1.0, -1.0, -1.0, 3.0]);
    assert_eq!(l, want);
    let mut ev: Vec<f64> = l.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (x, y) in ev.iter().zip([1.0, 4.0, 4.0]) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn transform_is_orthogonal_and_diagonalizes() {
    for n in 2..=12 {
        let m = build_transform(n).matrix().clone();
        let eye = DMatrix::<f64>::identity(n, n);
        assert!((m.transpose() * &m - &eye).amax() <= 1e-13, "N = {n}");
        let l = build_lattice_matrix(n, 1.0);
        let w = frequencies(n, 1.0).unwrap();
        let d = m.transpose() * l * &m;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { w.omega(i + 1).powi(2) } else { 0.0 };
                assert!((d[(i, j)] - want).abs() <= 1e-12, "N = {n} ({i},{j})");
            }
        }
    }
}

#[test]
fn transform_is_symplectic() {
    for n in 2..=12 {
        let m = build_transform(n).matrix().clone();
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        j.view_mut((0, 0), (n, n)).copy_from(&m.transpose());
        j.view_mut((n, n), (n, n)).copy_from(&m.transpose());
        let mut om = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            om[(i, n + i)] = 1.0;
            om[(n + i, i)] = -1.0;
        }
        assert!((j.transpose() * &om * &j - &om).amax() <= 1e-13);
    }
}

#[test]
fn transform_examples() {
    for n in 2..=9 {
        let b = PhononBasis::new(n, 1.0).unwrap();
        let m = b.to_modal(&state(&vec![0.7; n])).unwrap();
        for k in 1..n {
            assert!(m.qk(k).abs() < 1e-14);
        }
        assert!((m.qk(n) - (n as f64).sqrt() * 0.7).abs() < 1e-14);
    }
    let b = PhononBasis::new(4, 1.0).unwrap();
    let m = b.to_modal(&state(&[-1.0, 1.0, -1.0, 1.0])).unwrap();
    for k in [1, 3, 4] {
        assert!(m.qk(k).abs() < 1e-15);
    }
    assert!((m.qk(2) - 2.0).abs() < 1e-15);
}

#[test]
fn modal_round_trip() {
    let mut r = rng(3);
    for n in [2, 3, 4, 7, 12] {
        let b = PhononBasis::new(n, 1.0).unwrap();
        for _ in 0..100 {
            let s = random_state(&mut r, n, 1.0);
            let back = b.from_modal(&b.to_modal(&s).unwrap()).unwrap();
            assert!(back.max_abs_diff(&s) <= 1e-13);
            let m = b.to_scaled(&s).unwrap();
            let again = b.to_scaled(&b.from_modal(&m).unwrap()).unwrap();
            assert!(again.max_abs_diff(&m) <= 1e-13);
        }
    }
}

#[test]
fn scaling_examples() {
    let w = frequencies(3, 1.0).unwrap();
    let m = ModalState::new(vec![1.0, 0.0, 0.0], vec![0.0; 3], false).unwrap();
    let s = scale_modal(&m, &w).unwrap();
    // Q → √ω Q makes the oscillator energy ω(P² + Q²)/2
    assert!((s.q[0] - 2f64.sqrt()).abs() < 1e-15);
    assert!(s.scaled);
    let e_unscaled = modal_quadratic_energy(&m, &w).unwrap();
    let e_scaled = modal_quadratic_energy(&s, &w).unwrap();
    assert!((e_unscaled - 2.0).abs() < 1e-15 && (e_scaled - 2.0).abs() < 1e-15);
    assert!(matches!(scale_modal(&s, &w), Err(Error::Precondition(_))));
    assert!(matches!(unscale_modal(&m, &w), Err(Error::Precondition(_))));
    let z = scale_modal(&ModalState::zeros(3, false), &w).unwrap();
    assert_eq!(z, ModalState::zeros(3, true));
    assert!(unscale_modal(&s, &w).unwrap().max_abs_diff(&m) < 1e-15);
}

#[test]
fn quadratic_energy_forms_agree() {
    let mut r = rng(5);
    for n in 2..=12 {
        let params = LatticeParams::periodic(n, 1.0, 0.0).unwrap();
        let b = PhononBasis::new(n, 1.0).unwrap();
        for _ in 0..1000 {
            let s = random_state(&mut r, n, 1.0);
            let direct = hamiltonian(&params, &s).unwrap();
            let matrix = {
                let l = build_lattice_matrix(n, 1.0);
                let q = nalgebra::DVector::from_column_slice(&s.q);
                0.5 * q.dot(&(l * &q)) + 0.5 * s.p.iter().map(|x| x * x).sum::<f64>()
            };
            let m = b.to_modal(&s).unwrap();
            let diag = modal_quadratic_energy(&m, b.spectrum()).unwrap();
            let sc = modal_quadratic_energy(&b.to_scaled(&s).unwrap(), b.spectrum()).unwrap();
            for e in [matrix, diag, sc] {
                assert!(rel_err(direct, e) <= 1e-12, "N = {n}: {direct} vs {e}");
            }
            assert_eq!(quadratic_energy(&params.with_beta(3.0), &s).unwrap(), direct);
        }
    }
}

proptest! {
    #[test]
    fn modal_round_trip_prop(n in 2usize..16, seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = PhononBasis::new(n, 1.0).unwrap();
        let s = random_state(&mut r, n, 3.0);
        let back = b.from_modal(&b.to_scaled(&s).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-12);
    }

    #[test]
    fn dirichlet_modal_round_trip(n in 1usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let params = LatticeParams::dirichlet(n, 1.0, 1.0).unwrap();
        let s = random_state(&mut r, n, 1.0);
        let m = kg_lattice::phonon::to_modal(&params, &s).unwrap();
        prop_assert_eq!(m.len(), 2 * n + 2);
        let back = kg_lattice::phonon::from_modal(&params, &m).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-13);
    }
}
