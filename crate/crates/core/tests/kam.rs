mod common;

use common::{random_scaled, rel_err, rng};
use kg_lattice::normalform::action_angle::canonicity_defect;
use kg_lattice::normalform::forms::h4bar_dirichlet_hessian;
use kg_lattice::normalform::kam::{
    closed_form_det, det_exact, f_matrix, odd_form_hessian, printed_hessian_a, printed_hessian_b,
};
use kg_lattice::normalform::{
    action_angle, h4bar_dirichlet, h4bar_odd, hopf_from_modal, kam_hessian_dirichlet,
    kam_hessians_odd, HopfCoordinates,
};
use kg_lattice::phonon::{frequencies, FrequencySpectrum, ModalState};
use kg_lattice::Error;
use nalgebra::DMatrix;

/// Central second differences of `f` at `x`.
fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> DMatrix<f64> {
    let d = x.len();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let at = |di: f64, dj: f64| {
                let mut y = x.to_vec();
                y[i] += di;
                y[j] += dj;
                f(&y)
            };
            out[(i, j)] = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        }
    }
    out
}

fn max_rel_entry(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(b.amax());
    (a - b).amax() / scale
}

/// Odd normal form as a function of `(a_1..a_m, a_N, b_1..b_m)`.
fn odd_form_in_actions(w: &FrequencySpectrum, beta: f64) -> impl Fn(&[f64]) -> f64 + '_ {
    let n = w.len();
    let m = (n - 1) / 2;
    move |x: &[f64]| {
        let mut h = HopfCoordinates::zeros(n);
        for j in 0..m {
            h.pairs[j].a = x[j];
            h.pairs[j].b = x[m + 1 + j];
        }
        h.a_n = x[m];
        h4bar_odd(&h, w, beta).unwrap()
    }
}

#[test]
fn n3_determinants() {
    let w = frequencies(3, 1.0).unwrap();
    let rep = kam_hessians_odd(&w, 1.0).unwrap();
    assert!((rep.closed_form_det.unwrap() - 5.0 / 1024.0).abs() <= 1e-12);
    assert!((rep.hessian_b[(0, 0)] + 1.0 / 16.0).abs() <= 1e-15);
    assert!((rep.det_b + 1.0 / 16.0).abs() <= 1e-15);
    assert!((rep.det_a + 5.0 / 128.0).abs() <= 1e-15);
    assert!(rep.nondegenerate);
    assert_eq!(rep.hessian_a.nrows(), 2);
}

#[test]
fn odd_hessian_matches_finite_differences() {
    for n in [3, 5, 7, 9] {
        for beta in [1.0, -0.7] {
            let w = frequencies(n, 1.0).unwrap();
            let f = odd_form_in_actions(&w, beta);
            let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.1 * i as f64).collect();
            let fd = fd_hessian(&f, &x, 1e-3);
            let exact = odd_form_hessian(&w, beta).unwrap();
            assert!(max_rel_entry(&fd, &exact) <= 1e-6, "N = {n}");
        }
    }
}

#[test]
fn printed_blocks_against_form_hessian() {
    for n in [3, 5, 7, 9, 11] {
        let w = frequencies(n, 1.0).unwrap();
        let m = (n - 1) / 2;
        let full = odd_form_hessian(&w, 1.0).unwrap();
        let a_block = full.view((0, 0), (m + 1, m + 1)).into_owned();
        let b_block = full.view((m + 1, m + 1), (m, m)).into_owned();
        assert!(max_rel_entry(&printed_hessian_b(&w, 1.0).unwrap(), &b_block) <= 1e-14);
        // the displayed action block is half the second derivative
        let printed = printed_hessian_a(&w, 1.0).unwrap();
        assert!(max_rel_entry(&(printed * 2.0), &a_block) <= 1e-14);
        assert!(full.view((0, m + 1), (m + 1, m)).amax() == 0.0);
    }
}

#[test]
fn closed_form_determinant_convention() {
    for n in [3, 5, 7] {
        let w = frequencies(n, 1.0).unwrap();
        let m = (n - 1) / 2;
        let rep = kam_hessians_odd(&w, 1.3).unwrap();
        let closed = closed_form_det(&w, 1.3).unwrap();
        let product = 2f64.powi(m as i32) * rep.det_a * rep.det_b;
        assert!(rel_err(closed, product) <= 1e-10, "N = {n}");
        assert!(rel_err(rep.true_det, 2.0 * closed) <= 1e-10, "N = {n}");
    }
}

#[test]
fn odd_hessians_reject_even_n() {
    let w = frequencies(4, 1.0).unwrap();
    assert!(matches!(kam_hessians_odd(&w, 1.0), Err(Error::Precondition(_))));
}

#[test]
fn f_templates() {
    assert_eq!(f_matrix(2), DMatrix::from_row_slice(2, 2, &[3, 6, 6, 3]));
    assert_eq!(f_matrix(3), DMatrix::from_row_slice(3, 3, &[3, 4, 6, 4, 4, 4, 6, 4, 3]));
    assert_eq!(det_exact(&f_matrix(2)), -27);
    assert_eq!(det_exact(&f_matrix(3)), -12);
    for n in 1..=12 {
        let f = f_matrix(n);
        assert_ne!(det_exact(&f), 0, "n = {n}");
        let float = f.map(|x| x as f64).determinant();
        assert!((float - det_exact(&f) as f64).abs() <= 1e-6 * float.abs().max(1.0));
    }
}

#[test]
fn dirichlet_example() {
    let w = frequencies(8, 1.0).unwrap();
    assert!((w.omega(2).powi(2) - 3.0).abs() < 1e-14);
    for beta in [1.0, 2.0] {
        let v = h4bar_dirichlet(&[0.0, 1.0, 0.0], &w, beta).unwrap();
        assert!((v - beta / 16.0).abs() < 1e-15);
    }
    assert_eq!(h4bar_dirichlet(&[0.0; 3], &w, 1.0).unwrap(), 0.0);
    assert!(h4bar_dirichlet(&[0.0; 2], &w, 1.0).is_err());
}

#[test]
fn dirichlet_hessian_matches_template() {
    for n in 1..=12 {
        let w = frequencies(2 * n + 2, 1.0).unwrap();
        let rep = kam_hessian_dirichlet(&w, 0.8, n).unwrap();
        let analytic = h4bar_dirichlet_hessian(n, &w, 0.8).unwrap();
        assert!(max_rel_entry(&rep.hessian_a, &analytic) <= 1e-10, "n = {n}");
        assert!(max_rel_entry(&rep.true_hessian, &analytic) <= 1e-14);
        assert!(rep.nondegenerate, "n = {n}");
        if n <= 6 && n >= 2 {
            let f = |x: &[f64]| h4bar_dirichlet(x, &w, 0.8).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.2 + 0.05 * i as f64).collect();
            let fd = fd_hessian(&f, &x, 1e-2);
            assert!(max_rel_entry(&fd, &rep.hessian_a) <= 1e-10, "n = {n}");
        }
    }
}

#[test]
fn action_angle_examples() {
    let m = ModalState::new(vec![1.0, 0.5, 0.0, 0.0, 1.0], vec![0.0; 5], true).unwrap();
    let ch = action_angle(&m).unwrap();
    assert_eq!((ch.a[0], ch.b[0]), (0.5, 0.0));
    assert!((ch.phi[0] - std::f64::consts::PI).abs() < 1e-15);
    assert!(ch.psi[0].abs() < 1e-15);
    assert_eq!(ch.phi_n, 0.0);

    // pair 2 unexcited is on the boundary of the regular set
    let m = ModalState::new(vec![1.0, 0.0, 0.0, 0.0, 1.0], vec![0.0; 5], true).unwrap();
    match action_angle(&m) {
        Err(Error::NotRegular(msg)) => assert!(msg.contains("a_2"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let m = ModalState::new(vec![1.0, 0.5, 0.0, 0.0, 0.0], vec![0.0; 5], true).unwrap();
    assert!(matches!(action_angle(&m), Err(Error::NotRegular(msg)) if msg.contains("a_N")));
    // |b_1| = a_1
    let m = ModalState::new(vec![1.0, 0.5, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0, 0.0], true)
        .unwrap();
    assert!(matches!(action_angle(&m), Err(Error::NotRegular(_))));
    assert!(action_angle(&ModalState::zeros(4, true)).is_err());
}

#[test]
fn action_angle_chart_is_canonical() {
    let mut r = rng(41);
    let mut tested = 0;
    while tested < 100 {
        let n = [3, 5, 7][tested % 3];
        let m = random_scaled(&mut r, n);
        let h = hopf_from_modal(&m).unwrap();
        let margin = h.pairs.iter().all(|p| p.a - p.b.abs() > 0.05) && h.a_n > 0.05;
        if !margin {
            continue;
        }
        let d = canonicity_defect(&m, 1e-5).unwrap();
        assert!(d <= 1e-8, "defect {d:e} at {m:?}");
        tested += 1;
    }
}
