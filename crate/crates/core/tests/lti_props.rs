mod common;

use common::*;
use passmat::lti::{self, Frequency};
use passmat::{CMatrix, Complex64, Matrix};
use rand::Rng;

fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn random_omega(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-2.0..3.0))
}

#[test]
fn conjugate_frequency_symmetry() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let sys = random_hurwitz(&mut rng, 3, 2);
        let w = random_omega(&mut rng);
        let g = lti::freq_response(&sys, Frequency::Finite(w)).unwrap();
        let g_neg = lti::freq_response(&sys, Frequency::Finite(-w)).unwrap();
        assert!(rel_err(&g_neg, &g.map(|z| z.conj())) <= 1e-12);
        let h = lti::ifpm_sample(&sys, Frequency::Finite(w)).unwrap().eigenvalues();
        let h_neg = lti::ifpm_sample(&sys, Frequency::Finite(-w)).unwrap().eigenvalues();
        for (a, b) in h.iter().zip(&h_neg) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn ofpm_is_ifpm_of_inverse() {
    let mut rng = rng(12);
    for _ in 0..30 {
        let mut sys = random_hurwitz(&mut rng, 2, 2);
        sys = passmat::StateSpace::new(sys.a().clone(), sys.b().clone(), sys.c().clone(), sys.d() + Matrix::identity(2, 2) * 2.0).unwrap();
        let inv = lti::inverse_system(&sys).unwrap();
        for w in [Frequency::Finite(0.0), Frequency::Finite(random_omega(&mut rng)), Frequency::Infinity] {
            let k = lti::ofpm_sample(&sys, w).unwrap();
            let h = lti::ifpm_sample(&inv, w).unwrap();
            assert!(rel_err(k.as_matrix(), h.as_matrix()) <= 1e-9);
        }
    }
}

#[test]
fn parallel_adds_transfer_functions() {
    let mut rng = rng(13);
    let s1 = random_hurwitz(&mut rng, 3, 2);
    let s2 = random_hurwitz(&mut rng, 2, 2);
    let par = lti::compose_parallel(&s1, &s2).unwrap();
    for _ in 0..20 {
        let w = Frequency::Finite(random_omega(&mut rng));
        let sum = lti::freq_response(&s1, w).unwrap() + lti::freq_response(&s2, w).unwrap();
        assert!(rel_err(&lti::freq_response(&par, w).unwrap(), &sum) <= 1e-8);
    }
}

#[test]
fn static_loop_matches_formula() {
    let mut rng = rng(14);
    let sys = plant();
    for (_, k) in gains() {
        let theta = rng.gen_range(0.0..1.0);
        let cl = lti::close_loop_static(&sys, &k, theta).unwrap();
        for _ in 0..20 {
            let w = Frequency::Finite(random_omega(&mut rng));
            let g = lti::freq_response(&sys, w).unwrap();
            let kc = k.map(|x| Complex64::new(theta * x, 0.0));
            let expected = (CMatrix::identity(2, 2) + &g * kc).try_inverse().unwrap() * &g;
            assert!(rel_err(&lti::freq_response(&cl, w).unwrap(), &expected) <= 1e-8);
        }
    }
}

#[test]
fn feedback_matches_formula() {
    let mut rng = rng(15);
    for _ in 0..20 {
        let s1 = random_hurwitz(&mut rng, 2, 2);
        let s2 = random_osp(&mut rng, 2, 2);
        let fb = lti::compose_feedback(&s1, &s2).unwrap();
        let w = Frequency::Finite(random_omega(&mut rng));
        let g1 = lti::freq_response(&s1, w).unwrap();
        let g2 = lti::freq_response(&s2, w).unwrap();
        // e1 = u1 − y2, e2 = u2 + y1; the u1→y1 channel is (I + G1G2)⁻¹G1
        let expected = (CMatrix::identity(2, 2) + &g1 * &g2).try_inverse().unwrap() * &g1;
        let got = lti::freq_response(&fb, w).unwrap().view((0, 0), (2, 2)).into_owned();
        assert!(rel_err(&got, &expected) <= 1e-8);
    }
}

#[test]
fn expm_matches_diagonalizable_case() {
    let a = Matrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -3.0]);
    let e = lti::expm(&(&a * 0.7));
    assert!((e[(0, 0)] - (-0.7f64).exp()).abs() < 1e-14);
    assert!((e[(1, 1)] - (-2.1f64).exp()).abs() < 1e-14);
}

#[test]
fn plant_properties() {
    let sys = plant();
    assert!(lti::is_hurwitz(&sys));
    assert!(lti::is_observable(&sys));
    assert!(lti::is_minimum_phase(&sys));
}
