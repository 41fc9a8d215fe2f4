//! Shared fixtures and test-side oracles for the integration suites.
#![allow(dead_code)]

use nalgebra::{dmatrix, DMatrix, DVector};
use passmat::{lti, Matrix, StateSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The 2-state, 2-port benchmark plant.
pub fn plant() -> StateSpace {
    StateSpace::new(
        dmatrix![-2.0, 3.0; -8.0, -10.0],
        dmatrix![-1.3, 3.4; 3.6, -1.7],
        dmatrix![8.0, 9.0; 10.0, 7.0],
        dmatrix![8.0, 8.0; 6.0, -8.0],
    )
    .unwrap()
}

/// Passivation gains `K₁`, `K₂`, `K₃`.
pub fn gains() -> [(&'static str, Matrix); 3] {
    [
        ("K1", dmatrix![0.987, 0.643; 0.643, 1.013]),
        ("K2", dmatrix![0.91, 0.149; 0.149, 1.09]),
        ("K3", Matrix::identity(2, 2)),
    ]
}

pub fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Matrix {
    let a = normal(rng, m, m);
    (&a + a.transpose()) * (0.5 * scale)
}

/// Symmetric with eigenvalues drawn from `[lo, hi]`.
pub fn random_spd(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Matrix {
    let q = normal(rng, m, m).qr().q();
    let d = DVector::from_fn(m, |_, _| rng.gen_range(lo..hi));
    &q * DMatrix::from_diagonal(&d) * q.transpose()
}

/// Random Hurwitz realization with spectral abscissa in `[−1.5, −0.2]`.
pub fn random_hurwitz(rng: &mut ChaCha8Rng, n: usize, m: usize) -> StateSpace {
    let mut a = normal(rng, n, n);
    let shift = lti::spectral_abscissa(&a) + rng.gen_range(0.2..1.5);
    for i in 0..n {
        a[(i, i)] -= shift;
    }
    StateSpace::new(a, normal(rng, n, m), normal(rng, m, n), normal(rng, m, m) * 0.5).unwrap()
}

/// Port-Hamiltonian `ẋ = (J − R)x + Bu`, `y = Bᵀx + (S + K)u`: passive with
/// storage `½|x|²` and strictly input passive through `S ≻ 0`.
pub fn random_passive(rng: &mut ChaCha8Rng, n: usize, m: usize) -> StateSpace {
    let j = {
        let x = normal(rng, n, n);
        &x - x.transpose()
    };
    let r = random_spd(rng, n, 0.2, 2.0);
    let b = normal(rng, n, m);
    let s = random_spd(rng, m, 0.1, 1.0);
    let k = {
        let x = normal(rng, m, m) * 0.3;
        &x - x.transpose()
    };
    StateSpace::new(j - r, b.clone(), b.transpose(), s + k).unwrap()
}

/// `H(I + H)⁻¹` for a passive `H`: output strictly passive with `Ξ = I`.
pub fn random_osp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> StateSpace {
    let h = random_passive(rng, n, m);
    let inv = (Matrix::identity(m, m) + h.d()).try_inverse().unwrap();
    let a = h.a() - h.b() * &inv * h.c();
    let b = h.b() * &inv;
    let c = &inv * h.c();
    let d = &inv * h.d();
    StateSpace::new(a, b, c, d).unwrap()
}

/// Exact zero-order-hold propagation of `ẋ = Ax + Bu` over one step.
pub struct Zoh {
    pub ad: Matrix,
    pub bd: Matrix,
}

impl Zoh {
    pub fn new(sys: &StateSpace, dt: f64) -> Self {
        let (n, m) = (sys.order(), sys.ports());
        let mut aug = Matrix::zeros(n + m, n + m);
        aug.view_mut((0, 0), (n, n)).copy_from(&(sys.a() * dt));
        aug.view_mut((0, n), (n, m)).copy_from(&(sys.b() * dt));
        let e = lti::expm(&aug);
        Self {
            ad: e.view((0, 0), (n, n)).into_owned(),
            bd: e.view((0, n), (n, m)).into_owned(),
        }
    }
}

/// Output and input energies `(∫|y|², ∫|u|²)` for a zero-initial-state
/// response to piecewise-constant `u`, integrating `|y|²` with Simpson's
/// rule on `sub` points per hold interval.
pub fn energies(sys: &StateSpace, inputs: &[DVector<f64>], dt: f64, sub: usize) -> (f64, f64) {
    let h = dt / sub as f64;
    let zoh = Zoh::new(sys, h);
    let mut x = DVector::zeros(sys.order());
    let (mut ey, mut eu) = (0.0, 0.0);
    for u in inputs {
        eu += u.norm_squared() * dt;
        let y = |x: &DVector<f64>| (sys.c() * x + sys.d() * u).norm_squared();
        let mut samples = vec![y(&x)];
        for _ in 0..sub {
            x = &zoh.ad * &x + &zoh.bd * u;
            samples.push(y(&x));
        }
        // composite Simpson, sub is even
        let mut s = samples[0] + samples[sub];
        for (i, v) in samples.iter().enumerate().take(sub).skip(1) {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * v;
        }
        ey += s * h / 3.0;
    }
    (ey, eu)
}

/// Quadratic storage along the free response `x(t) = e^{At}x₀`, sampled
/// every `dt` for `steps` steps.
pub fn free_storage(sys: &StateSpace, p: &Matrix, x0: &DVector<f64>, dt: f64, steps: usize) -> Vec<f64> {
    let ad = lti::expm(&(sys.a() * dt));
    let mut x = x0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push((x.transpose() * p * &x)[(0, 0)]);
        x = &ad * x;
    }
    out
}
