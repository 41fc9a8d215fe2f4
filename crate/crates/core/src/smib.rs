//! Third-order single-machine infinite-bus generator with static output
//! feedback `u = u₀ − K(y − y₀)`.
//!
//! State `(δ, ω, E′_q)`, inputs `(P_m, E_f)`, outputs `y = (ω₀ω, E′_q/(x_d − x′_d))`.
//! The terminal connects straight to the infinite bus (no line reactance),
//! so `U_d = U sin δ` and `U_q = U cos δ`.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::interconnect;
use crate::lti::{self, StateSpace};
use crate::par::Exec;
use crate::passivity::{PassivityCertificate, Provenance};
use crate::symmat::SymmetricMatrix;
use crate::{Error, Matrix, Result};

/// Closed-loop eigenvalues must have real part below `−SMALL_SIGNAL_TOL`.
pub const SMALL_SIGNAL_TOL: f64 = 1e-9;
/// Norm beyond which a simulation is declared diverged.
pub const BLOWUP_NORM: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmibParams {
    pub omega0: f64,
    #[serde(rename = "Tj")]
    pub tj: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "Td0p")]
    pub td0p: f64,
    pub xd: f64,
    pub xq: f64,
    pub xdp: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "Pm0")]
    pub pm0: f64,
    #[serde(rename = "Ef0")]
    pub ef0: f64,
}

impl Default for SmibParams {
    /// The benchmark operating point: 50 Hz, `P_m = 0.8`, `E_f = 1.2`.
    fn default() -> Self {
        Self {
            omega0: 2.0 * std::f64::consts::PI * 50.0,
            tj: 15.0,
            d: 8.0,
            td0p: 5.0,
            xd: 0.5,
            xq: 0.5,
            xdp: 0.35,
            u: 1.0,
            pm0: 0.8,
            ef0: 1.2,
        }
    }
}

impl SmibParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.omega0, self.tj, self.d, self.td0p, self.xd, self.xq, self.xdp, self.u, self.pm0, self.ef0];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite SMIB parameter".into()));
        }
        if !(self.xd > self.xdp && self.xdp > 0.0 && self.xq > 0.0) {
            return Err(Error::InvalidInput("need xd > xdp > 0 and xq > 0".into()));
        }
        if !(self.tj > 0.0 && self.td0p > 0.0 && self.omega0 > 0.0 && self.u > 0.0) {
            return Err(Error::InvalidInput("need Tj, Td0p, omega0, U > 0".into()));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    /// `x_d − x′_d`.
    fn xs(&self) -> f64 {
        self.xd - self.xdp
    }

    fn u0(&self) -> Vector2<f64> {
        Vector2::new(self.pm0, self.ef0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmibState {
    pub delta: f64,
    pub omega: f64,
    pub eqp: f64,
}

impl SmibState {
    pub fn new(delta: f64, omega: f64, eqp: f64) -> Self {
        Self { delta, omega, eqp }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.delta, self.omega, self.eqp)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicVars {
    pub ud: f64,
    pub uq: f64,
    pub id: f64,
    pub iq: f64,
    pub pe: f64,
}

pub fn algebraic_vars(s: &SmibState, p: &SmibParams) -> AlgebraicVars {
    let ud = p.u * s.delta.sin();
    let uq = p.u * s.delta.cos();
    let id = (s.eqp - uq) / p.xdp;
    let iq = ud / p.xq;
    AlgebraicVars {
        ud,
        uq,
        id,
        iq,
        pe: ud * id + uq * iq,
    }
}

/// `E′_q U sin δ / x′_d + U²(x′_d − x_q) sin 2δ / (2x′_d x_q)`.
pub fn electrical_power(delta: f64, eqp: f64, p: &SmibParams) -> f64 {
    eqp * p.u * delta.sin() / p.xdp + p.u * p.u * (p.xdp - p.xq) * (2.0 * delta).sin() / (2.0 * p.xdp * p.xq)
}

/// State derivative under inputs `u = (P_m, E_f)`.
pub fn dynamics(s: &SmibState, p: &SmibParams, u: Vector2<f64>) -> Vector3<f64> {
    let alg = algebraic_vars(s, p);
    Vector3::new(
        p.omega0 * s.omega,
        (u[0] - alg.pe - p.d * s.omega) / p.tj,
        (u[1] - s.eqp - p.xs() * alg.id) / p.td0p,
    )
}

pub fn output(s: &SmibState, p: &SmibParams) -> Vector2<f64> {
    Vector2::new(p.omega0 * s.omega, s.eqp / p.xs())
}

/// Potential `−E′_qU cos δ/x′_d − U²(x′_d − x_q) cos 2δ/(4x′_d x_q) + E′_q²/(2(x_d − x′_d))`.
fn potential(delta: f64, eqp: f64, p: &SmibParams) -> f64 {
    -eqp * p.u * delta.cos() / p.xdp - p.u * p.u * (p.xdp - p.xq) * (2.0 * delta).cos() / (4.0 * p.xdp * p.xq)
        + eqp * eqp / (2.0 * p.xs())
}

fn potential_grad(delta: f64, eqp: f64, p: &SmibParams) -> Vector2<f64> {
    Vector2::new(electrical_power(delta, eqp, p), -p.u * delta.cos() / p.xdp + eqp / p.xs())
}

/// Energy function shifted to the equilibrium: the potential minus its
/// value and first-order Taylor term at `x*`, plus `½T_jω₀ω²`. It vanishes
/// with zero gradient at `x*`.
#[derive(Debug, Clone, Copy)]
pub struct Hamiltonian {
    params: SmibParams,
    eq: SmibState,
    v0: f64,
    grad0: Vector2<f64>,
}

impl Hamiltonian {
    pub fn new(p: &SmibParams) -> Result<Self> {
        let eq = equilibrium(p)?;
        Ok(Self {
            params: *p,
            eq,
            v0: potential(eq.delta, eq.eqp, p),
            grad0: potential_grad(eq.delta, eq.eqp, p),
        })
    }

    pub fn eval(&self, s: &SmibState) -> f64 {
        let p = &self.params;
        let dx = Vector2::new(s.delta - self.eq.delta, s.eqp - self.eq.eqp);
        0.5 * p.tj * p.omega0 * s.omega * s.omega + potential(s.delta, s.eqp, p) - self.v0 - self.grad0.dot(&dx)
    }
}

pub fn hamiltonian(s: &SmibState, p: &SmibParams) -> Result<f64> {
    Ok(Hamiltonian::new(p)?.eval(s))
}

/// Generator OFPM `Ξ = diag(D/ω₀, T′_d0(x_d − x′_d))` with `Φ = 0`.
pub fn generator_ofpm(p: &SmibParams) -> PassivityCertificate {
    PassivityCertificate::ofp(SymmetricMatrix::diag(&[p.d / p.omega0, p.td0p * p.xs()]), Provenance::Declared)
}

/// `E′_q` consistent with `Ė′_q = 0` at rotor angle `δ` and `E_f = E_f0`.
fn eqp_at(delta: f64, p: &SmibParams) -> f64 {
    (p.ef0 * p.xdp + p.xs() * p.u * delta.cos()) / p.xd
}

/// Operating point for `u₀ = (P_m0, E_f0)`: `E′_q` is eliminated
/// algebraically and the rotor angle found by safeguarded Newton on
/// `P_e(δ, E′_q(δ)) = P_m0` over `[0, π/2]`.
pub fn equilibrium(p: &SmibParams) -> Result<SmibState> {
    p.validate()?;
    let g = |d: f64| electrical_power(d, eqp_at(d, p), p) - p.pm0;
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(SmibState::new(0.0, 0.0, eqp_at(0.0, p)));
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoConvergence("no equilibrium with δ in (0, π/2)".into()));
    }
    let mut d = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gd = g(d);
        if gd.abs() < 1e-13 {
            return Ok(SmibState::new(d, 0.0, eqp_at(d, p)));
        }
        if gd.signum() == glo.signum() {
            lo = d;
        } else {
            hi = d;
        }
        let h = 1e-7;
        let slope = (g(d + h) - g(d - h)) / (2.0 * h);
        let newton = d - gd / slope;
        d = if slope != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Err(Error::NoConvergence("equilibrium Newton iteration".into()))
}

/// Open-loop Jacobians `(A, B)` of the dynamics and the output map `C` at `x`.
fn jacobians(s: &SmibState, p: &SmibParams) -> (Matrix3<f64>, nalgebra::Matrix3x2<f64>, nalgebra::Matrix2x3<f64>) {
    let (sd, cd) = s.delta.sin_cos();
    let dpe_dd = s.eqp * p.u * cd / p.xdp + p.u * p.u * (p.xdp - p.xq) * (2.0 * s.delta).cos() / (p.xdp * p.xq);
    let dpe_de = p.u * sd / p.xdp;
    let did_dd = p.u * sd / p.xdp;
    let did_de = 1.0 / p.xdp;
    #[rustfmt::skip]
    let a = Matrix3::new(
        0.0, p.omega0, 0.0,
        -dpe_dd / p.tj, -p.d / p.tj, -dpe_de / p.tj,
        -p.xs() * did_dd / p.td0p, 0.0, (-1.0 - p.xs() * did_de) / p.td0p,
    );
    let b = nalgebra::Matrix3x2::new(0.0, 0.0, 1.0 / p.tj, 0.0, 0.0, 1.0 / p.td0p);
    let c = nalgebra::Matrix2x3::new(0.0, p.omega0, 0.0, 0.0, 0.0, 1.0 / p.xs());
    (a, b, c)
}

/// Small-signal model of the open-loop generator around its equilibrium.
pub fn generator_linearization(p: &SmibParams) -> Result<StateSpace> {
    let eq = equilibrium(p)?;
    let (a, b, c) = jacobians(&eq, p);
    StateSpace::new(
        Matrix::from_column_slice(3, 3, a.as_slice()),
        Matrix::from_column_slice(3, 2, b.as_slice()),
        Matrix::from_column_slice(2, 3, c.as_slice()),
        Matrix::zeros(2, 2),
    )
}

/// Closed-loop vector field `ẋ = f(x, u₀ − K(y(x) − y₀))`.
#[derive(Debug, Clone, Copy)]
pub struct ClosedLoop {
    pub params: SmibParams,
    pub gain: Matrix2<f64>,
    pub equilibrium: SmibState,
    y0: Vector2<f64>,
}

impl ClosedLoop {
    pub fn new(p: &SmibParams, gain: Matrix2<f64>) -> Result<Self> {
        let eq = equilibrium(p)?;
        Ok(Self {
            params: *p,
            gain,
            equilibrium: eq,
            y0: output(&eq, p),
        })
    }

    pub fn input(&self, s: &SmibState) -> Vector2<f64> {
        self.params.u0() - self.gain * (output(s, &self.params) - self.y0)
    }

    pub fn field(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let s = SmibState::from_vector(x);
        dynamics(&s, &self.params, self.input(&s))
    }
}

/// Analytic Jacobian of the closed loop at `x`.
pub fn linearize_closed_loop(p: &SmibParams, k: &Matrix2<f64>, x: &SmibState) -> Matrix3<f64> {
    let (a, b, c) = jacobians(x, p);
    a - b * k * c
}

/// Largest real part among the closed-loop eigenvalues at the equilibrium.
pub fn closed_loop_abscissa(p: &SmibParams, k: &Matrix2<f64>) -> Result<f64> {
    let eq = equilibrium(p)?;
    let j = linearize_closed_loop(p, k, &eq);
    Ok(lti::spectral_abscissa(&Matrix::from_column_slice(3, 3, j.as_slice())))
}

pub fn small_signal_stable(p: &SmibParams, k: &Matrix2<f64>) -> Result<bool> {
    Ok(closed_loop_abscissa(p, k)? < -SMALL_SIGNAL_TOL)
}

/// `K = [[K₁₁, off], [off, K₂₂]]`.
pub fn feedback_gain(k11: f64, k22: f64, offdiag: f64) -> Matrix2<f64> {
    Matrix2::new(k11, offdiag, offdiag, k22)
}

/// `x* + r·(1,1,1)/√3`.
pub fn perturbed_state(eq: &SmibState, r: f64) -> SmibState {
    let d = r / 3f64.sqrt();
    SmibState::new(eq.delta + d, eq.omega + d, eq.eqp + d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimStatus {
    Completed,
    /// `‖x‖` exceeded [`BLOWUP_NORM`]; the trajectory stops there.
    Diverged,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SmibState>,
    pub outputs: Vec<Vector2<f64>>,
    pub inputs: Vec<Vector2<f64>>,
    pub electrical_power: Vec<f64>,
    pub hamiltonian: Vec<f64>,
    pub status: SimStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> SmibState {
        *self.states.last().expect("trajectory has at least the initial sample")
    }
}

/// Fixed-step RK4 of the closed loop, recording every step.
pub fn simulate(p: &SmibParams, k: &Matrix2<f64>, x0: &SmibState, dt: f64, t_end: f64) -> Result<Trajectory> {
    simulate_strided(p, k, x0, dt, t_end, 1)
}

/// As [`simulate`] but recording every `stride`-th step (and the last).
pub fn simulate_strided(p: &SmibParams, k: &Matrix2<f64>, x0: &SmibState, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0) || stride == 0 {
        return Err(Error::InvalidInput("need dt > 0, T_end ≥ 0 and stride ≥ 1".into()));
    }
    let cl = ClosedLoop::new(p, *k)?;
    let ham = Hamiltonian::new(p)?;
    let steps = (t_end / dt).round() as usize;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        outputs: Vec::new(),
        inputs: Vec::new(),
        electrical_power: Vec::new(),
        hamiltonian: Vec::new(),
        status: SimStatus::Completed,
    };
    let record = |traj: &mut Trajectory, t: f64, x: &Vector3<f64>| {
        let s = SmibState::from_vector(x);
        traj.times.push(t);
        traj.states.push(s);
        traj.outputs.push(output(&s, p));
        traj.inputs.push(cl.input(&s));
        traj.electrical_power.push(algebraic_vars(&s, p).pe);
        traj.hamiltonian.push(ham.eval(&s));
    };
    let mut x = x0.to_vector();
    record(&mut traj, 0.0, &x);
    for i in 1..=steps {
        let k1 = cl.field(&x);
        let k2 = cl.field(&(x + k1 * (0.5 * dt)));
        let k3 = cl.field(&(x + k2 * (0.5 * dt)));
        let k4 = cl.field(&(x + k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let t = i as f64 * dt;
        if !(x.norm() <= BLOWUP_NORM) {
            traj.status = SimStatus::Diverged;
            if x.iter().all(|v| v.is_finite()) {
                record(&mut traj, t, &x);
            }
            return Ok(traj);
        }
        if i % stride == 0 || i == steps {
            record(&mut traj, t, &x);
        }
    }
    Ok(traj)
}

/// Sweep window over `K = [[K₁₁, off], [off, K₂₂]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepWindow {
    pub k11: (f64, f64),
    pub k22: (f64, f64),
    pub n11: usize,
    pub n22: usize,
    pub offdiag: f64,
}

impl Default for SweepWindow {
    fn default() -> Self {
        Self {
            k11: (-0.4, 0.4),
            k22: (-1.2, 0.6),
            n11: 81,
            n22: 81,
            offdiag: 0.1,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

impl SweepWindow {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 <= r.1;
        if !ok(self.k11) || !ok(self.k22) || self.n11 == 0 || self.n22 == 0 || !self.offdiag.is_finite() {
            return Err(Error::InvalidInput("sweep window needs finite ordered ranges and nonzero counts".into()));
        }
        Ok(())
    }

    pub fn k11_values(&self) -> Vec<f64> {
        linspace(self.k11.0, self.k11.1, self.n11)
    }

    pub fn k22_values(&self) -> Vec<f64> {
        linspace(self.k22.0, self.k22.1, self.n22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub k11: f64,
    pub k22: f64,
    pub scalar_cert: bool,
    pub matrix_cert: bool,
    pub eig_stable: bool,
    pub abscissa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub cells: usize,
    pub scalar_cert: usize,
    pub matrix_cert: usize,
    pub eig_stable: usize,
    pub scalar_not_matrix: usize,
    pub matrix_not_stable: usize,
}

#[derive(Debug, Clone)]
pub struct RegionSweep {
    pub window: SweepWindow,
    /// Row-major in `(K₁₁, K₂₂)`.
    pub cells: Vec<RegionCell>,
}

impl RegionSweep {
    pub fn counts(&self) -> RegionCounts {
        let n = |f: &dyn Fn(&RegionCell) -> bool| self.cells.iter().filter(|c| f(c)).count();
        RegionCounts {
            cells: self.cells.len(),
            scalar_cert: n(&|c| c.scalar_cert),
            matrix_cert: n(&|c| c.matrix_cert),
            eig_stable: n(&|c| c.eig_stable),
            scalar_not_matrix: n(&|c| c.scalar_cert && !c.matrix_cert),
            matrix_not_stable: n(&|c| c.matrix_cert && !c.eig_stable),
        }
    }
}

/// Certificates and small-signal verdict for one gain. The matrix route
/// runs the Lyapunov-stability check with `Φ₂ = sym(K)`; the scalar route
/// repeats it with both indices collapsed to `λ_min·I`.
pub fn classify_gain(p: &SmibParams, k: &Matrix2<f64>, gen: &PassivityCertificate, gen_zso: bool) -> Result<RegionCell> {
    let kd = Matrix::from_column_slice(2, 2, k.as_slice());
    let ctrl = PassivityCertificate::ifp(SymmetricMatrix::sym_part(&kd)?, Provenance::Declared);
    let matrix = interconnect::lyapunov_stability_check(gen, &ctrl, gen_zso, true)?;
    let scalar_gen = PassivityCertificate::ofp(SymmetricMatrix::scaled_identity(2, gen.xi().min_eigenvalue()), Provenance::Declared);
    let scalar_ctrl = PassivityCertificate::ifp(SymmetricMatrix::scaled_identity(2, ctrl.phi().min_eigenvalue()), Provenance::Declared);
    let scalar = interconnect::lyapunov_stability_check(&scalar_gen, &scalar_ctrl, gen_zso, true)?;
    let abscissa = closed_loop_abscissa(p, k)?;
    Ok(RegionCell {
        k11: k[(0, 0)],
        k22: k[(1, 1)],
        scalar_cert: scalar.satisfied,
        matrix_cert: matrix.satisfied,
        eig_stable: abscissa < -SMALL_SIGNAL_TOL,
        abscissa,
    })
}

pub fn region_sweep(p: &SmibParams, window: &SweepWindow, exec: Exec) -> Result<RegionSweep> {
    window.validate()?;
    let gen = generator_ofpm(p);
    let zso = lti::is_observable(&generator_linearization(p)?);
    let k22s = window.k22_values();
    let gains: Vec<Matrix2<f64>> = window
        .k11_values()
        .into_iter()
        .flat_map(|a| k22s.iter().map(move |&b| feedback_gain(a, b, window.offdiag)))
        .collect();
    let cells = exec.try_map(&gains, |k| classify_gain(p, k, &gen, zso))?;
    Ok(RegionSweep { window: *window, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> SmibParams {
        SmibParams::default()
    }

    #[test]
    fn algebraic_examples() {
        let p = paper();
        let a = algebraic_vars(&SmibState::new(0.0, 0.0, 1.1), &p);
        assert_eq!((a.ud, a.iq), (0.0, 0.0));
        assert!(a.pe.abs() < 1e-15);
        let a = algebraic_vars(&SmibState::new(std::f64::consts::FRAC_PI_2, 0.0, 1.0), &p);
        assert!((a.pe - 1.0 / 0.35).abs() < 1e-12);
        let a = algebraic_vars(&SmibState::new(0.5, 0.0, 1.0), &p);
        assert!((a.pe - electrical_power(0.5, 1.0, &p)).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_examples() {
        let p = paper();
        let eq = equilibrium(&p).unwrap();
        assert!(dynamics(&eq, &p, p.u0()).norm() < 1e-10);
        assert!((eq.eqp - (0.84 + 0.3 * eq.delta.cos())).abs() < 1e-12);
        // oracle: plain bisection on the reduced scalar equation
        let g = |d: f64| electrical_power(d, 0.84 + 0.3 * d.cos(), &p) - 0.8;
        let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((eq.delta - lo).abs() < 1e-10);

        let zero = SmibParams { pm0: 0.0, ..p };
        let eq = equilibrium(&zero).unwrap();
        assert_eq!(eq.delta, 0.0);
        assert!((eq.eqp - 1.14).abs() < 1e-12);
    }

    #[test]
    fn dynamics_examples() {
        let p = paper();
        let eq = equilibrium(&p).unwrap();
        let f = dynamics(&SmibState { omega: 0.01, ..eq }, &p, p.u0());
        assert!((f[0] - std::f64::consts::PI).abs() < 1e-12);
        let f = dynamics(&eq, &p, p.u0() + Vector2::new(0.1, 0.0));
        assert!((f[1] * p.tj - 0.1).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_examples() {
        let p = paper();
        let eq = equilibrium(&p).unwrap();
        let h = Hamiltonian::new(&p).unwrap();
        assert!(h.eval(&eq).abs() < 1e-14);
        let hw = h.eval(&SmibState { omega: 0.01, ..eq });
        assert!((hw - 0.5 * 15.0 * 100.0 * std::f64::consts::PI * 1e-4).abs() < 1e-12);
    }

    #[test]
    fn generator_ofpm_examples() {
        let c = generator_ofpm(&paper());
        assert!((c.xi().get(0, 0) - 8.0 / (100.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((c.xi().get(1, 1) - 0.75).abs() < 1e-15);
        assert!(c.phi().is_zero());
        let c0 = generator_ofpm(&SmibParams { d: 0.0, ..paper() });
        assert_eq!(c0.xi().get(0, 0), 0.0);
        let c2 = generator_ofpm(&SmibParams { d: 16.0, ..paper() });
        assert!((c2.xi().get(0, 0) - 2.0 * c.xi().get(0, 0)).abs() < 1e-15);
        assert_eq!(c2.xi().get(1, 1), c.xi().get(1, 1));
    }

    fn fd_jacobian(cl: &ClosedLoop, x: &Vector3<f64>) -> Matrix3<f64> {
        let mut j = Matrix3::zeros();
        for i in 0..3 {
            let h = 1e-6 * x[i].abs().max(1.0);
            let mut e = Vector3::zeros();
            e[i] = h;
            j.set_column(i, &((cl.field(&(x + e)) - cl.field(&(x - e))) / (2.0 * h)));
        }
        j
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let p = paper();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let k = if trial == 0 { Matrix2::zeros() } else { feedback_gain(rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0), 0.1) };
            let cl = ClosedLoop::new(&p, k).unwrap();
            let x = cl.equilibrium.to_vector() + Vector3::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.01..0.01), rng.gen_range(-0.2..0.2));
            let a = linearize_closed_loop(&p, &k, &SmibState::from_vector(&x));
            let fd = fd_jacobian(&cl, &x);
            assert!((a - fd).norm() <= 1e-6 * a.norm(), "{a} {fd}");
        }
    }

    #[test]
    fn open_loop_stability_matches_eigenvalues() {
        let p = paper();
        let a = closed_loop_abscissa(&p, &Matrix2::zeros()).unwrap();
        let sys = generator_linearization(&p).unwrap();
        assert!((a - lti::spectral_abscissa(sys.a())).abs() < 1e-12);
        assert_eq!(small_signal_stable(&p, &Matrix2::zeros()).unwrap(), a < 0.0);
        assert!(!small_signal_stable(&p, &feedback_gain(-5.0, -5.0, 0.1)).unwrap());
    }

    #[test]
    fn simulation_examples() {
        let p = paper();
        let eq = equilibrium(&p).unwrap();
        let k = Matrix2::identity();
        let tr = simulate(&p, &k, &eq, 1e-3, 1.0).unwrap();
        assert_eq!(tr.len(), 1001);
        assert!(tr.states.iter().all(|s| (s.to_vector() - eq.to_vector()).norm() < 1e-12));
        assert!(tr.hamiltonian.iter().all(|h| h.abs() < 1e-12));

        let tr = simulate(&p, &feedback_gain(-0.4, 0.6, 0.1), &perturbed_state(&eq, 0.03), 2e-4, 30.0).unwrap();
        assert_eq!(tr.status, SimStatus::Diverged);
        assert!(simulate(&p, &k, &eq, 0.0, 1.0).is_err());
    }

    #[test]
    fn rk4_is_fourth_order() {
        let p = paper();
        let eq = equilibrium(&p).unwrap();
        let k = feedback_gain(0.2, 0.4, 0.1);
        let x0 = perturbed_state(&eq, 0.03);
        let end = |dt: f64| simulate(&p, &k, &x0, dt, 1.0).unwrap().last_state().to_vector();
        let reference = end(1e-4);
        let e1 = (end(4e-3) - reference).norm();
        let e2 = (end(2e-3) - reference).norm();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn region_cell_examples() {
        let p = paper();
        let gen = generator_ofpm(&p);
        let c = classify_gain(&p, &Matrix2::identity(), &gen, true).unwrap();
        assert!(c.scalar_cert && c.matrix_cert && c.eig_stable);
        // K = diag(0, −0.5): the scalar route fails, the matrix route passes
        let c = classify_gain(&p, &Matrix2::new(0.0, 0.0, 0.0, -0.5), &gen, true).unwrap();
        assert!(!c.scalar_cert && c.matrix_cert);
        let c = classify_gain(&p, &feedback_gain(0.0, -0.5, 0.1), &gen, true).unwrap();
        let oracle = (Matrix2::new(0.0, 0.1, 0.1, -0.5) + Matrix2::new(8.0 / (100.0 * std::f64::consts::PI), 0.0, 0.0, 0.75))
            .symmetric_eigenvalues()
            .min();
        assert_eq!(c.matrix_cert, oracle >= 0.0);
    }

    #[test]
    fn params_json_roundtrip() {
        let p = paper();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"Td0p\"") && s.contains("\"omega0\""));
        assert_eq!(SmibParams::from_json_str(&s).unwrap(), p);
        let bad = s.replace("\"xdp\":0.35", "\"xdp\":0.6");
        assert!(SmibParams::from_json_str(&bad).is_err());
    }
}
