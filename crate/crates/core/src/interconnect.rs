//! Certificate algebra for parallel and feedback interconnections, the
//! stability conditions built on it, and feedback-passivation thresholds.
//!
//! Feedback loops use `e₁ = u₁ − y₂`, `e₂ = u₂ + y₁`. Composed storage is
//! `V₁ + V₂` over the stacked state `(x₁, x₂)`, matching the realizations
//! from [`crate::lti::compose_parallel`] and [`crate::lti::compose_feedback`].

use serde::Serialize;

use crate::lti::{self, Family, FrequencyGrid, StateSpace};
use crate::par::Exec;
use crate::passivity::{CertificateJson, CertificateKind, PassivityCertificate, Provenance};
use crate::symmat::{LoewnerTol, SymmetricMatrix};
use crate::{Error, Matrix, Result};

/// One matrix condition of a theorem, e.g. `Φ₂ + Ξ₁ ⪰ 0`.
#[derive(Debug, Clone, Serialize)]
pub struct Condition {
    pub label: String,
    /// `λ_min` of the condition matrix.
    pub margin: f64,
    pub strict: bool,
    pub tol: f64,
    pub satisfied: bool,
}

impl Condition {
    fn check(label: &str, m: &SymmetricMatrix, strict: bool) -> Self {
        let tol = LoewnerTol::default().at(m.frobenius_norm());
        let margin = m.min_eigenvalue();
        let satisfied = if strict { margin > tol } else { margin >= -tol };
        Self {
            label: label.to_string(),
            margin,
            strict,
            tol,
            satisfied,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterconnectionVerdict {
    pub satisfied: bool,
    pub composed: Option<PassivityCertificate>,
    /// Margin of the binding (smallest-margin) condition.
    pub margin: f64,
    pub binding_condition: String,
    pub conditions: Vec<Condition>,
    pub gain_estimate: Option<f64>,
}

impl InterconnectionVerdict {
    fn from_conditions(conditions: Vec<Condition>) -> Self {
        let binding = conditions
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .expect("at least one condition");
        Self {
            satisfied: conditions.iter().all(|c| c.satisfied),
            composed: None,
            margin: binding.margin,
            binding_condition: binding.label.clone(),
            conditions: conditions.clone(),
            gain_estimate: None,
        }
    }

    pub fn to_json(&self) -> VerdictJson {
        VerdictJson {
            satisfied: self.satisfied,
            margin: self.margin,
            binding_condition: self.binding_condition.clone(),
            conditions: self.conditions.clone(),
            gain_estimate: self.gain_estimate,
            composed: self.composed.as_ref().map(PassivityCertificate::to_json),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub satisfied: bool,
    pub margin: f64,
    pub binding_condition: String,
    pub conditions: Vec<Condition>,
    pub gain_estimate: Option<f64>,
    pub composed: Option<CertificateJson>,
}

fn same_dim(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<()> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch(format!("certificates are {}- and {}-port", c1.dim(), c2.dim())));
    }
    Ok(())
}

fn kind_of(phi: &SymmetricMatrix, xi: &SymmetricMatrix) -> CertificateKind {
    match (phi.is_zero(), xi.is_zero()) {
        (_, true) => CertificateKind::Ifp,
        (true, false) => CertificateKind::Ofp,
        _ => CertificateKind::Ifofp,
    }
}

fn joint_storage(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Option<SymmetricMatrix> {
    match (c1.storage(), c2.storage()) {
        (Some(p1), Some(p2)) => Some(SymmetricMatrix::block_diag(p1, p2)),
        _ => None,
    }
}

fn composed(phi: SymmetricMatrix, xi: SymmetricMatrix, storage: Option<SymmetricMatrix>) -> Result<PassivityCertificate> {
    let kind = kind_of(&phi, &xi);
    PassivityCertificate::new(phi, xi, kind, storage, Provenance::Composed)
}

fn pd(m: &SymmetricMatrix) -> bool {
    Condition::check("", m, true).satisfied
}

/// Parallel connection: `Φ = Φ₁ + Φ₂`, `Ξ = (Ξ₁⁻¹ + Ξ₂⁻¹)⁻¹` for positive
/// definite `Ξᵢ`, and `Ξ = 0` when either `Ξᵢ` is zero.
pub fn parallel_cert(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<PassivityCertificate> {
    same_dim(c1, c2)?;
    let phi = c1.phi() + c2.phi();
    let xi = if c1.xi().is_zero() || c2.xi().is_zero() {
        SymmetricMatrix::zeros(c1.dim())
    } else if pd(c1.xi()) && pd(c2.xi()) {
        c1.xi().inverse()?.try_add(&c2.xi().inverse()?)?.inverse()?
    } else {
        return Err(Error::Precondition("parallel OFPM needs positive definite Ξ₁ and Ξ₂".into()));
    };
    composed(phi, xi, joint_storage(c1, c2))
}

/// `M = Φ − δI` with `δ = 1e−3·‖Φ‖₂` (or `1e−3` for `Φ = 0`).
pub fn default_multiplier(phi: &SymmetricMatrix) -> SymmetricMatrix {
    let norm = phi.spectral_norm();
    let delta = 1e-3 * if norm > 0.0 { norm } else { 1.0 };
    phi - &SymmetricMatrix::scaled_identity(phi.dim(), delta)
}

/// `Ξ_other − Φ(Φ − M)⁻¹M`, written in the symmetric form
/// `Ξ_other + Φ − Φ(Φ − M)⁻¹Φ`.
pub fn feedback_n(xi_other: &SymmetricMatrix, phi: &SymmetricMatrix, m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let r = phi.try_sub(m)?;
    let rinv = r.inverse()?;
    xi_other.try_add(phi)?.try_sub(&rinv.congruence(phi.as_matrix())?)
}

/// Feedback connection over the stacked ports `(u₁, u₂) → (y₁, y₂)`:
/// `Φ = diag(M₁, M₂)`, `Ξ = diag(N₁, N₂)` with the largest admissible `Nᵢ`.
pub fn feedback_cert(
    c1: &PassivityCertificate,
    c2: &PassivityCertificate,
    m1: &SymmetricMatrix,
    m2: &SymmetricMatrix,
) -> Result<PassivityCertificate> {
    same_dim(c1, c2)?;
    if m1.dim() != c1.dim() || m2.dim() != c1.dim() {
        return Err(Error::DimensionMismatch("multipliers must match the port count".into()));
    }
    for (label, phi, m) in [("M₁ ≺ Φ₁", c1.phi(), m1), ("M₂ ≺ Φ₂", c2.phi(), m2)] {
        let c = Condition::check(label, &phi.try_sub(m)?, true);
        if !c.satisfied {
            return Err(Error::Precondition(format!("{label} violated (margin {:.3e})", c.margin)));
        }
    }
    let n1 = feedback_n(c1.xi(), c2.phi(), m2)?;
    let n2 = feedback_n(c2.xi(), c1.phi(), m1)?;
    composed(
        SymmetricMatrix::block_diag(m1, m2),
        SymmetricMatrix::block_diag(&n1, &n2),
        joint_storage(c1, c2),
    )
}

/// [`feedback_cert`] with [`default_multiplier`] for both loops.
pub fn feedback_cert_default(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<PassivityCertificate> {
    feedback_cert(c1, c2, &default_multiplier(c1.phi()), &default_multiplier(c2.phi()))
}

/// Block matrices `E` and `F` whose semidefiniteness closes the feedback
/// dissipation argument.
pub fn feedback_blocks(
    c1: &PassivityCertificate,
    c2: &PassivityCertificate,
    m1: &SymmetricMatrix,
    m2: &SymmetricMatrix,
    n1: &SymmetricMatrix,
    n2: &SymmetricMatrix,
) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    let (p1, p2, x1, x2) = (c1.phi(), c2.phi(), c1.xi(), c2.xi());
    let block = |tl: SymmetricMatrix, off: Matrix, br: SymmetricMatrix| {
        let m = tl.dim();
        let mut out = Matrix::zeros(2 * m, 2 * m);
        out.view_mut((0, 0), (m, m)).copy_from(tl.as_matrix());
        out.view_mut((0, m), (m, m)).copy_from(&off);
        out.view_mut((m, 0), (m, m)).copy_from(&off.transpose());
        out.view_mut((m, m), (m, m)).copy_from(br.as_matrix());
        SymmetricMatrix::sym_part(&out)
    };
    let e = block(p1.try_sub(m1)?, -p1.as_matrix(), x2.try_add(p1)?.try_sub(n2)?)?;
    let f = block(p2.try_sub(m2)?, p2.as_matrix().clone(), x1.try_add(p2)?.try_sub(n1)?)?;
    Ok((e, f))
}

/// Feedback passivation with `u₂ = 0`: passive from `u₁` to `y₁` when
/// `Φ₂ + Ξ₁ ⪰ 0`, `Ξ₂ ⪰ 0`, `Φ₁ ⪰ 0`.
///
/// The composed certificate carries `Ξ = Ξ₁ + Φ₂` on the output and, when
/// `Φ₁ + Ξ₂ ≻ 0`, `Φ = sym(Ξ₂(Φ₁ + Ξ₂)⁻¹Φ₁)` on the input (`Φ = 0`
/// otherwise). This is the assignment the dissipation inequality delivers.
pub fn passivation_check(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<InterconnectionVerdict> {
    same_dim(c1, c2)?;
    let mut v = InterconnectionVerdict::from_conditions(vec![
        Condition::check("Phi2 + Xi1 >= 0", &c2.phi().try_add(c1.xi())?, false),
        Condition::check("Xi2 >= 0", c2.xi(), false),
        Condition::check("Phi1 >= 0", c1.phi(), false),
    ]);
    if v.satisfied {
        let sum = c1.phi().try_add(c2.xi())?;
        let phi = if pd(&sum) {
            let prod = c2.xi().as_matrix() * sum.inverse()?.as_matrix() * c1.phi().as_matrix();
            SymmetricMatrix::sym_part(&prod)?
        } else {
            SymmetricMatrix::zeros(c1.dim())
        };
        let xi = c1.xi().try_add(c2.phi())?;
        v.composed = Some(composed(phi, xi, joint_storage(c1, c2))?);
    }
    Ok(v)
}

/// `1/λ_min(Ξ)` for an output strictly passive certificate.
pub fn l2_gain_bound(cert: &PassivityCertificate) -> Result<f64> {
    if !pd(cert.xi()) {
        return Err(Error::Precondition("L2 gain bound needs Ξ ≻ 0".into()));
    }
    Ok(1.0 / cert.xi().min_eigenvalue())
}

/// The `(L, N, M)` matrices of the closed-loop dissipation inequality
/// `V̇ ≤ uᵀNy − uᵀMu − yᵀLy`.
pub fn gain_matrices(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<(SymmetricMatrix, Matrix, SymmetricMatrix)> {
    same_dim(c1, c2)?;
    let m = c1.dim();
    let l = SymmetricMatrix::block_diag(&c1.xi().try_add(c2.phi())?, &c2.xi().try_add(c1.phi())?);
    let mut n = Matrix::identity(2 * m, 2 * m);
    n.view_mut((0, m), (m, m)).copy_from(&(c1.phi().as_matrix() * 2.0));
    n.view_mut((m, 0), (m, m)).copy_from(&(c2.phi().as_matrix() * -2.0));
    let mm = SymmetricMatrix::block_diag(c1.phi(), c2.phi());
    Ok((l, n, mm))
}

/// `sqrt(b² + 2ac)/a` with `a = λ_min(L)`, `b = ‖N‖₂`, `c = ‖M‖₂`;
/// `None` unless `a > 0`.
///
/// Integrating `V̇ ≤ (b² + 2ac)/(2a)·‖u‖² − (a/2)·‖y‖²` bounds `‖y‖²` by
/// `(b² + 2ac)/a²·‖u‖²` plus the initial storage term.
pub fn gain_constant(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<Option<f64>> {
    let (l, n, m) = gain_matrices(c1, c2)?;
    let a = l.min_eigenvalue();
    if a <= 0.0 {
        return Ok(None);
    }
    let b = n.clone().svd(false, false).singular_values.max();
    let c = m.spectral_norm();
    Ok(Some((b * b + 2.0 * a * c).sqrt() / a))
}

/// Finite-gain L2 stability of the feedback loop: `Φ₁ + Ξ₂ ≻ 0` and
/// `Φ₂ + Ξ₁ ≻ 0`, with the gain constant when satisfied.
pub fn l2_stability_check(c1: &PassivityCertificate, c2: &PassivityCertificate) -> Result<InterconnectionVerdict> {
    same_dim(c1, c2)?;
    let mut v = InterconnectionVerdict::from_conditions(vec![
        Condition::check("Phi1 + Xi2 > 0", &c1.phi().try_add(c2.xi())?, true),
        Condition::check("Phi2 + Xi1 > 0", &c2.phi().try_add(c1.xi())?, true),
    ]);
    if v.satisfied {
        v.gain_estimate = gain_constant(c1, c2)?;
    }
    Ok(v)
}

/// Asymptotic stability of the unforced loop: `Φ₁ + Ξ₂ ⪰ 0`, `Φ₂ + Ξ₁ ⪰ 0`
/// and zero-state observability of both parts (static maps count as
/// observable).
pub fn lyapunov_stability_check(
    c1: &PassivityCertificate,
    c2: &PassivityCertificate,
    zso1: bool,
    zso2: bool,
) -> Result<InterconnectionVerdict> {
    same_dim(c1, c2)?;
    let mut v = InterconnectionVerdict::from_conditions(vec![
        Condition::check("Phi1 + Xi2 >= 0", &c1.phi().try_add(c2.xi())?, false),
        Condition::check("Phi2 + Xi1 >= 0", &c2.phi().try_add(c1.xi())?, false),
    ]);
    for (ok, label) in [(zso1, "G1 zero-state observable"), (zso2, "G2 zero-state observable")] {
        if !ok {
            v.satisfied = false;
            v.binding_condition = label.to_string();
        }
    }
    Ok(v)
}

/// Matrix versus scalar compensation for an output-feedback shortage `Ξ₁`.
///
/// `Ξ₁` may be indefinite: matching `Φ₂ = −Ξ₁` spends negative effort
/// along the excess directions, which is exactly what the scalar route
/// cannot exploit.
#[derive(Debug, Clone, PartialEq)]
pub struct PassivationEffort {
    /// `−Ξ₁`.
    pub phi_matrix: SymmetricMatrix,
    /// `−λ_min(Ξ₁)·I`.
    pub phi_scalar: SymmetricMatrix,
    /// `phi_scalar − phi_matrix ⪰ 0`; zero iff `Ξ₁` is a multiple of `I`.
    pub effort_gap: SymmetricMatrix,
}

/// Errors when `Ξ₁ ≻ 0`, i.e. there is no shortage to compensate.
pub fn passivation_effort(xi1: &SymmetricMatrix) -> Result<PassivationEffort> {
    let tol = LoewnerTol::default().at(xi1.frobenius_norm());
    if xi1.min_eigenvalue() > tol {
        return Err(Error::Precondition("Ξ₁ ≻ 0 has no passivity shortage".into()));
    }
    let phi_matrix = -xi1;
    let phi_scalar = SymmetricMatrix::scaled_identity(xi1.dim(), -xi1.min_eigenvalue());
    let effort_gap = phi_scalar.try_sub(&phi_matrix)?;
    Ok(PassivationEffort {
        phi_matrix,
        phi_scalar,
        effort_gap,
    })
}

/// Bisection resolution for passivation thresholds.
pub const THRESHOLD_TOL: f64 = 1e-10;

fn bisect_threshold<F: Fn(f64) -> Result<bool>>(theta_max: f64, ok: F) -> Result<Option<f64>> {
    if ok(0.0)? {
        return Ok(Some(0.0));
    }
    if !ok(theta_max)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, theta_max);
    while hi - lo > THRESHOLD_TOL * theta_max.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// `λ_min(θ·sym(K) + Ξ₁)`: the binding margin of the passivation condition
/// when the static gain `θK` closes the loop around an OFP plant.
pub fn static_passivation_margin(xi1: &SymmetricMatrix, k: &Matrix, theta: f64) -> Result<f64> {
    let phi2 = &SymmetricMatrix::sym_part(k)? * theta;
    Ok(phi2.try_add(xi1)?.min_eigenvalue())
}

/// Smallest `θ ∈ [0, θ_max]` certified by the passivation condition for
/// the shortage `Ξ₁` and static gain `θK`, to [`THRESHOLD_TOL`].
pub fn certified_threshold(xi1: &SymmetricMatrix, k: &Matrix, theta_max: f64) -> Result<Option<f64>> {
    bisect_threshold(theta_max, |t| Ok(static_passivation_margin(xi1, k, t)? >= 0.0))
}

/// Passivity margin of `(I + θGK)⁻¹G`: `min_ω λ_min(He G_cl(jω))`, or
/// `None` when the closed loop is not Hurwitz.
pub fn closed_loop_passivity_margin(
    sys: &StateSpace,
    k: &Matrix,
    theta: f64,
    grid: &FrequencyGrid,
    exec: Exec,
) -> Result<Option<f64>> {
    let cl = lti::close_loop_static(sys, k, theta)?;
    if cl.order() > 0 && !lti::is_hurwitz(&cl) {
        return Ok(None);
    }
    Ok(Some(lti::scalar_index_freq_with(&cl, grid, Family::InputFeedforward, exec)?.value))
}

/// Tolerance on the closed-loop margin when deciding true passivity.
pub const TRUE_PASSIVITY_TOL: f64 = 1e-9;

pub fn closed_loop_passive(sys: &StateSpace, k: &Matrix, theta: f64, grid: &FrequencyGrid, exec: Exec) -> Result<bool> {
    Ok(closed_loop_passivity_margin(sys, k, theta, grid, exec)?.is_some_and(|m| m >= -TRUE_PASSIVITY_TOL))
}

/// Smallest `θ` rendering the closed loop passive, by bisection on the
/// frequency-sweep check.
pub fn true_threshold(sys: &StateSpace, k: &Matrix, theta_max: f64, grid: &FrequencyGrid, exec: Exec) -> Result<Option<f64>> {
    bisect_threshold(theta_max, |t| closed_loop_passive(sys, k, t, grid, exec))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub true_passive: bool,
    /// One verdict per shortage certificate, in input order.
    pub certified: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PassivationSweep {
    pub labels: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub true_threshold: Option<f64>,
    pub certified_thresholds: Vec<Option<f64>>,
}

/// Sweeps `θ` over `steps + 1` equispaced points of `[0, θ_max]`, checking
/// true closed-loop passivity and the passivation condition for each named
/// shortage `Ξ₁`, then refines every threshold by bisection.
pub fn passivation_sweep(
    sys: &StateSpace,
    k: &Matrix,
    shortages: &[(String, SymmetricMatrix)],
    theta_max: f64,
    steps: usize,
    grid: &FrequencyGrid,
    exec: Exec,
) -> Result<PassivationSweep> {
    if !(theta_max > 0.0) || steps == 0 {
        return Err(Error::InvalidInput("θ range must be positive with at least one step".into()));
    }
    let thetas: Vec<f64> = (0..=steps).map(|i| theta_max * i as f64 / steps as f64).collect();
    // the per-θ frequency sweeps run sequentially inside the parallel θ map
    let rows = exec.try_map(&thetas, |&theta| -> Result<SweepRow> {
        let true_passive = closed_loop_passive(sys, k, theta, grid, Exec::Sequential)?;
        let certified = shortages
            .iter()
            .map(|(_, xi)| Ok(static_passivation_margin(xi, k, theta)? >= 0.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepRow {
            theta,
            true_passive,
            certified,
        })
    })?;
    let true_thr = true_threshold(sys, k, theta_max, grid, exec)?;
    let certified_thresholds = shortages
        .iter()
        .map(|(_, xi)| certified_threshold(xi, k, theta_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(PassivationSweep {
        labels: shortages.iter().map(|(l, _)| l.clone()).collect(),
        rows,
        true_threshold: true_thr,
        certified_thresholds,
    })
}
