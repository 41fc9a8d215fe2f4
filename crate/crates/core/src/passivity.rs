//! Matrix-valued passivity indices: LMI assembly, index computation under
//! the two selection principles, and frequency-domain verification.
//!
//! A system is `(Φ, Ξ)`-passive when it is dissipative for the supply
//! `uᵀy − uᵀΦu − yᵀΞy`. For an LTI realization the certificate LMI is
//!
//! ```text
//! W = [ PA + AᵀP + 2CᵀΞC        PB − Cᵀ + 2CᵀΞD        ]
//!     [ BᵀP − C + 2DᵀΞC         −(D + Dᵀ) + 2Φ + 2DᵀΞD ]  ≺ 0,   P ≻ 0,
//! ```
//!
//! which certifies the storage `V(x) = ½ xᵀPx`. Certificates record
//! `storage = P/2` so that `V(x) = xᵀ·storage·x`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::lti::{self, Family, Frequency, FrequencyGrid, StateSpace, SweepMinimum};
use crate::par::Exec;
use crate::sdp::{self, LmiBlock, SdpOptions, SdpProblem, SdpStatus};
use crate::symmat::{is_psd, matrix_from_rows, HermitianMatrix, LoewnerTol, SymmetricMatrix, COND_MAX};
use crate::{CMatrix, Complex64, Error, Matrix, Result};

/// Relative strictness margin for the strict LMIs.
pub const LMI_EPS_REL: f64 = 1e-8;
/// Weight of the trace term in the min-eigenvalue objective.
pub const MIN_EIG_TRACE_WEIGHT: f64 = 1e-4;
/// Tolerance for accepting a freshly computed certificate.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    #[serde(rename = "IFP")]
    Ifp,
    #[serde(rename = "OFP")]
    Ofp,
    #[serde(rename = "IFOFP")]
    Ifofp,
}

/// Selection principle among the maximal elements of the index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Principle {
    TraceMax,
    MinEigMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    LmiTraceMax,
    LmiMinEigMax,
    FrequencySweep,
    Declared,
    Composed,
}

impl From<Principle> for Provenance {
    fn from(p: Principle) -> Self {
        match p {
            Principle::TraceMax => Provenance::LmiTraceMax,
            Principle::MinEigMax => Provenance::LmiMinEigMax,
        }
    }
}

/// A `(Φ, Ξ)` pair with its kind, origin and optional quadratic storage.
#[derive(Debug, Clone, PartialEq)]
pub struct PassivityCertificate {
    phi: SymmetricMatrix,
    xi: SymmetricMatrix,
    kind: CertificateKind,
    storage: Option<SymmetricMatrix>,
    provenance: Provenance,
}

impl PassivityCertificate {
    pub fn new(
        phi: SymmetricMatrix,
        xi: SymmetricMatrix,
        kind: CertificateKind,
        storage: Option<SymmetricMatrix>,
        provenance: Provenance,
    ) -> Result<Self> {
        if phi.dim() != xi.dim() {
            return Err(Error::DimensionMismatch(format!("Φ is {0}x{0}, Ξ is {1}x{1}", phi.dim(), xi.dim())));
        }
        match kind {
            CertificateKind::Ifp if !xi.is_zero() => {
                return Err(Error::InvalidInput("IFP certificate must have Ξ = 0".into()))
            }
            CertificateKind::Ofp if !phi.is_zero() => {
                return Err(Error::InvalidInput("OFP certificate must have Φ = 0".into()))
            }
            _ => {}
        }
        if let Some(p) = &storage {
            if p.min_eigenvalue() < -sdp::SdpOptions::default().feas_tol * (1.0 + p.spectral_norm()) {
                return Err(Error::InvalidInput("storage matrix is not PSD".into()));
            }
        }
        Ok(Self {
            phi,
            xi,
            kind,
            storage,
            provenance,
        })
    }

    /// Input-feedforward certificate `(Φ, 0)`.
    pub fn ifp(phi: SymmetricMatrix, provenance: Provenance) -> Self {
        let m = phi.dim();
        Self::new(phi, SymmetricMatrix::zeros(m), CertificateKind::Ifp, None, provenance).expect("valid IFP")
    }

    /// Output-feedback certificate `(0, Ξ)`.
    pub fn ofp(xi: SymmetricMatrix, provenance: Provenance) -> Self {
        let m = xi.dim();
        Self::new(SymmetricMatrix::zeros(m), xi, CertificateKind::Ofp, None, provenance).expect("valid OFP")
    }

    pub fn ifofp(phi: SymmetricMatrix, xi: SymmetricMatrix, provenance: Provenance) -> Result<Self> {
        Self::new(phi, xi, CertificateKind::Ifofp, None, provenance)
    }

    pub fn with_storage(mut self, storage: SymmetricMatrix) -> Result<Self> {
        self = Self::new(self.phi, self.xi, self.kind, Some(storage), self.provenance)?;
        Ok(self)
    }

    pub fn phi(&self) -> &SymmetricMatrix {
        &self.phi
    }
    pub fn xi(&self) -> &SymmetricMatrix {
        &self.xi
    }
    pub fn kind(&self) -> CertificateKind {
        self.kind
    }
    pub fn storage(&self) -> Option<&SymmetricMatrix> {
        self.storage.as_ref()
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            phi: self.phi.to_rows(),
            xi: self.xi.to_rows(),
            kind: self.kind,
            provenance: self.provenance,
            storage: self.storage.as_ref().map(SymmetricMatrix::to_rows),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: CertificateJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

/// `{ "phi": [[..]], "xi": [[..]], "kind": "...", "provenance": "...", "storage": [[..]] | null }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub phi: Vec<Vec<f64>>,
    pub xi: Vec<Vec<f64>>,
    pub kind: CertificateKind,
    pub provenance: Provenance,
    pub storage: Option<Vec<Vec<f64>>>,
}

impl TryFrom<CertificateJson> for PassivityCertificate {
    type Error = Error;

    fn try_from(j: CertificateJson) -> Result<Self> {
        let storage = match &j.storage {
            Some(rows) if !rows.is_empty() => Some(SymmetricMatrix::from_rows(rows)?),
            _ => None,
        };
        Self::new(
            SymmetricMatrix::from_rows(&j.phi)?,
            SymmetricMatrix::from_rows(&j.xi)?,
            j.kind,
            storage,
            j.provenance,
        )
    }
}

/// Objective weights for the combined mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub phi: f64,
    pub xi: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { phi: 1.0, xi: 1.0 }
    }
}

/// Positions of the decision variables inside the SDP vector.
#[derive(Debug, Clone)]
pub struct LmiLayout {
    pub n: usize,
    pub m: usize,
    pub p: std::ops::Range<usize>,
    pub phi: Option<std::ops::Range<usize>>,
    pub xi: Option<std::ops::Range<usize>>,
    pub t_phi: Option<usize>,
    pub t_xi: Option<usize>,
    pub epsilon: f64,
}

impl LmiLayout {
    pub fn p_matrix(&self, x: &[f64]) -> SymmetricMatrix {
        unpack(&x[self.p.clone()], self.n)
    }
    pub fn phi_matrix(&self, x: &[f64]) -> SymmetricMatrix {
        self.phi.as_ref().map_or_else(|| SymmetricMatrix::zeros(self.m), |r| unpack(&x[r.clone()], self.m))
    }
    pub fn xi_matrix(&self, x: &[f64]) -> SymmetricMatrix {
        self.xi.as_ref().map_or_else(|| SymmetricMatrix::zeros(self.m), |r| unpack(&x[r.clone()], self.m))
    }
}

/// Symmetric basis `E_ii`, `E_ij + E_ji` in row-major upper-triangular order.
fn sym_basis(n: usize) -> Vec<SymmetricMatrix> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut e = Matrix::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            out.push(SymmetricMatrix::new(e).expect("symmetric"));
        }
    }
    out
}

fn unpack(v: &[f64], n: usize) -> SymmetricMatrix {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
            k += 1;
        }
    }
    SymmetricMatrix::new(m).expect("symmetric")
}

fn w_constant(sys: &StateSpace) -> Matrix {
    let (n, m) = (sys.order(), sys.ports());
    let mut w = Matrix::zeros(n + m, n + m);
    w.view_mut((0, n), (n, m)).copy_from(&(-sys.c().transpose()));
    w.view_mut((n, 0), (m, n)).copy_from(&(-sys.c()));
    w.view_mut((n, n), (m, m)).copy_from(&(-(sys.d() + sys.d().transpose())));
    w
}

fn w_p_part(sys: &StateSpace, p: &Matrix) -> Matrix {
    let (n, m) = (sys.order(), sys.ports());
    let mut w = Matrix::zeros(n + m, n + m);
    w.view_mut((0, 0), (n, n)).copy_from(&(p * sys.a() + sys.a().transpose() * p));
    let pb = p * sys.b();
    w.view_mut((0, n), (n, m)).copy_from(&pb);
    w.view_mut((n, 0), (m, n)).copy_from(&pb.transpose());
    w
}

fn w_xi_part(sys: &StateSpace, xi: &Matrix) -> Matrix {
    let (n, m) = (sys.order(), sys.ports());
    let mut cd = Matrix::zeros(m, n + m);
    cd.view_mut((0, 0), (m, n)).copy_from(sys.c());
    cd.view_mut((0, n), (m, m)).copy_from(sys.d());
    cd.transpose() * xi * cd * 2.0
}

fn w_phi_part(sys: &StateSpace, phi: &Matrix) -> Matrix {
    let (n, m) = (sys.order(), sys.ports());
    let mut w = Matrix::zeros(n + m, n + m);
    w.view_mut((n, n), (m, m)).copy_from(&(phi * 2.0));
    w
}

/// `W(P, Φ, Ξ)` of the certificate LMI.
pub fn lmi_residual(sys: &StateSpace, p: &SymmetricMatrix, phi: &SymmetricMatrix, xi: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    if p.dim() != sys.order() || phi.dim() != sys.ports() || xi.dim() != sys.ports() {
        return Err(Error::DimensionMismatch("LMI variable sizes".into()));
    }
    let w = w_constant(sys) + w_p_part(sys, p.as_matrix()) + w_phi_part(sys, phi.as_matrix()) + w_xi_part(sys, xi.as_matrix());
    SymmetricMatrix::sym_part(&w)
}

fn sm(m: Matrix) -> SymmetricMatrix {
    SymmetricMatrix::sym_part(&m).expect("square")
}

fn require_lmi_preconditions(sys: &StateSpace) -> Result<()> {
    if sys.order() == 0 {
        return Err(Error::Precondition("LMI needs at least one state".into()));
    }
    if !lti::is_hurwitz(sys) {
        return Err(Error::NotHurwitz);
    }
    Ok(())
}

fn system_scale(sys: &StateSpace) -> f64 {
    [sys.a(), sys.b(), sys.c(), sys.d()].iter().map(|m| m.norm()).fold(0.0, f64::max)
}

/// Builds the SDP whose optimum is the requested index.
///
/// Variables are the upper-triangular entries of `P`, then `Φ` and/or `Ξ`
/// (per mode), then the epigraph scalars of the min-eigenvalue objective.
pub fn assemble_lmi(
    sys: &StateSpace,
    mode: CertificateKind,
    principle: Principle,
    weights: Option<Weights>,
) -> Result<(SdpProblem, LmiLayout)> {
    require_lmi_preconditions(sys)?;
    let (n, m) = (sys.order(), sys.ports());
    let w = weights.unwrap_or_default();
    let pb = sym_basis(n);
    let mb = sym_basis(m);
    let np = pb.len();
    let nm = mb.len();

    let mut k = np;
    let phi = matches!(mode, CertificateKind::Ifp | CertificateKind::Ifofp).then(|| {
        let r = k..k + nm;
        k += nm;
        r
    });
    let xi = matches!(mode, CertificateKind::Ofp | CertificateKind::Ifofp).then(|| {
        let r = k..k + nm;
        k += nm;
        r
    });
    let (t_phi, t_xi) = if principle == Principle::MinEigMax {
        let tp = phi.as_ref().map(|_| {
            k += 1;
            k - 1
        });
        let tx = xi.as_ref().map(|_| {
            k += 1;
            k - 1
        });
        (tp, tx)
    } else {
        (None, None)
    };

    // −W(x) coefficient matrices
    let dim_w = n + m;
    let mut w_terms: Vec<SymmetricMatrix> = vec![SymmetricMatrix::zeros(dim_w); k];
    for (i, e) in pb.iter().enumerate() {
        w_terms[i] = sm(-w_p_part(sys, e.as_matrix()));
    }
    if let Some(r) = &phi {
        for (i, e) in r.clone().zip(&mb) {
            w_terms[i] = sm(-w_phi_part(sys, e.as_matrix()));
        }
    }
    if let Some(r) = &xi {
        for (i, e) in r.clone().zip(&mb) {
            w_terms[i] = sm(-w_xi_part(sys, e.as_matrix()));
        }
    }
    let w0 = sm(-w_constant(sys));
    let scale = std::iter::once(&w0).chain(&w_terms).chain(&mb).map(SymmetricMatrix::frobenius_norm).fold(0.0, f64::max);
    let epsilon = LMI_EPS_REL * scale.max(1.0);

    let mut blocks = Vec::new();
    blocks.push(LmiBlock::new(&w0 - &SymmetricMatrix::scaled_identity(dim_w, epsilon), w_terms)?);
    let mut p_terms = vec![SymmetricMatrix::zeros(n); k];
    for (i, e) in pb.iter().enumerate() {
        p_terms[i] = e.clone();
    }
    blocks.push(LmiBlock::new(SymmetricMatrix::scaled_identity(n, -epsilon), p_terms)?);

    let mut objective = vec![0.0; k];
    let add_trace = |obj: &mut Vec<f64>, r: &std::ops::Range<usize>, wgt: f64| {
        for (i, e) in r.clone().zip(&mb) {
            obj[i] += wgt * e.trace();
        }
    };
    for (range, t, wgt) in [(&phi, t_phi, w.phi), (&xi, t_xi, w.xi)] {
        let Some(r) = range else { continue };
        match t {
            None => add_trace(&mut objective, r, wgt),
            Some(t) => {
                objective[t] += wgt;
                add_trace(&mut objective, r, wgt * MIN_EIG_TRACE_WEIGHT);
                let mut terms = vec![SymmetricMatrix::zeros(m); k];
                for (i, e) in r.clone().zip(&mb) {
                    terms[i] = e.clone();
                }
                terms[t] = SymmetricMatrix::scaled_identity(m, -1.0);
                blocks.push(LmiBlock::new(SymmetricMatrix::zeros(m), terms)?);
            }
        }
    }

    let mut problem = SdpProblem::new(objective, blocks)?;
    if mode == CertificateKind::Ifofp {
        let cap = 1e3 * (1.0 + system_scale(sys));
        let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); k];
        for r in [&phi, &xi].into_iter().flatten() {
            for i in r.clone() {
                bounds[i] = (-cap, cap);
            }
        }
        problem = problem.with_bounds(bounds)?;
    }
    Ok((
        problem,
        LmiLayout {
            n,
            m,
            p: 0..np,
            phi,
            xi,
            t_phi,
            t_xi,
            epsilon,
        },
    ))
}

fn solve_certificate(
    sys: &StateSpace,
    mode: CertificateKind,
    principle: Principle,
    weights: Option<Weights>,
) -> Result<PassivityCertificate> {
    let (problem, layout) = assemble_lmi(sys, mode, principle, weights)?;
    let sol = sdp::solve(&problem, &SdpOptions::default())?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => {
            return Err(Error::Infeasible(format!(
                "no finite passivity matrix at requested ε = {:.3e}",
                layout.epsilon
            )))
        }
        s => return Err(Error::Solver(format!("SDP terminated with {s:?} after {} iterations", sol.iterations))),
    }
    let phi = layout.phi_matrix(&sol.x);
    let xi = layout.xi_matrix(&sol.x);
    let storage = &layout.p_matrix(&sol.x) * 0.5;
    PassivityCertificate::new(phi, xi, mode, Some(storage), principle.into())
}

/// Input-feedforward passivity matrix `Φ` (with `Ξ = 0`).
pub fn compute_ifpm(sys: &StateSpace, principle: Principle) -> Result<PassivityCertificate> {
    solve_certificate(sys, CertificateKind::Ifp, principle, None)
}

/// Output-feedback passivity matrix `Ξ` (with `Φ = 0`).
///
/// With `y ≡ 0` the supply vanishes for every `Ξ`, so a positive definite
/// storage cannot grow along the zero dynamics: the LMI is infeasible for
/// non-minimum-phase systems and is rejected before calling the solver.
pub fn compute_ofpm(sys: &StateSpace, principle: Principle) -> Result<PassivityCertificate> {
    if !lti::is_minimum_phase(sys) {
        return Err(Error::Infeasible(
            "output-feedback storage needs stable zero dynamics; system is not minimum phase".into(),
        ));
    }
    solve_certificate(sys, CertificateKind::Ofp, principle, None)
}

/// Joint `(Φ, Ξ)` maximizing `w_φ tr Φ + w_ξ tr Ξ`; entries are boxed since
/// the joint objective can be unbounded.
pub fn compute_ifofp(sys: &StateSpace, weights: Weights) -> Result<PassivityCertificate> {
    solve_certificate(sys, CertificateKind::Ifofp, Principle::TraceMax, Some(weights))
}

/// `(λ_min(Φ), λ_min(Ξ))`.
pub fn scalar_indices(cert: &PassivityCertificate) -> (f64, f64) {
    (cert.phi.min_eigenvalue(), cert.xi.min_eigenvalue())
}

/// Scalar certificate `φI` (or `ξI`) from a refined frequency sweep.
pub fn scalar_certificate(sys: &StateSpace, family: Family, grid: &FrequencyGrid) -> Result<PassivityCertificate> {
    let idx = lti::scalar_index_freq(sys, grid, family)?;
    let s = SymmetricMatrix::scaled_identity(sys.ports(), idx.value);
    Ok(match family {
        Family::InputFeedforward => PassivityCertificate::ifp(s, Provenance::FrequencySweep),
        Family::OutputFeedback => PassivityCertificate::ofp(s, Provenance::FrequencySweep),
    })
}

/// Which test produced the output-feedback margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfpRoute {
    /// `min_ω λ_min(K(ω) − Ξ − G⁻ᴴΦG⁻¹)` over the grid.
    FrequencySweep,
    /// `G` not invertible on the grid: best `−λ_max(W)` over storage matrices.
    LmiResidual,
}

#[derive(Debug, Clone)]
pub struct Verification {
    /// `min_ω λ_min(H(ω) − Φ − GᴴΞG)`.
    pub ifp_margin: f64,
    pub ifp_worst: Frequency,
    pub ifp_direction: DVector<Complex64>,
    pub ofp_margin: f64,
    pub ofp_route: OfpRoute,
    pub ofp_worst: Option<Frequency>,
    pub ofp_direction: Option<DVector<Complex64>>,
}

impl Verification {
    /// Margin of the condition the certificate kind asserts.
    pub fn primary_margin(&self, kind: CertificateKind) -> f64 {
        match kind {
            CertificateKind::Ofp => self.ofp_margin,
            _ => self.ifp_margin,
        }
    }

    pub fn worst_frequency(&self, kind: CertificateKind) -> Option<Frequency> {
        match kind {
            CertificateKind::Ofp => self.ofp_worst,
            _ => Some(self.ifp_worst),
        }
    }
}

fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

fn dissipation_sample(
    g: &CMatrix,
    phi: &CMatrix,
    xi: &CMatrix,
) -> Result<HermitianMatrix> {
    let he = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let m = he - phi - g.adjoint() * xi * g;
    HermitianMatrix::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Margins of `cert` on `sys`, swept over `grid` with local refinement.
pub fn verify_certificate(sys: &StateSpace, cert: &PassivityCertificate, grid: &FrequencyGrid) -> Result<Verification> {
    verify_certificate_with(sys, cert, grid, Exec::default())
}

pub fn verify_certificate_with(
    sys: &StateSpace,
    cert: &PassivityCertificate,
    grid: &FrequencyGrid,
    exec: Exec,
) -> Result<Verification> {
    if cert.dim() != sys.ports() {
        return Err(Error::DimensionMismatch("certificate and system port counts differ".into()));
    }
    let phi = to_complex(cert.phi.as_matrix());
    let xi = to_complex(cert.xi.as_matrix());
    let ifp: SweepMinimum<DVector<Complex64>> = lti::sweep_minimum(grid, exec, |w| {
        let g = lti::freq_response(sys, w)?;
        Ok(dissipation_sample(&g, &phi, &xi)?.eig().min_pair())
    })?;

    let d_invertible = {
        let sv = sys.d().clone().svd(false, false).singular_values;
        sv.min() > sv.max() / COND_MAX && sv.max() > 0.0
    };
    let ofp = if d_invertible {
        lti::sweep_minimum(grid, exec, |w| {
            let g = lti::freq_response(sys, w)?;
            let sv = g.clone().svd(false, false).singular_values;
            if sv.min() <= sv.max() / COND_MAX {
                return Err(Error::Singular("transfer matrix singular on grid".into()));
            }
            let gi = g.try_inverse().ok_or_else(|| Error::Singular("G(jω)".into()))?;
            Ok(dissipation_sample(&gi, &xi, &phi)?.eig().min_pair())
        })
        .ok()
    } else {
        None
    };
    let (ofp_margin, ofp_route, ofp_worst, ofp_direction) = match ofp {
        Some(r) => (r.value, OfpRoute::FrequencySweep, Some(r.frequency), Some(r.witness)),
        None => (lmi_margin(sys, &cert.phi, &cert.xi)?, OfpRoute::LmiResidual, None, None),
    };
    Ok(Verification {
        ifp_margin: ifp.value,
        ifp_worst: ifp.frequency,
        ifp_direction: ifp.witness,
        ofp_margin,
        ofp_route,
        ofp_worst,
        ofp_direction,
    })
}

/// Bound on `|P_ij|` in the storage search of [`lmi_margin`].
pub const LMI_MARGIN_P_CAP: f64 = 1e6;

/// `max_{P ⪰ 0, |P_ij| ≤ cap} −λ_max(W(P, Φ, Ξ))`, capped at 1: positive iff
/// the strict LMI is feasible for the fixed pair (up to the storage cap).
/// A static system reduces to `−λ_max` of the feedthrough block.
pub fn lmi_margin(sys: &StateSpace, phi: &SymmetricMatrix, xi: &SymmetricMatrix) -> Result<f64> {
    let (n, m) = (sys.order(), sys.ports());
    if phi.dim() != m || xi.dim() != m {
        return Err(Error::DimensionMismatch("certificate and system port counts differ".into()));
    }
    let fixed = w_constant(sys) + w_phi_part(sys, phi.as_matrix()) + w_xi_part(sys, xi.as_matrix());
    if n == 0 {
        return Ok(-sm(fixed).max_eigenvalue());
    }
    if !lti::is_hurwitz(sys) {
        return Err(Error::NotHurwitz);
    }
    let pb = sym_basis(n);
    let k = pb.len() + 1;
    let t = k - 1;
    let mut terms: Vec<SymmetricMatrix> = pb.iter().map(|e| sm(-w_p_part(sys, e.as_matrix()))).collect();
    terms.push(SymmetricMatrix::scaled_identity(n + m, -1.0));
    let mut p_terms: Vec<SymmetricMatrix> = pb.clone();
    p_terms.push(SymmetricMatrix::zeros(n));
    let mut objective = vec![0.0; k];
    objective[t] = 1.0;
    let mut bounds = vec![(-LMI_MARGIN_P_CAP, LMI_MARGIN_P_CAP); k];
    bounds[t] = (f64::NEG_INFINITY, 1.0);
    let problem = SdpProblem::new(
        objective,
        vec![LmiBlock::new(sm(-fixed), terms)?, LmiBlock::new(SymmetricMatrix::zeros(n), p_terms)?],
    )?
    .with_bounds(bounds)?;
    let sol = sdp::solve(&problem, &SdpOptions::default())?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol.x[t]),
        s => Err(Error::Solver(format!("LMI margin SDP terminated with {s:?}"))),
    }
}

/// IFPM of the memoryless gain `y = Ku`: `Φ = sym(K)`.
pub fn static_ifpm(k: &Matrix) -> Result<PassivityCertificate> {
    Ok(PassivityCertificate::ifp(SymmetricMatrix::sym_part(k)?, Provenance::Declared))
}

/// Whether `y = Ku` lies in the sector `[Φ, ∞]`, i.e. `sym(K) − Φ ⪰ 0`.
pub fn sector_check_static(k: &Matrix, phi: &SymmetricMatrix) -> Result<bool> {
    let s = SymmetricMatrix::sym_part(k)?;
    Ok(is_psd(&s.try_sub(phi)?, LoewnerTol::default()))
}

/// Convenience for tests and the CLI: read a certificate matrix from rows.
pub fn symmetric_from_rows(rows: &[Vec<f64>]) -> Result<SymmetricMatrix> {
    SymmetricMatrix::new(matrix_from_rows(rows)?)
}
