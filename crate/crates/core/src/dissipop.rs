//! Finite-horizon discretization of the dissipativity operator and its
//! spectrum.
//!
//! For `y = g * u` over a `T`-periodic horizon the second variation of the
//! time-averaged supply `uᵀQuu u + 2uᵀQuy y + yᵀQyy y` is the self-adjoint
//! operator `Quu + Quy·G + Gᵀ·Quyᵀ + Gᵀ·Qyy·G` on `L²([0,T])^m`. Sampling at
//! the midpoints `tₖ = (k+½)h` turns it into a symmetric block-circulant
//! matrix whose eigenvalues approach the frequency-domain samples
//! `λᵢ(He G(j2πk/T))` for the passivity supply as `T` and `N` grow.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::lti::{self, Frequency, StateSpace};
use crate::par::Exec;
use crate::passivity::PassivityCertificate;
use crate::symmat::SymmetricMatrix;
use crate::{Error, Matrix, Result};

/// Truncation threshold of the periodization sum.
pub const PERIODIZATION_TOL: f64 = 1e-14;

/// Quadratic supply `s(u, y) = uᵀQuu u + 2uᵀQuy y + yᵀQyy y`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSupplyRate {
    pub quu: SymmetricMatrix,
    pub quy: Matrix,
    pub qyy: SymmetricMatrix,
}

impl QuadraticSupplyRate {
    pub fn new(quu: SymmetricMatrix, quy: Matrix, qyy: SymmetricMatrix) -> Result<Self> {
        let m = quu.dim();
        if quy.shape() != (m, m) || qyy.dim() != m {
            return Err(Error::DimensionMismatch("supply blocks must all be m×m".into()));
        }
        Ok(Self { quu, quy, qyy })
    }

    /// `uᵀy`, i.e. `Quy = ½I`.
    pub fn passivity(m: usize) -> Self {
        Self {
            quu: SymmetricMatrix::zeros(m),
            quy: Matrix::identity(m, m) * 0.5,
            qyy: SymmetricMatrix::zeros(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.quu.dim()
    }
}

#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub horizon: f64,
    pub points: usize,
    pub step: f64,
    pub ports: usize,
    pub matrix: SymmetricMatrix,
}

impl DiscretizedOperator {
    pub fn dim(&self) -> usize {
        self.points * self.ports
    }

    /// Midpoint sample times.
    pub fn times(&self) -> Vec<f64> {
        (0..self.points).map(|k| (k as f64 + 0.5) * self.step).collect()
    }
}

/// `K(t, τ) = ½(g(t−τ) + g(τ−t)ᵀ)` for the causal impulse response `g`,
/// returned with the weight `sym(D)` of the `δ(t−τ)` term. On the diagonal
/// `g(0)` takes the average `½CB` of its one-sided limits.
pub fn passivity_kernel(sys: &StateSpace, t: f64, tau: f64) -> Result<(Matrix, Matrix)> {
    let causal = |s: f64| -> Result<Matrix> {
        if s > 0.0 {
            Ok(lti::impulse_response(sys, s)?.0)
        } else if s == 0.0 {
            Ok(lti::impulse_response(sys, 0.0)?.0 * 0.5)
        } else {
            Ok(Matrix::zeros(sys.ports(), sys.ports()))
        }
    };
    let smooth = (causal(t - tau)? + causal(tau - t)?.transpose()) * 0.5;
    let delta = (sys.d() + sys.d().transpose()) * 0.5;
    Ok((smooth, delta))
}

/// `Σ_{k≥0} e^{AkT}` truncated once `‖e^{AkT}‖₂ < PERIODIZATION_TOL`.
fn periodization_sum(a: &Matrix, horizon: f64) -> Result<Matrix> {
    let n = a.nrows();
    let step = lti::expm(&(a * horizon));
    let mut term = Matrix::identity(n, n);
    let mut sum = Matrix::zeros(n, n);
    for _ in 0..100_000 {
        sum += &term;
        if term.clone().svd(false, false).singular_values.max() < PERIODIZATION_TOL {
            return Ok(sum);
        }
        term = &step * term;
    }
    Err(Error::NoConvergence("periodic extension of the impulse response".into()))
}

/// Lag samples `h·g_per(d·h)` of the periodized impulse response for
/// `d = 0..N`; lag 0 carries the jump average `½CB` plus the images at
/// multiples of `T`.
fn periodic_lags(sys: &StateSpace, horizon: f64, points: usize, exec: Exec) -> Result<Vec<Matrix>> {
    let m = sys.ports();
    if sys.order() == 0 {
        return Ok(vec![Matrix::zeros(m, m); points]);
    }
    let h = horizon / points as f64;
    let s = periodization_sum(sys.a(), horizon)?;
    let cb = sys.c() * sys.b();
    let images = sys.c() * lti::expm(&(sys.a() * horizon)) * &s * sys.b();
    Ok(exec.map_range(points, |d| {
        if d == 0 {
            (&cb * 0.5 + &images) * h
        } else {
            sys.c() * lti::expm(&(sys.a() * (d as f64 * h))) * &s * sys.b() * h
        }
    }))
}

/// Dense convolution operator `G_d` on the grid: block `(i, j)` is
/// `h·g_per((i−j)h)` plus `D` on the diagonal.
fn convolution_matrix(sys: &StateSpace, lags: &[Matrix]) -> Matrix {
    let (m, n) = (sys.ports(), lags.len());
    let mut g = Matrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let d = (i + n - j) % n;
            let mut blk = lags[d].clone();
            if i == j {
                blk += sys.d();
            }
            g.view_mut((i * m, j * m), (m, m)).copy_from(&blk);
        }
    }
    g
}

pub fn discretize_operator(sys: &StateSpace, q: &QuadraticSupplyRate, horizon: f64, points: usize) -> Result<DiscretizedOperator> {
    discretize_operator_with(sys, q, horizon, points, Exec::default())
}

pub fn discretize_operator_with(
    sys: &StateSpace,
    q: &QuadraticSupplyRate,
    horizon: f64,
    points: usize,
    exec: Exec,
) -> Result<DiscretizedOperator> {
    if !(horizon > 0.0 && horizon.is_finite()) || points < 8 {
        return Err(Error::InvalidInput(format!("need T > 0 and N ≥ 8 (got T = {horizon}, N = {points})")));
    }
    if q.dim() != sys.ports() {
        return Err(Error::DimensionMismatch("supply rate and system port counts differ".into()));
    }
    if !lti::is_hurwitz(sys) {
        return Err(Error::NotHurwitz);
    }
    let m = sys.ports();
    let lags = periodic_lags(sys, horizon, points, exec)?;
    let g = convolution_matrix(sys, &lags);
    let dim = points * m;

    let mut op = Matrix::zeros(dim, dim);
    if !q.quu.is_zero() {
        for k in 0..points {
            op.view_mut((k * m, k * m), (m, m)).copy_from(q.quu.as_matrix());
        }
    }
    if q.quy.iter().any(|&x| x != 0.0) {
        // (I⊗Quy)·G_d, block by block
        let rows = exec.map_range(points, |i| q.quy.clone() * g.rows(i * m, m));
        let mut coupling = Matrix::zeros(dim, dim);
        for (i, r) in rows.into_iter().enumerate() {
            coupling.rows_mut(i * m, m).copy_from(&r);
        }
        op += &coupling + coupling.transpose();
    }
    if !q.qyy.is_zero() {
        let mut wy = g.clone();
        for k in 0..points {
            let blk = q.qyy.as_matrix() * g.rows(k * m, m);
            wy.rows_mut(k * m, m).copy_from(&blk);
        }
        op += g.transpose() * wy;
    }
    let asym = (&op - op.transpose()).norm() / op.norm().max(f64::MIN_POSITIVE);
    if asym > 1e-8 {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(DiscretizedOperator {
        horizon,
        points,
        step: horizon / points as f64,
        ports: m,
        matrix: SymmetricMatrix::sym_part(&op)?,
    })
}

/// Eigenvalue with its eigenfunction sampled on the grid: entry `k·m + i`
/// is port `i` at `tₖ`, normalized so that `h·Σ φ² = 1`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub function: DVector<f64>,
}

/// The `count` largest-magnitude eigenpairs, ordered by decreasing `|λ|`.
pub fn operator_spectrum(op: &DiscretizedOperator, count: usize) -> Result<Vec<Eigenpair>> {
    if count > op.dim() {
        return Err(Error::InvalidInput(format!("requested {count} of {} eigenpairs", op.dim())));
    }
    let eig = op.matrix.eig();
    let mut idx: Vec<usize> = (0..eig.values.len()).collect();
    idx.sort_by(|&a, &b| eig.values[b].abs().total_cmp(&eig.values[a].abs()));
    let scale = 1.0 / op.step.sqrt();
    Ok(idx
        .into_iter()
        .take(count)
        .map(|i| Eigenpair {
            value: eig.values[i],
            function: eig.vectors.column(i) * scale,
        })
        .collect())
}

fn weighted_dot(op: &DiscretizedOperator, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    op.step * a.dot(b)
}

/// `⟨op·δu, δu⟩ / ‖δu‖²` in the `h`-weighted inner product.
pub fn rayleigh_quotient(op: &DiscretizedOperator, du: &DVector<f64>) -> Result<f64> {
    if du.len() != op.dim() {
        return Err(Error::DimensionMismatch(format!("signal has {} samples, operator {}", du.len(), op.dim())));
    }
    let nn = weighted_dot(op, du, du);
    if nn == 0.0 {
        return Err(Error::InvalidInput("zero signal".into()));
    }
    Ok(weighted_dot(op, &(op.matrix.as_matrix() * du), du) / nn)
}

/// Samples of `Re(e^{jωt}v)` on the operator grid.
pub fn harmonic_signal(op: &DiscretizedOperator, omega: f64, v: &DVector<Complex64>) -> Result<DVector<f64>> {
    if v.len() != op.ports {
        return Err(Error::DimensionMismatch("direction must have one entry per port".into()));
    }
    let m = op.ports;
    Ok(DVector::from_fn(op.dim(), |r, _| {
        let t = (r / m) as f64 * op.step + 0.5 * op.step;
        (Complex64::from_polar(1.0, omega * t) * v[r % m]).re
    }))
}

/// One matched eigenpair of [`fourier_limit_check`].
#[derive(Debug, Clone, Serialize)]
pub struct FourierMatch {
    pub index: usize,
    pub value: f64,
    pub omega: f64,
    /// Position of the matched eigenvalue in the ascending spectrum of `H(ω)`.
    pub port_index: usize,
    pub reference: f64,
    pub deviation: f64,
    /// Norm of the projection of the eigenfunction onto
    /// `span{e^{jωt}v, e^{−jωt}v̄}`; 1 means perfectly aligned.
    pub alignment: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierReport {
    pub horizon: f64,
    pub points: usize,
    pub matches: Vec<FourierMatch>,
    pub max_relative_deviation: f64,
}

fn projection_norm(op: &DiscretizedOperator, phi: &DVector<f64>, omega: f64, v: &DVector<Complex64>) -> f64 {
    let m = op.ports;
    let wave = |sign: f64| {
        DVector::from_fn(op.dim(), |r, _| {
            let t = (r / m) as f64 * op.step + 0.5 * op.step;
            let vv = if sign > 0.0 { v[r % m] } else { v[r % m].conj() };
            Complex64::from_polar(1.0, sign * omega * t) * vv
        })
    };
    let inner = |a: &DVector<Complex64>, b: &DVector<Complex64>| a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * op.step;
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for w in [wave(1.0), wave(-1.0)] {
        let mut w = w;
        for q in &basis {
            let c = inner(&w, q);
            w -= q * c;
        }
        let n = inner(&w, &w).re.sqrt();
        if n > 1e-8 * op.horizon.sqrt() {
            basis.push(w / Complex64::from(n));
        }
    }
    let phic = phi.map(Complex64::from);
    basis.iter().map(|q| inner(&phic, q).norm_sqr()).sum::<f64>().sqrt()
}

/// Matches each of the `count` largest-magnitude eigenvalues of the
/// passivity-supply operator to the nearest member of
/// `{λᵢ(H(2πk/T)) : k = 0..N/2}`; ties go to the better-aligned candidate.
pub fn fourier_limit_check(sys: &StateSpace, horizon: f64, points: usize, count: usize) -> Result<FourierReport> {
    fourier_limit_check_with(sys, horizon, points, count, Exec::default())
}

pub fn fourier_limit_check_with(sys: &StateSpace, horizon: f64, points: usize, count: usize, exec: Exec) -> Result<FourierReport> {
    let op = discretize_operator_with(sys, &QuadraticSupplyRate::passivity(sys.ports()), horizon, points, exec)?;
    let pairs = operator_spectrum(&op, count)?;
    let omegas: Vec<f64> = (0..=points / 2).map(|k| 2.0 * std::f64::consts::PI * k as f64 / horizon).collect();
    let samples = exec.try_map(&omegas, |&w| Ok::<_, Error>((w, lti::ifpm_sample(sys, Frequency::Finite(w))?.eig())))?;

    let mut matches = Vec::with_capacity(pairs.len());
    for (index, pair) in pairs.iter().enumerate() {
        let mut best: Option<(f64, f64, FourierMatch)> = None;
        for (w, eig) in &samples {
            for (i, &lam) in eig.values.iter().enumerate() {
                let dist = (lam - pair.value).abs();
                if let Some((bd, ba, _)) = &best {
                    if dist > *bd {
                        continue;
                    }
                    if dist == *bd {
                        let al = projection_norm(&op, &pair.function, *w, &eig.vectors.column(i).into_owned());
                        if al <= *ba {
                            continue;
                        }
                    }
                }
                let alignment = projection_norm(&op, &pair.function, *w, &eig.vectors.column(i).into_owned());
                let deviation = if pair.value == 0.0 { dist } else { dist / pair.value.abs() };
                best = Some((
                    dist,
                    alignment,
                    FourierMatch {
                        index,
                        value: pair.value,
                        omega: *w,
                        port_index: i,
                        reference: lam,
                        deviation,
                        alignment,
                    },
                ));
            }
        }
        matches.push(best.expect("nonempty reference set").2);
    }
    let max_relative_deviation = matches.iter().map(|m| m.deviation).fold(0.0, f64::max);
    Ok(FourierReport {
        horizon,
        points,
        matches,
        max_relative_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Decouple the IFPM `Φ`.
    Input,
    /// Decouple the OFPM `Ξ`.
    Output,
}

/// `M = QᵀRQ` with `R` the ascending eigenvalues of `Φ` (or `Ξ`) and the
/// rows of the orthogonal `Q` the matching eigenvectors, each signed so its
/// first nonzero entry is positive.
pub fn decouple(cert: &PassivityCertificate, side: Side) -> (Matrix, Matrix) {
    let s = match side {
        Side::Input => cert.phi(),
        Side::Output => cert.xi(),
    };
    let eig = s.eig();
    let m = s.dim();
    let mut q = Matrix::zeros(m, m);
    for (i, col) in eig.vectors.column_iter().enumerate() {
        let lead = col.iter().find(|x| x.abs() > 1e-12).copied().unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        q.row_mut(i).copy_from(&(col.transpose() * sign));
    }
    let r = Matrix::from_diagonal(&DVector::from_vec(eig.values));
    (q, r)
}
