//! Continuous-time LTI systems `ẋ = Ax + Bu, y = Cx + Du` with square
//! transfer matrices, their frequency responses, structural tests and
//! block-diagram composition.

use nalgebra::{DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::par::Exec;
use crate::symmat::{hermitian_part, matrix_from_rows, matrix_to_rows, HermitianMatrix, COND_MAX};
use crate::{CMatrix, Error, Matrix, Result};

/// Strictness margin for Hurwitz and minimum-phase tests.
pub const STAB_TOL: f64 = 1e-9;

/// Real state-space realization with `m` inputs, `m` outputs and `n ≥ 0`
/// states. `n = 0` encodes a static gain `y = Du`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

impl StateSpace {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let n = a.nrows();
        let m = d.nrows();
        let ok = a.ncols() == n
            && d.ncols() == m
            && m >= 1
            && b.nrows() == n
            && b.ncols() == m
            && c.nrows() == m
            && c.ncols() == n;
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        if [&a, &b, &c, &d].iter().any(|x| x.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput("non-finite system matrix entry".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Memoryless map `y = Du`.
    pub fn static_gain(d: Matrix) -> Result<Self> {
        let m = d.nrows();
        Self::new(Matrix::zeros(0, 0), Matrix::zeros(0, m), Matrix::zeros(m, 0), d)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// Number of states.
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Number of inputs (= outputs).
    pub fn ports(&self) -> usize {
        self.d.nrows()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SystemJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
            c: matrix_to_rows(&self.c),
            d: matrix_to_rows(&self.d),
        }
    }
}

/// On-disk system schema: `{ "A": [[..]], "B": [[..]], "C": [[..]], "D": [[..]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
}

impl TryFrom<SystemJson> for StateSpace {
    type Error = Error;

    fn try_from(j: SystemJson) -> Result<Self> {
        let d = matrix_from_rows(&j.d)?;
        let m = d.nrows();
        let n = j.a.len();
        let a = if n == 0 { Matrix::zeros(0, 0) } else { matrix_from_rows(&j.a)? };
        let b = if n == 0 { Matrix::zeros(0, m) } else { matrix_from_rows(&j.b)? };
        let c = if n == 0 { Matrix::zeros(m, 0) } else { matrix_from_rows(&j.c)? };
        StateSpace::new(a, b, c, d)
    }
}

/// A frequency sample: finite `ω` (rad/s) or the `ω → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Finite(f64),
    Infinity,
}

impl Frequency {
    pub fn as_f64(self) -> f64 {
        match self {
            Frequency::Finite(w) => w,
            Frequency::Infinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Frequency {
    fn from(w: f64) -> Self {
        if w.is_infinite() {
            Frequency::Infinity
        } else {
            Frequency::Finite(w)
        }
    }
}

/// Ascending non-negative sample frequencies; always contains `ω = 0` and
/// ends with the infinity marker.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    finite: Vec<f64>,
}

impl FrequencyGrid {
    /// `0`, `count` log-spaced points over `[lo, hi]`, then `∞`.
    pub fn log_spaced(count: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(Error::InvalidInput(format!("log grid [{lo}, {hi}] x {count}")));
        }
        let (l0, l1) = (lo.log10(), hi.log10());
        let mut finite = vec![0.0];
        finite.extend((0..count).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (count - 1) as f64)));
        Ok(Self { finite })
    }

    /// Build from explicit finite frequencies (0 is prepended if missing).
    pub fn from_finite(mut omegas: Vec<f64>) -> Result<Self> {
        if omegas.first() != Some(&0.0) {
            omegas.insert(0, 0.0);
        }
        if omegas.iter().any(|w| !w.is_finite() || *w < 0.0) || omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("frequencies must be finite, non-negative, strictly increasing".into()));
        }
        Ok(Self { finite: omegas })
    }

    pub fn finite(&self) -> &[f64] {
        &self.finite
    }

    /// All samples, infinity last.
    pub fn points(&self) -> Vec<Frequency> {
        let mut p: Vec<Frequency> = self.finite.iter().map(|&w| Frequency::Finite(w)).collect();
        p.push(Frequency::Infinity);
        p
    }

    pub fn len(&self) -> usize {
        self.finite.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for FrequencyGrid {
    /// 400 log-spaced points over `[1e−3, 1e4]` rad/s plus `0` and `∞`.
    fn default() -> Self {
        Self::log_spaced(400, 1e-3, 1e4).expect("valid default grid")
    }
}

fn to_complex(m: &Matrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

fn cond_ok(m: &CMatrix) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    min > 0.0 && max / min <= COND_MAX
}

fn complex_inverse(m: &CMatrix, what: &str) -> Result<CMatrix> {
    if !cond_ok(m) {
        return Err(Error::Singular(what.into()));
    }
    m.clone().try_inverse().ok_or_else(|| Error::Singular(what.into()))
}

/// `G(jω) = C(jωI − A)⁻¹B + D`; `D` at the infinity marker.
pub fn freq_response(sys: &StateSpace, w: Frequency) -> Result<CMatrix> {
    let d = to_complex(&sys.d);
    let w = match w {
        Frequency::Infinity => return Ok(d),
        Frequency::Finite(w) => w,
    };
    let n = sys.order();
    if n == 0 {
        return Ok(d);
    }
    let mut res = -to_complex(&sys.a);
    for i in 0..n {
        res[(i, i)] += Complex64::new(0.0, w);
    }
    if !cond_ok(&res) {
        return Err(Error::Singular(format!("resolvent near-singular at ω = {w}")));
    }
    let x = res
        .lu()
        .solve(&to_complex(&sys.b))
        .ok_or_else(|| Error::Singular(format!("resolvent singular at ω = {w}")))?;
    Ok(to_complex(&sys.c) * x + d)
}

/// `H(ω) = (G(jω) + Gᴴ(jω))/2`.
pub fn ifpm_sample(sys: &StateSpace, w: Frequency) -> Result<HermitianMatrix> {
    hermitian_part(&freq_response(sys, w)?)
}

/// `K(ω) = (G⁻¹(jω) + G⁻ᴴ(jω))/2`.
pub fn ofpm_sample(sys: &StateSpace, w: Frequency) -> Result<HermitianMatrix> {
    let g = freq_response(sys, w)?;
    hermitian_part(&complex_inverse(&g, "transfer matrix not invertible")?)
}

/// `H_R(ω) = (Rᴴ G(jω) + Gᴴ(jω) R)/2`.
///
/// With `R = I` this is `H(ω)`. The weighted margin `λ_min(H_R)` carries
/// the same factor-of-one convention as `ifpm_sample`; halve `R` to match a
/// supply written as `uᵀRᴴy` without the symmetrizing `1/2`.
pub fn weighted_ifpm_sample(sys: &StateSpace, r: &CMatrix, w: Frequency) -> Result<HermitianMatrix> {
    let g = freq_response(sys, w)?;
    if r.nrows() != g.nrows() || r.ncols() != g.ncols() {
        return Err(Error::DimensionMismatch("weight must be m x m".into()));
    }
    hermitian_part(&(r.adjoint() * g))
}

/// All eigenvalues of `A` have real part below `−STAB_TOL`.
pub fn is_hurwitz(sys: &StateSpace) -> bool {
    spectral_abscissa(sys.a()) < -STAB_TOL
}

/// Largest real part among the eigenvalues of a square matrix
/// (`−∞` for an empty matrix).
pub fn spectral_abscissa(a: &Matrix) -> f64 {
    if a.nrows() == 0 {
        return f64::NEG_INFINITY;
    }
    a.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Finite invariant zeros: finite generalized eigenvalues of the Rosenbrock
/// pencil `[[A − λI, B], [C, D]]`.
///
/// Returns `None` for a degenerate pencil (singular for every `λ`).
pub fn invariant_zeros(sys: &StateSpace) -> Option<Vec<Complex64>> {
    let n = sys.order();
    let m = sys.ports();
    let k = n + m;
    let mut pencil = Matrix::zeros(k, k);
    pencil.view_mut((0, 0), (n, n)).copy_from(&sys.a);
    pencil.view_mut((0, n), (n, m)).copy_from(&sys.b);
    pencil.view_mut((n, 0), (m, n)).copy_from(&sys.c);
    pencil.view_mut((n, n), (m, m)).copy_from(&sys.d);
    let mut e = Matrix::zeros(k, k);
    for i in 0..n {
        e[(i, i)] = 1.0;
    }
    // shift-invert: (M − s0 E)⁻¹ E v = μ v  ⇔  λ = s0 + 1/μ
    let scale = 1.0 + pencil.amax();
    for s0 in [0.618_033_988_7 * scale, -1.324_717_957_2 * scale, 2.718_281_828_4 * scale] {
        let shifted = &pencil - &e * s0;
        let Some(inv) = shifted.clone().try_inverse() else { continue };
        let sv = SVD::new(shifted, false, false).singular_values;
        if sv.min() <= sv.max() / COND_MAX {
            continue;
        }
        let mu = (inv * &e).complex_eigenvalues();
        let mu_max = mu.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let zeros = mu
            .iter()
            .filter(|z| z.norm() > 1e-10 * mu_max.max(1e-300))
            .map(|z| Complex64::new(s0, 0.0) + z.inv())
            .collect();
        return Some(zeros);
    }
    None
}

/// Every finite invariant zero strictly in the open left half-plane.
pub fn is_minimum_phase(sys: &StateSpace) -> bool {
    match invariant_zeros(sys) {
        Some(z) => z.iter().all(|z| z.re < -STAB_TOL),
        None => false,
    }
}

/// `(A, C)` observability rank test.
pub fn is_observable(sys: &StateSpace) -> bool {
    let n = sys.order();
    if n == 0 {
        return true;
    }
    let m = sys.ports();
    let mut obs = Matrix::zeros(n * m, n);
    let mut block = sys.c.clone();
    for k in 0..n {
        obs.view_mut((k * m, 0), (m, n)).copy_from(&block);
        block = &block * &sys.a;
    }
    let sv = SVD::new(obs, false, false).singular_values;
    let tol = sv.max() * (n * m) as f64 * f64::EPSILON * 10.0;
    sv.iter().filter(|&&s| s > tol).count() == n
}

/// Matrix exponential `e^{A}` (scaling and squaring with a Padé approximant).
pub fn expm(a: &Matrix) -> Matrix {
    if a.nrows() == 0 {
        return a.clone();
    }
    a.clone().exp()
}

/// Impulse response `g(t) = C e^{At} B` with the feedthrough `D` reported
/// separately as the weight of the `δ(t)` term.
pub fn impulse_response(sys: &StateSpace, t: f64) -> Result<(Matrix, Matrix)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("impulse response at t = {t}")));
    }
    let smooth = if sys.order() == 0 {
        Matrix::zeros(sys.ports(), sys.ports())
    } else {
        &sys.c * expm(&(&sys.a * t)) * &sys.b
    };
    Ok((smooth, sys.d.clone()))
}

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Parallel connection: shared input, summed outputs.
pub fn compose_parallel(s1: &StateSpace, s2: &StateSpace) -> Result<StateSpace> {
    if s1.ports() != s2.ports() {
        return Err(Error::DimensionMismatch("parallel connection needs equal port counts".into()));
    }
    let b = Matrix::from_fn(s1.order() + s2.order(), s1.ports(), |i, j| {
        if i < s1.order() {
            s1.b[(i, j)]
        } else {
            s2.b[(i - s1.order(), j)]
        }
    });
    let c = Matrix::from_fn(s1.ports(), s1.order() + s2.order(), |i, j| {
        if j < s1.order() {
            s1.c[(i, j)]
        } else {
            s2.c[(i, j - s1.order())]
        }
    });
    StateSpace::new(block_diag(&s1.a, &s2.a), b, c, &s1.d + &s2.d)
}

/// Negative feedback loop with `e₁ = u₁ − y₂`, `e₂ = u₂ + y₁`; the result
/// maps `(u₁, u₂)` to `(y₁, y₂)`.
pub fn compose_feedback(s1: &StateSpace, s2: &StateSpace) -> Result<StateSpace> {
    let m = s1.ports();
    if s2.ports() != m {
        return Err(Error::DimensionMismatch("feedback connection needs equal port counts".into()));
    }
    let (n1, n2) = (s1.order(), s2.order());
    let n = n1 + n2;
    let eye = Matrix::identity(m, m);
    let coupling = &eye + &s1.d * &s2.d;
    let sv = SVD::new(coupling.clone(), false, false).singular_values;
    if sv.min() <= sv.max() / COND_MAX {
        return Err(Error::Singular("algebraic loop: I + D1 D2 singular".into()));
    }
    let delta = coupling.try_inverse().ok_or_else(|| Error::Singular("algebraic loop".into()))?;

    // y1 = Δ (C1 x1 − D1 C2 x2 + D1 u1 − D1 D2 u2)
    let mut cy1 = Matrix::zeros(m, n);
    cy1.view_mut((0, 0), (m, n1)).copy_from(&(&delta * &s1.c));
    cy1.view_mut((0, n1), (m, n2)).copy_from(&(-(&delta * &s1.d * &s2.c)));
    let mut dy1 = Matrix::zeros(m, 2 * m);
    dy1.view_mut((0, 0), (m, m)).copy_from(&(&delta * &s1.d));
    dy1.view_mut((0, m), (m, m)).copy_from(&(-(&delta * &s1.d * &s2.d)));
    // y2 = C2 x2 + D2 u2 + D2 y1
    let mut cy2 = &s2.d * &cy1;
    {
        let mut v = cy2.view_mut((0, n1), (m, n2));
        v += &s2.c;
    }
    let mut dy2 = &s2.d * &dy1;
    {
        let mut v = dy2.view_mut((0, m), (m, m));
        v += &s2.d;
    }
    let mut cc = Matrix::zeros(2 * m, n);
    cc.view_mut((0, 0), (m, n)).copy_from(&cy1);
    cc.view_mut((m, 0), (m, n)).copy_from(&cy2);
    let mut dd = Matrix::zeros(2 * m, 2 * m);
    dd.view_mut((0, 0), (m, 2 * m)).copy_from(&dy1);
    dd.view_mut((m, 0), (m, 2 * m)).copy_from(&dy2);

    // e1 = u1 − y2, e2 = u2 + y1
    let mut sel_u1 = Matrix::zeros(m, 2 * m);
    sel_u1.view_mut((0, 0), (m, m)).copy_from(&eye);
    let mut sel_u2 = Matrix::zeros(m, 2 * m);
    sel_u2.view_mut((0, m), (m, m)).copy_from(&eye);
    let ce1 = -&cy2;
    let de1 = &sel_u1 - &dy2;
    let ce2 = cy1.clone();
    let de2 = &sel_u2 + &dy1;

    let mut a = block_diag(&s1.a, &s2.a);
    let mut b = Matrix::zeros(n, 2 * m);
    if n1 > 0 {
        let mut v = a.view_mut((0, 0), (n1, n));
        v += &s1.b * &ce1;
        b.view_mut((0, 0), (n1, 2 * m)).copy_from(&(&s1.b * &de1));
    }
    if n2 > 0 {
        let mut v = a.view_mut((n1, 0), (n2, n));
        v += &s2.b * &ce2;
        b.view_mut((n1, 0), (n2, 2 * m)).copy_from(&(&s2.b * &de2));
    }
    StateSpace::new(a, b, cc, dd)
}

/// Sub-system from the inputs `inputs` to the outputs `outputs` of a
/// realization, other inputs held at zero.
pub fn select_channels(sys: &StateSpace, inputs: std::ops::Range<usize>, outputs: std::ops::Range<usize>) -> Result<StateSpace> {
    let p = sys.ports();
    if inputs.len() != outputs.len() || inputs.end > p || outputs.end > p || inputs.is_empty() {
        return Err(Error::DimensionMismatch(format!("channels {inputs:?} -> {outputs:?} of a {p}-port system")));
    }
    let (m, n) = (inputs.len(), sys.order());
    StateSpace::new(
        sys.a.clone(),
        sys.b.view((0, inputs.start), (n, m)).into_owned(),
        sys.c.view((outputs.start, 0), (m, n)).into_owned(),
        sys.d.view((outputs.start, inputs.start), (m, m)).into_owned(),
    )
}

/// Feedback loop of [`compose_feedback`] seen from `u₁` to `y₁` with `u₂ = 0`.
pub fn passivation_loop(s1: &StateSpace, s2: &StateSpace) -> Result<StateSpace> {
    let m = s1.ports();
    select_channels(&compose_feedback(s1, s2)?, 0..m, 0..m)
}

/// Closes `sys` with the static negative feedback `e = u − θK y`
/// (second loop input held at zero); the transfer function is
/// `(I + θ G K)⁻¹ G`.
pub fn close_loop_static(sys: &StateSpace, k: &Matrix, theta: f64) -> Result<StateSpace> {
    let m = sys.ports();
    if k.shape() != (m, m) {
        return Err(Error::DimensionMismatch("feedback gain must be m x m".into()));
    }
    let gain = k * theta;
    let coupling = Matrix::identity(m, m) + &sys.d * &gain;
    let sv = SVD::new(coupling.clone(), false, false).singular_values;
    if sv.min() <= sv.max() / COND_MAX {
        return Err(Error::Singular("algebraic loop: I + θ D K singular".into()));
    }
    let delta = coupling.try_inverse().ok_or_else(|| Error::Singular("algebraic loop".into()))?;
    let c = &delta * &sys.c;
    let d = &delta * &sys.d;
    let a = &sys.a - &sys.b * &gain * &c;
    let b = &sys.b * (Matrix::identity(m, m) - &gain * &d);
    StateSpace::new(a, b, c, d)
}

/// Realization of `G⁻¹(s)`; requires invertible `D`.
pub fn inverse_system(sys: &StateSpace) -> Result<StateSpace> {
    let d = &sys.d;
    let sv = SVD::new(d.clone(), false, false).singular_values;
    if sv.min() <= sv.max() / COND_MAX {
        return Err(Error::Singular("feedthrough D not invertible".into()));
    }
    let di = d.clone().try_inverse().ok_or_else(|| Error::Singular("D".into()))?;
    StateSpace::new(
        &sys.a - &sys.b * &di * &sys.c,
        &sys.b * &di,
        -(&di * &sys.c),
        di,
    )
}

/// Which frequency-domain family a sweep minimizes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `H(ω)`: input-feedforward.
    InputFeedforward,
    /// `K(ω)`: output-feedback.
    OutputFeedback,
}

impl Family {
    pub fn sample(self, sys: &StateSpace, w: Frequency) -> Result<HermitianMatrix> {
        match self {
            Family::InputFeedforward => ifpm_sample(sys, w),
            Family::OutputFeedback => ofpm_sample(sys, w),
        }
    }
}

/// Minimum of a scalar frequency function with the sample that attains it.
#[derive(Debug, Clone)]
pub struct SweepMinimum<T> {
    pub value: f64,
    pub frequency: Frequency,
    pub witness: T,
}

const REFINE_RTOL: f64 = 1e-6;
const REFINE_CANDIDATES: usize = 3;

/// Minimizes `f` over the grid, then refines the best coarse local minima
/// by golden-section search on their bracketing interval. The `∞` sample
/// is always part of the result.
pub fn sweep_minimum<T, F>(grid: &FrequencyGrid, exec: Exec, f: F) -> Result<SweepMinimum<T>>
where
    T: Send + Clone,
    F: Fn(Frequency) -> Result<(f64, T)> + Sync + Send,
{
    let finite = grid.finite();
    let coarse: Vec<(f64, T)> = exec.try_map(finite, |&w| f(Frequency::Finite(w)))?;
    let (inf_val, inf_wit) = f(Frequency::Infinity)?;
    let mut best = SweepMinimum {
        value: inf_val,
        frequency: Frequency::Infinity,
        witness: inf_wit,
    };

    let vals: Vec<f64> = coarse.iter().map(|c| c.0).collect();
    let mut local: Vec<usize> = (0..vals.len())
        .filter(|&i| {
            let left = i == 0 || vals[i] <= vals[i - 1];
            let right = i + 1 == vals.len() || vals[i] <= vals[i + 1];
            left && right
        })
        .collect();
    local.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    local.truncate(REFINE_CANDIDATES);

    for (i, (v, wit)) in coarse.iter().enumerate() {
        if *v < best.value {
            best = SweepMinimum {
                value: *v,
                frequency: Frequency::Finite(finite[i]),
                witness: wit.clone(),
            };
        }
    }

    for &i in &local {
        let lo = if i == 0 { finite[0] } else { finite[i - 1] };
        let hi = if i + 1 == finite.len() { finite[i] } else { finite[i + 1] };
        if hi <= lo {
            continue;
        }
        let r = golden_section(lo, hi, |w| f(Frequency::Finite(w)))?;
        if r.value < best.value {
            best = r;
        }
    }
    Ok(best)
}

fn golden_section<T, F>(mut a: f64, mut b: f64, f: F) -> Result<SweepMinimum<T>>
where
    F: Fn(f64) -> Result<(f64, T)>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > REFINE_RTOL * b.abs().max(1e-9) {
        if f1.0 <= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    let (w, (value, witness)) = if f1.0 <= f2.0 { (x1, f1) } else { (x2, f2) };
    Ok(SweepMinimum {
        value,
        frequency: Frequency::Finite(w),
        witness,
    })
}

/// Scalar index `min_ω λ_min` of `H(ω)` or `K(ω)`, with the minimizing
/// frequency and the unit eigenvector of the weakest direction.
pub type ScalarIndex = SweepMinimum<DVector<Complex64>>;

pub fn scalar_index_freq(sys: &StateSpace, grid: &FrequencyGrid, family: Family) -> Result<ScalarIndex> {
    scalar_index_freq_with(sys, grid, family, Exec::default())
}

pub fn scalar_index_freq_with(
    sys: &StateSpace,
    grid: &FrequencyGrid,
    family: Family,
    exec: Exec,
) -> Result<ScalarIndex> {
    sweep_minimum(grid, exec, |w| {
        let e = family.sample(sys, w)?.eig();
        Ok(e.min_pair())
    })
}
