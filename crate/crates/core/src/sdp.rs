//! Dense primal-dual interior-point solver for
//!
//! ```text
//! maximize cᵀx  subject to  F0_b + Σ xᵢ F_bi ⪰ 0  for every block b
//! ```
//!
//! with optional box bounds on `x`. The method is an infeasible-start
//! path-following scheme with the HKM search direction and a Mehrotra
//! predictor-corrector step. All instances in this crate are small
//! (tens of variables, blocks up to about a dozen rows), so everything is
//! dense and a single solve runs sequentially.

use nalgebra::{Cholesky, DVector, Dyn};

use crate::symmat::SymmetricMatrix;
use crate::{Error, Matrix, Result};

/// One affine constraint `F0 + Σ xᵢ Fᵢ ⪰ 0`.
#[derive(Debug, Clone)]
pub struct LmiBlock {
    pub f0: SymmetricMatrix,
    pub fi: Vec<SymmetricMatrix>,
}

impl LmiBlock {
    pub fn new(f0: SymmetricMatrix, fi: Vec<SymmetricMatrix>) -> Result<Self> {
        if fi.iter().any(|f| f.dim() != f0.dim()) {
            return Err(Error::DimensionMismatch("all Fi must match F0".into()));
        }
        Ok(Self { f0, fi })
    }

    pub fn dim(&self) -> usize {
        self.f0.dim()
    }

    /// `F0 + Σ xᵢ Fᵢ`.
    pub fn evaluate(&self, x: &[f64]) -> SymmetricMatrix {
        let mut m = self.f0.as_matrix().clone();
        for (f, &xi) in self.fi.iter().zip(x) {
            if xi != 0.0 {
                m += f.as_matrix() * xi;
            }
        }
        SymmetricMatrix::sym_part(&m).expect("square")
    }
}

/// `maximize cᵀx` over the intersection of the blocks and the box.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    /// Per-variable `(lower, upper)`; infinite sides are unconstrained.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl SdpProblem {
    pub fn new(objective: Vec<f64>, blocks: Vec<LmiBlock>) -> Result<Self> {
        let p = Self {
            objective,
            blocks,
            bounds: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        self.bounds = Some(bounds);
        self.validate()?;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_vars();
        if self.blocks.is_empty() {
            return Err(Error::InvalidInput("SDP needs at least one block".into()));
        }
        for b in &self.blocks {
            if b.fi.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "block has {} coefficient matrices for {k} variables",
                    b.fi.len()
                )));
            }
            if b.fi.iter().any(|f| f.dim() != b.f0.dim()) {
                return Err(Error::DimensionMismatch("all Fi must match F0".into()));
            }
        }
        if let Some(bd) = &self.bounds {
            if bd.len() != k || bd.iter().any(|(lo, hi)| lo > hi || lo.is_nan() || hi.is_nan()) {
                return Err(Error::InvalidInput("bounds must be k ordered pairs".into()));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective".into()));
        }
        Ok(())
    }

    /// Largest Frobenius norm among all data matrices.
    pub fn scale(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::once(&b.f0).chain(&b.fi))
            .map(SymmetricMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }

    /// `max(0, −min_b λ_min(F_b(x)))`, box included.
    pub fn constraint_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for b in &self.blocks {
            worst = worst.max(-b.evaluate(x).min_eigenvalue());
        }
        if let Some(bd) = &self.bounds {
            for (xi, (lo, hi)) in x.iter().zip(bd) {
                worst = worst.max(lo - xi).max(xi - hi);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    pub status: SdpStatus,
    pub objective_value: f64,
    /// `max(0, −λ_min)` over all constraints at `x`.
    pub max_constraint_violation: f64,
    /// Relative complementarity gap `tr(SY)/(1 + |pobj| + |dobj|)` at termination.
    pub duality_gap_estimate: f64,
    pub iterations: usize,
    /// Dual matrices of the user blocks (box multipliers omitted).
    pub dual: Vec<SymmetricMatrix>,
}

// Internal block with only the structurally nonzero coefficient matrices.
struct Block {
    f0: Matrix,
    terms: Vec<(usize, Matrix)>,
}

impl Block {
    fn dim(&self) -> usize {
        self.f0.nrows()
    }

    fn affine(&self, x: &[f64], with_f0: bool) -> Matrix {
        let mut m = if with_f0 { self.f0.clone() } else { Matrix::zeros(self.dim(), self.dim()) };
        for (i, f) in &self.terms {
            m += f * x[*i];
        }
        m
    }
}

fn lower_blocks(p: &SdpProblem) -> (Vec<Block>, usize) {
    let mut out: Vec<Block> = p
        .blocks
        .iter()
        .map(|b| Block {
            f0: b.f0.as_matrix().clone(),
            terms: b
                .fi
                .iter()
                .enumerate()
                .filter(|(_, f)| !f.is_zero())
                .map(|(i, f)| (i, f.as_matrix().clone()))
                .collect(),
        })
        .collect();
    let user = out.len();
    if let Some(bd) = &p.bounds {
        for (i, &(lo, hi)) in bd.iter().enumerate() {
            if lo.is_finite() {
                out.push(Block {
                    f0: Matrix::from_element(1, 1, -lo),
                    terms: vec![(i, Matrix::from_element(1, 1, 1.0))],
                });
            }
            if hi.is_finite() {
                out.push(Block {
                    f0: Matrix::from_element(1, 1, hi),
                    terms: vec![(i, Matrix::from_element(1, 1, -1.0))],
                });
            }
        }
    }
    (out, user)
}

fn sym(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

fn inner(a: &Matrix, b: &Matrix) -> f64 {
    a.component_mul(b).sum()
}

/// Largest `α` such that `S + α ΔS ⪰ 0`, given the Cholesky factor of `S`.
fn max_step(chol: &Cholesky<f64, Dyn>, ds: &Matrix) -> f64 {
    let l = chol.l();
    let Some(x) = l.solve_lower_triangular(ds) else {
        return 0.0;
    };
    let Some(y) = l.solve_lower_triangular(&x.transpose()) else {
        return 0.0;
    };
    let lam = SymmetricMatrix::sym_part(&y).map(|s| s.min_eigenvalue()).unwrap_or(f64::NAN);
    if lam.is_nan() {
        0.0
    } else if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

struct Iterate {
    x: Vec<f64>,
    s: Vec<Matrix>,
    y: Vec<Matrix>,
}

/// Solve with default options.
pub fn solve_default(problem: &SdpProblem) -> Result<SdpSolution> {
    solve(problem, &SdpOptions::default())
}

pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let k = problem.num_vars();
    let c = DVector::from_vec(problem.objective.clone());
    let (blocks, user_blocks) = lower_blocks(problem);
    let total_dim: usize = blocks.iter().map(Block::dim).sum();
    let f0_scale = blocks.iter().map(|b| b.f0.norm()).fold(0.0, f64::max);
    let c_scale = c.amax();

    let rho = 1.0 + f0_scale.max(c_scale).max(1.0);
    let mut it = Iterate {
        x: vec![0.0; k],
        s: blocks.iter().map(|b| Matrix::identity(b.dim(), b.dim()) * rho).collect(),
        y: blocks.iter().map(|b| Matrix::identity(b.dim(), b.dim()) * rho).collect(),
    };

    // per-variable data norm, the scale of tr(Fᵢ Y) in the dual residual
    let mut f_norm = vec![0.0_f64; k];
    for b in &blocks {
        for (i, f) in &b.terms {
            f_norm[*i] += f.norm_squared();
        }
    }
    let f_norm: Vec<f64> = f_norm.into_iter().map(f64::sqrt).collect();

    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;
    let mut gap_rel = f64::INFINITY;
    let mut last_pinf = f64::INFINITY;

    for iter in 0..opts.max_iter {
        iterations = iter;
        // residuals
        let rp: Vec<Matrix> = blocks
            .iter()
            .zip(&it.s)
            .map(|(b, s)| b.affine(&it.x, true) - s)
            .collect();
        let mut rd = c.clone();
        for (b, y) in blocks.iter().zip(&it.y) {
            for (i, f) in &b.terms {
                rd[*i] += inner(f, y);
            }
        }
        let mu = it.s.iter().zip(&it.y).map(|(s, y)| inner(s, y)).sum::<f64>() / total_dim as f64;
        let pobj = c.dot(&DVector::from_column_slice(&it.x));
        let dobj: f64 = blocks.iter().zip(&it.y).map(|(b, y)| inner(&b.f0, y)).sum();

        let pinf = rp.iter().map(|r| r.norm()).fold(0.0, f64::max) / (1.0 + f0_scale);
        let y_norm = it.y.iter().map(|y| y.norm_squared()).sum::<f64>().sqrt();
        let dinf = rd
            .iter()
            .zip(&problem.objective)
            .zip(&f_norm)
            .map(|((r, ci), fi)| r.abs() / (1.0 + ci.abs() + fi * y_norm))
            .fold(0.0, f64::max);
        gap_rel = mu * total_dim as f64 / (1.0 + pobj.abs() + dobj.abs());
        last_pinf = pinf;

        if !(pinf.is_finite() && dinf.is_finite() && gap_rel.is_finite()) {
            status = SdpStatus::NumericalFailure;
            break;
        }
        if pinf <= opts.feas_tol && dinf <= opts.feas_tol && gap_rel <= opts.gap_tol {
            if problem.constraint_violation(&it.x) <= opts.feas_tol {
                status = SdpStatus::Optimal;
                break;
            }
        }

        // primal infeasibility indicator: a normalized dual ray with
        // tr(Fi Y) ≈ 0 and tr(F0 Y) < 0
        let ytr: f64 = it.y.iter().map(|y| y.trace()).sum();
        if ytr > 1e6 * rho {
            let f0y = dobj / ytr;
            let mut fy = DVector::<f64>::zeros(k);
            for (b, y) in blocks.iter().zip(&it.y) {
                for (i, f) in &b.terms {
                    fy[*i] += inner(f, y) / ytr;
                }
            }
            let ray = fy.amax();
            if f0y < -1e-8 && ray <= 1e-6 * f0y.abs() {
                status = SdpStatus::Infeasible;
                break;
            }
        }

        let sinv: Vec<Matrix> = match it
            .s
            .iter()
            .map(|s| s.clone().cholesky().map(|ch| ch.inverse()))
            .collect::<Option<Vec<_>>>()
        {
            Some(v) => v,
            None => {
                status = SdpStatus::NumericalFailure;
                break;
            }
        };

        // Schur complement matrix M_ij = Σ_b tr(F_bi S⁻¹ F_bj Y)
        let mut m = Matrix::zeros(k, k);
        for ((b, si), y) in blocks.iter().zip(&sinv).zip(&it.y) {
            let g: Vec<Matrix> = b.terms.iter().map(|(_, f)| si * f * y).collect();
            for (i, fi) in &b.terms {
                for ((j, _), gj) in b.terms.iter().zip(&g) {
                    m[(*i, *j)] += inner(fi, &gj.transpose());
                }
            }
        }
        let m = sym(m);
        // M is positive definite in exact arithmetic but loses conditioning
        // near degenerate optima; escalate the diagonal shift and let the
        // refinement steps below correct against the unshifted M.
        let diag_max = 1.0 + m.diagonal().amax();
        let chol_m = [1e-14, 1e-12, 1e-10, 1e-8].iter().find_map(|rel| {
            let mut m_reg = m.clone();
            for i in 0..k {
                m_reg[(i, i)] += rel * diag_max;
            }
            m_reg.cholesky()
        });
        let chol_m = match chol_m {
            Some(ch) => ch,
            None => {
                status = SdpStatus::NumericalFailure;
                break;
            }
        };

        let direction = |sigma_mu: f64, corr: Option<&[(Matrix, Matrix)]>| -> (DVector<f64>, Vec<Matrix>, Vec<Matrix>) {
            let mut rhs = c.clone();
            for (bi, ((b, si), y)) in blocks.iter().zip(&sinv).zip(&it.y).enumerate() {
                let mut inner_mat = si * &rp[bi] * y;
                if let Some(cr) = corr {
                    inner_mat += si * &cr[bi].0 * &cr[bi].1;
                }
                let target = si * sigma_mu - inner_mat;
                for (i, f) in &b.terms {
                    rhs[*i] += inner(f, &target.transpose());
                }
            }
            let mut dx = chol_m.solve(&rhs);
            for _ in 0..3 {
                let r = &rhs - &m * &dx;
                dx += chol_m.solve(&r);
            }
            let mut dss = Vec::with_capacity(blocks.len());
            let mut dys = Vec::with_capacity(blocks.len());
            for (bi, ((b, si), y)) in blocks.iter().zip(&sinv).zip(&it.y).enumerate() {
                let ds = b.affine(dx.as_slice(), false) + &rp[bi];
                let mut dy = si * sigma_mu - y - si * &ds * y;
                if let Some(cr) = corr {
                    dy -= si * &cr[bi].0 * &cr[bi].1;
                }
                dss.push(sym(ds));
                dys.push(sym(dy));
            }
            (dx, dss, dys)
        };

        let chol_s: Vec<Cholesky<f64, Dyn>> = it.s.iter().map(|s| s.clone().cholesky().unwrap()).collect();
        let chol_y: Vec<Cholesky<f64, Dyn>> = match it.y.iter().map(|y| y.clone().cholesky()).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => {
                status = SdpStatus::NumericalFailure;
                break;
            }
        };
        let steps = |dss: &[Matrix], dys: &[Matrix]| -> (f64, f64) {
            let ap = chol_s.iter().zip(dss).map(|(ch, d)| max_step(ch, d)).fold(f64::INFINITY, f64::min);
            let ad = chol_y.iter().zip(dys).map(|(ch, d)| max_step(ch, d)).fold(f64::INFINITY, f64::min);
            ((0.95 * ap).min(1.0), (0.95 * ad).min(1.0))
        };

        // predictor
        let (_, dss_a, dys_a) = direction(0.0, None);
        let (ap_a, ad_a) = steps(&dss_a, &dys_a);
        let mu_aff = it
            .s
            .iter()
            .zip(&it.y)
            .zip(dss_a.iter().zip(&dys_a))
            .map(|((s, y), (ds, dy))| inner(&(s + ds * ap_a), &(y + dy * ad_a)))
            .sum::<f64>()
            / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let corr: Vec<(Matrix, Matrix)> = dss_a.into_iter().zip(dys_a).collect();
        let (dx, dss, dys) = direction(sigma * mu, Some(&corr));
        let (ap, ad) = steps(&dss, &dys);
        if !(ap.is_finite() && ad.is_finite()) || (ap < 1e-12 && ad < 1e-12) {
            status = SdpStatus::NumericalFailure;
            break;
        }
        for (xi, d) in it.x.iter_mut().zip(dx.iter()) {
            *xi += ap * d;
        }
        for (s, d) in it.s.iter_mut().zip(&dss) {
            *s = sym(&*s + d * ap);
        }
        for (y, d) in it.y.iter_mut().zip(&dys) {
            *y = sym(&*y + d * ad);
        }
        iterations = iter + 1;
    }

    if status == SdpStatus::MaxIter && last_pinf > opts.feas_tol.sqrt() {
        status = SdpStatus::Infeasible;
    }
    let objective_value = problem.objective.iter().zip(&it.x).map(|(c, x)| c * x).sum();
    let max_constraint_violation = problem.constraint_violation(&it.x);
    if status == SdpStatus::Optimal && max_constraint_violation > opts.feas_tol {
        status = SdpStatus::NumericalFailure;
    }
    let dual = it
        .y
        .iter()
        .take(user_blocks)
        .map(|y| SymmetricMatrix::sym_part(y).expect("square"))
        .collect();
    Ok(SdpSolution {
        x: it.x,
        status,
        objective_value,
        max_constraint_violation,
        duality_gap_estimate: gap_rel,
        iterations,
        dual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn scalar_upper_bound() {
        let p = SdpProblem::new(vec![1.0], vec![LmiBlock::new(s(&[&[1.0]]), vec![s(&[&[-1.0]])]).unwrap()]).unwrap();
        let sol = solve_default(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn min_eigenvalue_epigraph() {
        let sm = SymmetricMatrix::diag(&[3.0, 1.0, 2.0]);
        let p = SdpProblem::new(vec![1.0], vec![LmiBlock::new(sm, vec![SymmetricMatrix::scaled_identity(3, -1.0)]).unwrap()]).unwrap();
        let sol = solve_default(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-7);
        assert!(sol.max_constraint_violation <= 1e-8);
    }

    fn basis2() -> [SymmetricMatrix; 3] {
        [
            s(&[&[1.0, 0.0], &[0.0, 0.0]]),
            s(&[&[0.0, 1.0], &[1.0, 0.0]]),
            s(&[&[0.0, 0.0], &[0.0, 1.0]]),
        ]
    }

    fn trace_problem(h1: &SymmetricMatrix, h2: &SymmetricMatrix) -> SdpProblem {
        // x = (a, b, c) with Φ = [[a, b], [b, c]]; Hk − Φ ⪰ 0
        let neg: Vec<SymmetricMatrix> = basis2().iter().map(|e| -e).collect();
        SdpProblem::new(
            vec![1.0, 0.0, 1.0],
            vec![
                LmiBlock::new(h1.clone(), neg.clone()).unwrap(),
                LmiBlock::new(h2.clone(), neg).unwrap(),
            ],
        )
        .unwrap()
    }

    fn rand_sym2(rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        s(&[&[a, b], &[b, c]])
    }

    fn psd2(a: f64, b: f64, c: f64) -> bool {
        a >= 0.0 && c >= 0.0 && a * c - b * b >= 0.0
    }

    // Oracle: exhaustive search over a 1e−2 grid of (a, b, c).
    fn grid_oracle(h1: &SymmetricMatrix, h2: &SymmetricMatrix) -> f64 {
        let step = 1e-2;
        let amax = h1.get(0, 0).min(h2.get(0, 0));
        let cmax = h1.get(1, 1).min(h2.get(1, 1));
        let mut best = f64::NEG_INFINITY;
        for ia in 0..400 {
            let a = amax - ia as f64 * step;
            for ib in -300..=300 {
                let b = ib as f64 * step;
                for ic in 0..400 {
                    let c = cmax - ic as f64 * step;
                    if a + c <= best {
                        break;
                    }
                    let ok = [h1, h2].iter().all(|h| psd2(h.get(0, 0) - a, h.get(0, 1) - b, h.get(1, 1) - c));
                    if ok {
                        best = a + c;
                        break;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn trace_max_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let (h1, h2) = (rand_sym2(&mut rng), rand_sym2(&mut rng));
            let sol = solve_default(&trace_problem(&h1, &h2)).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            let grid = grid_oracle(&h1, &h2);
            assert!(sol.objective_value >= grid - 1e-9, "{} vs grid {}", sol.objective_value, grid);
            assert!(sol.objective_value - grid <= 0.05, "{} vs grid {}", sol.objective_value, grid);
        }
    }

    #[test]
    fn objective_scaling_invariance() {
        let a = s(&[&[2.0, 0.5], &[0.5, 1.0]]);
        let b = s(&[&[1.0, -0.3], &[-0.3, 3.0]]);
        // strictly concave objective via an epigraph keeps the argmax unique
        let p1 = trace_problem(&a, &b);
        let mut p2 = p1.clone();
        for c in &mut p2.objective {
            *c *= 7.5;
        }
        let s1 = solve_default(&p1).unwrap();
        let s2 = solve_default(&p2).unwrap();
        assert_eq!((s1.status, s2.status), (SdpStatus::Optimal, SdpStatus::Optimal));
        assert!((s2.objective_value - 7.5 * s1.objective_value).abs() < 1e-6);
    }

    #[test]
    fn diagonal_block_closed_form() {
        // maximize Σ wᵢ xᵢ s.t. diag(dᵢ − xᵢ) ⪰ 0 → x = d
        let d = [1.5, -2.0, 0.25];
        let fi: Vec<SymmetricMatrix> = (0..3)
            .map(|i| {
                let mut v = [0.0; 3];
                v[i] = -1.0;
                SymmetricMatrix::diag(&v)
            })
            .collect();
        let p = SdpProblem::new(vec![1.0, 2.0, 0.5], vec![LmiBlock::new(SymmetricMatrix::diag(&d), fi).unwrap()]).unwrap();
        let sol = solve_default(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let want: f64 = 1.5 - 4.0 + 0.125;
        assert!((sol.objective_value - want).abs() <= 1e-8 * (1.0 + want.abs()));
    }

    #[test]
    fn detects_infeasibility() {
        // x ≥ 1 and x ≤ −1
        let p = SdpProblem::new(
            vec![1.0],
            vec![
                LmiBlock::new(s(&[&[-1.0]]), vec![s(&[&[1.0]])]).unwrap(),
                LmiBlock::new(s(&[&[-1.0]]), vec![s(&[&[-1.0]])]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(solve_default(&p).unwrap().status, SdpStatus::Infeasible);

        // [[x, 1], [1, −x]] ⪰ 0 has no solution
        let p = SdpProblem::new(vec![0.0], vec![LmiBlock::new(s(&[&[0.0, 1.0], &[1.0, 0.0]]), vec![s(&[&[1.0, 0.0], &[0.0, -1.0]])]).unwrap()]).unwrap();
        assert_eq!(solve_default(&p).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn bounds_cap_unbounded_direction() {
        let p = SdpProblem::new(vec![1.0, 1.0], vec![LmiBlock::new(s(&[&[1.0]]), vec![s(&[&[-1.0]]), s(&[&[0.0]])]).unwrap()])
            .unwrap()
            .with_bounds(vec![(f64::NEG_INFINITY, f64::INFINITY), (-3.0, 2.0)])
            .unwrap();
        let sol = solve_default(&p).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-7 && (sol.x[1] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn invalid_problems_rejected() {
        assert!(SdpProblem::new(vec![1.0], vec![]).is_err());
        assert!(SdpProblem::new(vec![1.0, 2.0], vec![LmiBlock::new(s(&[&[1.0]]), vec![s(&[&[1.0]])]).unwrap()]).is_err());
        assert!(LmiBlock::new(s(&[&[1.0]]), vec![SymmetricMatrix::identity(2)]).is_err());
    }

    #[test]
    fn random_optimal_solutions_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..6);
            let k = rng.gen_range(1..5);
            let rand_sym = |rng: &mut ChaCha8Rng| {
                let m = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
                SymmetricMatrix::sym_part(&m).unwrap()
            };
            let fi: Vec<SymmetricMatrix> = (0..k).map(|_| rand_sym(&mut rng)).collect();
            let f0 = SymmetricMatrix::scaled_identity(n, 1.0);
            let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = SdpProblem::new(c, vec![LmiBlock::new(f0, fi).unwrap()])
                .unwrap()
                .with_bounds(vec![(-10.0, 10.0); k])
                .unwrap();
            let sol = solve_default(&p).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!(sol.max_constraint_violation <= 1e-8);
            assert!(p.blocks[0].evaluate(&sol.x).min_eigenvalue() >= -1e-8);
        }
    }
}
