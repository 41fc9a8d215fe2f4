//! Dense symmetric and Hermitian matrices.
//!
//! Both types validate symmetry on construction and reject inputs whose
//! asymmetry exceeds `SYM_TOL · max(1, ‖M‖_∞)`. Accepted inputs are stored
//! exactly symmetrized so downstream eigen-solvers see a symmetric matrix.
//!
//! Loewner comparisons use a mixed tolerance `tol_abs + tol_rel · ‖B − A‖_F`.
//! Neither tolerance comes from the underlying theory; they are engineering
//! defaults exposed through [`LoewnerTol`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::{CMatrix, Error, Matrix, Result};

/// Relative symmetry tolerance.
pub const SYM_TOL: f64 = 1e-10;
/// Maximum condition number accepted for a Schur-complement pivot or an
/// explicit inverse.
pub const COND_MAX: f64 = 1e12;

/// Absolute-plus-relative tolerance for Loewner-order tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoewnerTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for LoewnerTol {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-9 }
    }
}

impl LoewnerTol {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    /// Effective tolerance for a difference matrix with Frobenius norm `scale`.
    pub fn at(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

fn inf_norm<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols || rows == 0 {
        return Err(Error::NonSquare { rows, cols });
    }
    Ok(())
}

/// Real symmetric matrix.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricMatrix{:?}", self.to_rows())
    }
}

impl SymmetricMatrix {
    /// Validates symmetry within [`SYM_TOL`].
    pub fn new(m: Matrix) -> Result<Self> {
        check_square(m.nrows(), m.ncols())?;
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let asym = (&m - m.transpose()).abs().max();
        if asym > SYM_TOL * inf_norm(&m).max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    /// Symmetric part `(M + Mᵀ)/2` of an arbitrary square matrix.
    pub fn sym_part(m: &Matrix) -> Result<Self> {
        check_square(m.nrows(), m.ncols())?;
        Ok(Self((m + m.transpose()) * 0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim, dim))
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self(Matrix::identity(dim, dim) * s)
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(Matrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_to_rows(&self.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Spectral norm (largest eigenvalue magnitude).
    pub fn spectral_norm(&self) -> f64 {
        let v = self.eigenvalues();
        v[0].abs().max(v[v.len() - 1].abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// Ascending eigendecomposition.
    pub fn eig(&self) -> EigenDecomposition<f64> {
        let se = SymmetricEigen::new(self.0.clone());
        EigenDecomposition::sorted(se.eigenvalues.as_slice(), se.eigenvectors)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("dim >= 1")
    }

    pub fn inertia(&self, tol: f64) -> Inertia {
        inertia(self, tol)
    }

    /// Inverse, refusing matrices with condition number above [`COND_MAX`].
    pub fn inverse(&self) -> Result<Self> {
        let ev = self.eigenvalues();
        let max = ev.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let min = ev.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        if min == 0.0 || max / min > COND_MAX {
            return Err(Error::Singular(format!(
                "symmetric matrix with condition number {:.3e}",
                if min == 0.0 { f64::INFINITY } else { max / min }
            )));
        }
        let inv = self
            .0
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("inverse failed".into()))?;
        Ok(Self((&inv + inv.transpose()) * 0.5))
    }

    /// `Tᵀ · self · T`.
    pub fn congruence(&self, t: &Matrix) -> Result<Self> {
        if t.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence by {}x{} of {}x{}",
                t.nrows(),
                t.ncols(),
                self.dim(),
                self.dim()
            )));
        }
        Self::sym_part(&(t.transpose() * &self.0 * t))
    }

    /// Block-diagonal concatenation.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let (n, m) = (a.dim(), b.dim());
        let mut out = Matrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&a.0);
        out.view_mut((n, n), (m, m)).copy_from(&b.0);
        Self(out)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix(self.0.map(|x| Complex64::new(x, 0.0)))
    }
}

impl Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn add(self, rhs: Self) -> SymmetricMatrix {
        self.try_add(rhs).expect("dimension mismatch in SymmetricMatrix + SymmetricMatrix")
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn sub(self, rhs: Self) -> SymmetricMatrix {
        self.try_sub(rhs).expect("dimension mismatch in SymmetricMatrix - SymmetricMatrix")
    }
}

impl Mul<f64> for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn mul(self, rhs: f64) -> SymmetricMatrix {
        SymmetricMatrix(&self.0 * rhs)
    }
}

impl Neg for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn neg(self) -> SymmetricMatrix {
        SymmetricMatrix(-&self.0)
    }
}

/// Complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(m.nrows(), m.ncols())?;
        let asym = (&m - m.adjoint()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        if asym > SYM_TOL * inf_norm(&m).max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self((&m + m.adjoint()) * Complex64::new(0.5, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eig(&self) -> EigenDecomposition<Complex64> {
        let se = SymmetricEigen::new(self.0.clone());
        EigenDecomposition::sorted(se.eigenvalues.as_slice(), se.eigenvectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `self − C` for a real symmetric `C`.
    pub fn sub_real(&self, c: &SymmetricMatrix) -> Result<Self> {
        if c.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                c.dim()
            )));
        }
        Ok(Self(&self.0 - c.as_matrix().map(|x| Complex64::new(x, 0.0))))
    }

    /// Real part, which is symmetric when `self` is Hermitian.
    pub fn real_part(&self) -> SymmetricMatrix {
        SymmetricMatrix(self.0.map(|z| z.re))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * Complex64::new(s, 0.0))
    }
}

/// Ascending eigenvalues with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: nalgebra::Scalar> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

impl<T: nalgebra::ComplexField<RealField = f64>> EigenDecomposition<T> {
    fn sorted(values: &[f64], vectors: DMatrix<T>) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let vals = idx.iter().map(|&i| values[i]).collect();
        let cols: Vec<_> = idx.iter().map(|&i| vectors.column(i).into_owned()).collect();
        Self {
            values: vals,
            vectors: DMatrix::from_columns(&cols),
        }
    }

    /// `V · diag(λ) · Vᴴ`.
    pub fn reconstruct(&self) -> DMatrix<T> {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| T::from_real(x)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }

    pub fn min_pair(&self) -> (f64, DVector<T>) {
        (self.values[0], self.vectors.column(0).into_owned())
    }
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Hermitian part `(M + Mᴴ)/2` of a complex square matrix.
pub fn hermitian_part(m: &CMatrix) -> Result<HermitianMatrix> {
    check_square(m.nrows(), m.ncols())?;
    Ok(HermitianMatrix((m + m.adjoint()) * Complex64::new(0.5, 0.0)))
}

/// Counts eigenvalues `> tol`, `< −tol` and in `[−tol, tol]`.
pub fn inertia(s: &SymmetricMatrix, tol: f64) -> Inertia {
    let tol = tol.max(0.0);
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for v in s.eigenvalues() {
        if v > tol {
            out.positive += 1;
        } else if v < -tol {
            out.negative += 1;
        } else {
            out.zero += 1;
        }
    }
    out
}

/// Smallest eigenvalue of `B − A`.
pub fn loewner_gap(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    Ok(b.try_sub(a)?.min_eigenvalue())
}

/// `A ⪯ B` within the mixed tolerance.
pub fn loewner_leq(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: LoewnerTol) -> Result<bool> {
    let diff = b.try_sub(a)?;
    Ok(diff.min_eigenvalue() >= -tol.at(diff.frobenius_norm()))
}

/// `M ⪰ 0` within the mixed tolerance.
pub fn is_psd(m: &SymmetricMatrix, tol: LoewnerTol) -> bool {
    m.min_eigenvalue() >= -tol.at(m.frobenius_norm())
}

/// `M ≻ 0`: smallest eigenvalue strictly above the tolerance.
pub fn is_pd(m: &SymmetricMatrix, tol: LoewnerTol) -> bool {
    m.min_eigenvalue() > tol.at(m.frobenius_norm())
}

/// Which diagonal block of a 2×2 partition is eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivot {
    /// Eliminate the leading `k×k` block: returns `C − Bᵀ A⁻¹ B`.
    Leading,
    /// Eliminate the trailing block: returns `A − B C⁻¹ Bᵀ`.
    Trailing,
}

/// Schur complement of `M = [[A, B], [Bᵀ, C]]` with `A` of size `split`.
pub fn schur_complement(m: &SymmetricMatrix, split: usize, pivot: Pivot) -> Result<SymmetricMatrix> {
    let n = m.dim();
    if split == 0 || split >= n {
        return Err(Error::DimensionMismatch(format!(
            "partition at {split} of a {n}x{n} matrix"
        )));
    }
    let mm = m.as_matrix();
    let a = SymmetricMatrix(mm.view((0, 0), (split, split)).into_owned());
    let b = mm.view((0, split), (split, n - split)).into_owned();
    let c = SymmetricMatrix(mm.view((split, split), (n - split, n - split)).into_owned());
    // the pivot must be well conditioned relative to the whole matrix
    let scale = m.spectral_norm();
    let pivot_block = if pivot == Pivot::Leading { &a } else { &c };
    let smallest = pivot_block.eigenvalues().iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    if smallest == 0.0 || scale / smallest > COND_MAX {
        return Err(Error::Singular("Schur pivot block".into()));
    }
    match pivot {
        Pivot::Leading => {
            let ainv = a.inverse().map_err(|_| Error::Singular("Schur pivot block".into()))?;
            c.try_sub(&ainv.congruence(&b)?)
        }
        Pivot::Trailing => {
            let cinv = c.inverse().map_err(|_| Error::Singular("Schur pivot block".into()))?;
            a.try_sub(&cinv.congruence(&b.transpose())?)
        }
    }
}

/// A sample the lower-bound test can compare against.
pub trait SpectralSample {
    /// `λ_min(self − c)`.
    fn shifted_min_eigenvalue(&self, c: &SymmetricMatrix) -> Result<f64>;
}

impl SpectralSample for SymmetricMatrix {
    fn shifted_min_eigenvalue(&self, c: &SymmetricMatrix) -> Result<f64> {
        Ok(self.try_sub(c)?.min_eigenvalue())
    }
}

impl SpectralSample for HermitianMatrix {
    fn shifted_min_eigenvalue(&self, c: &SymmetricMatrix) -> Result<f64> {
        Ok(self.sub_real(c)?.min_eigenvalue())
    }
}

/// Whether `C ⪯ S` for every sample; returns the worst margin
/// `min_s λ_min(S − C)` alongside the verdict `margin ≥ −tol`.
pub fn is_lower_bound<S: SpectralSample>(
    c: &SymmetricMatrix,
    samples: &[S],
    tol: f64,
) -> Result<(bool, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let mut margin = f64::INFINITY;
    for s in samples {
        margin = margin.min(s.shifted_min_eigenvalue(c)?);
    }
    Ok((margin >= -tol, margin))
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
