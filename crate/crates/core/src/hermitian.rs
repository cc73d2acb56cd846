//! Finite-dimensional bounded observables.
//!
//! A [`HermitianMatrix`] is an observable on `C^n`, a [`StateVector`] is a
//! pure state. Everything spectral goes through [`spectral_decompose`], which
//! delegates to nalgebra's Hermitian eigensolver and sorts the result.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;
/// Absolute hermiticity tolerance.
pub const TOL_HERM: f64 = 1e-10;
/// Absolute tolerance on state normalization.
pub const TOL_STATE: f64 = 1e-10;
/// Relative tolerance for spectral reconstruction.
pub const TOL_SPEC: f64 = 1e-8;
/// Tolerance for projection classification.
pub const TOL_PROJ: f64 = 1e-8;

const EIGEN_MAX_ITER: usize = 10_000;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value of an arbitrary complex matrix.
pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// An `n x n` complex Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    entries: CMatrix,
    input_defect: f64,
}

/// Compares entries only; the recorded input defect is provenance, not value.
impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl HermitianMatrix {
    /// Wraps `m` after replacing it with its Hermitian part `(M + M*)/2`.
    ///
    /// Meant for matrices that are Hermitian up to rounding (products of
    /// Hermitian operators, conjugations, ...). Use [`validate_hermitian`] for
    /// untrusted input.
    pub fn from_hermitian_part(m: CMatrix) -> Self {
        assert!(m.is_square(), "matrix must be square");
        let defect = hermiticity_defect(&m);
        let entries = (&m + m.adjoint()) * c(0.5, 0.0);
        Self {
            entries,
            input_defect: defect,
        }
    }

    /// Builds a matrix from real and imaginary parts given row by row.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = re.len();
        if im.len() != n {
            return Err(Error::DimensionMismatch(n, im.len()));
        }
        for (row_re, row_im) in re.iter().zip(im) {
            if row_re.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row_re.len(),
                });
            }
            if row_im.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row_im.len(),
                });
            }
        }
        let m = CMatrix::from_fn(n, n, |i, j| c(re[i][j], im[i][j]));
        validate_hermitian(m, tol)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let entries = CMatrix::from_fn(
            n,
            n,
            |i, j| if i == j { c(diag[i], 0.0) } else { c(0.0, 0.0) },
        );
        Self {
            entries,
            input_defect: 0.0,
        }
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let im = vec![vec![0.0; rows.len()]; rows.len()];
        Self::from_parts(rows, &im, TOL_HERM)
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn zeros(n: usize) -> Self {
        Self::scalar(n, 0.0)
    }

    /// `lambda * I`.
    pub fn scalar(n: usize, lambda: f64) -> Self {
        Self {
            entries: CMatrix::identity(n, n) * c(lambda, 0.0),
            input_defect: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Hermiticity defect of the matrix this value was built from.
    pub fn input_defect(&self) -> f64 {
        self.input_defect
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr(self * other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.entries[(i, j)] * other.entries[(j, i)]).re;
            }
        }
        acc
    }

    /// `self + lambda * I`.
    pub fn shifted(&self, lambda: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] += c(lambda, 0.0);
        }
        Self {
            entries,
            input_defect: 0.0,
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            entries: &self.entries * c(t, 0.0),
            input_defect: 0.0,
        }
    }

    /// Entrywise complex conjugate (the antiunitary `K A K` in the standard basis).
    pub fn conjugate(&self) -> Self {
        Self {
            entries: self.entries.map(|z| z.conj()),
            input_defect: 0.0,
        }
    }

    /// `U A U*` for any square `U` of matching size.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_part(u * &self.entries * u.adjoint())
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Self {
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.entries;
        }
        Self::from_hermitian_part(acc)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> Result<f64> {
        numerical_radius(self)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self - other)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self + other)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix {
            entries: &self.entries + &rhs.entries,
            input_defect: 0.0,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix {
            entries: &self.entries - &rhs.entries,
            input_defect: 0.0,
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scaled(rhs)
    }
}

/// A unit vector of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Accepts `amplitudes` if its Euclidean norm is 1 within `tol`.
    pub fn new(amplitudes: CVector, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::BadDimension(0));
        }
        let defect = (amplitudes.norm() - 1.0).abs();
        if defect.is_nan() || defect > tol {
            return Err(Error::NotNormalized(defect));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: v / c(norm, 0.0),
        })
    }

    pub fn from_parts(re: &[f64], im: &[f64], tol: f64) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(re.len(), im.len()));
        }
        let v = CVector::from_iterator(re.len(), re.iter().zip(im).map(|(&a, &b)| c(a, b)));
        Self::new(v, tol)
    }

    /// Standard basis vector `e_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[i] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// The rank-one projection onto this state.
    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::from_hermitian_part(&self.amplitudes * self.amplitudes.adjoint())
    }

    /// `|<self, other>|^2`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn vector(&self, k: usize) -> StateVector {
        StateVector {
            amplitudes: self.eigenvectors.column(k).into_owned(),
        }
    }

    /// `sum_k f(lambda_k) v_k v_k*`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| c(f(l), 0.0)).collect();
        let scaled = CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigenvectors[(i, j)] * weights[j]
        });
        HermitianMatrix::from_hermitian_part(scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_eigenvalues(|l| l)
    }

    /// Projection onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projection(&self, keep: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.map_eigenvalues(|l| if keep(l) { 1.0 } else { 0.0 })
    }

    /// Orthonormal basis (as columns) of the span selected by `keep`.
    pub fn subspace(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let cols: Vec<usize> = (0..self.dim())
            .filter(|&k| keep(self.eigenvalues[k]))
            .collect();
        CMatrix::from_fn(self.dim(), cols.len(), |i, j| {
            self.eigenvectors[(i, cols[j])]
        })
    }
}

/// Largest absolute entrywise gap between `M` and `M*`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

/// Accepts a square matrix whose hermiticity defect is at most `tol` and
/// returns its Hermitian part.
pub fn validate_hermitian(m: CMatrix, tol: f64) -> Result<HermitianMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 || n > MAX_DIM {
        return Err(Error::BadDimension(n));
    }
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let defect = hermiticity_defect(&m);
    if defect > tol {
        return Err(Error::DefectTooLarge { defect, tol });
    }
    Ok(HermitianMatrix::from_hermitian_part(m))
}

pub fn spectral_decompose(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::SolverFailure(format!("no convergence for {n}x{n} input")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::SolverFailure("non-finite eigenvalue".into()));
    }
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(spectral_decompose(a)?.eigenvalues)
}

fn check_state(a: &HermitianMatrix, phi: &StateVector) -> Result<()> {
    if a.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(a.dim(), phi.dim()));
    }
    Ok(())
}

fn real_part_checked(z: C64, scale: f64) -> Result<f64> {
    if z.im.abs() > TOL_HERM * (1.0 + scale) {
        return Err(Error::NonRealResult(z.im));
    }
    Ok(z.re)
}

/// `m(A, phi) = <A phi, phi>`.
pub fn mean_value(a: &HermitianMatrix, phi: &StateVector) -> Result<f64> {
    check_state(a, phi)?;
    let v = phi.amplitudes();
    let z = v.dotc(&(a.matrix() * v));
    real_part_checked(z, a.frobenius_norm())
}

/// `<A^k phi, phi>`, evaluated through the spectral decomposition.
pub fn moment(a: &HermitianMatrix, k: u32, phi: &StateVector) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "moment order must be at least 1".into(),
        ));
    }
    if k == 1 {
        return mean_value(a, phi);
    }
    check_state(a, phi)?;
    let spec = spectral_decompose(a)?;
    let coeffs = spec.eigenvectors.adjoint() * phi.amplitudes();
    Ok(spec
        .eigenvalues
        .iter()
        .zip(coeffs.iter())
        .map(|(&l, w)| l.powi(k as i32) * w.norm_sqr())
        .sum())
}

/// `var(A, phi) = <A^2 phi, phi> - <A phi, phi>^2`.
///
/// Evaluated in the centred form `||(A - m I) phi||^2`, which is the same
/// quantity and is nonnegative by construction.
pub fn variance(a: &HermitianMatrix, phi: &StateVector) -> Result<f64> {
    let m = mean_value(a, phi)?;
    let v = phi.amplitudes();
    let centred = a.matrix() * v - v * c(m, 0.0);
    Ok(centred.norm_squared())
}

/// Closed interval `[lambda_min, lambda_max]` of attainable mean values.
pub fn mean_value_range(a: &HermitianMatrix) -> Result<(f64, f64)> {
    let spec = spectral_decompose(a)?;
    Ok((spec.lambda_min(), spec.lambda_max()))
}

/// Numerical radius, equal to the operator norm for Hermitian input.
pub fn numerical_radius(a: &HermitianMatrix) -> Result<f64> {
    let (lo, hi) = mean_value_range(a)?;
    Ok(lo.abs().max(hi.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionInfo {
    pub is_projection: bool,
    pub rank: usize,
    pub is_trivial: bool,
}

pub fn classify_projection(a: &HermitianMatrix, tol: f64) -> Result<ProjectionInfo> {
    let ev = eigenvalues(a)?;
    let near_one = ev.iter().filter(|&&l| (l - 1.0).abs() <= tol).count();
    let near_zero = ev.iter().filter(|&&l| l.abs() <= tol).count();
    let is_projection = near_one + near_zero == ev.len();
    Ok(ProjectionInfo {
        is_projection,
        rank: near_one,
        is_trivial: is_projection && (near_one == 0 || near_one == ev.len()),
    })
}

/// True iff `A` is a self-adjoint unitary, i.e. `A = 2P - I`.
pub fn is_symmetry(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    Ok(eigenvalues(a)?
        .iter()
        .all(|&l| (l.abs() - 1.0).abs() <= tol))
}

/// `f(A) = sum_k f(lambda_k) v_k v_k*`.
pub fn functional_calculus(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let spec = spectral_decompose(a)?;
    if let Some(&bad) = spec.eigenvalues.iter().find(|&&l| !f(l).is_finite()) {
        return Err(Error::DomainError(bad));
    }
    Ok(spec.map_eigenvalues(f))
}

/// `||AB - BA|| <= tol (1 + ||A||)(1 + ||B||)`.
pub fn commutes(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    a.check_same_dim(b)?;
    let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    let scale = (1.0 + a.op_norm()?) * (1.0 + b.op_norm()?);
    Ok(spectral_norm(&comm) <= tol * scale)
}

/// Pauli matrices, used throughout the tests and examples.
pub mod pauli {
    use super::{c, CMatrix, HermitianMatrix};

    pub fn x() -> HermitianMatrix {
        HermitianMatrix::from_hermitian_part(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
    }

    pub fn y() -> HermitianMatrix {
        HermitianMatrix::from_hermitian_part(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        ))
    }

    pub fn z() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
    }
}
