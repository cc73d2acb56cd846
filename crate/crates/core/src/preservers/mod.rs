//! Maps on Hermitian matrices that preserve the operator norm or the maximal
//! deviation.
//!
//! Real-linear maps are stored as `n^2 x n^2` matrices in the generalized
//! Gell-Mann basis. Canonical preservers have the form
//! `A -> s U tau(A) U* + tr(F A) I + X`, where `tau` is the identity or the
//! entrywise conjugation.

mod basis;
mod check;
mod decompose;
mod isometry;
mod wigner;

pub use basis::{assemble, coordinates, HermitianBasis};
pub use check::{check_map, check_preserver, CheckReport, Property, DEFAULT_CHECK_SAMPLES};
pub use decompose::{decompose_deviation_preserver, decompose_norm_preserver, TOL_RESIDUAL};
pub use isometry::{
    affinize_dm_isometry, linearize_dv_isometry, linearize_dv_isometry_with, normalized_trace,
    Affinization, Linearization,
};
pub use wigner::{wigner_probes, wigner_reconstruct, WignerFit};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitian::{c, numerical_radius, CMatrix, HermitianMatrix};

/// Tolerance on `U*U - I` for a valid form.
pub const TOL_UNITARY: f64 = 1e-10;

/// A real-linear map on `n x n` Hermitian matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapOnHermitians {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl LinearMapOnHermitians {
    pub fn from_matrix(dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        basis::check_dim(dim)?;
        let m = dim * dim;
        if matrix.nrows() != m || matrix.ncols() != m {
            return Err(Error::InvalidInput(format!(
                "map matrix is {}x{}, expected {m}x{m}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "map matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: DMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: DMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// Samples a map that is assumed linear on the basis.
    pub fn from_fn(dim: usize, f: impl Fn(&HermitianMatrix) -> HermitianMatrix) -> Result<Self> {
        let basis = HermitianBasis::gell_mann(dim)?;
        let m = dim * dim;
        let mut matrix = DMatrix::zeros(m, m);
        for (k, b) in basis.elements().iter().enumerate() {
            let image = f(b);
            if image.dim() != dim {
                return Err(Error::DimensionMismatch(dim, image.dim()));
            }
            matrix.set_column(k, &coordinates(&image));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * t,
        }
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        apply_map(self, a)
    }

    /// Image of the `k`-th basis element.
    pub fn column_image(&self, k: usize) -> HermitianMatrix {
        assemble(self.dim, &self.matrix.column(k).into_owned())
    }

    /// Ratio of the smallest to the largest singular value.
    pub fn conditioning(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        if max == 0.0 {
            0.0
        } else {
            sv.min() / max
        }
    }

    pub fn is_bijective(&self) -> bool {
        self.conditioning() > 1e-8
    }
}

/// `L(A)` through coordinates.
pub fn apply_map(l: &LinearMapOnHermitians, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != l.dim {
        return Err(Error::DimensionMismatch(l.dim, a.dim()));
    }
    let coords: DVector<f64> = &l.matrix * coordinates(a);
    Ok(assemble(l.dim, &coords))
}

/// `A -> sign U tau(A) U* + tr(F A) I + X`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreserverForm {
    pub sign: i8,
    pub u: CMatrix,
    /// `tau` is entrywise conjugation when set.
    pub antiunitary: bool,
    pub f: HermitianMatrix,
    pub x: HermitianMatrix,
}

impl PreserverForm {
    pub fn new(
        sign: i8,
        u: CMatrix,
        antiunitary: bool,
        f: HermitianMatrix,
        x: HermitianMatrix,
    ) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput(format!(
                "sign must be +1 or -1, got {sign}"
            )));
        }
        let n = u.nrows();
        basis::check_dim(n)?;
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        if f.dim() != n || x.dim() != n {
            return Err(Error::DimensionMismatch(
                n,
                if f.dim() != n { f.dim() } else { x.dim() },
            ));
        }
        let defect = unitarity_defect(&u);
        if defect > TOL_UNITARY {
            return Err(Error::InvalidInput(format!(
                "U is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self {
            sign,
            u,
            antiunitary,
            f,
            x,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sign: 1,
            u: CMatrix::identity(n, n),
            antiunitary: false,
            f: HermitianMatrix::zeros(n),
            x: HermitianMatrix::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `U tau(A) U*`.
    pub fn unitary_action(&self, a: &HermitianMatrix) -> HermitianMatrix {
        let t = if self.antiunitary {
            a.conjugate()
        } else {
            a.clone()
        };
        t.conjugate_by(&self.u)
    }

    /// Value of the linear functional `tr(F A)`.
    pub fn functional(&self, a: &HermitianMatrix) -> f64 {
        self.f.trace_product(a)
    }

    pub fn apply(&self, a: &HermitianMatrix) -> HermitianMatrix {
        let core = self.unitary_action(a).scaled(f64::from(self.sign));
        &core.shifted(self.functional(a)) + &self.x
    }

    /// Linear part as a coordinate matrix; the affine offset is `self.x`.
    pub fn to_map(&self) -> LinearMapOnHermitians {
        let n = self.dim();
        LinearMapOnHermitians::from_fn(n, |b| &self.apply(b) - &self.x)
            .expect("form dimension already validated")
    }

    /// Largest operator-norm gap between the rank-one actions of two forms over
    /// the given projections (global phases of `U` do not matter).
    pub fn rank_one_action_defect(
        &self,
        other: &Self,
        projections: &[HermitianMatrix],
    ) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in projections {
            worst = worst.max(numerical_radius(
                &(&self.unitary_action(p) - &other.unitary_action(p)),
            )?);
        }
        Ok(worst)
    }
}

/// Largest entry of `|U*U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n)).camax()
}

/// Multiplies `u` by the phase that makes the first nonzero entry of its first
/// column real positive.
pub(crate) fn normalize_global_phase(u: &mut CMatrix) {
    let Some(z) = u.column(0).iter().copied().find(|z| z.norm() > 1e-12) else {
        return;
    };
    let phase = z.conj() / c(z.norm(), 0.0);
    *u *= phase;
}
