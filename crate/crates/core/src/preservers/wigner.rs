//! Recovering `U` from a map on rank-one projections that preserves overlaps.

use crate::error::{Error, Result};
use crate::hermitian::{
    c, numerical_radius, spectral_decompose, CMatrix, CVector, HermitianMatrix, StateVector,
};

use super::normalize_global_phase;

/// Overlap tolerance on the probe family.
pub const TOL_OVERLAP: f64 = 1e-8;
/// Largest accepted gap between `psi(P)` and the reconstructed action.
pub const TOL_RECONSTRUCT: f64 = 1e-7;
const TOL_PHASE: f64 = 1e-10;

/// `U` with `psi(P) = U tau(P) U*` on rank-one projections.
#[derive(Debug, Clone)]
pub struct WignerFit {
    pub u: CMatrix,
    pub antiunitary: bool,
    /// Largest probe gap between `psi(P)` and the fitted action.
    pub probe_defect: f64,
}

/// `E_jj` for all `j`, then the projections onto `(e_1 + e_j)/sqrt(2)` and
/// `(e_1 + i e_j)/sqrt(2)` for `j = 2..n`.
pub fn wigner_probes(n: usize) -> Vec<HermitianMatrix> {
    let mut probes: Vec<HermitianMatrix> = (0..n)
        .map(|j| StateVector::basis(n, j).projector())
        .collect();
    for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
        for j in 1..n {
            let mut v = CVector::zeros(n);
            v[0] = c(1.0, 0.0);
            v[j] = phase;
            probes.push(
                StateVector::normalized(v)
                    .expect("nonzero vector")
                    .projector(),
            );
        }
    }
    probes
}

pub fn wigner_reconstruct<F>(psi: F, n: usize) -> Result<WignerFit>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let probes = wigner_probes(n);
    let images = probes.iter().map(&psi).collect::<Result<Vec<_>>>()?;
    reconstruct_from_images(n, &probes, &images)
}

pub(crate) fn reconstruct_from_images(
    n: usize,
    probes: &[HermitianMatrix],
    images: &[HermitianMatrix],
) -> Result<WignerFit> {
    if let Some(bad) = images.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch(n, bad.dim()));
    }
    let mut overlap_defect: f64 = 0.0;
    for i in 0..probes.len() {
        for j in i..probes.len() {
            let want = probes[i].trace_product(&probes[j]);
            let got = images[i].trace_product(&images[j]);
            overlap_defect = overlap_defect.max((want - got).abs());
        }
    }
    if overlap_defect > TOL_OVERLAP {
        return Err(Error::OverlapViolation(overlap_defect));
    }

    let top = |m: &HermitianMatrix| -> Result<CVector> {
        let spec = spectral_decompose(m)?;
        Ok(spec.eigenvectors.column(n - 1).into_owned())
    };
    let first = top(&images[0])?;
    let mut u = CMatrix::zeros(n, n);
    u.set_column(0, &first);
    for j in 1..n {
        let uj = top(&images[j])?;
        let z = first.dotc(&(images[n - 1 + j].matrix() * &uj));
        if z.norm() < TOL_PHASE {
            return Err(Error::PhaseDegeneracy(z.norm()));
        }
        u.set_column(j, &(uj * (z.conj() / c(z.norm(), 0.0))));
    }

    // <col_1, psi(P_b) col_j> is -i/2 for unitary actions and +i/2 for antiunitary ones.
    let mut antiunitary = None;
    for j in 1..n {
        let cj = u.column(j).into_owned();
        let z = u.column(0).dotc(&(images[2 * n - 2 + j].matrix() * cj));
        if z.im.abs() < TOL_PHASE {
            return Err(Error::PhaseDegeneracy(z.im.abs()));
        }
        let this = z.im > 0.0;
        if *antiunitary.get_or_insert(this) != this {
            return Err(Error::OverlapViolation(z.im.abs()));
        }
    }
    let antiunitary = antiunitary.unwrap_or(false);
    normalize_global_phase(&mut u);

    let mut probe_defect: f64 = 0.0;
    for (p, img) in probes.iter().zip(images) {
        let t = if antiunitary {
            p.conjugate()
        } else {
            p.clone()
        };
        probe_defect = probe_defect.max(numerical_radius(&(&t.conjugate_by(&u) - img))?);
    }
    if probe_defect > TOL_RECONSTRUCT {
        return Err(Error::OverlapViolation(probe_defect));
    }
    Ok(WignerFit {
        u,
        antiunitary,
        probe_defect,
    })
}
