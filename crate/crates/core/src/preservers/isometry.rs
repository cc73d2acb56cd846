//! Reducing (possibly nonlinear) surjective isometries to linear preservers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::generate::Sampler;
use crate::hermitian::{numerical_radius, HermitianMatrix};
use crate::rng::StreamRng;

use super::check::{check_map, Property};
use super::decompose::{decompose_deviation_preserver, decompose_norm_preserver};
use super::{LinearMapOnHermitians, PreserverForm};

/// `d_m` isometry written as `A -> L(A) + X`.
#[derive(Debug, Clone)]
pub struct Affinization {
    pub linear: LinearMapOnHermitians,
    pub x: HermitianMatrix,
    pub form: PreserverForm,
    pub isometry_defect: f64,
    /// Largest additivity or homogeneity gap of `A -> phi(A) - X`.
    pub additivity_defect: f64,
}

/// `d_v` isometry written as `A -> s U tau(A) U* + g(A) I + X`.
#[derive(Debug, Clone)]
pub struct Linearization {
    pub linear: LinearMapOnHermitians,
    /// Decomposition of the linear part, with `X = phi(0)` attached.
    pub form: PreserverForm,
    pub isometry_defect: f64,
    /// Largest additivity or homogeneity gap of the corrected map.
    pub additivity_defect: f64,
    /// `(A, g(A))` on the sampled points, `g(A) = tr(phi(A) - X - s U tau(A) U*)/n`.
    pub g_samples: Vec<(HermitianMatrix, f64)>,
    /// Largest `||phi(A) - X - s U tau(A) U* - g(A) I||` on the samples.
    pub model_residual: f64,
}

/// `tr(A)/n`, a linear functional with `lambda I -> lambda`.
pub fn normalized_trace(a: &HermitianMatrix) -> f64 {
    a.trace() / a.dim() as f64
}

/// Largest `||f(A + B) - f(A) - f(B)||` and `||f(tA) - t f(A)||` on seeded pairs.
fn additivity_defect<F>(n: usize, f: &F, samples: usize, seed: u64) -> Result<f64>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = Sampler::from_rng(StreamRng::for_case(seed, i as u64));
            let a = s.hermitian(n);
            let b = s.hermitian(n);
            let t = s.rng().uniform_in(-3.0, 3.0);
            let fa = f(&a)?;
            let sum = &(&f(&(&a + &b))? - &fa) - &f(&b)?;
            let hom = &f(&a.scaled(t))? - &fa.scaled(t);
            Ok(numerical_radius(&sum)?.max(numerical_radius(&hom)?))
        })
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

fn isometry_defect<F>(
    n: usize,
    phi: &F,
    property: Property,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<f64>
where
    F: Fn(&HermitianMatrix) -> HermitianMatrix + Sync,
{
    let report = check_map(n, |a| Ok(phi(a)), property, samples, seed, tol)?;
    if !report.verdict {
        return Err(Error::NotAnIsometry(report.max_defect));
    }
    Ok(report.max_defect)
}

/// Translates a surjective `d_m` isometry to a linear norm preserver and decomposes it.
pub fn affinize_dm_isometry<F>(
    phi: F,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Affinization>
where
    F: Fn(&HermitianMatrix) -> HermitianMatrix + Sync,
{
    let iso = isometry_defect(n, &phi, Property::DmIsometry, samples, seed, tol)?;
    let x = phi(&HermitianMatrix::zeros(n));
    let shifted = |a: &HermitianMatrix| Ok(&phi(a) - &x);
    let additivity = additivity_defect(n, &shifted, samples, seed ^ 0xadd)?;
    if additivity > tol {
        return Err(Error::NotLinearizable(additivity));
    }
    let linear = LinearMapOnHermitians::from_fn(n, |a| &phi(a) - &x)?;
    let mut form = decompose_norm_preserver(&linear)?;
    form.x = x.clone();
    Ok(Affinization {
        linear,
        x,
        form,
        isometry_defect: iso,
        additivity_defect: additivity,
    })
}

/// [`linearize_dv_isometry_with`] using the normalized trace.
pub fn linearize_dv_isometry<F>(
    phi: F,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Linearization>
where
    F: Fn(&HermitianMatrix) -> HermitianMatrix + Sync,
{
    linearize_dv_isometry_with(phi, normalized_trace, n, samples, seed, tol)
}

/// Turns a surjective `d_v` isometry into a linear deviation preserver via
/// `phi_1(A) = phi_0(A) - l(phi_0(A)) I + l(A) I` with `phi_0 = phi - phi(0)`,
/// and decomposes it. `l` must be linear with `l(lambda I) = lambda`.
pub fn linearize_dv_isometry_with<F, L>(
    phi: F,
    l: L,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Linearization>
where
    F: Fn(&HermitianMatrix) -> HermitianMatrix + Sync,
    L: Fn(&HermitianMatrix) -> f64 + Sync,
{
    let iso = isometry_defect(n, &phi, Property::DvIsometry, samples, seed, tol)?;
    let x = phi(&HermitianMatrix::zeros(n));
    let corrected = |a: &HermitianMatrix| -> Result<HermitianMatrix> {
        let p0 = &phi(a) - &x;
        let shift = l(a) - l(&p0);
        Ok(p0.shifted(shift))
    };
    let additivity = additivity_defect(n, &corrected, samples, seed ^ 0xadd)?;
    if additivity > tol {
        return Err(Error::NotLinearizable(additivity));
    }
    let linear =
        LinearMapOnHermitians::from_fn(n, |a| corrected(a).expect("corrected map is infallible"))?;
    if !linear.is_bijective() {
        return Err(Error::NotLinearizable(linear.conditioning()));
    }
    let mut form = decompose_deviation_preserver(&linear)?;
    form.x = x.clone();

    let mut g_samples = Vec::with_capacity(samples);
    let mut model_residual: f64 = 0.0;
    for i in 0..samples {
        let a = Sampler::from_rng(StreamRng::for_case(seed ^ 0x9, i as u64)).hermitian(n);
        let rest = &(&phi(&a) - &x) - &form.unitary_action(&a).scaled(f64::from(form.sign));
        let g = normalized_trace(&rest);
        model_residual = model_residual.max(numerical_radius(&rest.shifted(-g))?);
        g_samples.push((a, g));
    }
    Ok(Linearization {
        linear,
        form,
        isometry_defect: iso,
        additivity_defect: additivity,
        g_samples,
        model_residual,
    })
}
