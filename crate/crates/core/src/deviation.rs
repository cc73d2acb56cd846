//! Maximal deviation `||A||_v = sup_phi var(A, phi)^(1/2)` and the stochastic
//! distances built from it.
//!
//! Three routes compute the same number:
//!
//! * spectral: half the diameter of the spectrum;
//! * factor: `inf_lambda ||A + lambda I||`, attained at the spectrum midpoint;
//! * variational: direct maximization of the variance over unit vectors by
//!   projected gradient ascent, using only matrix-vector products.
//!
//! The variational route never looks at eigenvalues, so agreement between it
//! and the other two is a real cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{
    c, mean_value_range, numerical_radius, spectral_decompose, variance, CVector, HermitianMatrix,
    StateVector, TOL_SPEC,
};
use crate::rng::StreamRng;

/// Relative threshold below which an operator counts as scalar.
pub const SCALAR_TOL: f64 = 1e-10;
/// Tolerance on `|var(A, witness) - value^2|`.
pub const TOL_DEV: f64 = 1e-9;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Spectral,
    Factor,
    Variational,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Route::Spectral),
            "factor" => Ok(Route::Factor),
            "variational" => Ok(Route::Variational),
            other => Err(Error::InvalidInput(format!("unknown route `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub value: f64,
    pub route: Route,
    pub witness: Option<StateVector>,
    /// Shift attaining `inf_lambda ||A + lambda I||` (factor route).
    pub minimizer_lambda: Option<f64>,
    /// Spectral value minus this value (variational route).
    pub spectral_gap: Option<f64>,
}

/// Half the diameter of the spectrum.
pub fn max_deviation(a: &HermitianMatrix) -> Result<f64> {
    let (lo, hi) = mean_value_range(a)?;
    Ok(0.5 * (hi - lo))
}

/// `(lambda_max - lambda_min)/2 <= SCALAR_TOL (1 + ||A||)`.
pub fn is_scalar(a: &HermitianMatrix) -> Result<bool> {
    let (lo, hi) = mean_value_range(a)?;
    Ok(0.5 * (hi - lo) <= SCALAR_TOL * (1.0 + lo.abs().max(hi.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorNorm {
    pub value: f64,
    pub lambda_star: f64,
}

/// Quotient norm of the class of `A` in `B_s(H)/RI` together with its minimizing shift.
pub fn factor_norm(a: &HermitianMatrix) -> Result<FactorNorm> {
    let (lo, hi) = mean_value_range(a)?;
    let value = 0.5 * (hi - lo);
    let lambda_star = -0.5 * (hi + lo);
    let attained = numerical_radius(&a.shifted(lambda_star))?;
    let scale = 1.0 + lo.abs().max(hi.abs());
    if (attained - value).abs() > TOL_SPEC * scale {
        return Err(Error::SolverFailure(format!(
            "||A + lambda* I|| = {attained} but half diameter is {value}"
        )));
    }
    Ok(FactorNorm { value, lambda_star })
}

/// `(x + y)/sqrt 2` for unit eigenvectors `x` of `lambda_min` and `y` of
/// `lambda_max` (lowest-index choice within each eigenspace).
pub fn witness_state(a: &HermitianMatrix) -> Result<StateVector> {
    if is_scalar(a)? {
        return Err(Error::ScalarOperator);
    }
    let spec = spectral_decompose(a)?;
    let x = spec.eigenvectors.column(0);
    let y = spec.eigenvectors.column(spec.dim() - 1);
    StateVector::normalized((x + y) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// Variance functional and its Riemannian gradient on the unit sphere.
struct VarianceFunctional<'a> {
    a: &'a HermitianMatrix,
}

impl VarianceFunctional<'_> {
    fn value(&self, v: &CVector) -> f64 {
        let w = self.a.matrix() * v;
        let m = v.dotc(&w).re;
        (w - v * c(m, 0.0)).norm_squared()
    }

    /// Returns `(value, tangent gradient)`.
    fn value_and_gradient(&self, v: &CVector) -> (f64, CVector) {
        let w = self.a.matrix() * v;
        let m = v.dotc(&w).re;
        let centred = &w - v * c(m, 0.0);
        let value = centred.norm_squared();
        let aw = self.a.matrix() * &w;
        let grad = (aw - &w * c(2.0 * m, 0.0)) * c(2.0, 0.0);
        let radial = v.dotc(&grad).re;
        let tangent = grad - v * c(radial, 0.0);
        (value, tangent)
    }
}

/// Riemannian ascent with Polak-Ribiere conjugate directions, projection
/// onto the sphere after each step and Armijo backtracking. Falls back to the
/// plain gradient whenever the conjugate direction is not an ascent direction.
fn ascend(
    f: &VarianceFunctional<'_>,
    start: CVector,
    max_iter: usize,
    scale: f64,
) -> (f64, CVector) {
    const ARMIJO: f64 = 1e-4;
    let mut v = start;
    let mut step = 0.25 / (scale * scale);
    let (mut value, mut grad) = f.value_and_gradient(&v);
    let mut dir = grad.clone();
    for _ in 0..max_iter {
        let g2 = grad.norm_squared();
        if g2.sqrt() <= 1e-14 * scale * scale * scale {
            break;
        }
        let mut slope = dir.dotc(&grad).re;
        if slope <= 0.0 {
            dir = grad.clone();
            slope = g2;
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &v + &dir * c(step, 0.0);
            let trial = &trial / c(trial.norm(), 0.0);
            let tv = f.value(&trial);
            if tv >= value + ARMIJO * step * slope {
                accepted = Some((trial, tv));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_value)) = accepted else {
            break;
        };
        let gain = next_value - value;
        v = next;
        let prev_grad = grad;
        (value, grad) = f.value_and_gradient(&v);
        // transport the previous direction and gradient by projection
        let project = |w: &CVector| w - &v * c(v.dotc(w).re, 0.0);
        let prev_grad = project(&prev_grad);
        let prev_dir = project(&dir);
        let beta = ((grad.dotc(&(&grad - &prev_grad))).re / g2).max(0.0);
        dir = &grad + prev_dir * c(beta, 0.0);
        step *= 2.0;
        if gain <= f64::EPSILON * value {
            break;
        }
    }
    (value, v)
}

/// Maximizes `var(A, phi)` over unit `phi` from `restarts` random starting
/// states and returns the best square root found. A lower bound for
/// [`max_deviation`] by construction.
pub fn max_deviation_variational(
    a: &HermitianMatrix,
    restarts: usize,
    seed: u64,
) -> Result<DeviationReport> {
    max_deviation_variational_with(a, restarts, DEFAULT_MAX_ITER, seed)
}

pub fn max_deviation_variational_with(
    a: &HermitianMatrix,
    restarts: usize,
    max_iter: usize,
    seed: u64,
) -> Result<DeviationReport> {
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let n = a.dim();
    let f = VarianceFunctional { a };
    let scale = 1.0 + a.frobenius_norm() / (n as f64).sqrt();
    let mut rng = StreamRng::new(seed);
    let mut best: Option<(f64, CVector)> = None;
    for _ in 0..restarts {
        let start = CVector::from_fn(n, |_, _| rng.complex_normal());
        let norm = start.norm();
        if norm.is_nan() || norm <= 0.0 {
            continue;
        }
        let (value, v) = ascend(&f, start / c(norm, 0.0), max_iter, scale);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, v));
        }
    }
    let (_, v) = best.ok_or_else(|| Error::SolverFailure("no valid starting state".into()))?;
    let witness = StateVector::normalized(v)?;
    let value = variance(a, &witness)?.sqrt();
    let spectral = max_deviation(a)?;
    Ok(DeviationReport {
        value,
        route: Route::Variational,
        witness: Some(witness),
        minimizer_lambda: None,
        spectral_gap: Some(spectral - value),
    })
}

/// Maximal deviation by the requested route, with witness when one is available.
pub fn deviation_report(
    a: &HermitianMatrix,
    route: Route,
    restarts: usize,
    seed: u64,
) -> Result<DeviationReport> {
    match route {
        Route::Spectral => {
            let value = max_deviation(a)?;
            let witness = match witness_state(a) {
                Ok(w) => Some(w),
                Err(Error::ScalarOperator) => None,
                Err(e) => return Err(e),
            };
            Ok(DeviationReport {
                value,
                route,
                witness,
                minimizer_lambda: None,
                spectral_gap: None,
            })
        }
        Route::Factor => {
            let fnorm = factor_norm(a)?;
            Ok(DeviationReport {
                value: fnorm.value,
                route,
                witness: None,
                minimizer_lambda: Some(fnorm.lambda_star),
                spectral_gap: None,
            })
        }
        Route::Variational => max_deviation_variational(a, restarts, seed),
    }
}

/// `sqrt((1 - 2 delta)^2 / 2 - (1 + 2 delta)^2 / 4)`, or `None` when the
/// radicand is negative.
pub fn delta_bound(delta: f64) -> Option<f64> {
    let radicand = (1.0 - 2.0 * delta).powi(2) / 2.0 - (1.0 + 2.0 * delta).powi(2) / 4.0;
    (radicand >= 0.0).then(|| radicand.sqrt())
}

#[derive(Debug, Clone)]
pub struct DeltaWitness {
    /// `var(A, phi)^(1/2)` for the constructed state.
    pub value: f64,
    /// The guaranteed lower bound for this `delta`.
    pub bound: f64,
    pub state: StateVector,
}

/// Lower-bound construction for `0 <= A <= I` with `0, 1` in the spectrum.
///
/// `x` and `y` are taken from the eigenvalue clusters `(-delta, delta)` and
/// `(1 - delta, 1 + delta)`, choosing the members closest to the middle of
/// the spectrum (the least favourable ones), and `phi = (x + y)/sqrt 2`.
pub fn deviation_lower_bound_delta(a: &HermitianMatrix, delta: f64) -> Result<DeltaWitness> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "delta must lie in (0, 1/2], got {delta}"
        )));
    }
    let bound = delta_bound(delta).ok_or(Error::RadicandNegative(delta))?;
    let spec = spectral_decompose(a)?;
    let (lo, hi) = (spec.lambda_min(), spec.lambda_max());
    if lo.abs() > TOL_SPEC || (hi - 1.0).abs() > TOL_SPEC {
        return Err(Error::BadNormalization(format!(
            "spectrum spans [{lo}, {hi}]"
        )));
    }
    let ev = &spec.eigenvalues;
    let lower = (0..ev.len())
        .rfind(|&k| ev[k] > -delta && ev[k] < delta)
        .ok_or_else(|| Error::BadNormalization("no eigenvalue near 0".into()))?;
    let upper = (0..ev.len())
        .find(|&k| ev[k] > 1.0 - delta && ev[k] < 1.0 + delta)
        .ok_or_else(|| Error::BadNormalization("no eigenvalue near 1".into()))?;
    let x = spec.eigenvectors.column(lower);
    let y = spec.eigenvectors.column(upper);
    let state = StateVector::normalized((x + y) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0))?;
    let value = variance(a, &state)?.sqrt();
    if value < bound - 1e-12 {
        return Err(Error::SolverFailure(format!(
            "constructed deviation {value} is below {bound}"
        )));
    }
    Ok(DeltaWitness {
        value,
        bound,
        state,
    })
}

/// `d_m(A, B) = ||A - B||`.
pub fn d_m(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    numerical_radius(&a.checked_sub(b)?)
}

/// `d_v(A, B) = ||A - B||_v`.
pub fn d_v(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    max_deviation(&a.checked_sub(b)?)
}
