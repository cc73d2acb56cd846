use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviation::max_deviation;
use crate::error::{Error, Result};
use crate::harness::generate::Sampler;
use crate::hermitian::{numerical_radius, HermitianMatrix};
use crate::rng::StreamRng;

use super::{apply_map, basis, HermitianBasis, LinearMapOnHermitians};

pub const DEFAULT_CHECK_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "operator_norm")]
    OperatorNorm,
    #[serde(rename = "max_deviation")]
    MaxDeviation,
    #[serde(rename = "d_m_isometry")]
    DmIsometry,
    #[serde(rename = "d_v_isometry")]
    DvIsometry,
}

impl Property {
    fn quantity(self, a: &HermitianMatrix) -> Result<f64> {
        match self {
            Property::OperatorNorm | Property::DmIsometry => numerical_radius(a),
            Property::MaxDeviation | Property::DvIsometry => max_deviation(a),
        }
    }

    fn is_metric(self) -> bool {
        matches!(self, Property::DmIsometry | Property::DvIsometry)
    }
}

impl std::str::FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm" | "operator_norm" => Ok(Property::OperatorNorm),
            "deviation" | "max_deviation" => Ok(Property::MaxDeviation),
            "dm" | "d_m_isometry" => Ok(Property::DmIsometry),
            "dv" | "d_v_isometry" => Ok(Property::DvIsometry),
            other => Err(Error::InvalidInput(format!("unknown property `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: Property,
    pub samples: usize,
    pub max_defect: f64,
    pub verdict: bool,
}

/// `I`, `E_11` and the qubit-like Gell-Mann elements on the first two indices.
fn deterministic_probes(n: usize) -> Vec<HermitianMatrix> {
    let mut probes = vec![HermitianMatrix::identity(n)];
    let mut e11 = vec![0.0; n];
    e11[0] = 1.0;
    probes.push(HermitianMatrix::from_real_diagonal(&e11));
    if n >= 2 {
        let basis = HermitianBasis::gell_mann(n).expect("dimension checked");
        probes.push(basis.elements()[1].clone());
        probes.push(basis.elements()[n].clone());
        probes.push(basis.elements()[n + 1].clone());
    }
    probes
}

/// Largest `|q(phi(A)) - q(A)|` (or its two-point metric version) over the
/// deterministic probes and `samples` seeded GUE draws.
pub fn check_map<F>(
    n: usize,
    phi: F,
    property: Property,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix> + Sync,
{
    basis::check_dim(n)?;
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let zero = HermitianMatrix::zeros(n);
    let phi_zero = if property.is_metric() {
        Some(phi(&zero)?)
    } else {
        None
    };
    let pair_defect = |a: &HermitianMatrix, b: Option<&HermitianMatrix>| -> Result<f64> {
        let fa = phi(a)?;
        if fa.dim() != n {
            return Err(Error::DimensionMismatch(n, fa.dim()));
        }
        match (property.is_metric(), b) {
            (false, _) => Ok((property.quantity(&fa)? - property.quantity(a)?).abs()),
            (true, None) => {
                let f0 = phi_zero.as_ref().expect("metric check evaluates phi(0)");
                Ok((property.quantity(&(&fa - f0))? - property.quantity(a)?).abs())
            }
            (true, Some(b)) => {
                let fb = phi(b)?;
                Ok((property.quantity(&(&fa - &fb))? - property.quantity(&(a - b))?).abs())
            }
        }
    };

    let mut worst: f64 = 0.0;
    for p in deterministic_probes(n) {
        worst = worst.max(pair_defect(&p, None)?);
    }
    let random = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut s = Sampler::from_rng(StreamRng::for_case(seed, i as u64));
            let a = s.hermitian(n);
            let b = property.is_metric().then(|| s.hermitian(n));
            pair_defect(&a, b.as_ref())
        })
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))?;
    worst = worst.max(random);
    Ok(CheckReport {
        property,
        samples,
        max_defect: worst,
        verdict: worst <= tol,
    })
}

/// [`check_map`] for a linear map.
pub fn check_preserver(
    l: &LinearMapOnHermitians,
    property: Property,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    check_map(l.dim(), |a| apply_map(l, a), property, samples, seed, tol)
}
