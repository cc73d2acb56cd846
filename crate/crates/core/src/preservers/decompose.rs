//! Recovering `(s, U, tau, F)` from a verified linear preserver.

use nalgebra::DVector;

use crate::deviation::max_deviation;
use crate::error::{Error, Result};
use crate::factor::projection_in_class;
use crate::harness::generate::Sampler;
use crate::hermitian::{classify_projection, numerical_radius, CMatrix, HermitianMatrix, TOL_PROJ};

use super::check::{check_preserver, Property, DEFAULT_CHECK_SAMPLES};
use super::wigner::{reconstruct_from_images, wigner_probes};
use super::{assemble, LinearMapOnHermitians, PreserverForm};

/// Largest accepted operator-norm gap between `L` and the recovered form.
pub const TOL_RESIDUAL: f64 = 1e-7;
const TOL_PRECHECK: f64 = 1e-8;
const CHECK_SEED: u64 = 0x0b5d_e71a;
const VERIFY_SEED: u64 = 0x7e51_d0a1;
const VERIFY_SAMPLES: usize = 16;

fn not_a_preserver(stage: &'static str, defect: f64) -> Error {
    Error::NotAPreserver { stage, defect }
}

fn precheck(l: &LinearMapOnHermitians, property: Property) -> Result<()> {
    let report = check_preserver(l, property, DEFAULT_CHECK_SAMPLES, CHECK_SEED, TOL_PRECHECK)?;
    if !report.verdict {
        let stage = match property {
            Property::OperatorNorm => "norm-check",
            _ => "deviation-check",
        };
        return Err(not_a_preserver(stage, report.max_defect));
    }
    if !l.is_bijective() {
        return Err(not_a_preserver("bijectivity", l.conditioning()));
    }
    Ok(())
}

/// Basis elements plus seeded GUE samples, all compared in operator norm.
fn residual(l: &LinearMapOnHermitians, form: &PreserverForm) -> Result<f64> {
    let n = l.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n * n {
        let mut e = DVector::zeros(n * n);
        e[k] = 1.0;
        let b = assemble(n, &e);
        worst = worst.max(numerical_radius(&(&l.column_image(k) - &form.apply(&b)))?);
    }
    let mut s = Sampler::new(VERIFY_SEED);
    for _ in 0..VERIFY_SAMPLES {
        let a = s.hermitian(n);
        worst = worst.max(numerical_radius(&(&l.apply(&a)? - &form.apply(&a)))?);
    }
    Ok(worst)
}

fn finish(l: &LinearMapOnHermitians, form: PreserverForm) -> Result<PreserverForm> {
    let r = residual(l, &form)?;
    if r > TOL_RESIDUAL {
        return Err(not_a_preserver("residual", r));
    }
    Ok(form)
}

/// Writes a bijective operator-norm preserver as `A -> s U tau(A) U*`.
pub fn decompose_norm_preserver(l: &LinearMapOnHermitians) -> Result<PreserverForm> {
    precheck(l, Property::OperatorNorm)?;
    let n = l.dim();
    let image_of_identity = l.apply(&HermitianMatrix::identity(n))?;
    let plus = numerical_radius(&image_of_identity.shifted(-1.0))?;
    let minus = numerical_radius(&image_of_identity.shifted(1.0))?;
    let sign: i8 = if plus <= TOL_PRECHECK {
        1
    } else if minus <= TOL_PRECHECK {
        -1
    } else {
        return Err(not_a_preserver("sign", plus.min(minus)));
    };

    let probes = wigner_probes(n);
    let images = probes
        .iter()
        .map(|p| Ok(l.apply(p)?.scaled(f64::from(sign))))
        .collect::<Result<Vec<_>>>()?;
    let fit = reconstruct_from_images(n, &probes, &images)?;
    let form = PreserverForm {
        sign,
        u: fit.u,
        antiunitary: fit.antiunitary,
        f: HermitianMatrix::zeros(n),
        x: HermitianMatrix::zeros(n),
    };
    finish(l, form)
}

/// Writes a bijective maximal-deviation preserver as
/// `A -> s U tau(A) U* + tr(F A) I`. In dimension 2 the sign is reported as `+1`.
pub fn decompose_deviation_preserver(l: &LinearMapOnHermitians) -> Result<PreserverForm> {
    precheck(l, Property::MaxDeviation)?;
    let n = l.dim();
    if n == 1 {
        // every map is A -> cA; write it as A + (c - 1) tr(A) I
        let c = l.matrix()[(0, 0)];
        let form = PreserverForm {
            sign: 1,
            u: CMatrix::identity(1, 1),
            antiunitary: false,
            f: HermitianMatrix::scalar(1, c - 1.0),
            x: HermitianMatrix::zeros(1),
        };
        return finish(l, form);
    }

    let image_of_identity = l.apply(&HermitianMatrix::identity(n))?;
    let scalar_defect = max_deviation(&image_of_identity)?;
    if scalar_defect > TOL_PRECHECK * (1.0 + numerical_radius(&image_of_identity)?) {
        return Err(not_a_preserver("scalars", scalar_defect));
    }

    let probes = wigner_probes(n);
    let mut images = Vec::with_capacity(probes.len());
    let mut ranks = Vec::with_capacity(probes.len());
    for p in &probes {
        let class = projection_in_class(&l.apply(p)?, TOL_PRECHECK)?
            .filter(|pc| !pc.trivial)
            .ok_or_else(|| not_a_preserver("projection-classes", f64::NAN))?;
        ranks.push(classify_projection(&class.projection, TOL_PROJ)?.rank);
        images.push(class.projection);
    }
    let r0 = ranks[0];
    if let Some(&other) = ranks.iter().find(|&&r| r != r0) {
        return Err(Error::MixedSignature(r0, other));
    }
    let sign: i8 = if r0 == 1 {
        1
    } else if r0 == n - 1 {
        for img in &mut images {
            *img = img.scaled(-1.0).shifted(1.0);
        }
        -1
    } else {
        return Err(not_a_preserver("rank", r0 as f64));
    };
    let fit = reconstruct_from_images(n, &probes, &images)?;
    let mut form = PreserverForm {
        sign,
        u: fit.u,
        antiunitary: fit.antiunitary,
        f: HermitianMatrix::zeros(n),
        x: HermitianMatrix::zeros(n),
    };

    // f(B_k) = tr(L(B_k) - s U tau(B_k) U*)/n, and F = sum_k f(B_k) B_k
    let mut coeffs = DVector::zeros(n * n);
    for k in 0..n * n {
        let mut e = DVector::zeros(n * n);
        e[k] = 1.0;
        let b = assemble(n, &e);
        let rest = &l.column_image(k) - &form.unitary_action(&b).scaled(f64::from(sign));
        coeffs[k] = rest.trace() / n as f64;
    }
    form.f = assemble(n, &coeffs);
    finish(l, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preservers::wigner_probes;

    fn form(s: &mut Sampler, n: usize, sign: i8, anti: bool, with_f: bool) -> PreserverForm {
        let f = if with_f {
            s.hermitian(n)
        } else {
            HermitianMatrix::zeros(n)
        };
        PreserverForm::new(sign, s.unitary(n), anti, f, HermitianMatrix::zeros(n)).unwrap()
    }

    #[test]
    fn identity_norm_preserver() {
        let got = decompose_norm_preserver(&LinearMapOnHermitians::identity(3)).unwrap();
        assert_eq!(got.sign, 1);
        assert!(!got.antiunitary);
        assert!((&got.u - CMatrix::identity(3, 3)).camax() < 1e-12);
    }

    #[test]
    fn negated_haar_norm_preserver() {
        let mut s = Sampler::new(5);
        let want = form(&mut s, 4, -1, false, false);
        let got = decompose_norm_preserver(&want.to_map()).unwrap();
        assert_eq!(got.sign, -1);
        assert!(
            got.rank_one_action_defect(&want, &wigner_probes(4))
                .unwrap()
                <= 1e-7
        );
    }

    #[test]
    fn shifted_map_is_not_a_norm_preserver() {
        let mut s = Sampler::new(6);
        let mut f = form(&mut s, 3, 1, false, true);
        f.u = CMatrix::identity(3, 3);
        assert!(matches!(
            decompose_norm_preserver(&f.to_map()),
            Err(Error::NotAPreserver {
                stage: "norm-check",
                ..
            })
        ));
    }

    #[test]
    fn identity_deviation_preserver() {
        let got = decompose_deviation_preserver(&LinearMapOnHermitians::identity(4)).unwrap();
        assert_eq!(got.sign, 1);
        assert!(got.f.max_abs_diff(&HermitianMatrix::zeros(4)) < 1e-12);
    }

    #[test]
    fn negative_deviation_preserver_round_trip() {
        let mut s = Sampler::new(9);
        let want = form(&mut s, 5, -1, false, true);
        let got = decompose_deviation_preserver(&want.to_map()).unwrap();
        assert_eq!(got.sign, -1);
        assert!(
            got.rank_one_action_defect(&want, &wigner_probes(5))
                .unwrap()
                <= 1e-7
        );
        assert!(numerical_radius(&(&got.f - &want.f)).unwrap() <= 1e-7);
    }

    #[test]
    fn conjugation_deviation_preserver() {
        let mut want = PreserverForm::identity(3);
        want.antiunitary = true;
        let got = decompose_deviation_preserver(&want.to_map()).unwrap();
        assert!(got.antiunitary && got.sign == 1);
    }

    #[test]
    fn qubit_negation_is_reported_with_positive_sign() {
        let mut s = Sampler::new(10);
        let want = form(&mut s, 2, -1, false, true);
        let got = decompose_deviation_preserver(&want.to_map()).unwrap();
        assert_eq!(got.sign, 1);
        assert!(got.antiunitary);
    }

    #[test]
    fn one_dimensional_maps() {
        let l = LinearMapOnHermitians::identity(1).scaled(3.0);
        let got = decompose_deviation_preserver(&l).unwrap();
        assert!((got.f.get(0, 0).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_doubling() {
        let l = LinearMapOnHermitians::identity(3).scaled(2.0);
        assert!(matches!(
            decompose_deviation_preserver(&l),
            Err(Error::NotAPreserver {
                stage: "deviation-check",
                ..
            })
        ));
    }
}
