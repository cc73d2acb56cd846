//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use common::{oracle_deviation, oracle_eigenvalues};
use obsdev_core::deviation::{
    d_v, max_deviation, max_deviation_variational, witness_state, DEFAULT_RESTARTS,
};
use obsdev_core::factor::{
    canonicalize, class_distance, distinguish_projections, is_extreme_half_ball,
    projection_path_auto, split_non_extreme, Side,
};
use obsdev_core::harness::suite::{midpoint_search, sphere_class, MIDPOINT_ATTEMPTS};
use obsdev_core::harness::{run_suite, Sampler, SuiteConfig};
use obsdev_core::hermitian::{classify_projection, numerical_radius, variance, TOL_PROJ};
use obsdev_core::preservers::{
    affinize_dm_isometry, decompose_deviation_preserver, linearize_dv_isometry, wigner_probes,
    PreserverForm,
};
use obsdev_core::rng::StreamRng;
use obsdev_core::{Error, HermitianMatrix};

type C = Complex<f64>;
type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn sampler(seed: u64, case: usize) -> Sampler {
    Sampler::from_rng(StreamRng::for_case(seed, case as u64))
}

fn fail(msg: impl Into<String>) -> Outcome {
    Err(msg.into())
}

/// Runs `f` for every case in parallel and folds the per-case maxima.
fn max_over<F>(cases: usize, f: F) -> Result<Vec<f64>, String>
where
    F: Fn(usize) -> Result<Vec<f64>, String> + Sync + Send,
{
    let rows = (0..cases)
        .into_par_iter()
        .map(f)
        .collect::<Result<Vec<_>, _>>()?;
    let width = rows.first().map_or(0, Vec::len);
    Ok((0..width)
        .map(|k| rows.iter().fold(0.0f64, |m, r| m.max(r[k])))
        .collect())
}

fn e(err: Error) -> String {
    err.to_string()
}

fn deviation_routes_agree() -> Outcome {
    let start = Instant::now();
    let m = max_over(500, |i| {
        let mut s = sampler(101, i);
        let n = s.rng().int_in(2, 16);
        let a = s.hermitian(n);
        let spectral = max_deviation(&a).map_err(e)?;
        let variational = max_deviation_variational(&a, DEFAULT_RESTARTS, i as u64)
            .map_err(e)?
            .value;
        let witness = witness_state(&a).map_err(e)?;
        let var = variance(&a, &witness).map_err(e)?;
        Ok(vec![
            (variational - spectral).abs(),
            (var - spectral * spectral).abs(),
            (spectral - oracle_deviation(&a)).abs(),
        ])
    })?;
    let secs = start.elapsed().as_secs_f64();
    let msg = format!(
        "route gap {:.1e}, witness gap {:.1e}, oracle gap {:.1e}, {secs:.2} s",
        m[0], m[1], m[2]
    );
    if m[0] <= 1e-6 && m[1] <= 1e-9 && m[2] <= 1e-8 && secs <= 10.0 {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn rank_one_distance_formula() -> Outcome {
    let m = max_over(500, |i| {
        let mut s = sampler(202, i);
        let n = s.rng().int_in(2, 16);
        let (x, y) = (s.state(n), s.state(n));
        let inner: C = x
            .amplitudes()
            .iter()
            .zip(y.amplitudes().iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let want = (1.0 - inner.norm_sqr()).max(0.0).sqrt();
        let got = d_v(&x.projector(), &y.projector()).map_err(e)?;
        Ok(vec![(got - want).abs()])
    })?;
    let p = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
    let mut family: f64 = 0.0;
    let mut theta_rng = StreamRng::new(203);
    for a in [0.0f64, 0.25, 0.5, 0.9, 1.0] {
        let theta = theta_rng.uniform_in(0.0, std::f64::consts::TAU);
        let off = C::from_polar((a * (1.0 - a)).sqrt(), theta);
        let q = DMatrix::from_row_slice(
            2,
            2,
            &[C::new(a, 0.0), off, off.conj(), C::new(1.0 - a, 0.0)],
        );
        let q = HermitianMatrix::from_hermitian_part(q);
        family = family.max((d_v(&p, &q).map_err(e)? - (1.0 - a).sqrt()).abs());
    }
    let msg = format!("random pairs {:.1e}, qubit family {family:.1e}", m[0]);
    if m[0] <= 1e-9 && family <= 1e-9 {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn seminorm_and_invariance() -> Outcome {
    let m = max_over(500, |i| {
        let mut s = sampler(303, i);
        let n = s.rng().int_in(2, 12);
        let (a, b) = (s.hermitian(n), s.hermitian(n));
        let t = s.rng().uniform_in(-5.0, 5.0);
        let lambda = s.rng().uniform_in(-5.0, 5.0);
        let u = s.unitary(n);
        let dev = |m: &HermitianMatrix| max_deviation(m).map_err(e);
        let da = dev(&a)?;
        let homog = (dev(&a.scaled(t))? - t.abs() * da).abs();
        let sub = (dev(&(&a + &b))? - da - dev(&b)?).max(0.0);
        let shift = (dev(&a.shifted(lambda))? - da).abs();
        let conj = a.conjugate_by(&u);
        let plus = (dev(&conj.shifted(lambda))? - da).abs();
        let minus = (dev(&(-&conj).shifted(lambda))? - da).abs();
        Ok(vec![homog, sub, shift, plus.max(minus)])
    })?;
    let mut mismatches = 0;
    for i in 0..200 {
        let mut s = sampler(304, i);
        let n = s.rng().int_in(2, 10);
        let rep = canonicalize(&s.hermitian(n)).map_err(e)?.representative;
        let top = max_deviation(&rep).map_err(e)? * 2.0;
        let target = s.rng().uniform_in(0.5, 1.5);
        let a = rep.scaled(target / top);
        let ev = oracle_eigenvalues(&a);
        let in_ball = (ev[ev.len() - 1] - ev[0]) / 2.0 <= 0.5;
        let between = ev[0] >= -1e-12 && ev[ev.len() - 1] <= 1.0;
        let lib = max_deviation(&a).map_err(e)? <= 0.5;
        if in_ball != between || lib != between {
            mismatches += 1;
        }
    }
    let msg = format!(
        "homogeneity {:.1e}, subadditivity {:.1e}, shift {:.1e}, unitary {:.1e}, ball mismatches {mismatches}/200",
        m[0], m[1], m[2], m[3]
    );
    if m.iter().all(|&d| d <= 1e-9) && mismatches == 0 {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn random_form(s: &mut Sampler, n: usize) -> PreserverForm {
    loop {
        let sign = if s.rng().coin() { 1 } else { -1 };
        let antiunitary = s.rng().coin();
        let u = s.unitary(n);
        let scale = s.rng().uniform_in(0.0, 0.6) / n as f64;
        let f = s.hermitian(n).scaled(scale);
        // The form is invertible exactly when L(I) = (s + tr F) I is nonzero.
        if (f64::from(sign) + f.trace()).abs() < 0.2 {
            continue;
        }
        return PreserverForm::new(sign, u, antiunitary, f, HermitianMatrix::zeros(n))
            .expect("valid form");
    }
}

fn deviation_preserver_round_trip() -> Outcome {
    let start = Instant::now();
    let rows = (0..200)
        .into_par_iter()
        .map(|i| {
            let mut s = sampler(404, i);
            let n = s.rng().int_in(2, 10);
            let form = random_form(&mut s, n);
            let got = decompose_deviation_preserver(&form.to_map()).map_err(e)?;
            let sign_ok = n < 3 || got.sign == form.sign;
            let mut residual: f64 = 0.0;
            for _ in 0..8 {
                let a = s.hermitian(n);
                residual =
                    residual.max(numerical_radius(&(&got.apply(&a) - &form.apply(&a))).map_err(e)?);
            }
            // On qubits -UAU* also has a +sign antiunitary form, so action and F
            // are compared only when the signs agree.
            let (action, f_gap) = if got.sign == form.sign && got.antiunitary == form.antiunitary {
                let mut probes = wigner_probes(n);
                probes.extend((0..4).map(|_| s.state(n).projector()));
                (
                    got.rank_one_action_defect(&form, &probes).map_err(e)?,
                    got.f.max_abs_diff(&form.f),
                )
            } else if n < 3 {
                (0.0, 0.0)
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            Ok((sign_ok, vec![action, f_gap, residual]))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let secs = start.elapsed().as_secs_f64();
    let sign_misses = rows.iter().filter(|r| !r.0).count();
    let worst = |k: usize| rows.iter().fold(0.0f64, |m, r| m.max(r.1[k]));
    let msg = format!(
        "sign misses {sign_misses}, action {:.1e}, F {:.1e}, residual {:.1e}, {secs:.2} s",
        worst(0),
        worst(1),
        worst(2)
    );
    if sign_misses == 0 && worst(0) <= 1e-7 && worst(1) <= 1e-6 && worst(2) <= 1e-7 && secs <= 30.0
    {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn extreme_point_classifier() -> Outcome {
    let rows = (0..50)
        .into_par_iter()
        .map(|i| {
            let mut s = sampler(505, i);
            let n = if i % 2 == 0 { 2 } else { 3 };
            let extreme = n == 2 || i % 4 == 1;
            let b = sphere_class(&mut s, n, extreme).map_err(e)?;
            let classified = is_extreme_half_ball(&b, 1e-9).map_err(e)?;
            if extreme {
                let found = midpoint_search(&b, MIDPOINT_ATTEMPTS, &mut s).map_err(e)?;
                Ok((true, classified && found == 0))
            } else {
                let ok = match split_non_extreme(&b, 1e-9) {
                    Ok(sp) => {
                        let mid = (&sp.b1 + &sp.b2).scaled(0.5);
                        max_deviation(&sp.b1).map_err(e)? <= 0.5 + 1e-9
                            && max_deviation(&sp.b2).map_err(e)? <= 0.5 + 1e-9
                            && d_v(&mid, &b).map_err(e)? <= 1e-9
                            && d_v(&sp.b1, &b).map_err(e)? > 1e-9
                    }
                    Err(_) => false,
                };
                Ok((false, !classified && ok))
            }
        })
        .collect::<Result<Vec<_>, String>>()?;
    let extreme = rows.iter().filter(|r| r.0).count();
    let bad = rows.iter().filter(|r| !r.1).count();
    let msg = format!(
        "{extreme} extreme and {} non-extreme cases, disagreements {bad}",
        rows.len() - extreme
    );
    if bad == 0 && extreme > 0 && extreme < rows.len() {
        Ok(msg)
    } else {
        fail(msg)
    }
}

/// `exp(i eps G) P exp(-i eps G)` for a GUE `G`.
fn rotated(s: &mut Sampler, p: &HermitianMatrix, eps: f64) -> HermitianMatrix {
    let g = s.hermitian(p.dim()).matrix() * C::new(0.0, eps);
    p.conjugate_by(&g.exp())
}

fn close_projections_and_paths() -> Outcome {
    let (mut close, mut rank_violations, mut tries) = (0, 0, 0);
    let mut unequal_min = f64::INFINITY;
    while close < 500 && tries < 20_000 {
        let mut s = sampler(606, tries);
        tries += 1;
        let n = s.rng().int_in(2, 8);
        let k = s.rng().int_in(1, n - 1);
        let p = s.projection(n, k).map_err(e)?;
        let q = if s.rng().coin() {
            let eps = 10f64.powf(s.rng().uniform_in(-3.0, 0.0));
            rotated(&mut s, &p, eps)
        } else {
            let kq = s.rng().int_in(1, n - 1);
            s.projection(n, kq).map_err(e)?
        };
        let dist = class_distance(&p, &q).map_err(e)?;
        let rp = classify_projection(&p, TOL_PROJ).map_err(e)?.rank;
        let rq = classify_projection(&q, TOL_PROJ).map_err(e)?.rank;
        if rp != rq {
            unequal_min = unequal_min.min(dist);
        }
        if dist < 0.5 - 1e-6 {
            close += 1;
            if rp != rq {
                rank_violations += 1;
            }
        }
    }
    let paths = max_over(200, |i| {
        let mut s = sampler(607, i);
        let n = s.rng().int_in(2, 8);
        let k = s.rng().int_in(1, n - 1);
        let p = s.projection(n, k).map_err(e)?;
        let q = s.projection(n, k).map_err(e)?;
        let path = projection_path_auto(&p, &q).map_err(e)?;
        let mut spacing: f64 = 0.0;
        for w in path.windows(2) {
            spacing = spacing.max(class_distance(&w[0], &w[1]).map_err(e)?);
        }
        let last = path.last().ok_or("empty path")?;
        Ok(vec![spacing, numerical_radius(&(last - &q)).map_err(e)?])
    })?;
    let msg = format!(
        "{close} close pairs, rank violations {rank_violations}, unequal-rank distance >= {unequal_min:.4}; path spacing {:.4}, endpoint {:.1e}",
        paths[0], paths[1]
    );
    if close == 500
        && rank_violations == 0
        && unequal_min >= 0.5 - 1e-9
        && paths[0] < 0.5
        && paths[1] <= 1e-8
    {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn projection_distinguisher() -> Outcome {
    let rows = (0..200)
        .into_par_iter()
        .map(|i| {
            let mut s = sampler(707, i);
            let n = s.rng().int_in(2, 12);
            let kp = s.rng().int_in(1, n - 1);
            let p = s.projection(n, kp).map_err(e)?;
            let q = if i % 4 == 0 {
                rotated(&mut s, &p, 1e-2)
            } else {
                let k = s.rng().int_in(1, n - 1);
                s.projection(n, k).map_err(e)?
            };
            let d = distinguish_projections(&p, &q)
                .map_err(e)?
                .ok_or("no witness for distinct projections")?;
            let info = classify_projection(&d.r, TOL_PROJ).map_err(e)?;
            let host = match d.subprojection_of {
                Side::P => &p,
                Side::Q => &q,
            };
            let inside = numerical_radius(
                &HermitianMatrix::from_hermitian_part(host.matrix() * d.r.matrix())
                    .checked_sub(&d.r)
                    .map_err(e)?,
            )
            .map_err(e)?;
            let gap = (oracle_deviation(&(&p + &d.r)) - oracle_deviation(&(&q + &d.r))).abs();
            let same = distinguish_projections(&p, &p.clone())
                .map_err(e)?
                .is_none();
            Ok((
                info.is_projection && info.rank == 1 && inside <= 1e-8 && same,
                gap,
            ))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let bad = rows.iter().filter(|r| !r.0).count();
    let min_gap = rows.iter().fold(f64::INFINITY, |m, r| m.min(r.1));
    let msg = format!("smallest oracle gap {min_gap:.1e}, malformed witnesses {bad}");
    if bad == 0 && min_gap >= 1e-6 {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn isometry_reductions() -> Outcome {
    let mut worst = [0.0f64; 4];
    for i in 0..12 {
        let mut s = sampler(808, i);
        let n = s.rng().int_in(3, 6);
        let sign: i8 = if s.rng().coin() { 1 } else { -1 };
        let antiunitary = s.rng().coin();
        let u = s.unitary(n);
        let x0 = s.hermitian(n);
        let target =
            PreserverForm::new(sign, u, antiunitary, HermitianMatrix::zeros(n), x0.clone())
                .map_err(e)?;
        let g_kind = i % 3;
        let g = |a: &HermitianMatrix| -> f64 {
            match g_kind {
                0 => 0.0,
                1 => a.trace().sin(),
                _ => a.op_norm().expect("finite matrix"),
            }
        };
        let phi = |a: &HermitianMatrix| target.apply(a).shifted(g(a));
        let (form, additivity) = if g_kind == 0 {
            let r = affinize_dm_isometry(phi, n, 200, i as u64, 1e-8).map_err(e)?;
            (r.form, r.additivity_defect)
        } else {
            let r = linearize_dv_isometry(phi, n, 200, i as u64, 1e-8).map_err(e)?;
            (r.form, r.additivity_defect)
        };
        let mut probes = wigner_probes(n);
        probes.extend((0..4).map(|_| s.state(n).projector()));
        let sign_gap = if form.sign == sign && form.antiunitary == antiunitary {
            0.0
        } else {
            f64::INFINITY
        };
        let action = if sign_gap == 0.0 {
            form.rank_one_action_defect(&target, &probes).map_err(e)?
        } else {
            f64::INFINITY
        };
        let x_gap = numerical_radius(&(&form.x - &phi(&HermitianMatrix::zeros(n)))).map_err(e)?;
        for (w, v) in worst.iter_mut().zip([sign_gap, action, x_gap, additivity]) {
            *w = w.max(v);
        }
    }
    let quadratic = |a: &HermitianMatrix| a + &a.powi(2).scaled(0.1);
    let rejected = matches!(
        linearize_dv_isometry(quadratic, 3, 50, 9, 1e-8),
        Err(Error::NotAnIsometry(_))
    ) && matches!(
        affinize_dm_isometry(quadratic, 3, 50, 9, 1e-8),
        Err(Error::NotAnIsometry(_))
    );
    let msg = format!(
        "sign/tau mismatch {}, action {:.1e}, X {:.1e}, additivity {:.1e}, non-isometry rejected {rejected}",
        worst[0], worst[1], worst[2], worst[3]
    );
    if worst[0] == 0.0 && worst[1] <= 1e-7 && worst[2] <= 1e-7 && worst[3] <= 1e-8 && rejected {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn default_suite_run() -> Outcome {
    let config = SuiteConfig::default();
    let start = Instant::now();
    let first = run_suite(&config).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let second = run_suite(&config).map_err(e)?;
    let reproducible = first.to_json_without_time() == second.to_json_without_time();
    let failing: Vec<&str> = first
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    let msg = format!(
        "{} checks, overall {}, {secs:.2} s, reproducible {reproducible}, failing {failing:?}",
        first.checks.len(),
        first.overall
    );
    if first.overall && secs < 60.0 && reproducible {
        Ok(msg)
    } else {
        fail(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("deviation routes agree", deviation_routes_agree),
        ("rank-one distance formula", rank_one_distance_formula),
        ("seminorm and invariance", seminorm_and_invariance),
        (
            "deviation preserver round trip",
            deviation_preserver_round_trip,
        ),
        ("extreme point classifier", extreme_point_classifier),
        ("close projections and paths", close_projections_and_paths),
        ("projection distinguisher", projection_distinguisher),
        ("isometry reductions", isometry_reductions),
        ("default suite run", default_suite_run),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name:<32} {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name:<32} {detail}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
