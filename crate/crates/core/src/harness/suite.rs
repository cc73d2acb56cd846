//! Named property suites over seeded random cases.
//!
//! Every case draws from its own stream seeded with `seed ^ case_id`, cases run
//! in parallel, and the per-check aggregation is a max over cases, so a report
//! depends only on the configuration.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviation::{
    d_v, factor_norm, max_deviation, max_deviation_variational, witness_state, DEFAULT_RESTARTS,
};
use crate::error::{Error, Result};
use crate::factor::{
    canonicalize, class_distance, compression_through, distinguish_projections,
    is_extreme_half_ball, projection_path_auto, split_non_extreme, weyl_gap_check,
};
use crate::harness::generate::Sampler;
use crate::hermitian::{
    c, classify_projection, numerical_radius, spectral_decompose, variance, CMatrix,
    HermitianMatrix, MAX_DIM, TOL_PROJ,
};
use crate::preservers::{
    affinize_dm_isometry, check_preserver, decompose_deviation_preserver, decompose_norm_preserver,
    linearize_dv_isometry, wigner_probes, PreserverForm, Property,
};
use crate::rng::StreamRng;

pub type DeviationFn = fn(&HermitianMatrix) -> Result<f64>;

/// Replaceable primitives, used to check that the suites catch broken code.
#[derive(Debug, Clone, Copy)]
pub struct Hooks {
    pub max_deviation: DeviationFn,
}

impl Default for Hooks {
    fn default() -> Self {
        Self { max_deviation }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub samples_per_case: usize,
    pub seed: u64,
    /// Overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub suites: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4, 5, 6, 8, 10, 12, 16],
            samples_per_case: 12,
            seed: 20_240_917,
            tolerances: BTreeMap::new(),
            suites: SUITES.iter().map(|s| s.name.to_string()).collect(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidInput("dims must not be empty".into()));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n == 0 || n > MAX_DIM) {
            return Err(Error::BadDimension(n));
        }
        if self.samples_per_case == 0 {
            return Err(Error::InvalidInput(
                "samples_per_case must be at least 1".into(),
            ));
        }
        for name in &self.suites {
            if suite_spec(name).is_none() {
                return Err(Error::InvalidInput(format!("unknown suite `{name}`")));
            }
        }
        for (name, tol) in &self.tolerances {
            if !SUITES.iter().flat_map(|s| s.checks).any(|c| c.name == name) {
                return Err(Error::InvalidInput(format!(
                    "unknown check `{name}` in tolerances"
                )));
            }
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance for `{name}` must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    /// `null` in JSON when a case raised an error.
    pub max_defect: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckOutcome>,
    pub overall: bool,
    pub wall_time: f64,
}

impl SuiteReport {
    /// Pretty JSON with `wall_time` zeroed, for reproducibility comparisons.
    pub fn to_json_without_time(&self) -> String {
        let mut r = self.clone();
        r.wall_time = 0.0;
        crate::harness::json::to_json_string(&r)
    }
}

/// One reported quantity; passes when `max_defect <= tol` (`< tol` if strict).
#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub tol: f64,
    pub strict: bool,
}

const fn check(name: &'static str, tol: f64) -> CheckSpec {
    CheckSpec {
        name,
        tol,
        strict: false,
    }
}

type CaseFn = fn(&Hooks, usize, &mut Sampler) -> Result<Vec<Option<f64>>>;

pub struct SuiteSpec {
    pub name: &'static str,
    pub min_dim: usize,
    pub max_dim: usize,
    pub checks: &'static [CheckSpec],
    run: CaseFn,
}

/// Invariant identifiers with the owning module. A check named
/// `<suite>.<invariant>[.<detail>]` executes that invariant.
pub const INVARIANTS: &[(&str, &str)] = &[
    ("deviation", "three_route_agreement"),
    ("deviation", "axioms"),
    ("deviation", "invariance"),
    ("deviation", "domination"),
    ("deviation", "half_ball_iff_contraction"),
    ("deviation", "rank_one_overlap"),
    ("factor", "extreme_soundness"),
    ("factor", "sampled"),
    ("factor", "path_validity"),
    ("factor", "distinguisher_completeness"),
    ("preservers", "forward_preservation"),
    ("preservers", "norm_forward"),
    ("preservers", "round_trip"),
    ("preservers", "argmax_invariance"),
    ("preservers", "scalar_fixing"),
    ("preservers", "commutativity"),
];

pub const SUITES: &[SuiteSpec] = &[
    SuiteSpec {
        name: "lemma1",
        min_dim: 2,
        max_dim: MAX_DIM,
        checks: &[
            check("lemma1.three_route_agreement.factor", 1e-10),
            check("lemma1.three_route_agreement.variational", 1e-6),
            check("lemma1.witness_variance", 1e-9),
            check("lemma1.domination", 1e-12),
        ],
        run: lemma1,
    },
    SuiteSpec {
        name: "seminorm",
        min_dim: 1,
        max_dim: MAX_DIM,
        checks: &[
            check("seminorm.axioms.homogeneity", 1e-9),
            check("seminorm.axioms.subadditivity", 1e-9),
            check("seminorm.axioms.scalar", 1e-12),
            check("seminorm.invariance", 1e-9),
        ],
        run: seminorm,
    },
    SuiteSpec {
        name: "remark1",
        min_dim: 1,
        max_dim: MAX_DIM,
        checks: &[check("remark1.half_ball_iff_contraction", 0.0)],
        run: remark1,
    },
    SuiteSpec {
        name: "var33",
        min_dim: 2,
        max_dim: MAX_DIM,
        checks: &[
            check("var33.rank_one_overlap", 1e-9),
            check("var33.rank_one_overlap.qubit_family", 1e-9),
        ],
        run: var33,
    },
    SuiteSpec {
        name: "lemma2",
        min_dim: 2,
        max_dim: 3,
        checks: &[
            check("lemma2.extreme_soundness.classifier", 0.0),
            check("lemma2.extreme_soundness.search", 0.0),
            check("lemma2.extreme_soundness.split", 0.0),
        ],
        run: lemma2,
    },
    SuiteSpec {
        name: "lemma3",
        min_dim: 2,
        max_dim: MAX_DIM,
        checks: &[
            check("lemma3.sampled.close_implies_equal_rank", 0.0),
            check("lemma3.sampled.rank_gap", 0.0),
            check("lemma3.weyl_estimate", 0.0),
        ],
        run: lemma3,
    },
    SuiteSpec {
        name: "lemma4",
        min_dim: 2,
        max_dim: MAX_DIM,
        checks: &[
            CheckSpec {
                name: "lemma4.path_validity.spacing",
                tol: 0.5,
                strict: true,
            },
            check("lemma4.path_validity.endpoint", 1e-8),
            check("lemma4.path_validity.rank", 0.0),
        ],
        run: lemma4,
    },
    SuiteSpec {
        name: "lemma5",
        min_dim: 2,
        max_dim: 12,
        checks: &[
            check("lemma5.distinguisher_completeness.distinct", 0.0),
            check("lemma5.distinguisher_completeness.equal", 0.0),
        ],
        run: lemma5,
    },
    SuiteSpec {
        name: "theorem1",
        min_dim: 1,
        max_dim: 10,
        checks: &[
            check("theorem1.norm_forward", 1e-10),
            check("theorem1.decomposition.sign", 0.0),
            check("theorem1.decomposition.action", 1e-7),
        ],
        run: theorem1,
    },
    SuiteSpec {
        name: "theorem2",
        min_dim: 2,
        max_dim: 10,
        checks: &[
            check("theorem2.forward_preservation", 1e-10),
            check("theorem2.round_trip.sign", 0.0),
            check("theorem2.round_trip.action", 1e-7),
            check("theorem2.round_trip.functional", 1e-6),
            check("theorem2.round_trip.residual", 1e-7),
            check("theorem2.argmax_invariance", 1e-10),
            check("theorem2.scalar_fixing", 1e-9),
            check("theorem2.commutativity", 1e-8),
        ],
        run: theorem2,
    },
    SuiteSpec {
        name: "theorem3",
        min_dim: 1,
        max_dim: 10,
        checks: &[
            check("theorem3.affinization.sign", 0.0),
            check("theorem3.affinization.action", 1e-7),
            check("theorem3.affinization.translation", 1e-7),
            check("theorem3.affinization.additivity", 1e-8),
            check("theorem3.rejects_non_isometry", 0.0),
        ],
        run: theorem3,
    },
    SuiteSpec {
        name: "theorem4",
        min_dim: 2,
        max_dim: 10,
        checks: &[
            check("theorem4.linearization.sign", 0.0),
            check("theorem4.linearization.action", 1e-7),
            check("theorem4.linearization.translation", 1e-7),
            check("theorem4.linearization.additivity", 1e-8),
            check("theorem4.linearization.scalar_part", 1e-7),
            check("theorem4.linearization.model", 1e-7),
            check("theorem4.rejects_non_isometry", 0.0),
        ],
        run: theorem4,
    },
];

pub fn suite_spec(name: &str) -> Option<&'static SuiteSpec> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_with(config, &Hooks::default())
}

pub fn run_suite_with(config: &SuiteConfig, hooks: &Hooks) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let mut checks = Vec::new();
    for name in &config.suites {
        let (index, spec) = SUITES
            .iter()
            .enumerate()
            .find(|(_, s)| s.name == name)
            .expect("validated suite name");
        let cases: Vec<(usize, usize)> = config
            .dims
            .iter()
            .filter(|&&n| (spec.min_dim..=spec.max_dim).contains(&n))
            .flat_map(|&n| (0..config.samples_per_case).map(move |j| (n, j)))
            .collect();
        let width = spec.checks.len();
        let rows: Vec<Vec<Option<f64>>> = cases
            .par_iter()
            .map(|&(n, j)| {
                let case_id = ((index as u64) << 48) | ((n as u64) << 32) | j as u64;
                let mut s = Sampler::from_rng(StreamRng::for_case(config.seed, case_id));
                let mut row = (spec.run)(hooks, n, &mut s)
                    .unwrap_or_else(|_| vec![Some(f64::INFINITY); width]);
                row.resize(width, None);
                row
            })
            .collect();
        for (k, chk) in spec.checks.iter().enumerate() {
            let values: Vec<f64> = rows.iter().filter_map(|r| r[k]).collect();
            let max_defect =
                values.iter().fold(
                    0.0f64,
                    |m, &v| if v.is_nan() { f64::INFINITY } else { m.max(v) },
                );
            let tol = config.tolerances.get(chk.name).copied().unwrap_or(chk.tol);
            let pass = if chk.strict {
                max_defect < tol
            } else {
                max_defect <= tol
            };
            checks.push(CheckOutcome {
                name: chk.name.to_string(),
                cases: values.len(),
                max_defect,
                pass,
            });
        }
    }
    let overall = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        checks,
        overall,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn flag(bad: bool) -> Option<f64> {
    Some(if bad { 1.0 } else { 0.0 })
}

fn random_rank(s: &mut Sampler, n: usize) -> usize {
    s.rng().int_in(1, n - 1)
}

/// `exp(i eps H)` for a GUE `H`.
fn near_identity_unitary(s: &mut Sampler, n: usize, eps: f64) -> Result<CMatrix> {
    let spec = spectral_decompose(&s.hermitian(n))?;
    let w = &spec.eigenvectors;
    let phases = CMatrix::from_fn(n, n, |i, j| {
        w[(i, j)] * c(0.0, eps * spec.eigenvalues[j]).exp()
    });
    Ok(phases * w.adjoint())
}

fn random_form(s: &mut Sampler, n: usize, with_f: bool, with_x: bool) -> Result<PreserverForm> {
    let sign = if s.rng().coin() { 1 } else { -1 };
    let u = s.unitary(n);
    let anti = s.rng().coin();
    let f = if with_f {
        s.hermitian(n)
    } else {
        HermitianMatrix::zeros(n)
    };
    let x = if with_x {
        s.hermitian(n)
    } else {
        HermitianMatrix::zeros(n)
    };
    PreserverForm::new(sign, u, anti, f, x)
}

/// Wigner probes plus a few random rank-one projections.
fn action_probes(s: &mut Sampler, n: usize) -> Vec<HermitianMatrix> {
    let mut probes = wigner_probes(n);
    probes.extend((0..4).map(|_| s.state(n).projector()));
    probes
}

fn lemma1(hooks: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let a = s.hermitian(n);
    let dev = (hooks.max_deviation)(&a)?;
    let fac = factor_norm(&a)?.value;
    let var = max_deviation_variational(&a, DEFAULT_RESTARTS, s.rng().next_u64())?.value;
    let w = witness_state(&a)?;
    Ok(vec![
        Some((dev - fac).abs()),
        Some((dev - var).abs()),
        Some((variance(&a, &w)? - dev * dev).abs()),
        Some((dev - a.op_norm()?).max(0.0)),
    ])
}

fn seminorm(hooks: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let dev = hooks.max_deviation;
    let a = s.hermitian(n);
    let b = s.hermitian(n);
    let t = s.rng().uniform_in(-3.0, 3.0);
    let lambda = s.rng().uniform_in(-5.0, 5.0);
    let u = s.unitary(n);
    let sign = if s.rng().coin() { 1.0 } else { -1.0 };
    let tau = if s.rng().coin() {
        a.conjugate()
    } else {
        a.clone()
    };
    let da = dev(&a)?;
    let moved = tau.conjugate_by(&u).scaled(sign).shifted(lambda);
    Ok(vec![
        Some((dev(&a.scaled(t))? - t.abs() * da).abs()),
        Some((dev(&(&a + &b))? - da - dev(&b)?).max(0.0)),
        Some(dev(&HermitianMatrix::scalar(n, lambda))?),
        Some((dev(&moved)? - da).abs()),
    ])
}

fn remark1(hooks: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let a = s.hermitian(n);
    let spec = spectral_decompose(&a)?;
    let spread = spec.lambda_max() - spec.lambda_min();
    let scale = if spread > 0.0 {
        s.rng().uniform_in(0.5, 1.5) / spread
    } else {
        1.0
    };
    let b = a.shifted(-spec.lambda_min()).scaled(scale);
    let top = spectral_decompose(&b)?.lambda_max();
    if (top - 1.0).abs() < 1e-12 {
        return Ok(vec![None]);
    }
    let in_ball = (hooks.max_deviation)(&b)? <= 0.5;
    Ok(vec![flag(in_ball != (top <= 1.0))])
}

fn var33(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let p = s.state(n).projector();
    let q = s.state(n).projector();
    let law = (d_v(&p, &q)? - (1.0 - p.trace_product(&q)).max(0.0).sqrt()).abs();
    let family = if n == 2 {
        let theta = s.rng().uniform_in(0.0, TAU);
        let p = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        let mut worst: f64 = 0.0;
        for a in [0.0f64, 0.25, 0.5, 0.9, 1.0] {
            let off = c(0.0, theta).exp() * (a * (1.0 - a)).sqrt();
            let q = HermitianMatrix::from_hermitian_part(CMatrix::from_row_slice(
                2,
                2,
                &[c(a, 0.0), off, off.conj(), c(1.0 - a, 0.0)],
            ));
            worst = worst.max((d_v(&p, &q)? - (1.0f64 - a).sqrt()).abs());
        }
        Some(worst)
    } else {
        None
    };
    Ok(vec![Some(law), family])
}

/// Midpoint decompositions searched for around extreme classes.
pub const MIDPOINT_ATTEMPTS: usize = 1000;

/// Random search for `B = (B1 + B2)/2` with both halves in the 1/2-ball and
/// `B1` in another class; returns the number of decompositions found.
pub fn midpoint_search(b: &HermitianMatrix, attempts: usize, s: &mut Sampler) -> Result<usize> {
    let n = b.dim();
    let mut found = 0;
    for _ in 0..attempts {
        let d = s.hermitian(n);
        let dn = max_deviation(&d)?;
        if dn <= 1e-9 {
            continue;
        }
        let size = 10f64.powf(s.rng().uniform_in(-3.0, -0.3));
        let d = d.scaled(size / dn);
        let half_1 = max_deviation(&(b + &d))?;
        let half_2 = max_deviation(&(b - &d))?;
        if half_1 <= 0.5 + 1e-12 && half_2 <= 0.5 + 1e-12 {
            found += 1;
        }
    }
    Ok(found)
}

/// Norm-1/2 class that is extreme (a shifted projection) or, for `n >= 3`, a
/// random non-extreme one.
pub fn sphere_class(s: &mut Sampler, n: usize, extreme: bool) -> Result<HermitianMatrix> {
    let shift = s.rng().uniform_in(-2.0, 2.0);
    if extreme || n < 3 {
        let k = random_rank(s, n);
        return Ok(s.projection(n, k)?.shifted(shift));
    }
    let mut diag = vec![0.0, 1.0];
    diag.extend((2..n).map(|_| 0.0));
    for d in diag.iter_mut().skip(2) {
        *d = s.rng().uniform_in(0.05, 0.95);
    }
    let u = s.unitary(n);
    Ok(HermitianMatrix::from_real_diagonal(&diag)
        .conjugate_by(&u)
        .shifted(shift))
}

fn lemma2(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let extreme = n < 3 || s.rng().coin();
    let b = sphere_class(s, n, extreme)?;
    let classified = is_extreme_half_ball(&b, 1e-9)?;
    if extreme {
        let found = midpoint_search(&b, MIDPOINT_ATTEMPTS, s)?;
        Ok(vec![flag(!classified), Some(found as f64), None])
    } else {
        let split_ok = match split_non_extreme(&b, 1e-9) {
            Ok(sp) => max_deviation(&sp.b1)? <= 0.5 + 1e-9 && max_deviation(&sp.b2)? <= 0.5 + 1e-9,
            Err(_) => false,
        };
        Ok(vec![flag(classified), None, flag(!split_ok)])
    }
}

fn lemma3(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let k = random_rank(s, n);
    let p = s.projection(n, k)?;
    let q = match s.rng().int_in(0, 2) {
        0 => {
            let eps = s.rng().uniform_in(0.0, 0.3);
            p.conjugate_by(&near_identity_unitary(s, n, eps)?)
        }
        1 => {
            // add or drop one direction, then perturb
            let spec = spectral_decompose(&p)?;
            let grow = k < n - 1 || (k == n - 1 && s.rng().coin());
            let pick = if grow {
                spec.subspace(|l| l < 0.5)
            } else {
                spec.subspace(|l| l > 0.5)
            };
            let v = pick.column(0).into_owned();
            let r = HermitianMatrix::from_hermitian_part(&v * v.adjoint());
            let moved = if grow { &p + &r } else { &p - &r };
            let eps = s.rng().uniform_in(0.0, 0.3);
            moved.conjugate_by(&near_identity_unitary(s, n, eps)?)
        }
        _ => {
            let kq = s.rng().int_in(0, n);
            s.projection(n, kq)?
        }
    };
    let rp = classify_projection(&p, TOL_PROJ)?.rank;
    let info_q = classify_projection(&q, TOL_PROJ)?;
    let dist = class_distance(&p, &q)?;
    let close_bad = dist < 0.5 - 1e-6 && rp != info_q.rank;
    let gap = (rp != info_q.rank).then(|| (0.5 - 1e-9 - dist).max(0.0));
    let weyl = if info_q.is_trivial {
        None
    } else {
        let mu = s.rng().uniform_in(-0.4, 0.4);
        let r = compression_through(&p, &q)?;
        let rep = weyl_gap_check(&p, &q, mu, &r)?;
        flag(!rep.holds || rep.close_projections() == Some(false))
    };
    Ok(vec![flag(close_bad), gap, weyl])
}

fn lemma4(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let k = random_rank(s, n);
    let p = s.projection(n, k)?;
    let q = s.projection(n, k)?;
    let chain = projection_path_auto(&p, &q)?;
    let mut spacing: f64 = 0.0;
    let mut rank_changes = 0;
    for pair in chain.windows(2) {
        spacing = spacing.max(class_distance(&pair[0], &pair[1])?);
        let info = classify_projection(&pair[1], TOL_PROJ)?;
        if !info.is_projection || info.rank != k {
            rank_changes += 1;
        }
    }
    let endpoint = chain.last().expect("nonempty chain").max_abs_diff(&q);
    Ok(vec![
        Some(spacing),
        Some(endpoint),
        Some(rank_changes as f64),
    ])
}

fn lemma5(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let k = random_rank(s, n);
    let p = s.projection(n, k)?;
    let kq = if s.rng().coin() { k } else { random_rank(s, n) };
    let q = s.projection(n, kq)?;
    let found = match distinguish_projections(&p, &q)? {
        Some(d) => {
            let top = d.dev_p_plus_r.max(d.dev_q_plus_r);
            d.gap() >= 1e-6 && (top - 1.0).abs() <= 1e-9
        }
        None => false,
    };
    let silent = distinguish_projections(&p, &p)?.is_none();
    Ok(vec![flag(!found), flag(!silent)])
}

fn theorem1(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let form = random_form(s, n, false, false)?;
    let l = form.to_map();
    let forward =
        check_preserver(&l, Property::OperatorNorm, 8, s.rng().next_u64(), 1e-10)?.max_defect;
    let got = decompose_norm_preserver(&l)?;
    let probes = action_probes(s, n);
    Ok(vec![
        Some(forward),
        flag(got.sign != form.sign),
        Some(got.rank_one_action_defect(&form, &probes)?),
    ])
}

fn theorem2(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let form = random_form(s, n, true, false)?;
    let l = form.to_map();
    let forward =
        check_preserver(&l, Property::MaxDeviation, 8, s.rng().next_u64(), 1e-10)?.max_defect;
    let probes = action_probes(s, n);
    let exact = n >= 3;
    let (sign, action, functional, residual) = match decompose_deviation_preserver(&l) {
        Ok(got) => {
            let mut residual: f64 = 0.0;
            for _ in 0..4 {
                let a = s.hermitian(n);
                residual = residual.max(numerical_radius(&(&got.apply(&a) - &l.apply(&a)?))?);
            }
            (
                exact.then_some(if got.sign == form.sign { 0.0 } else { 1.0 }),
                if exact {
                    Some(got.rank_one_action_defect(&form, &probes)?)
                } else {
                    None
                },
                if exact {
                    Some(numerical_radius(&(&got.f - &form.f))?)
                } else {
                    None
                },
                Some(residual),
            )
        }
        Err(_) => {
            let inf = Some(f64::INFINITY);
            (inf, inf, inf, inf)
        }
    };

    let k = random_rank(s, n);
    let p = s.projection(n, k)?;
    let base = canonicalize(&l.apply(&p)?)?.representative;
    let mut argmax: f64 = 0.0;
    let mut scalars: f64 = 0.0;
    for lambda in [-1.0, 0.37, 10.0] {
        let moved = canonicalize(&l.apply(&p.shifted(lambda))?)?.representative;
        argmax = argmax.max(moved.max_abs_diff(&base));
        scalars = scalars.max(max_deviation(
            &l.apply(&HermitianMatrix::scalar(n, lambda))?,
        )?);
    }

    let w = s.unitary(n);
    let d1: Vec<f64> = (0..n).map(|_| s.rng().normal()).collect();
    let d2: Vec<f64> = (0..n).map(|_| s.rng().normal()).collect();
    let a = HermitianMatrix::from_real_diagonal(&d1).conjugate_by(&w);
    let b = HermitianMatrix::from_real_diagonal(&d2).conjugate_by(&w);
    let (la, lb) = (l.apply(&a)?, l.apply(&b)?);
    let commutator = (la.matrix() * lb.matrix() - lb.matrix() * la.matrix()).camax();

    Ok(vec![
        Some(forward),
        sign,
        action,
        functional,
        residual,
        Some(argmax),
        Some(scalars),
        Some(commutator),
    ])
}

fn quadratic_oracle(a: &HermitianMatrix) -> HermitianMatrix {
    a + &a.powi(2).scaled(0.01)
}

fn theorem3(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let form = random_form(s, n, false, true)?;
    let seed = s.rng().next_u64();
    let aff = affinize_dm_isometry(|a| form.apply(a), n, 8, seed, 1e-9)?;
    let probes = action_probes(s, n);
    let rejected = matches!(
        affinize_dm_isometry(quadratic_oracle, n, 8, seed, 1e-9),
        Err(Error::NotAnIsometry(_))
    );
    Ok(vec![
        flag(aff.form.sign != form.sign),
        Some(aff.form.rank_one_action_defect(&form, &probes)?),
        Some(numerical_radius(&(&aff.x - &form.x))?),
        Some(aff.additivity_defect),
        flag(!rejected),
    ])
}

fn theorem4(_: &Hooks, n: usize, s: &mut Sampler) -> Result<Vec<Option<f64>>> {
    let form = random_form(s, n, false, true)?;
    let scalar_part: fn(&HermitianMatrix) -> f64 = match s.rng().int_in(0, 2) {
        0 => |_| 0.0,
        1 => |a| a.trace().sin(),
        _ => |a| numerical_radius(a).unwrap_or(f64::NAN),
    };
    let phi = |a: &HermitianMatrix| form.apply(a).shifted(scalar_part(a));
    let seed = s.rng().next_u64();
    let lin = linearize_dv_isometry(phi, n, 8, seed, 1e-9)?;
    let probes = action_probes(s, n);
    let exact = n >= 3;
    let scalar_gap = lin
        .g_samples
        .iter()
        .map(|(a, g)| (g - scalar_part(a)).abs())
        .fold(0.0f64, f64::max);
    let rejected = matches!(
        linearize_dv_isometry(quadratic_oracle, n, 8, seed, 1e-9),
        Err(Error::NotAnIsometry(_))
    );
    Ok(vec![
        exact.then_some(if lin.form.sign == form.sign { 0.0 } else { 1.0 }),
        if exact {
            Some(lin.form.rank_one_action_defect(&form, &probes)?)
        } else {
            None
        },
        Some(numerical_radius(&(&lin.form.x - &form.x))?),
        Some(lin.additivity_defect),
        exact.then_some(scalar_gap),
        Some(lin.model_residual),
        flag(!rejected),
    ])
}
