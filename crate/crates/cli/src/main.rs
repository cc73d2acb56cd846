use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use obsdev_core::deviation::{d_m, d_v, deviation_report, Route, DEFAULT_RESTARTS};
use obsdev_core::factor::{
    canonicalize, distinguish_projections, is_extreme_half_ball, projection_in_class, Side,
};
use obsdev_core::harness::json::{
    read_json, to_json_string, write_json, FormJson, MapJson, MatrixJson, StateJson,
};
use obsdev_core::harness::{run_suite, Sampler, SuiteConfig};
use obsdev_core::hermitian::TOL_HERM;
use obsdev_core::preservers::{
    check_preserver, decompose_deviation_preserver, decompose_norm_preserver, Property,
    DEFAULT_CHECK_SAMPLES,
};
use obsdev_core::{Error, HermitianMatrix};

#[derive(Parser)]
#[command(
    name = "obsdev",
    version,
    about = "Maximal deviation of observables and its preservers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal deviation of a Hermitian matrix.
    Deviation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "spectral")]
        route: RouteArg,
        /// Hermiticity tolerance for the input.
        #[arg(long, default_value_t = TOL_HERM)]
        tol: f64,
        /// Random restarts for the variational route.
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distance between two observables.
    Metric {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum)]
        kind: MetricKind,
        #[arg(long, default_value_t = TOL_HERM)]
        tol: f64,
    },
    /// Whether the class of a matrix is an extreme point of the 1/2-ball.
    Extreme {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Rank-one witness telling two projections apart by maximal deviation.
    Distinguish {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = TOL_HERM)]
        tol: f64,
    },
    /// Sample-based check that a linear map preserves a quantity.
    Check {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, default_value_t = DEFAULT_CHECK_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Canonical form of a verified preserver.
    Decompose {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random objects.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Spectral,
    Factor,
    Variational,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricKind {
    Dm,
    Dv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Norm,
    Deviation,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Hermitian,
    Unitary,
    Projection,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Norm => Property::OperatorNorm,
            PropertyArg::Deviation => Property::MaxDeviation,
        }
    }
}

/// Either an input problem (exit 2) or a negative verdict (exit 1).
enum Failure {
    Input(Error),
    Verdict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAPreserver { .. }
            | Error::MixedSignature(..)
            | Error::OverlapViolation(_)
            | Error::PhaseDegeneracy(_)
            | Error::NotAnIsometry(_)
            | Error::NotLinearizable(_) => Failure::Verdict(e.to_string()),
            other => Failure::Input(other),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn load_matrix(path: &PathBuf, tol: f64) -> Result<HermitianMatrix, Error> {
    read_json::<MatrixJson>(path)?.to_hermitian(tol)
}

fn emit(value: &Value, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            println!("{}", to_json_string(value));
            Ok(())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Deviation {
            input,
            route,
            tol,
            restarts,
            seed,
        } => {
            let a = load_matrix(&input, tol)?;
            let route = match route {
                RouteArg::Spectral => Route::Spectral,
                RouteArg::Factor => Route::Factor,
                RouteArg::Variational => Route::Variational,
            };
            let r = deviation_report(&a, route, restarts, seed)?;
            emit(
                &json!({
                    "route": r.route,
                    "value": r.value,
                    "witness": r.witness.as_ref().map(StateJson::from_state),
                    "minimizer_lambda": r.minimizer_lambda,
                    "spectral_gap": r.spectral_gap,
                }),
                None,
            )?;
            Ok(true)
        }
        Command::Metric { a, b, kind, tol } => {
            let (a, b) = (load_matrix(&a, tol)?, load_matrix(&b, tol)?);
            let (name, value) = match kind {
                MetricKind::Dm => ("dm", d_m(&a, &b)?),
                MetricKind::Dv => ("dv", d_v(&a, &b)?),
            };
            emit(&json!({ "kind": name, "value": value }), None)?;
            Ok(true)
        }
        Command::Extreme { input, tol } => {
            let a = load_matrix(&input, TOL_HERM)?;
            let class = canonicalize(&a)?;
            let extreme = is_extreme_half_ball(&a, tol)?;
            let projection = projection_in_class(&a, tol)?
                .filter(|pc| !pc.trivial)
                .map(|pc| MatrixJson::from_hermitian(&pc.projection));
            emit(
                &json!({
                    "extreme": extreme,
                    "class_norm": class.norm()?,
                    "shift": class.shift,
                    "projection": projection,
                }),
                None,
            )?;
            Ok(true)
        }
        Command::Distinguish { p, q, tol } => {
            let (p, q) = (load_matrix(&p, tol)?, load_matrix(&q, tol)?);
            let witness = distinguish_projections(&p, &q)?.map(|d| {
                json!({
                    "R": MatrixJson::from_hermitian(&d.r),
                    "subprojection_of": match d.subprojection_of { Side::P => "P", Side::Q => "Q" },
                    "dev_p_plus_r": d.dev_p_plus_r,
                    "dev_q_plus_r": d.dev_q_plus_r,
                    "gap": d.gap(),
                })
            });
            emit(
                &json!({ "equal": witness.is_none(), "witness": witness }),
                None,
            )?;
            Ok(true)
        }
        Command::Check {
            map,
            property,
            samples,
            seed,
            tol,
        } => {
            let l = read_json::<MapJson>(&map)?.to_map()?;
            let report = check_preserver(&l, property.into(), samples, seed, tol)?;
            emit(&json!(report), None)?;
            Ok(report.verdict)
        }
        Command::Decompose { map, property, out } => {
            let l = read_json::<MapJson>(&map)?.to_map()?;
            let form = match property {
                PropertyArg::Norm => decompose_norm_preserver(&l)?,
                PropertyArg::Deviation => decompose_deviation_preserver(&l)?,
            };
            emit(&json!(FormJson::from_form(&form)), out.as_ref())?;
            Ok(true)
        }
        Command::Suite { config, out } => {
            let config: SuiteConfig = match config {
                Some(path) => read_json(path)?,
                None => SuiteConfig::default(),
            };
            let report = run_suite(&config)?;
            for c in &report.checks {
                eprintln!(
                    "{} {:<48} cases={:<4} max_defect={:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.cases,
                    c.max_defect
                );
            }
            eprintln!(
                "overall: {} ({:.2} s)",
                if report.overall { "pass" } else { "fail" },
                report.wall_time
            );
            emit(&json!(report), out.as_ref())?;
            Ok(report.overall)
        }
        Command::Gen {
            kind,
            dim,
            rank,
            seed,
            out,
        } => {
            if dim == 0 || dim > obsdev_core::hermitian::MAX_DIM {
                return Err(Error::BadDimension(dim).into());
            }
            let mut s = Sampler::new(seed);
            let m: Value = match kind {
                GenKind::Hermitian => {
                    serde_json::to_value(MatrixJson::from_hermitian(&s.hermitian(dim)))
                }
                GenKind::Unitary => serde_json::to_value(MatrixJson::from_complex(&s.unitary(dim))),
                GenKind::Projection => {
                    let k = rank.ok_or_else(|| {
                        Error::InvalidInput("--rank is required for projections".into())
                    })?;
                    serde_json::to_value(MatrixJson::from_hermitian(&s.projection(dim, k)?))
                }
            }
            .expect("matrix serializes");
            emit(&m, out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verdict(msg)) => {
            eprintln!("fail: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
