use thiserror::Error;

/// Errors raised by the observable toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("hermiticity defect {defect:e} exceeds tolerance {tol:e}")]
    DefectTooLarge { defect: f64, tol: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension must be in 1..=64, got {0}")]
    BadDimension(usize),

    #[error("state is not normalized: |norm - 1| = {0:e}")]
    NotNormalized(f64),

    #[error("expected a real value, imaginary part {0:e}")]
    NonRealResult(f64),

    #[error("eigen solver failed: {0}")]
    SolverFailure(String),

    #[error("function is undefined at eigenvalue {0}")]
    DomainError(f64),

    #[error("operator is scalar; no maximal-deviation witness exists")]
    ScalarOperator,

    #[error("operator is not normalized to 0 <= A <= I with 0, 1 in the spectrum: {0}")]
    BadNormalization(String),

    #[error("delta {0} makes the lower bound radicand negative")]
    RadicandNegative(f64),

    #[error("class norm {0} lies outside the closed 1/2-ball")]
    OutsideBall(f64),

    #[error("class norm {0} is not 1/2")]
    NotOnSphere(f64),

    #[error("representative is a projection and cannot be split")]
    IsProjection,

    #[error("two distinct shifts yield projections in one class")]
    AmbiguousClass,

    #[error("matrix is not a projection")]
    NotProjection,

    #[error("projection is trivial (0 or I)")]
    TrivialProjection,

    #[error("compression projection misses the range of {0}")]
    BadCompression(&'static str),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("{steps} steps leave a link of class distance {spacing} >= 1/2")]
    StepsTooFew { steps: usize, spacing: f64 },

    #[error("requested rank {rank} exceeds dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("map is not a preserver (failed at stage `{stage}`, defect {defect:e})")]
    NotAPreserver { stage: &'static str, defect: f64 },

    #[error("rank-one probes map to inconsistent ranks ({0} and {1})")]
    MixedSignature(usize, usize),

    #[error("probe overlaps are not preserved (defect {0:e})")]
    OverlapViolation(f64),

    #[error("overlap needed for phase fixing vanishes ({0:e})")]
    PhaseDegeneracy(f64),

    #[error("map is not an isometry (defect {0:e})")]
    NotAnIsometry(f64),

    #[error("map is not linearizable (defect {0:e})")]
    NotLinearizable(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
