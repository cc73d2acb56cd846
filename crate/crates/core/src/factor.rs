//! The quotient of observables modulo scalars, `B_s(H)/RI`.
//!
//! A class is represented by its member with smallest eigenvalue zero. The
//! quotient norm equals the maximal deviation, so the closed 1/2-ball of the
//! quotient is the set of classes whose representative satisfies `0 <= A <= I`.
//! Its extreme points are exactly the classes of nontrivial projections; the
//! tools below detect them, split non-extreme boundary points, and relate
//! projection classes to unitary equivalence.

use std::f64::consts::FRAC_PI_6;

use crate::deviation::{d_v, is_scalar, max_deviation};
use crate::error::{Error, Result};
use crate::hermitian::{
    c, classify_projection, numerical_radius, spectral_decompose, spectral_norm, CMatrix,
    HermitianMatrix, ProjectionInfo, TOL_PROJ,
};

/// Canonical representative of `A + RI`.
#[derive(Debug, Clone)]
pub struct FactorClass {
    /// `A - lambda_min(A) I`, positive semidefinite with `0` in its spectrum.
    pub representative: HermitianMatrix,
    /// The `lambda_min(A)` that was subtracted.
    pub shift: f64,
}

impl FactorClass {
    /// Quotient norm of the class.
    pub fn norm(&self) -> Result<f64> {
        max_deviation(&self.representative)
    }
}

pub fn canonicalize(a: &HermitianMatrix) -> Result<FactorClass> {
    let spec = spectral_decompose(a)?;
    let shift = spec.lambda_min();
    Ok(FactorClass {
        representative: a.shifted(-shift),
        shift,
    })
}

/// Quotient-space distance `||A - B||_v`.
pub fn class_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    d_v(a, b)
}

/// Whether the class of `A` is an extreme point of the closed 1/2-ball.
pub fn is_extreme_half_ball(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    let class = canonicalize(a)?;
    let norm = class.norm()?;
    if norm > 0.5 + tol {
        return Err(Error::OutsideBall(norm));
    }
    let info = classify_projection(&class.representative, tol)?;
    Ok(info.is_projection && !info.is_trivial)
}

/// Default splitting bump `g(t) = min(t, 1 - t)` on `[0, 1]`.
pub fn splitting_bump(t: f64) -> f64 {
    t.min(1.0 - t).max(0.0)
}

/// Two points of the 1/2-ball whose midpoint is the split class.
#[derive(Debug, Clone)]
pub struct Split {
    /// `f1(rep)` with `f1(t) = t + g(t)`.
    pub b1: HermitianMatrix,
    /// `f2(rep)` with `f2(t) = t - g(t)`.
    pub b2: HermitianMatrix,
    /// The canonical representative that was split.
    pub representative: HermitianMatrix,
}

/// Writes a non-extreme class on the unit 1/2-sphere as a midpoint of two
/// other classes of the ball.
pub fn split_non_extreme(b: &HermitianMatrix, tol: f64) -> Result<Split> {
    let class = canonicalize(b)?;
    let rep = class.representative;
    let norm = max_deviation(&rep)?;
    if (norm - 0.5).abs() > tol {
        return Err(Error::NotOnSphere(norm));
    }
    if classify_projection(&rep, tol)?.is_projection {
        return Err(Error::IsProjection);
    }
    let spec = spectral_decompose(&rep)?;
    let b1 = spec.map_eigenvalues(|t| t + splitting_bump(t));
    let b2 = spec.map_eigenvalues(|t| t - splitting_bump(t));

    let midpoint = (&b1 + &b2).scaled(0.5);
    let mid_defect = numerical_radius(&(&midpoint - &rep))?;
    if mid_defect > 1e-10 * (1.0 + norm) {
        return Err(Error::SolverFailure(format!(
            "midpoint defect {mid_defect:e}"
        )));
    }
    for half in [&b1, &b2] {
        let half_norm = max_deviation(half)?;
        if half_norm > 0.5 + tol {
            return Err(Error::SolverFailure(format!(
                "split half has class norm {half_norm}"
            )));
        }
        if d_v(half, &rep)? <= tol {
            return Err(Error::SolverFailure(
                "split half coincides with the split class".into(),
            ));
        }
    }
    Ok(Split {
        b1,
        b2,
        representative: rep,
    })
}

/// The projection in a projection class.
#[derive(Debug, Clone)]
pub struct ProjectionClass {
    pub projection: HermitianMatrix,
    /// `A = projection + shift I`.
    pub shift: f64,
    /// Scalar classes contain both `0` and `I`; the rank-0 choice is returned.
    pub trivial: bool,
}

/// Finds `P` and `mu` with `A = P + mu I`, if the class of `A` holds a projection.
pub fn projection_in_class(a: &HermitianMatrix, tol: f64) -> Result<Option<ProjectionClass>> {
    let n = a.dim();
    if is_scalar(a)? {
        let shift = a.trace() / n as f64;
        return Ok(Some(ProjectionClass {
            projection: HermitianMatrix::zeros(n),
            shift,
            trivial: true,
        }));
    }
    let spec = spectral_decompose(a)?;
    let (lo, hi) = (spec.lambda_min(), spec.lambda_max());
    let candidate = |shift: f64| -> Result<Option<HermitianMatrix>> {
        let p = a.shifted(-shift);
        Ok(classify_projection(&p, tol)?.is_projection.then_some(p))
    };
    let Some(projection) = candidate(lo)? else {
        return Ok(None);
    };
    // the only other shift that could work maps lambda_max to 1
    let alt = hi - 1.0;
    if (alt - lo).abs() > tol && candidate(alt)?.is_some() {
        return Err(Error::AmbiguousClass);
    }
    Ok(Some(ProjectionClass {
        projection,
        shift: lo,
        trivial: false,
    }))
}

fn require_projection(p: &HermitianMatrix) -> Result<ProjectionInfo> {
    let info = classify_projection(p, TOL_PROJ)?;
    if !info.is_projection {
        return Err(Error::NotProjection);
    }
    Ok(info)
}

fn require_nontrivial(p: &HermitianMatrix) -> Result<ProjectionInfo> {
    let info = require_projection(p)?;
    if info.is_trivial {
        return Err(Error::TrivialProjection);
    }
    Ok(info)
}

/// Finite-dimensional unitary equivalence of projections: equal rank.
pub fn unitary_equivalent(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(require_projection(p)?.rank == require_projection(q)?.rank)
}

/// Orthonormal basis (columns) of the range of a projection.
fn range_basis(p: &HermitianMatrix) -> Result<CMatrix> {
    Ok(spectral_decompose(p)?.subspace(|l| l > 0.5))
}

/// Compressions of `P` and `Q + mu I` by a rank <= 2 projection, and the
/// quantities of the Weyl-perturbation estimate on them.
#[derive(Debug, Clone, Copy)]
pub struct WeylReport {
    pub mu_abs: f64,
    /// `|lambda_max(RPR) - lambda_max(R(Q + mu I)R)|`.
    pub top_eigenvalue_shift: f64,
    /// `||RPR - R(Q + mu I)R||`.
    pub compressed_gap: f64,
    /// `||R|| ||P - (Q + mu I)|| ||R||`.
    pub perturbation_bound: f64,
    /// `||P - Q||`.
    pub projection_distance: f64,
    /// `top_eigenvalue_shift <= compressed_gap <= perturbation_bound` and,
    /// when `1 + mu >= 0`, `|mu| <= perturbation_bound`.
    pub holds: bool,
}

impl WeylReport {
    /// `||P - (Q + mu I)|| < 1/2` forces `||P - Q|| < 1`; `None` when the premise fails.
    pub fn close_projections(&self) -> Option<bool> {
        (self.perturbation_bound < 0.5).then_some(self.projection_distance < 1.0)
    }
}

pub fn weyl_gap_check(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
    mu: f64,
    r: &HermitianMatrix,
) -> Result<WeylReport> {
    const SLACK: f64 = 1e-10;
    if p.dim() != q.dim() || p.dim() != r.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim().max(r.dim())));
    }
    require_nontrivial(p)?;
    require_nontrivial(q)?;
    let r_info = require_projection(r)?;
    if r_info.rank > 2 {
        return Err(Error::BadCompression("R (rank above 2)"));
    }
    let compress = |m: &HermitianMatrix| {
        HermitianMatrix::from_hermitian_part(r.matrix() * m.matrix() * r.matrix())
    };
    let rpr = compress(p);
    let rqr = compress(q);
    if spectral_decompose(&rpr)?.lambda_max() < 1.0 - 1e-8 {
        return Err(Error::BadCompression("P"));
    }
    if spectral_decompose(&rqr)?.lambda_max() < 1.0 - 1e-8 {
        return Err(Error::BadCompression("Q"));
    }
    let shifted_q = q.shifted(mu);
    let rsr = compress(&shifted_q);
    let top_p = spectral_decompose(&rpr)?.lambda_max();
    let top_s = spectral_decompose(&rsr)?.lambda_max();
    let compressed_gap = numerical_radius(&(&rpr - &rsr))?;
    let r_norm = numerical_radius(r)?;
    let perturbation_bound = r_norm * numerical_radius(&(p - &shifted_q))? * r_norm;
    let top_eigenvalue_shift = (top_p - top_s).abs();
    let mut holds = top_eigenvalue_shift <= compressed_gap + SLACK
        && compressed_gap <= perturbation_bound + SLACK;
    if 1.0 + mu >= 0.0 {
        holds &= mu.abs() <= perturbation_bound + SLACK;
    }
    Ok(WeylReport {
        mu_abs: mu.abs(),
        top_eigenvalue_shift,
        compressed_gap,
        perturbation_bound,
        projection_distance: numerical_radius(&(p - q))?,
        holds,
    })
}

/// A projection of rank <= 2 whose range meets the ranges of both `P` and `Q`.
pub fn compression_through(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<HermitianMatrix> {
    require_nontrivial(p)?;
    require_nontrivial(q)?;
    let x = range_basis(p)?.column(0).into_owned();
    let y = range_basis(q)?.column(0).into_owned();
    let y_perp = &y - &x * x.dotc(&y);
    let mut r = &x * x.adjoint();
    let norm = y_perp.norm();
    if norm > 1e-12 {
        let w = y_perp / c(norm, 0.0);
        r += &w * w.adjoint();
    }
    Ok(HermitianMatrix::from_hermitian_part(r))
}

/// Rotation carrying the range of `P` onto the range of `Q` along principal
/// angles.
struct PrincipalRotation {
    /// Hermitian `H` with `V_t = exp(-i t H)`.
    spectrum: crate::hermitian::SpectralDecomposition,
    max_angle: f64,
}

impl PrincipalRotation {
    fn new(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<Self> {
        let n = p.dim();
        let x = range_basis(p)?;
        let y = range_basis(q)?;
        let k = x.ncols();
        // Principal vectors of range(Q) from the Hermitian problem Y*PY, largest cosine first.
        let compressed = HermitianMatrix::from_hermitian_part(y.adjoint() * p.matrix() * &y);
        let v = spectral_decompose(&compressed)?.eigenvectors;
        let v = CMatrix::from_fn(k, k, |i, j| v[(i, k - 1 - j)]);
        let yp = &y * v;
        // Columns of X*yp are orthogonal with norms cos_i; QR with a positive
        // diagonal normalizes them and completes the ones with cos_i ~ 0.
        let (mut qm, r) = (x.adjoint() * &yp).qr().unpack();
        for j in 0..k {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                let phase = d / d.norm();
                for i in 0..k {
                    qm[(i, j)] *= phase;
                }
            }
        }
        let xp = &x * qm;
        let mut generator = CMatrix::zeros(n, n);
        let mut max_angle: f64 = 0.0;
        for i in 0..k {
            let xi = xp.column(i).into_owned();
            let yi = yp.column(i).into_owned();
            let inside = &x * (x.adjoint() * &yi);
            let cos = inside.norm();
            // component of y_i orthogonal to range(P)
            let z = &yi - inside;
            let sin = z.norm();
            if sin < 1e-12 {
                continue;
            }
            let angle = sin.atan2(cos);
            max_angle = max_angle.max(angle);
            let zi = z / c(sin, 0.0);
            generator += (&zi * xi.adjoint() - &xi * zi.adjoint()) * c(angle, 0.0);
        }
        // K is skew-Hermitian; H = iK is Hermitian and exp(tK) = exp(-i t H).
        let h = HermitianMatrix::from_hermitian_part(generator * c(0.0, 1.0));
        Ok(Self {
            spectrum: spectral_decompose(&h)?,
            max_angle,
        })
    }

    fn unitary_at(&self, t: f64) -> CMatrix {
        let n = self.spectrum.dim();
        let phases: Vec<_> = self
            .spectrum
            .eigenvalues
            .iter()
            .map(|&mu| c(0.0, -t * mu).exp())
            .collect();
        let w = &self.spectrum.eigenvectors;
        CMatrix::from_fn(n, n, |i, j| w[(i, j)] * phases[j]) * w.adjoint()
    }
}

/// Smallest step count whose chain links stay below class distance 1/2.
pub fn min_path_steps(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<usize> {
    check_path_inputs(p, q)?;
    let rot = PrincipalRotation::new(p, q)?;
    // link distance is sin(max_angle / steps); need max_angle / steps < pi/6
    Ok((rot.max_angle / FRAC_PI_6 + 1e-6).floor() as usize + 1)
}

fn check_path_inputs(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    let rp = require_nontrivial(p)?.rank;
    let rq = require_nontrivial(q)?.rank;
    if rp != rq {
        return Err(Error::RankMismatch(rp, rq));
    }
    Ok(())
}

/// Chain of projections `P = P_0, ..., P_steps = Q` of constant rank with
/// consecutive class distances below 1/2, sampled from `V_t P V_t*` where
/// `V_t = exp(t K)` rotates range(P) onto range(Q) along principal angles.
pub fn projection_path(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
    steps: usize,
) -> Result<Vec<HermitianMatrix>> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    check_path_inputs(p, q)?;
    let rot = PrincipalRotation::new(p, q)?;
    let mut chain = Vec::with_capacity(steps + 1);
    chain.push(p.clone());
    for k in 1..=steps {
        let v = rot.unitary_at(k as f64 / steps as f64);
        chain.push(p.conjugate_by(&v));
    }
    let end_defect = chain[steps].max_abs_diff(q);
    if end_defect > 1e-8 {
        return Err(Error::SolverFailure(format!(
            "path ends {end_defect:e} away from Q"
        )));
    }
    let mut spacing: f64 = 0.0;
    for pair in chain.windows(2) {
        spacing = spacing.max(class_distance(&pair[0], &pair[1])?);
    }
    if spacing >= 0.5 {
        return Err(Error::StepsTooFew { steps, spacing });
    }
    Ok(chain)
}

/// [`projection_path`] with [`min_path_steps`] links.
pub fn projection_path_auto(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
) -> Result<Vec<HermitianMatrix>> {
    projection_path(p, q, min_path_steps(p, q)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    P,
    Q,
}

/// A rank-one `R` separating two projections through `||P + R||_v != ||Q + R||_v`.
#[derive(Debug, Clone)]
pub struct Distinction {
    pub r: HermitianMatrix,
    /// Which projection `R` is a subprojection of.
    pub subprojection_of: Side,
    pub dev_p_plus_r: f64,
    pub dev_q_plus_r: f64,
}

impl Distinction {
    pub fn gap(&self) -> f64 {
        (self.dev_p_plus_r - self.dev_q_plus_r).abs()
    }
}

/// Unit vector in range(`from`) farthest from range(`against`), with
/// `||(I - against) v||`.
fn escaping_vector(
    from: &HermitianMatrix,
    against: &HermitianMatrix,
) -> Result<(crate::hermitian::CVector, f64)> {
    let x = range_basis(from)?;
    let n = from.dim();
    let complement = CMatrix::identity(n, n) - against.matrix();
    let svd = (complement * &x).svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::SolverFailure("SVD did not return vectors".into()))?;
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::TrivialProjection)?;
    let w = v_t.row(k).adjoint();
    Ok((x * w, sigma))
}

/// Returns `None` when `P = Q`; otherwise a rank-one subprojection `R` of one
/// of them with `||P + R||_v != ||Q + R||_v`.
pub fn distinguish_projections(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
) -> Result<Option<Distinction>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    require_nontrivial(p)?;
    require_nontrivial(q)?;
    if spectral_norm(&(p.matrix() - q.matrix())) <= TOL_PROJ {
        return Ok(None);
    }
    let (vp, sp) = escaping_vector(p, q)?;
    let (vq, sq) = escaping_vector(q, p)?;
    let (v, side) = if sp >= sq {
        (vp, Side::P)
    } else {
        (vq, Side::Q)
    };
    let r = HermitianMatrix::from_hermitian_part(&v * v.adjoint());
    let dev_p_plus_r = max_deviation(&(p + &r))?;
    let dev_q_plus_r = max_deviation(&(q + &r))?;
    Ok(Some(Distinction {
        r,
        subprojection_of: side,
        dev_p_plus_r,
        dev_q_plus_r,
    }))
}
