//! Reference computations that share no code with the library's numerics.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use obsdev_core::HermitianMatrix;

type C = Complex<f64>;

/// Real diagonal and off-diagonal moduli of a unitarily similar tridiagonal
/// matrix, by Householder reflections.
fn tridiagonalize(a: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut m: DMatrix<C> = a.matrix().clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C::new(1.0, 0.0)
        };
        let mut v = x.clone();
        v[0] += phase * norm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vn;
        }
        // H = I - 2 v v* acting on indices k+1..n
        let mut h = DMatrix::<C>::identity(n, n);
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                h[(k + 1 + i, k + 1 + j)] -= vi * vj.conj() * 2.0;
            }
        }
        m = &h * m * &h;
    }
    let diag = (0..n).map(|i| m[(i, i)].re).collect();
    let off = (1..n).map(|i| m[(i, i - 1)].norm()).collect();
    (diag, off)
}

/// Number of eigenvalues below `sigma` (Sturm count).
fn count_below(diag: &[f64], off: &[f64], sigma: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - sigma;
    for i in 0..diag.len() {
        if i > 0 {
            q = diag[i] - sigma - off[i - 1] * off[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Ascending eigenvalues by bisection on Sturm counts.
pub fn oracle_eigenvalues(a: &HermitianMatrix) -> Vec<f64> {
    let (diag, off) = tridiagonalize(a);
    let bound = a.frobenius_norm() + 1.0;
    (0..a.dim())
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(&diag, &off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Half the spectral diameter from the oracle eigenvalues.
pub fn oracle_deviation(a: &HermitianMatrix) -> f64 {
    let ev = oracle_eigenvalues(a);
    (ev[ev.len() - 1] - ev[0]) / 2.0
}

/// `||A + lambda I||` from the oracle eigenvalues.
fn shifted_norm(a: &HermitianMatrix, lambda: f64) -> f64 {
    oracle_eigenvalues(&a.shifted(lambda))
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs()))
}

/// `min_lambda ||A + lambda I||` by a coarse grid followed by golden-section search.
pub fn oracle_factor_norm(a: &HermitianMatrix) -> (f64, f64) {
    let r = a.frobenius_norm() + 1.0;
    let grid = 400;
    let step = 2.0 * r / grid as f64;
    let best = (0..=grid)
        .map(|i| -r + i as f64 * step)
        .map(|l| (l, shifted_norm(a, l)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty grid")
        .0;
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if shifted_norm(a, x1) <= shifted_norm(a, x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let lambda = 0.5 * (lo + hi);
    (shifted_norm(a, lambda), lambda)
}
