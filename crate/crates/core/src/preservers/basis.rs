use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hermitian::{c, CMatrix, HermitianMatrix, MAX_DIM};

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::BadDimension(n));
    }
    Ok(())
}

/// Generalized Gell-Mann basis, orthonormal under `<A, B> = tr(AB)`.
///
/// Order: `I/sqrt(n)`; the diagonal elements
/// `D_l = (sum_{j<l} E_jj - l E_ll)/sqrt(l(l+1))` for `l = 1..n-1`; then for each
/// pair `j < k` (row-major) `(E_jk + E_kj)/sqrt(2)` followed by
/// `(-i E_jk + i E_kj)/sqrt(2)`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

impl HermitianBasis {
    pub fn gell_mann(n: usize) -> Result<Self> {
        check_dim(n)?;
        let m = n * n;
        let elements = (0..m)
            .map(|k| {
                let mut e = DVector::zeros(m);
                e[k] = 1.0;
                assemble(n, &e)
            })
            .collect();
        Ok(Self { dim: n, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Gram matrix `tr(B_j B_k)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |j, k| {
            self.elements[j].trace_product(&self.elements[k])
        })
    }
}

/// Coordinates `tr(B_k A)` of `A` in the Gell-Mann basis.
pub fn coordinates(a: &HermitianMatrix) -> DVector<f64> {
    let n = a.dim();
    let mut out = DVector::zeros(n * n);
    let diag: Vec<f64> = (0..n).map(|j| a.get(j, j).re).collect();
    out[0] = diag.iter().sum::<f64>() / (n as f64).sqrt();
    let mut prefix = 0.0;
    for l in 1..n {
        prefix += diag[l - 1];
        let lf = l as f64;
        out[l] = (prefix - lf * diag[l]) / (lf * (lf + 1.0)).sqrt();
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = a.get(i, j);
            out[k] = SQRT_2 * z.re;
            out[k + 1] = -SQRT_2 * z.im;
            k += 2;
        }
    }
    out
}

/// `sum_k coords[k] B_k`.
pub fn assemble(n: usize, coords: &DVector<f64>) -> HermitianMatrix {
    assert_eq!(
        coords.len(),
        n * n,
        "coordinate vector has the wrong length"
    );
    let mut m = CMatrix::zeros(n, n);
    let base = coords[0] / (n as f64).sqrt();
    for l in 0..n {
        m[(l, l)] = c(base, 0.0);
    }
    for l in 1..n {
        let lf = l as f64;
        let w = coords[l] / (lf * (lf + 1.0)).sqrt();
        for j in 0..l {
            m[(j, j)].re += w;
        }
        m[(l, l)].re -= lf * w;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c(coords[k], -coords[k + 1]) / SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermitianMatrix::from_hermitian_part(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::gen_hermitian;
    use crate::hermitian::pauli;

    #[test]
    fn pauli_basis_for_qubits() {
        let b = HermitianBasis::gell_mann(2).unwrap();
        let s = 1.0 / SQRT_2;
        let expected = [
            HermitianMatrix::identity(2).scaled(s),
            pauli::z().scaled(s),
            pauli::x().scaled(s),
            pauli::y().scaled(s),
        ];
        for (got, want) in b.elements().iter().zip(&expected) {
            assert!(got.max_abs_diff(want) < 1e-15);
        }
    }

    #[test]
    fn trivial_dimension() {
        let b = HermitianBasis::gell_mann(1).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.elements()[0].max_abs_diff(&HermitianMatrix::identity(1)) < 1e-15);
        assert!(HermitianBasis::gell_mann(0).is_err());
    }

    #[test]
    fn orthonormal() {
        for n in [3, 5, 8] {
            let b = HermitianBasis::gell_mann(n).unwrap();
            assert_eq!(b.len(), n * n);
            let defect = (b.gram() - DMatrix::identity(n * n, n * n)).amax();
            assert!(defect < 1e-12, "n = {n}: {defect}");
        }
    }

    #[test]
    fn closed_form_coordinates_match_trace_pairing() {
        for n in [1, 2, 3, 6] {
            let b = HermitianBasis::gell_mann(n).unwrap();
            let a = gen_hermitian(n, 11);
            let coords = coordinates(&a);
            for (k, e) in b.elements().iter().enumerate() {
                assert!((coords[k] - e.trace_product(&a)).abs() < 1e-12);
            }
            assert!(assemble(n, &coords).max_abs_diff(&a) < 1e-12);
        }
    }
}
