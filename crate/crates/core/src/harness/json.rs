//! JSON encodings of matrices, states, maps and preserver forms, and file I/O.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{
    c, validate_hermitian, CMatrix, CVector, HermitianMatrix, StateVector, TOL_HERM, TOL_STATE,
};
use crate::preservers::{LinearMapOnHermitians, PreserverForm};

/// `{"dim": n, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_complex(m: &CMatrix) -> Self {
        let rows = |f: fn(&nalgebra::Complex<f64>) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: m.nrows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_hermitian(a: &HermitianMatrix) -> Self {
        Self::from_complex(a.matrix())
    }

    pub fn to_complex(&self) -> Result<CMatrix> {
        let n = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::InvalidInput(format!(
                "matrix rows do not match dim {n}"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            c(self.re[i][j], self.im[i][j])
        }))
    }

    pub fn to_hermitian(&self, tol: f64) -> Result<HermitianMatrix> {
        validate_hermitian(self.to_complex()?, tol)
    }
}

/// `{"dim": n, "re": [..], "im": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_state(s: &StateVector) -> Self {
        let a = s.amplitudes();
        Self {
            dim: a.len(),
            re: a.iter().map(|z| z.re).collect(),
            im: a.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        if self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "state length does not match dim {}",
                self.dim
            )));
        }
        StateVector::new(
            CVector::from_fn(self.dim, |i, _| c(self.re[i], self.im[i])),
            TOL_STATE,
        )
    }
}

/// `{"dim", "sign", "antiunitary", "U", "F", "X"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub dim: usize,
    pub sign: i8,
    pub antiunitary: bool,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(rename = "F")]
    pub f: MatrixJson,
    #[serde(rename = "X")]
    pub x: MatrixJson,
}

impl FormJson {
    pub fn from_form(form: &PreserverForm) -> Self {
        Self {
            dim: form.dim(),
            sign: form.sign,
            antiunitary: form.antiunitary,
            u: MatrixJson::from_complex(&form.u),
            f: MatrixJson::from_hermitian(&form.f),
            x: MatrixJson::from_hermitian(&form.x),
        }
    }

    pub fn to_form(&self) -> Result<PreserverForm> {
        let form = PreserverForm::new(
            self.sign,
            self.u.to_complex()?,
            self.antiunitary,
            self.f.to_hermitian(TOL_HERM)?,
            self.x.to_hermitian(TOL_HERM)?,
        )?;
        if form.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, form.dim()));
        }
        Ok(form)
    }
}

/// `{"dim": n, "basis": "gell-mann", "matrix": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub dim: usize,
    pub basis: String,
    pub matrix: Vec<Vec<f64>>,
}

pub const BASIS_NAME: &str = "gell-mann";

impl MapJson {
    pub fn from_map(l: &LinearMapOnHermitians) -> Self {
        let m = l.matrix();
        Self {
            dim: l.dim(),
            basis: BASIS_NAME.into(),
            matrix: (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<LinearMapOnHermitians> {
        if self.basis != BASIS_NAME {
            return Err(Error::InvalidInput(format!(
                "unsupported basis `{}`",
                self.basis
            )));
        }
        let m = self.dim * self.dim;
        if self.matrix.len() != m || self.matrix.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInput(format!("map matrix must be {m}x{m}")));
        }
        LinearMapOnHermitians::from_matrix(
            self.dim,
            DMatrix::from_fn(m, m, |i, j| self.matrix[i][j]),
        )
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(value) + "\n")
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}
