//! Statistics of finite-dimensional quantum observables and the linear maps
//! on Hermitian matrices that preserve the operator norm or the maximal
//! deviation.
//!
//! * [`hermitian`]: observables, states, spectra, mean values, moments, variances.
//! * [`deviation`]: maximal deviation by three independent routes, witnesses, `d_m`, `d_v`.
//! * [`factor`]: the quotient space of observables modulo scalars and its
//!   projection-class geometry.
//! * [`preservers`]: construction, checking and decomposition of preserver maps,
//!   including unitary/antiunitary reconstruction and linearization of
//!   nonlinear isometries.
//! * [`harness`]: random generators, the property-suite runner and JSON formats.

#![forbid(unsafe_code)]

pub mod deviation;
pub mod error;
pub mod factor;
pub mod harness;
pub mod hermitian;
pub mod preservers;
pub mod rng;

pub use error::{Error, Result};
pub use hermitian::{HermitianMatrix, StateVector};
