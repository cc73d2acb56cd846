//! Seeded random observables, unitaries, projections and states.

use crate::error::{Error, Result};
use crate::hermitian::{c, CMatrix, CVector, HermitianMatrix, StateVector};
use crate::rng::StreamRng;

/// Draws random linear-algebra objects from one [`StreamRng`].
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: StreamRng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: StreamRng::new(seed),
        }
    }

    pub fn from_rng(rng: StreamRng) -> Self {
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut StreamRng {
        &mut self.rng
    }

    /// `n x n` matrix of iid standard complex Gaussians.
    pub fn ginibre(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.rng.complex_normal())
    }

    /// GUE-style sample `(G + G*)/2`.
    pub fn hermitian(&mut self, n: usize) -> HermitianMatrix {
        let g = self.ginibre(n);
        HermitianMatrix::from_hermitian_part(g)
    }

    /// Haar unitary from the QR factorization of a Ginibre matrix with the
    /// phases of `diag(R)` moved into `Q`.
    pub fn unitary(&mut self, n: usize) -> CMatrix {
        let qr = self.ginibre(n).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c(1.0, 0.0)
            };
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    /// `U diag(1^k, 0^(n-k)) U*` for a Haar `U`.
    pub fn projection(&mut self, n: usize, k: usize) -> Result<HermitianMatrix> {
        if k > n {
            return Err(Error::BadRank { rank: k, dim: n });
        }
        let u = self.unitary(n);
        let cols = u.columns(0, k);
        Ok(HermitianMatrix::from_hermitian_part(cols * cols.adjoint()))
    }

    /// Uniformly distributed pure state.
    pub fn state(&mut self, n: usize) -> StateVector {
        loop {
            let v = CVector::from_fn(n, |_, _| self.rng.complex_normal());
            if let Ok(s) = StateVector::normalized(v) {
                return s;
            }
        }
    }
}

pub fn gen_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    Sampler::new(seed).hermitian(n)
}

pub fn gen_haar_unitary(n: usize, seed: u64) -> CMatrix {
    Sampler::new(seed).unitary(n)
}

pub fn gen_projection(n: usize, k: usize, seed: u64) -> Result<HermitianMatrix> {
    Sampler::new(seed).projection(n, k)
}
