//! Reduced coin-space density matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::tol;

/// Hermitian, unit-trace, positive semidefinite coin-space state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity at the crate tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let rho = Self(m);
        if rho.0.hermiticity_residual() > tol::UNITARY {
            return Err(Error::InvalidParameter("density matrix is not Hermitian"));
        }
        if rho.trace_residual() > tol::UNITARY {
            return Err(Error::InvalidParameter(
                "density matrix trace differs from 1",
            ));
        }
        if rho.min_eigenvalue() < tol::PSD_FLOOR {
            return Err(Error::InvalidParameter(
                "density matrix is not positive semidefinite",
            ));
        }
        Ok(rho)
    }

    /// Wraps a matrix without checks; callers vouch for the invariants.
    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = crate::linalg::norm_sqr(psi);
        if (n - 1.0).abs() > tol::UNITARY {
            return Err(Error::UnnormalizedInput { norm_sqr: n });
        }
        Ok(Self(CMatrix::outer(psi, psi)))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] * self.0[(j, i)]).re;
            }
        }
        acc
    }

    /// `|Tr ρ − 1|`.
    pub fn trace_residual(&self) -> f64 {
        (self.0.trace() - C64::new(1.0, 0.0)).norm()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `⟨ψ|ρ|ψ⟩`, i.e. `Tr[|ψ⟩⟨ψ| ρ]`.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let rho_psi = self.0.mul_vec(psi);
        crate::linalg::inner(psi, &rho_psi).re
    }
}
