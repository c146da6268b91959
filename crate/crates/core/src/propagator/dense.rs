//! Dense reference propagation.
//!
//! Independent of the Krylov path: `exp(-i t H)` is formed as a full complex
//! matrix exponential (Pade with scaling and squaring). Only meant for small
//! systems.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::state::StateVector;

/// Refuse dense work beyond this dimension.
pub const DENSE_DIM_LIMIT: usize = 4096;

pub struct DenseEvolution {
    h: DMatrix<Complex64>,
}

impl DenseEvolution {
    pub fn new(h: &SparseHamiltonian) -> Result<Self> {
        if h.dim() > DENSE_DIM_LIMIT {
            return Err(Error::InvalidState(format!(
                "dense propagation limited to dim <= {DENSE_DIM_LIMIT}, got {}",
                h.dim()
            )));
        }
        Ok(DenseEvolution {
            h: h.to_dense().map(|x| Complex64::new(x, 0.0)),
        })
    }

    /// The full propagator `exp(-i t H)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        (&self.h * Complex64::new(0.0, -t)).exp()
    }

    /// `exp(-i t H) psi`.
    pub fn apply(&self, psi: &StateVector, t: f64) -> StateVector {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let out = self.unitary(t) * v;
        StateVector::from_raw(psi.basis().clone(), out.iter().copied().collect())
    }
}

/// Dense evolution under a linear ramp with `steps` exponential-midpoint
/// substeps. Slow and low order; used only to cross-check ramp integrators.
pub fn dense_ramp(
    psi: &StateVector,
    h_start: &SparseHamiltonian,
    h_end: &SparseHamiltonian,
    duration: f64,
    steps: usize,
) -> Result<StateVector> {
    let dt = duration / steps as f64;
    let mut out = psi.clone();
    for k in 0..steps {
        let f = (k as f64 + 0.5) / steps as f64;
        let h = SparseHamiltonian::interpolate(h_start, h_end, f)?;
        out = DenseEvolution::new(&h)?.apply(&out, dt);
    }
    Ok(out)
}
