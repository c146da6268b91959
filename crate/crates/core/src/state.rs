//! Normalized complex state vectors over a [`FockBasis`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{FockBasis, FockConfig, SpinLabel};
use crate::error::{Error, Result};

/// Tolerance on `| ||psi|| - 1 |` accepted by constructors.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Spin part of a single localized atom: amplitudes on `(up, down)`.
pub type SpinState = [Complex64; 2];

/// `(|up> + |down>) / sqrt(2)`.
pub fn spin_plus() -> SpinState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(s, 0.0), Complex64::new(s, 0.0)]
}

pub fn spin_up() -> SpinState {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

pub fn spin_down() -> SpinState {
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

pub(crate) fn norm_of(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl StateVector {
    /// Wraps amplitudes, rejecting wrong length or a norm off by more than 1e-9.
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch {
                expected: basis.describe(),
                got: format!("vector of length {}", amplitudes.len()),
            });
        }
        let n = norm_of(&amplitudes);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {n} is not 1")));
        }
        Ok(StateVector { basis, amplitudes })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_unnormalized(basis: Arc<FockBasis>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm_of(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(basis, amplitudes)
    }

    pub(crate) fn from_raw(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Self {
        StateVector { basis, amplitudes }
    }

    /// The basis state `config`.
    pub fn basis_state(basis: Arc<FockBasis>, config: &FockConfig) -> Result<Self> {
        let i = basis.index_of(config)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Ok(StateVector { basis, amplitudes })
    }

    /// One atom at `site` in spin state `spin`.
    pub fn single_atom(basis: Arc<FockBasis>, site: usize, spin: SpinState) -> Result<Self> {
        if basis.n_particles() != 1 {
            return Err(Error::InvalidState("single-atom state needs a one-particle basis".into()));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for s in SpinLabel::ALL {
            let c = FockConfig::from_atoms(basis.n_sites(), &[(site, s)])?;
            amplitudes[basis.index_of(&c)?] = spin[s.offset()];
        }
        Self::from_unnormalized(basis, amplitudes)
    }

    /// Two distinguishable-by-position atoms, `spin_a` localized at `site_a`
    /// and `spin_b` at `site_b`.
    pub fn two_atom_product(
        basis: Arc<FockBasis>,
        site_a: usize,
        spin_a: SpinState,
        site_b: usize,
        spin_b: SpinState,
    ) -> Result<Self> {
        if basis.n_particles() != 2 {
            return Err(Error::InvalidState("two-atom state needs a two-particle basis".into()));
        }
        if site_a == site_b {
            return Err(Error::InvalidState(
                "product preparation needs two different sites".into(),
            ));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for sa in SpinLabel::ALL {
            for sb in SpinLabel::ALL {
                let c = FockConfig::from_atoms(basis.n_sites(), &[(site_a, sa), (site_b, sb)])?;
                amplitudes[basis.index_of(&c)?] = spin_a[sa.offset()] * spin_b[sb.offset()];
            }
        }
        Self::from_unnormalized(basis, amplitudes)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, config: &FockConfig) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.index_of(config)?])
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_basis(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `min_phi || self - e^{i phi} other ||`.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> Result<f64> {
        let ov = self.inner(other)?;
        let phase = if ov.norm() > 0.0 {
            ov.conj() / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn conj(&self) -> StateVector {
        StateVector {
            basis: Arc::clone(&self.basis),
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub(crate) fn check_same_basis(&self, other: &StateVector) -> Result<()> {
        if *self.basis != *other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis.describe(),
                got: other.basis.describe(),
            });
        }
        Ok(())
    }

    /// Rescales to unit norm, returning the norm before rescaling.
    pub(crate) fn renormalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|z| *z /= n);
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_state_amplitudes() {
        let b = Arc::new(FockBasis::enumerate(4, 2).unwrap());
        let s = StateVector::two_atom_product(b.clone(), 1, spin_plus(), 4, spin_plus()).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        for sa in SpinLabel::ALL {
            for sb in SpinLabel::ALL {
                let c = FockConfig::from_atoms(4, &[(1, sa), (4, sb)]).unwrap();
                assert!((s.amplitude(&c).unwrap().re - 0.5).abs() < 1e-15);
            }
        }
        assert!(StateVector::two_atom_product(b, 2, spin_up(), 2, spin_down()).is_err());
    }

    #[test]
    fn constructor_rejects_bad_vectors() {
        let b = Arc::new(FockBasis::enumerate(2, 1).unwrap());
        assert!(StateVector::new(b.clone(), vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::new(b.clone(), vec![Complex64::new(1.0, 0.0); 4]).is_err());
        assert!(StateVector::from_unnormalized(b, vec![Complex64::new(0.0, 0.0); 4]).is_err());
    }

    #[test]
    fn phase_aligned_distance_ignores_global_phase() {
        let b = Arc::new(FockBasis::enumerate(3, 1).unwrap());
        let s = StateVector::single_atom(b.clone(), 2, spin_plus()).unwrap();
        let mut rotated = s.clone();
        rotated
            .amplitudes
            .iter_mut()
            .for_each(|z| *z *= Complex64::from_polar(1.0, 0.7));
        assert!(s.phase_aligned_distance(&rotated).unwrap() < 1e-14);
        assert!((s.fidelity(&rotated).unwrap() - 1.0).abs() < 1e-15);
    }
}
