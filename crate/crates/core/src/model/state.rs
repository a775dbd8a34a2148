use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::basis::SectorBasis;
use crate::error::{Error, Result};

/// Complex amplitude vector over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wraps raw amplitudes without renormalizing.
    pub fn from_amplitudes(basis: &SectorBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                found: amplitudes.len(),
            });
        }
        Ok(QuantumState {
            basis: Arc::new(basis.clone()),
            amplitudes,
        })
    }

    /// Computational basis state |bits⟩.
    pub fn product(basis: &SectorBasis, bits: u64) -> Result<Self> {
        let idx = basis.rank(bits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dimension()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(basis, amplitudes)
    }

    /// Haar-like random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(basis: &SectorBasis, rng: &mut R) -> Self {
        let amplitudes = (0..basis.dimension())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = QuantumState {
            basis: Arc::new(basis.clone()),
            amplitudes,
        };
        s.normalize();
        s
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn n_excitations(&self) -> usize {
        self.basis.n_excitations()
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm and returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
        n
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Same-sector state with replaced amplitudes.
    pub fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        QuantumState {
            basis: Arc::clone(&self.basis),
            amplitudes,
        }
    }

    /// Largest |a_k - b_k| over components.
    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn product_and_random_are_normalized() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let p = QuantumState::product(&basis, 0b000111).unwrap();
        assert_eq!(p.norm(), 1.0);
        assert!(QuantumState::product(&basis, 0b1).is_err());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = QuantumState::random(&basis, &mut rng);
        assert!((r.norm() - 1.0).abs() < 1e-12);
    }
}
