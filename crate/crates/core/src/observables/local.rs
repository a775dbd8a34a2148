//! Observables built from site occupations: densities, the dynamical
//! Hamming distance, the generalized imbalance and its quantum Fisher
//! information.

use crate::error::Result;
use crate::model::hamiltonian::imbalance_weights;
use crate::model::QuantumState;

/// ⟨n_i⟩ for every site.
pub fn site_densities(psi: &QuantumState) -> Vec<f64> {
    let n = psi.n_sites();
    let mut dens = vec![0.0; n];
    for (mut s, a) in psi.basis().states().zip(psi.amplitudes()) {
        let p = a.norm_sqr();
        while s != 0 {
            dens[s.trailing_zeros() as usize] += p;
            s &= s - 1;
        }
    }
    dens
}

/// ⟨σ^z_i⟩ = 1 − 2⟨n_i⟩.
pub fn sigma_z(psi: &QuantumState) -> Vec<f64> {
    site_densities(psi).into_iter().map(|n| 1.0 - 2.0 * n).collect()
}

/// HD = ½(1 − (1/N) Σ_i s_i ⟨σ^z_i⟩) with s_i the initial σ^z eigenvalue.
pub fn hamming_distance(psi: &QuantumState, initial: u64) -> f64 {
    hamming_from_densities(&site_densities(psi), initial)
}

pub fn hamming_from_densities(densities: &[f64], initial: u64) -> f64 {
    let n = densities.len();
    let overlap: f64 = densities
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let s = if initial >> i & 1 == 1 { -1.0 } else { 1.0 };
            s * (1.0 - 2.0 * d)
        })
        .sum();
    0.5 * (1.0 - overlap / n as f64)
}

/// ⟨𝓘_gen⟩ = Σ_i λ_i ⟨n_i⟩.
pub fn generalized_imbalance(psi: &QuantumState, initial: u64) -> Result<f64> {
    imbalance_from_densities(&site_densities(psi), initial)
}

pub fn imbalance_from_densities(densities: &[f64], initial: u64) -> Result<f64> {
    let lambda = imbalance_weights(initial, densities.len())?;
    Ok(lambda.iter().zip(densities).map(|(l, d)| l * d).sum())
}

/// F_Q = 4(⟨𝓘²⟩ − ⟨𝓘⟩²). Both moments come from one pass, since 𝓘 is
/// diagonal in the computational basis.
pub fn quantum_fisher_information(psi: &QuantumState, initial: u64) -> Result<f64> {
    let (mean, second) = imbalance_moments(psi, initial)?;
    Ok((4.0 * (second - mean * mean)).max(0.0))
}

/// (⟨𝓘⟩, ⟨𝓘²⟩).
pub fn imbalance_moments(psi: &QuantumState, initial: u64) -> Result<(f64, f64)> {
    let lambda = imbalance_weights(initial, psi.n_sites())?;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (mut s, a) in psi.basis().states().zip(psi.amplitudes()) {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut v = 0.0;
        while s != 0 {
            v += lambda[s.trailing_zeros() as usize];
            s &= s - 1;
        }
        m1 += p * v;
        m2 += p * v * v;
    }
    Ok((m1, m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SectorBasis;
    use num_complex::Complex64;

    #[test]
    fn product_state_values() {
        let b = SectorBasis::new(6, 3).unwrap();
        let init = 0b010101;
        let psi = QuantumState::product(&b, init).unwrap();
        assert_eq!(site_densities(&psi), vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(hamming_distance(&psi, init), 0.0);
        assert!((generalized_imbalance(&psi, init).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(quantum_fisher_information(&psi, init).unwrap(), 0.0);
        // complement as reference: every site flipped
        assert_eq!(hamming_distance(&psi, 0b101010), 1.0);
        let other = QuantumState::product(&b, 0b101010).unwrap();
        assert!((generalized_imbalance(&other, init).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_filled_superposition() {
        let b = SectorBasis::new(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = QuantumState::from_amplitudes(&b, vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        let d = site_densities(&psi);
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        assert!((hamming_distance(&psi, 0b01) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn qfi_of_cat_like_state() {
        // equal weight on the initial state and its complement: 𝓘 = ±1
        let b = SectorBasis::new(4, 2).unwrap();
        let init = 0b0011;
        let mut amps = vec![Complex64::new(0.0, 0.0); b.dimension()];
        amps[b.rank(init).unwrap()] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[b.rank(0b1100).unwrap()] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = QuantumState::from_amplitudes(&b, amps).unwrap();
        assert!((quantum_fisher_information(&psi, init).unwrap() - 4.0).abs() < 1e-14);
        assert!(generalized_imbalance(&psi, init).unwrap().abs() < 1e-15);
    }
}
