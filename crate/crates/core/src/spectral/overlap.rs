use std::fmt::Write as _;

use super::levels::EnergyWindows;
use crate::error::{Error, Result};
use crate::evolution::EigenDecomposition;
use crate::model::{QuantumState, SparseOperator};

/// |⟨α|Ψ₀⟩|² against ε_α, ascending in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDistribution {
    pub energies: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub weights: Vec<f64>,
}

impl OverlapDistribution {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Σ|C_α|² per ε window; the last window is closed on the right.
    pub fn windowed_sums(&self, windows: &EnergyWindows) -> Vec<(f64, f64, f64)> {
        let b = windows.bounds();
        b.iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let last = i + 1 == b.len();
                let s = self
                    .epsilon
                    .iter()
                    .zip(&self.weights)
                    .filter(|(e, _)| **e >= lo && (**e < hi || (last && **e <= hi)))
                    .map(|(_, w)| w)
                    .sum();
                (lo, hi, s)
            })
            .collect()
    }

    /// σ(E) = [Σ_α |C_α|²(E_α − E)²]^{1/2} with E = Σ_α |C_α|² E_α.
    pub fn energy_width(&self) -> f64 {
        let e: f64 = self.weights.iter().zip(&self.energies).map(|(w, x)| w * x).sum();
        self.weights
            .iter()
            .zip(&self.energies)
            .map(|(w, x)| w * (x - e).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,energy,epsilon,weight\n");
        for a in 0..self.weights.len() {
            let _ = writeln!(out, "{a},{},{},{}", self.energies[a], self.epsilon[a], self.weights[a]);
        }
        out
    }
}

pub fn overlap_distribution(psi0: &QuantumState, eig: &EigenDecomposition) -> Result<OverlapDistribution> {
    let c = eig.coefficients(psi0)?;
    let e = eig.eigenvalues();
    let (lo, hi) = (e[0], e[e.len() - 1]);
    Ok(OverlapDistribution {
        energies: e.to_vec(),
        epsilon: e
            .iter()
            .map(|x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
            .collect(),
        weights: c.iter().map(|z| z.norm_sqr()).collect(),
    })
}

/// σ(E) = [⟨H²⟩ − ⟨H⟩²]^{1/2} from sparse products, evaluated as
/// ‖(H − ⟨H⟩)ψ‖ to avoid cancellation.
pub fn initial_state_width(h: &SparseOperator, psi0: &QuantumState) -> Result<f64> {
    if h.dimension() != psi0.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            found: psi0.dimension(),
        });
    }
    let psi = psi0.amplitudes();
    let hpsi = h.apply(psi);
    let nrm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let e: f64 = psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / nrm;
    let var: f64 = hpsi
        .iter()
        .zip(psi)
        .map(|(hp, p)| (hp - p * e).norm_sqr())
        .sum::<f64>()
        / nrm;
    Ok(var.sqrt())
}

/// One row of a γ–ε map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub gamma: f64,
    pub epsilon: f64,
    pub value: f64,
}

/// Long-format `gamma,epsilon,value` table for heatmaps.
pub fn long_format_csv(points: &[MapPoint]) -> String {
    let mut out = String::from("gamma,epsilon,value\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.gamma, p.epsilon, p.value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::full_diagonalize;
    use crate::model::SectorBasis;
    use num_complex::Complex64;

    #[test]
    fn eigenstate_has_single_weight_and_zero_width() {
        let basis = SectorBasis::new(3, 1).unwrap();
        let h = SparseOperator::from_rows(
            vec![0.2, 0.0, -0.3],
            vec![vec![(1, 1.0)], vec![(0, 1.0), (2, 0.5)], vec![(1, 0.5)]],
        )
        .unwrap();
        let eig = full_diagonalize(&h).unwrap();
        let v: Vec<Complex64> = eig.eigenvector(1).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let psi = QuantumState::from_amplitudes(&basis, v).unwrap();
        let d = overlap_distribution(&psi, &eig).unwrap();
        assert!((d.weights[1] - 1.0).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!(initial_state_width(&h, &psi).unwrap() < 1e-7);
    }

    #[test]
    fn diagonal_product_state() {
        let basis = SectorBasis::new(4, 2).unwrap();
        let h = SparseOperator::from_diagonal((0..6).map(|k| k as f64 * 0.7).collect());
        let eig = full_diagonalize(&h).unwrap();
        let psi = QuantumState::product(&basis, 0b0101).unwrap();
        let d = overlap_distribution(&psi, &eig).unwrap();
        let r = basis.rank(0b0101).unwrap();
        assert!((d.weights[r] - 1.0).abs() < 1e-15);
        assert_eq!(initial_state_width(&h, &psi).unwrap(), 0.0);
    }

    #[test]
    fn csv_header() {
        let s = long_format_csv(&[MapPoint {
            gamma: 1.0,
            epsilon: 0.5,
            value: 0.25,
        }]);
        assert_eq!(s, "gamma,epsilon,value\n1,0.5,0.25\n");
    }
}
