use std::fmt::Write as _;

use crate::model::QuantumState;

/// C(i,j) = |⟨n_i n_j⟩ − ⟨n_i⟩⟨n_j⟩|, with the on-site variance on the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n_sites: usize,
    values: Vec<f64>,
}

/// One distance bin of [`distance_binned_correlations`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBin {
    pub distance: usize,
    pub mean: f64,
    pub std_error: f64,
    pub pairs: usize,
}

impl CorrelationMatrix {
    pub fn from_values(n_sites: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n_sites * n_sites);
        CorrelationMatrix { n_sites, values }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_sites + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Element-wise mean of several matrices of equal size.
    pub fn mean(mats: &[CorrelationMatrix]) -> Option<CorrelationMatrix> {
        let first = mats.first()?;
        let mut values = vec![0.0; first.values.len()];
        for m in mats {
            for (acc, v) in values.iter_mut().zip(&m.values) {
                *acc += v;
            }
        }
        values.iter_mut().for_each(|v| *v /= mats.len() as f64);
        Some(CorrelationMatrix {
            n_sites: first.n_sites,
            values,
        })
    }

    /// Dense CSV, one row per site.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_sites {
            let row: Vec<String> = (0..self.n_sites).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// `i,j,c` rows for i < j.
    pub fn to_edge_list_csv(&self) -> String {
        let mut out = String::from("i,j,c\n");
        for i in 0..self.n_sites {
            for j in i + 1..self.n_sites {
                let _ = writeln!(out, "{i},{j},{}", self.get(i, j));
            }
        }
        out
    }
}

/// Computes all ⟨n_i⟩ and ⟨n_i n_j⟩ in one pass over the amplitudes.
pub fn two_point_correlations(psi: &QuantumState) -> CorrelationMatrix {
    let n = psi.n_sites();
    let mut single = vec![0.0; n];
    let mut pair = vec![0.0; n * n];
    let mut sites = Vec::with_capacity(n);
    for (s, a) in psi.basis().states().zip(psi.amplitudes()) {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        sites.clear();
        let mut bits = s;
        while bits != 0 {
            sites.push(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        for (x, &i) in sites.iter().enumerate() {
            single[i] += p;
            for &j in &sites[x + 1..] {
                pair[i * n + j] += p;
            }
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = single[i] - single[i] * single[i];
        for j in i + 1..n {
            let c = (pair[i * n + j] - single[i] * single[j]).abs();
            values[i * n + j] = c;
            values[j * n + i] = c;
        }
    }
    CorrelationMatrix { n_sites: n, values }
}

/// Mean and standard error of C(i,j) over pairs at each separation
/// δx = |i − j| = 1..N−1. A bin with a single pair reports zero error.
pub fn distance_binned_correlations(c: &CorrelationMatrix) -> Vec<DistanceBin> {
    let n = c.n_sites();
    (1..n)
        .map(|dx| {
            let vals: Vec<f64> = (0..n - dx).map(|i| c.get(i, i + dx)).collect();
            let k = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / k;
            let std_error = if vals.len() > 1 {
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            } else {
                0.0
            };
            DistanceBin {
                distance: dx,
                mean,
                std_error,
                pairs: vals.len(),
            }
        })
        .collect()
}

pub fn binned_to_csv(bins: &[DistanceBin]) -> String {
    let mut out = String::from("distance,mean,std_error,pairs\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{},{}", b.distance, b.mean, b.std_error, b.pairs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SectorBasis;
    use num_complex::Complex64;

    #[test]
    fn product_state_is_uncorrelated() {
        let b = SectorBasis::new(5, 2).unwrap();
        let c = two_point_correlations(&QuantumState::product(&b, 0b10010).unwrap());
        assert!(c.values().iter().all(|&v| v == 0.0));
        assert!(distance_binned_correlations(&c).iter().all(|b| b.mean == 0.0));
    }

    #[test]
    fn two_site_superposition() {
        let b = SectorBasis::new(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = QuantumState::from_amplitudes(&b, vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
        let c = two_point_correlations(&psi);
        assert!((c.get(0, 1) - 0.25).abs() < 1e-15);
        assert!((c.get(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_matrix_bins() {
        let n = 6;
        let c = CorrelationMatrix::from_values(n, vec![0.07; n * n]);
        let bins = distance_binned_correlations(&c);
        assert_eq!(bins.len(), n - 1);
        for b in &bins {
            assert!((b.mean - 0.07).abs() < 1e-15);
            assert!(b.std_error < 1e-15);
            assert_eq!(b.pairs, n - b.distance);
        }
    }
}
