//! Dynamical observables of sector states.

pub mod correlations;
pub mod fit;
pub mod fourier;
pub mod local;

pub use correlations::{
    binned_to_csv, distance_binned_correlations, two_point_correlations, CorrelationMatrix,
    DistanceBin,
};
pub use fit::{fit_exponential_decay, linear_fit, FitResult, LinearFit};
pub use fourier::{amplitude_spectrum, half_open_spectrum, FourierSpectrum};
pub use local::{
    generalized_imbalance, hamming_distance, quantum_fisher_information, sigma_z, site_densities,
};

use crate::error::Result;

/// Fits the binned correlations with ξ bounded by 10·N, N = number of
/// sites (= last distance + 1).
pub fn fit_correlation_length(bins: &[DistanceBin]) -> Result<FitResult> {
    let xs: Vec<f64> = bins.iter().map(|b| b.distance as f64).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.mean).collect();
    let n_sites = bins.last().map_or(0, |b| b.distance + 1);
    fit_exponential_decay(&xs, &ys, 10.0 * n_sites as f64)
}
