//! Spectral diagnostics: extremal energies, level statistics, eigenstate
//! expectation values, overlaps and dipole fragments.

pub mod eev;
pub mod lanczos;
pub mod levels;
pub mod overlap;

pub use eev::{
    classify_fragments, classify_values, eev_fluctuations, eev_size_scan, eev_table,
    within_fragment_gap_ratios, EevObservable, EevScaling, EevTable, FragmentLabeling,
};
pub use lanczos::{extremal_energies, extremal_energies_with, ExtremalEnergies, LanczosConfig};
pub use levels::{
    energy_density, gap_ratio_statistics, gap_ratios, p_goe, p_poisson, reference_distributions,
    EnergyWindows, GapRatio, GapRatioStats, Histogram, WindowMean, GOE_MEAN_RATIO,
    POISSON_MEAN_RATIO,
};
pub use overlap::{initial_state_width, long_format_csv, overlap_distribution, MapPoint, OverlapDistribution};

/// Central-spectrum window used for fluctuation fits and r̄.
pub const CENTRAL_WINDOW: (f64, f64) = (0.4, 0.6);

/// Default fragment tolerance in dipole units.
pub const FRAGMENT_TOLERANCE: f64 = 0.1;
