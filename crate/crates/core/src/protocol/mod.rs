//! The measurement protocol: energy-window state selection, ensemble
//! quenches with standard errors, subgraph extraction, and run output.

pub mod ensemble;
pub mod output;
pub mod selection;
pub mod spec;

pub use ensemble::{
    aggregate, gamma_rng, run_ensemble, AggregateColumn, AggregateSeries, EnsembleResult, GammaResult,
    SelectionAudit,
};
pub use output::{config_hash, sha256_hex, write_ensemble, OutputFile, OutputTree, RunManifest};
pub use selection::{pairwise_hamming_histogram, select_initial_states, select_with_extremes, Selection};
pub use spec::{DeviceSpec, EnsembleSpec, TimeSpec};

use crate::error::Result;
use crate::model::{DeviceGraph, Subgraph};

/// Induced subgraph on `sites`, relabeled 0..m−1, with dropped edges.
pub fn extract_subgraph(graph: &DeviceGraph, sites: &[usize]) -> Result<Subgraph> {
    graph.induced_subgraph(sites)
}

/// Sites 0, 2, 4, ... of a ladder with `2m` sites: a nearest-neighbour chain
/// of length m along one leg.
pub fn alternating_sites(n_sites: usize) -> Vec<usize> {
    (0..n_sites).step_by(2).collect()
}
