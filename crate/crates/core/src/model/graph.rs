use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weighted coupling edge. `coupling` is J_ij/2π in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

/// Sites and weighted couplings of the emulated device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceGraph {
    n_sites: usize,
    edges: Vec<Edge>,
}

/// Parameters of the synthetic triangular ladder used when no measured
/// coupling map is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderParams {
    pub nn_coupling: f64,
    pub nnn_coupling: f64,
    /// Relative half-width of the uniform site-to-site spread.
    pub spread: f64,
    pub seed: u64,
}

impl Default for LadderParams {
    fn default() -> Self {
        LadderParams {
            nn_coupling: 3.5,
            nnn_coupling: 1.5,
            spread: 0.15,
            seed: 2021,
        }
    }
}

/// Result of [`DeviceGraph::induced_subgraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub graph: DeviceGraph,
    /// `sites[new_index]` is the original site index.
    pub sites: Vec<usize>,
    /// Edges of the parent graph touching the subset but not contained in it.
    pub dropped: Vec<Edge>,
}

impl DeviceGraph {
    /// Validates and stores the graph. Edges given as (j, i) with j > i are
    /// normalized to i < j.
    pub fn new(n_sites: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidGraph("n_sites must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (idx, e) in edges.into_iter().enumerate() {
            let (i, j) = if e.i <= e.j { (e.i, e.j) } else { (e.j, e.i) };
            if i == j {
                return Err(Error::InvalidGraph(format!("edge {idx}: self-loop on site {i}")));
            }
            if j >= n_sites {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx}: site {j} out of range for n_sites={n_sites}"
                )));
            }
            if !e.coupling.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {idx}: coupling is not finite")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("edge {idx}: duplicate pair ({i}, {j})")));
            }
            out.push(Edge {
                i,
                j,
                coupling: e.coupling,
            });
        }
        Ok(DeviceGraph {
            n_sites,
            edges: out,
        })
    }

    /// Chain with nearest- and next-nearest-neighbour couplings. Couplings
    /// are drawn per site in a fixed order, so the ladder on `n` sites is
    /// exactly the induced subgraph of any longer ladder on its first `n`
    /// sites.
    pub fn triangular_ladder(n_sites: usize, params: &LadderParams) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut edges = Vec::new();
        for i in 0..n_sites {
            let nn = params.nn_coupling * (1.0 + params.spread * rng.random_range(-1.0..=1.0));
            let nnn = params.nnn_coupling * (1.0 + params.spread * rng.random_range(-1.0..=1.0));
            if i + 1 < n_sites {
                edges.push(Edge { i, j: i + 1, coupling: nn });
            }
            if i + 2 < n_sites {
                edges.push(Edge { i, j: i + 2, coupling: nnn });
            }
        }
        DeviceGraph::new(n_sites, edges)
    }

    /// Ladder with the default couplings and seed.
    pub fn default_ladder(n_sites: usize) -> Result<Self> {
        Self::triangular_ladder(n_sites, &LadderParams::default())
    }

    /// Uniform nearest-neighbour chain.
    pub fn chain(n_sites: usize, coupling: f64) -> Result<Self> {
        DeviceGraph::new(
            n_sites,
            (0..n_sites.saturating_sub(1)).map(|i| Edge { i, j: i + 1, coupling }),
        )
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Average of all couplings (J̄). Zero for an edge-free graph.
    pub fn mean_coupling(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        self.edges.iter().map(|e| e.coupling).sum::<f64>() / self.edges.len() as f64
    }

    /// Induced subgraph on `sites`, relabeled 0..m-1 in the order given.
    pub fn induced_subgraph(&self, sites: &[usize]) -> Result<Subgraph> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("empty site subset".into()));
        }
        let mut relabel = vec![None; self.n_sites];
        for (new, &old) in sites.iter().enumerate() {
            if old >= self.n_sites {
                return Err(Error::InvalidArgument(format!(
                    "site {old} does not exist (n_sites={})",
                    self.n_sites
                )));
            }
            if relabel[old].is_some() {
                return Err(Error::InvalidArgument(format!("site {old} listed twice")));
            }
            relabel[old] = Some(new);
        }
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for e in &self.edges {
            match (relabel[e.i], relabel[e.j]) {
                (Some(a), Some(b)) => kept.push(Edge {
                    i: a,
                    j: b,
                    coupling: e.coupling,
                }),
                (None, None) => {}
                _ => dropped.push(*e),
            }
        }
        let mut graph = DeviceGraph::new(sites.len(), kept)?;
        graph.edges.sort_by_key(|e| (e.i, e.j));
        Ok(Subgraph {
            graph,
            sites: sites.to_vec(),
            dropped,
        })
    }
}
