use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{KrylovConfig, Method, Observable, TimeGrid, DEFAULT_DENSE_CAP};
use crate::model::{DeviceGraph, Edge, LadderParams};

/// Where the coupling graph comes from. `sites` optionally restricts it to
/// an induced subgraph, relabeled in the listed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DeviceSpec {
    Ladder {
        n_sites: usize,
        #[serde(default)]
        params: LadderParams,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<Vec<usize>>,
    },
    Graph {
        n_sites: usize,
        edges: Vec<(usize, usize, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sites: Option<Vec<usize>>,
    },
}

impl DeviceSpec {
    pub fn ladder(n_sites: usize) -> Self {
        DeviceSpec::Ladder {
            n_sites,
            params: LadderParams::default(),
            sites: None,
        }
    }

    /// The graph the dynamics runs on, after any subgraph restriction.
    pub fn build(&self) -> Result<DeviceGraph> {
        let (full, sites) = match self {
            DeviceSpec::Ladder { n_sites, params, sites } => {
                (DeviceGraph::triangular_ladder(*n_sites, params)?, sites)
            }
            DeviceSpec::Graph { n_sites, edges, sites } => (
                DeviceGraph::new(*n_sites, edges.iter().map(|&(i, j, coupling)| Edge { i, j, coupling }))?,
                sites,
            ),
        };
        match sites {
            Some(s) => Ok(full.induced_subgraph(s)?.graph),
            None => Ok(full),
        }
    }
}

/// Sample times: a uniform grid or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    Uniform { t_max: f64, dt: f64 },
    Explicit(Vec<f64>),
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec::Uniform { t_max: 1000.0, dt: 5.0 }
    }
}

impl TimeSpec {
    pub fn grid(&self) -> Result<TimeGrid> {
        match self {
            TimeSpec::Uniform { t_max, dt } => TimeGrid::uniform(*t_max, *dt),
            TimeSpec::Explicit(t) => TimeGrid::new(t.clone()),
        }
    }
}

fn default_k() -> usize {
    20
}
fn default_target() -> f64 {
    0.5
}
fn default_tolerance() -> f64 {
    0.02
}
fn default_observables() -> Vec<Observable> {
    vec![Observable::Hd, Observable::Imbalance, Observable::Qfi]
}
fn default_method() -> Method {
    Method::Krylov
}
fn default_cap() -> usize {
    DEFAULT_DENSE_CAP
}

/// Everything needed to reproduce an ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub device: DeviceSpec,
    /// Stark slopes γ/2π in MHz.
    pub gammas: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_target")]
    pub epsilon_target: f64,
    #[serde(default = "default_tolerance")]
    pub epsilon_tolerance: f64,
    /// Defaults to half filling, ⌊N/2⌋.
    #[serde(default)]
    pub n_excitations: Option<usize>,
    #[serde(default)]
    pub times: TimeSpec,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub correlation_times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub krylov: KrylovConfig,
    #[serde(default = "default_cap")]
    pub dense_cap: usize,
    /// Skip selection and use these bitstrings (MSB = highest site).
    #[serde(default)]
    pub initial_states: Option<Vec<String>>,
    /// Worker cap; `None` uses every core.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl EnsembleSpec {
    /// Default protocol settings for `device`.
    pub fn new(device: DeviceSpec, gammas: Vec<f64>) -> Self {
        EnsembleSpec {
            device,
            gammas,
            k: default_k(),
            epsilon_target: default_target(),
            epsilon_tolerance: default_tolerance(),
            n_excitations: None,
            times: TimeSpec::default(),
            observables: default_observables(),
            correlation_times: Vec::new(),
            seed: 0,
            method: default_method(),
            krylov: KrylovConfig::default(),
            dense_cap: default_cap(),
            initial_states: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config {
            path: "ensemble".into(),
            message: m,
        });
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(self.epsilon_target > 0.0 && self.epsilon_target < 1.0) {
            return bad(format!("epsilon_target {} outside (0, 1)", self.epsilon_target));
        }
        if !(self.epsilon_tolerance > 0.0) {
            return bad("epsilon_tolerance must be positive".into());
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !g.is_finite()) {
            return bad("gammas must be a non-empty list of finite values".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        self.krylov.validate()?;
        self.times.grid()?;
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}
