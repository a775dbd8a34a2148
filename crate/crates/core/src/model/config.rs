//! JSON device description.
//!
//! ```json
//! {
//!   "n_sites": 3,
//!   "edges": [[0, 1, 3.5], [1, 2, 3.4], [0, 2, 1.5]],
//!   "potential": { "type": "stark", "gamma": 1.0 }
//! }
//! ```
//!
//! `potential` may also be `{"type": "random", "half_width": V, "seed": s}`
//! or `{"type": "explicit", "w": [..]}`. All frequencies are MHz (f = ω/2π).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::{DeviceGraph, Edge};
use super::potential::PotentialProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub n_sites: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default = "PotentialProfile::zero")]
    pub potential: PotentialProfile,
}

impl DeviceConfig {
    pub fn from_graph(graph: &DeviceGraph, potential: PotentialProfile) -> Self {
        DeviceConfig {
            n_sites: graph.n_sites(),
            edges: graph.edges().iter().map(|e| (e.i, e.j, e.coupling)).collect(),
            potential,
        }
    }

    pub fn graph(&self) -> Result<DeviceGraph> {
        DeviceGraph::new(
            self.n_sites,
            self.edges.iter().map(|&(i, j, coupling)| Edge { i, j, coupling }),
        )
        .map_err(|e| Error::Config {
            path: "edges".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: DeviceConfig = parse_json(text)?;
        cfg.graph()?;
        cfg.potential.site_energies(cfg.n_sites).map_err(|e| Error::Config {
            path: "potential".into(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("device config serializes")
    }
}

/// Deserializes JSON, reporting the offending field path and line/column.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Config {
            path,
            message: inner.to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let cfg = DeviceConfig::from_json_str(
            r#"{"n_sites": 3, "edges": [[0,1,3.5],[1,2,3.4],[0,2,1.5]],
                "potential": {"type": "stark", "gamma": 1.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.graph().unwrap().edges().len(), 3);
        assert_eq!(cfg.potential, PotentialProfile::Stark { gamma: 1.0 });
        let again = DeviceConfig::from_json_str(&cfg.to_json_pretty()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn errors_name_the_field_and_line() {
        let err = DeviceConfig::from_json_str(
            "{\n \"n_sites\": 3,\n \"edges\": [[0, 1, \"x\"]]\n}",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("edges[0]"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");

        let err = DeviceConfig::from_json_str(r#"{"n_sites": 2, "edges": [[0, 5, 1.0]]}"#).unwrap_err();
        assert!(err.to_string().contains("edges"));
        let err = DeviceConfig::from_json_str(
            r#"{"n_sites": 2, "edges": [], "potential": {"type": "explicit", "w": [1.0]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("potential"));
    }
}
