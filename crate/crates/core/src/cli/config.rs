//! Run configuration file: device plus one optional section per command.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{KrylovConfig, Method, Observable, DEFAULT_DENSE_CAP};
use crate::model::config::parse_json;
use crate::protocol::{DeviceSpec, EnsembleSpec, TimeSpec};
use crate::spectral::FRAGMENT_TOLERANCE;

fn default_device() -> DeviceSpec {
    DeviceSpec::ladder(12)
}
fn default_method() -> Method {
    Method::Krylov
}
fn default_cap() -> usize {
    DEFAULT_DENSE_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuenchSection {
    pub gammas: Vec<f64>,
    pub k: usize,
    pub epsilon_target: f64,
    pub epsilon_tolerance: f64,
    pub n_excitations: Option<usize>,
    pub times: TimeSpec,
    pub observables: Vec<Observable>,
    pub correlation_times: Vec<f64>,
    pub initial_states: Option<Vec<String>>,
}

impl Default for QuenchSection {
    fn default() -> Self {
        QuenchSection {
            gammas: vec![1.0, 5.0, 8.0],
            k: 20,
            epsilon_target: 0.5,
            epsilon_tolerance: 0.02,
            n_excitations: None,
            times: TimeSpec::default(),
            observables: vec![Observable::Hd, Observable::Imbalance, Observable::Qfi],
            correlation_times: Vec::new(),
            initial_states: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub gammas: Vec<f64>,
    /// ε window width for r̄_ε and overlap sums.
    pub window: f64,
    pub histogram_bins: usize,
    pub fragments: bool,
    pub fragment_tolerance: f64,
    /// Overlap map of this product state (default: alternating pattern).
    pub overlaps: bool,
    pub overlap_state: Option<String>,
    /// System sizes for EEV fluctuation scaling; empty disables it.
    pub sizes: Vec<usize>,
    /// Observables for the scaling study: "dipole" and/or "imbalance".
    pub eev_scaling: Vec<String>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            gammas: vec![1.0, 5.0, 10.0],
            window: 0.05,
            histogram_bins: 50,
            fragments: false,
            fragment_tolerance: FRAGMENT_TOLERANCE,
            overlaps: false,
            overlap_state: None,
            sizes: Vec::new(),
            eev_scaling: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlochSection {
    pub gamma: f64,
    /// Initial product state; default alternating pattern.
    pub initial_state: Option<String>,
    pub times: TimeSpec,
}

impl Default for BlochSection {
    fn default() -> Self {
        BlochSection {
            gamma: 16.0,
            initial_state: None,
            times: TimeSpec::default(),
        }
    }
}

/// Contents of the `--config` file. Every field has a default, so `{}` is
/// a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceSpec,
    pub seed: u64,
    pub method: Method,
    pub threads: Option<usize>,
    pub dense_cap: usize,
    pub krylov: KrylovConfig,
    pub quench: QuenchSection,
    pub spectrum: SpectrumSection,
    pub bloch: BlochSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            device: default_device(),
            seed: 0,
            method: default_method(),
            threads: None,
            dense_cap: default_cap(),
            krylov: KrylovConfig::default(),
            quench: QuenchSection::default(),
            spectrum: SpectrumSection::default(),
            bloch: BlochSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        parse_json(&text).map_err(|e| match e {
            Error::Config { path: field, message } => Error::Config {
                path: format!("{}: {field}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let q = &self.quench;
        EnsembleSpec {
            device: self.device.clone(),
            gammas: q.gammas.clone(),
            k: q.k,
            epsilon_target: q.epsilon_target,
            epsilon_tolerance: q.epsilon_tolerance,
            n_excitations: q.n_excitations,
            times: q.times.clone(),
            observables: q.observables.clone(),
            correlation_times: q.correlation_times.clone(),
            seed: self.seed,
            method: self.method,
            krylov: self.krylov,
            dense_cap: self.dense_cap,
            initial_states: q.initial_states.clone(),
            threads: self.threads,
        }
    }
}

/// Parses `a:b:step` into a closed range of values.
pub fn parse_scan(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::InvalidArgument(format!("bad scan '{text}', expected start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || b < a {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| a + k as f64 * step).collect())
}
