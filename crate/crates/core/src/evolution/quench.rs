use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::eigen::{EigenDecomposition, ExactPropagator};
use super::krylov::{evolve_krylov, KrylovConfig, KrylovDiagnostics};
use crate::error::{Error, Result};
use crate::model::{QuantumState, SparseOperator};
use crate::observables::local::{
    hamming_from_densities, imbalance_from_densities, quantum_fisher_information, site_densities,
};
use crate::observables::{two_point_correlations, CorrelationMatrix};

/// Strictly increasing sample times in ns, starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        TimeGrid::new(times)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.times
    }
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        match times.first() {
            None => return Err(Error::InvalidTimeGrid("empty".into())),
            Some(&t0) if t0 != 0.0 => {
                return Err(Error::InvalidTimeGrid(format!("must start at 0, starts at {t0}")))
            }
            _ => {}
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTimeGrid(format!("not strictly increasing at {}", w[1])));
        }
        Ok(TimeGrid { times })
    }

    /// 0, dt, 2dt, ... up to and including `t_max` (within rounding).
    pub fn uniform(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t_max >= 0.0) {
            return Err(Error::InvalidTimeGrid(format!("bad uniform grid t_max={t_max}, dt={dt}")));
        }
        let steps = (t_max / dt + 1e-9).floor() as usize;
        TimeGrid::new((0..=steps).map(|k| k as f64 * dt).collect())
    }

    /// 0 → 1000 ns every 5 ns.
    pub fn experiment_default() -> Self {
        TimeGrid::uniform(1000.0, 5.0).expect("valid default grid")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample at `t` (within 1e-9 ns).
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-9)
    }
}

/// Per-sample scalar observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    /// Dynamical Hamming distance to the reference bitstring.
    #[serde(alias = "hamming")]
    Hd,
    /// Generalized imbalance relative to the reference bitstring.
    Imbalance,
    /// Quantum Fisher information of the imbalance.
    Qfi,
    /// One column `n{i}` per site.
    Densities,
    /// One column `sz{i}` per site.
    SigmaZ,
    /// Σ_i ⟨n_i⟩.
    Excitations,
    /// ⟨H⟩ in rad/μs.
    Energy,
}

impl Observable {
    pub fn parse(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(name.trim().to_lowercase()))
            .map_err(|_| Error::InvalidArgument(format!("unknown observable '{name}'")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Observable::Hd => "hd",
            Observable::Imbalance => "imbalance",
            Observable::Qfi => "qfi",
            Observable::Densities => "densities",
            Observable::SigmaZ => "sigmaz",
            Observable::Excitations => "excitations",
            Observable::Energy => "energy",
        }
    }

    fn column_names(&self, n_sites: usize) -> Vec<String> {
        match self {
            Observable::Densities => (0..n_sites).map(|i| format!("n{i}")).collect(),
            Observable::SigmaZ => (0..n_sites).map(|i| format!("sz{i}")).collect(),
            other => vec![other.name().to_string()],
        }
    }
}

/// What to record along a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObserverSet {
    pub observables: Vec<Observable>,
    /// Times (on the grid) at which C(i,j) is captured.
    #[serde(default)]
    pub correlation_times: Vec<f64>,
}

impl ObserverSet {
    pub fn new(observables: impl IntoIterator<Item = Observable>) -> Self {
        ObserverSet {
            observables: observables.into_iter().collect(),
            correlation_times: Vec::new(),
        }
    }

    pub fn with_correlations_at(mut self, times: impl IntoIterator<Item = f64>) -> Self {
        self.correlation_times.extend(times);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Krylov,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Krylov => "krylov",
        }
    }
}

/// Propagation backend for [`run_quench`].
#[derive(Debug, Clone, Copy)]
pub enum Propagator<'a> {
    Exact(&'a EigenDecomposition),
    Krylov(KrylovConfig),
}

impl Propagator<'_> {
    pub fn method(&self) -> Method {
        match self {
            Propagator::Exact(_) => Method::Exact,
            Propagator::Krylov(_) => Method::Krylov,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    pub method: Option<Method>,
    pub n_sites: usize,
    pub n_excitations: usize,
    pub reference: String,
    pub gamma_mhz: Option<f64>,
    pub seed: Option<u64>,
    pub config_hash: Option<String>,
    pub krylov_substeps: usize,
    pub krylov_error_estimate: f64,
    pub krylov_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSnapshot {
    pub time: f64,
    pub matrix: CorrelationMatrix,
}

/// Time series of every requested observable on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub columns: Vec<Column>,
    pub snapshots: Vec<CorrelationSnapshot>,
    pub metadata: SeriesMetadata,
}

#[derive(Serialize)]
struct SeriesJson<'a> {
    metadata: &'a SeriesMetadata,
    times: &'a [f64],
    columns: &'a [Column],
}

impl ObservableSeries {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Per-site columns `prefix0..prefix{N-1}` as signals.
    pub fn site_columns(&self, prefix: &str) -> Vec<Vec<f64>> {
        (0..self.metadata.n_sites)
            .map_while(|i| self.column(&format!("{prefix}{i}")).map(<[f64]>::to_vec))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_ns");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t}");
            for c in &self.columns {
                let _ = write!(out, ",{}", c.values[k]);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SeriesJson {
            metadata: &self.metadata,
            times: &self.times,
            columns: &self.columns,
        })
        .expect("series serializes")
    }

    /// File stem embedding γ, N, seed and method.
    pub fn file_stem(&self) -> String {
        series_file_stem(
            self.metadata.gamma_mhz,
            self.metadata.n_sites,
            self.metadata.seed,
            self.metadata.method,
        )
    }
}

pub fn series_file_stem(gamma: Option<f64>, n_sites: usize, seed: Option<u64>, method: Option<Method>) -> String {
    let g = gamma.map_or("na".to_string(), |g| format!("{g}"));
    let s = seed.map_or("na".to_string(), |s| s.to_string());
    let m = method.map_or("none", |m| m.name());
    format!("gamma{g}_N{n_sites}_seed{s}_{m}")
}

/// Evolves `psi0` across `grid` and records the requested observables.
/// `reference` is the bitstring that HD, imbalance and QFI are measured
/// against (normally the initial product state).
pub fn run_quench(
    h: &SparseOperator,
    psi0: &QuantumState,
    reference: u64,
    grid: &TimeGrid,
    observers: &ObserverSet,
    propagator: Propagator<'_>,
) -> Result<ObservableSeries> {
    if h.dimension() != psi0.dimension() {
        return Err(Error::DimensionMismatch {
            expected: h.dimension(),
            found: psi0.dimension(),
        });
    }
    let n = psi0.n_sites();
    let needs_imbalance = observers
        .observables
        .iter()
        .any(|o| matches!(o, Observable::Imbalance | Observable::Qfi));
    if needs_imbalance {
        crate::model::hamiltonian::imbalance_weights(reference, n)?;
    }
    let mut snapshot_idx = Vec::new();
    for &t in &observers.correlation_times {
        let k = grid
            .index_of(t)
            .ok_or_else(|| Error::InvalidTimeGrid(format!("correlation time {t} is not on the grid")))?;
        snapshot_idx.push((k, t));
    }

    let mut columns: Vec<Column> = observers
        .observables
        .iter()
        .flat_map(|o| o.column_names(n))
        .map(|name| Column {
            name,
            values: Vec::with_capacity(grid.len()),
        })
        .collect();
    let mut snapshots = Vec::new();
    let mut diag = KrylovDiagnostics::default();

    let exact = match propagator {
        Propagator::Exact(eig) => Some(ExactPropagator::new(eig, psi0)?),
        Propagator::Krylov(cfg) => {
            cfg.validate()?;
            None
        }
    };

    let mut state = psi0.clone();
    let mut t_prev = 0.0;
    for (k, &t) in grid.times().iter().enumerate() {
        if k > 0 {
            state = match (&exact, propagator) {
                (Some(p), _) => p.at(psi0, t),
                (None, Propagator::Krylov(cfg)) => {
                    let mut s = state;
                    let mut elapsed = t_prev;
                    while t - elapsed > 1e-12 * t.max(1.0) {
                        let dt = cfg.step_dt.min(t - elapsed);
                        let (next, d) = evolve_krylov(h, &s, dt, &cfg)?;
                        diag.absorb(&d);
                        s = next;
                        elapsed += dt;
                    }
                    s
                }
                (None, Propagator::Exact(_)) => unreachable!(),
            };
        }
        t_prev = t;
        record(&state, reference, h, &observers.observables, &mut columns)?;
        for &(_, ts) in snapshot_idx.iter().filter(|(i, _)| *i == k) {
            snapshots.push(CorrelationSnapshot {
                time: ts,
                matrix: two_point_correlations(&state),
            });
        }
    }

    Ok(ObservableSeries {
        times: grid.times().to_vec(),
        columns,
        snapshots,
        metadata: SeriesMetadata {
            method: Some(propagator.method()),
            n_sites: n,
            n_excitations: psi0.n_excitations(),
            reference: crate::model::format_bits(reference, n),
            krylov_substeps: diag.substeps,
            krylov_error_estimate: diag.error_estimate,
            krylov_norm_drift: diag.norm_drift,
            ..Default::default()
        },
    })
}

fn record(
    state: &QuantumState,
    reference: u64,
    h: &SparseOperator,
    observables: &[Observable],
    columns: &mut [Column],
) -> Result<()> {
    let needs_dens = observables.iter().any(|o| {
        matches!(
            o,
            Observable::Hd
                | Observable::Imbalance
                | Observable::Densities
                | Observable::SigmaZ
                | Observable::Excitations
        )
    });
    let dens = if needs_dens { site_densities(state) } else { Vec::new() };
    let mut col = 0;
    for o in observables {
        match o {
            Observable::Hd => {
                columns[col].values.push(hamming_from_densities(&dens, reference));
                col += 1;
            }
            Observable::Imbalance => {
                columns[col].values.push(imbalance_from_densities(&dens, reference)?);
                col += 1;
            }
            Observable::Qfi => {
                columns[col].values.push(quantum_fisher_information(state, reference)?);
                col += 1;
            }
            Observable::Densities => {
                for d in &dens {
                    columns[col].values.push(*d);
                    col += 1;
                }
            }
            Observable::SigmaZ => {
                for d in &dens {
                    columns[col].values.push(1.0 - 2.0 * d);
                    col += 1;
                }
            }
            Observable::Excitations => {
                columns[col].values.push(dens.iter().sum());
                col += 1;
            }
            Observable::Energy => {
                columns[col].values.push(h.expectation(state.amplitudes()));
                col += 1;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![1.0, 2.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 2.0, 2.0]).is_err());
        let g = TimeGrid::experiment_default();
        assert_eq!(g.len(), 201);
        assert_eq!(g.times()[200], 1000.0);
        assert_eq!(g.index_of(500.0), Some(100));
    }

    #[test]
    fn observable_names_parse() {
        assert_eq!(Observable::parse("hd").unwrap(), Observable::Hd);
        assert_eq!(Observable::parse("QFI").unwrap(), Observable::Qfi);
        assert_eq!(Observable::parse("sigmaz").unwrap(), Observable::SigmaZ);
        assert!(Observable::parse("entropy").is_err());
    }
}
