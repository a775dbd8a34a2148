use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::selection::{pairwise_hamming_histogram, select_initial_states, Selection};
use super::spec::EnsembleSpec;
use crate::error::{Error, Result};
use crate::evolution::{
    full_diagonalize_capped, run_quench, Method, ObservableSeries, ObserverSet, Propagator,
};
use crate::model::hamiltonian::product_state_energy;
use crate::model::{build_hamiltonian, DeviceGraph, PotentialProfile, QuantumState, SectorBasis};
use crate::observables::CorrelationMatrix;

/// Mean and standard error of one column across initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateColumn {
    pub name: String,
    pub mean: Vec<f64>,
    /// Sample standard deviation / √k; NaN when k = 1.
    pub sem: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub times: Vec<f64>,
    pub columns: Vec<AggregateColumn>,
    /// False when k = 1 and no spread can be estimated.
    pub sem_defined: bool,
}

impl AggregateSeries {
    pub fn column(&self, name: &str) -> Option<&AggregateColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Mean of `name` at time `t` (on the grid).
    pub fn mean_at(&self, name: &str, t: f64) -> Option<f64> {
        let k = self.times.iter().position(|&s| (s - t).abs() <= 1e-9)?;
        self.column(name).map(|c| c.mean[k])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_ns");
        for c in &self.columns {
            let _ = write!(out, ",{0}_mean,{0}_sem", c.name);
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t}");
            for c in &self.columns {
                let _ = write!(out, ",{},{}", c.mean[k], c.sem[k]);
            }
            out.push('\n');
        }
        out
    }
}

/// Sequential mean/SEM reduction over series sharing a grid and columns.
pub fn aggregate(series: &[ObservableSeries]) -> Result<AggregateSeries> {
    let first = series
        .first()
        .ok_or_else(|| Error::InvalidArgument("nothing to aggregate".into()))?;
    let k = series.len();
    let mut columns = Vec::with_capacity(first.columns.len());
    for (c, col) in first.columns.iter().enumerate() {
        let len = col.values.len();
        let mut mean = vec![0.0; len];
        let mut sem = vec![f64::NAN; len];
        for s in series {
            if s.columns.get(c).map(|x| &x.name) != Some(&col.name) || s.times != first.times {
                return Err(Error::InvalidArgument("series do not share grid and columns".into()));
            }
            for (m, v) in mean.iter_mut().zip(&s.columns[c].values) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= k as f64);
        if k > 1 {
            for (t, e) in sem.iter_mut().enumerate() {
                let ss: f64 = series.iter().map(|s| (s.columns[c].values[t] - mean[t]).powi(2)).sum();
                *e = (ss / (k - 1) as f64).sqrt() / (k as f64).sqrt();
            }
        }
        columns.push(AggregateColumn {
            name: col.name.clone(),
            mean,
            sem,
        });
    }
    Ok(AggregateSeries {
        times: first.times.clone(),
        columns,
        sem_defined: k > 1,
    })
}

/// Selection metadata for one γ.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionAudit {
    pub selection: Selection,
    /// Pairwise static Hamming histogram; empty when k = 1.
    pub hamming_histogram: Vec<usize>,
    /// True when states came from the spec rather than from sampling.
    pub provided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaResult {
    pub gamma: f64,
    pub audit: SelectionAudit,
    pub raw: Vec<ObservableSeries>,
    pub aggregate: AggregateSeries,
    /// State-averaged C(i,j) at each requested correlation time.
    pub mean_correlations: Vec<(f64, CorrelationMatrix)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub n_sites: usize,
    pub n_excitations: usize,
    pub method: Method,
    pub per_gamma: Vec<GammaResult>,
}

/// RNG for the γ at position `index`: one ChaCha stream per γ.
pub fn gamma_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs every γ of the spec: selection, quenches on a bounded pool, and
/// aggregation. Deterministic for a fixed spec.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    spec.validate()?;
    let graph = spec.device.build()?;
    let n = graph.n_sites();
    let n_exc = spec.n_excitations.unwrap_or(n / 2);
    let basis = SectorBasis::new(n, n_exc)?;
    if spec.method == Method::Exact && basis.dimension() > spec.dense_cap {
        return Err(Error::DimensionOverCap {
            dimension: basis.dimension(),
            cap: spec.dense_cap,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut per_gamma = Vec::with_capacity(spec.gammas.len());
    for (g_idx, &gamma) in spec.gammas.iter().enumerate() {
        let potential = PotentialProfile::stark(gamma);
        let mut rng = gamma_rng(spec.seed, g_idx);
        per_gamma.push(pool.install(|| run_gamma(spec, gamma, &graph, &basis, &potential, &mut rng))?);
    }
    Ok(EnsembleResult {
        n_sites: n,
        n_excitations: n_exc,
        method: spec.method,
        per_gamma,
    })
}

fn provided_selection(
    strings: &[String],
    basis: &SectorBasis,
    graph: &DeviceGraph,
    potential: &PotentialProfile,
) -> Result<Selection> {
    let h = build_hamiltonian(graph, potential, basis)?;
    let (e_gs, e_max) = crate::spectral::extremal_energies(&h)?;
    let mut bitstrings = Vec::new();
    let mut energies = Vec::new();
    for s in strings {
        let b = basis.parse_state(s)?;
        if bitstrings.contains(&b) {
            return Err(Error::InvalidArgument(format!("initial state {s} listed twice")));
        }
        bitstrings.push(b);
        energies.push(product_state_energy(b, potential, graph)?);
    }
    let span = e_max - e_gs;
    Ok(Selection {
        epsilons: energies
            .iter()
            .map(|e| if span > 0.0 { (e - e_gs) / span } else { f64::NAN })
            .collect(),
        bitstrings,
        energies,
        e_gs,
        e_max,
        qualifying: None,
    })
}

fn run_gamma(
    spec: &EnsembleSpec,
    gamma: f64,
    graph: &DeviceGraph,
    basis: &SectorBasis,
    potential: &PotentialProfile,
    rng: &mut ChaCha8Rng,
) -> Result<GammaResult> {
    let n = graph.n_sites();
    let (selection, provided) = match &spec.initial_states {
        Some(list) => (provided_selection(list, basis, graph, potential)?, true),
        None => (
            select_initial_states(
                basis,
                graph,
                potential,
                spec.epsilon_target,
                spec.epsilon_tolerance,
                spec.k,
                rng,
            )?,
            false,
        ),
    };
    let hamming_histogram = if selection.bitstrings.len() > 1 {
        pairwise_hamming_histogram(&selection.bitstrings, n)?
    } else {
        Vec::new()
    };

    let h = build_hamiltonian(graph, potential, basis)?;
    let eig = match spec.method {
        Method::Exact => Some(full_diagonalize_capped(&h, spec.dense_cap)?),
        Method::Krylov => None,
    };
    let propagator = match &eig {
        Some(e) => Propagator::Exact(e),
        None => Propagator::Krylov(spec.krylov),
    };
    let grid = spec.times.grid()?;
    let observers = ObserverSet {
        observables: spec.observables.clone(),
        correlation_times: spec.correlation_times.clone(),
    };

    let raw: Vec<ObservableSeries> = selection
        .bitstrings
        .par_iter()
        .map(|&bits| {
            let psi0 = QuantumState::product(basis, bits)?;
            let mut s = run_quench(&h, &psi0, bits, &grid, &observers, propagator)?;
            s.metadata.seed = Some(spec.seed);
            s.metadata.gamma_mhz = Some(gamma);
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;

    let aggregate = aggregate(&raw)?;
    let mean_correlations = spec
        .correlation_times
        .iter()
        .enumerate()
        .filter_map(|(i, &t)| {
            let mats: Vec<CorrelationMatrix> = raw.iter().map(|s| s.snapshots[i].matrix.clone()).collect();
            CorrelationMatrix::mean(&mats).map(|m| (t, m))
        })
        .collect();

    Ok(GammaResult {
        gamma,
        audit: SelectionAudit {
            selection,
            hamming_histogram,
            provided,
        },
        raw,
        aggregate,
        mean_correlations,
    })
}
