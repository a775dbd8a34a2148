//! Eigenstate expectation values, their fluctuation scaling, and dipole
//! fragment labels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::levels::{gap_ratios, GapRatio};
use crate::error::{Error, Result};
use crate::evolution::{full_diagonalize_capped, EigenDecomposition};
use crate::model::{
    alternating_bits, build_hamiltonian, build_imbalance_operator, build_normalized_dipole_operator, DeviceGraph,
    PotentialProfile, SectorBasis, SparseOperator,
};
use crate::observables::linear_fit;

/// (ε_α, ⟨α|Ô|α⟩) for every eigenstate, in ascending energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EevTable {
    pub observable: String,
    pub energies: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub values: Vec<f64>,
}

impl EevTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("alpha,energy,epsilon,{}\n", self.observable);
        for a in 0..self.len() {
            let _ = writeln!(out, "{a},{},{},{}", self.energies[a], self.epsilon[a], self.values[a]);
        }
        out
    }

    /// Mean |O_α − O_{α+1}| over neighbours with ε_α in [lo, hi], and the
    /// number of pairs used.
    pub fn mean_adjacent_difference(&self, lo: f64, hi: f64) -> (f64, usize) {
        let diffs: Vec<f64> = (0..self.len().saturating_sub(1))
            .filter(|&a| self.epsilon[a] >= lo && self.epsilon[a] <= hi)
            .map(|a| (self.values[a] - self.values[a + 1]).abs())
            .collect();
        (diffs.iter().sum::<f64>() / diffs.len() as f64, diffs.len())
    }
}

/// EEVs of `op` in the eigenbasis; ε is taken relative to the lowest and
/// highest eigenvalue of the decomposition.
pub fn eev_table(eig: &EigenDecomposition, op: &SparseOperator, name: &str) -> Result<EevTable> {
    let n = eig.dimension();
    if op.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: op.dimension(),
        });
    }
    let e = eig.eigenvalues();
    let (lo, hi) = (e[0], e[n - 1]);
    let width = hi - lo;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |w, a| {
                let v = eig.eigenvector(a);
                op.apply_real_into(v, w);
                v.iter().zip(w.iter()).map(|(x, y)| x * y).sum()
            },
        )
        .collect();
    Ok(EevTable {
        observable: name.to_string(),
        energies: e.to_vec(),
        epsilon: e
            .iter()
            .map(|x| if width > 0.0 { (x - lo) / width } else { 0.0 })
            .collect(),
        values,
    })
}

/// Log-log fit of mean adjacent EEV differences against sector dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EevScaling {
    pub dimensions: Vec<usize>,
    pub mean_difference: Vec<f64>,
    pub pairs: Vec<usize>,
    /// Exponent a in ΔO ∝ 𝒩^a; NaN when degenerate.
    pub exponent: f64,
    pub exponent_err: f64,
    /// All mean differences vanish (or some vanish), so no power law.
    pub degenerate: bool,
}

impl EevScaling {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dimension,mean_difference,pairs\n");
        for k in 0..self.dimensions.len() {
            let _ = writeln!(out, "{},{},{}", self.dimensions[k], self.mean_difference[k], self.pairs[k]);
        }
        let _ = writeln!(out, "# exponent,{},{}", self.exponent, self.exponent_err);
        out
    }
}

/// Fits ΔO ∝ 𝒩^a over at least three tables restricted to ε ∈ [lo, hi].
pub fn eev_fluctuations(tables: &[&EevTable], window: (f64, f64)) -> Result<EevScaling> {
    if tables.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "eev scaling needs at least 3 system sizes, got {}",
            tables.len()
        )));
    }
    let mut dimensions = Vec::new();
    let mut mean_difference = Vec::new();
    let mut pairs = Vec::new();
    for t in tables {
        let (m, c) = t.mean_adjacent_difference(window.0, window.1);
        if c == 0 {
            return Err(Error::InvalidArgument(format!(
                "no eigenstate pairs in ε ∈ [{}, {}] for dimension {}",
                window.0,
                window.1,
                t.len()
            )));
        }
        dimensions.push(t.len());
        mean_difference.push(m);
        pairs.push(c);
    }
    let scale = mean_difference.iter().cloned().fold(0.0, f64::max);
    let degenerate = mean_difference.iter().any(|&m| m <= 1e-14 * scale.max(1e-300));
    let (exponent, exponent_err) = if degenerate {
        (f64::NAN, f64::NAN)
    } else {
        let xs: Vec<f64> = dimensions.iter().map(|&d| (d as f64).ln()).collect();
        let ys: Vec<f64> = mean_difference.iter().map(|m| m.ln()).collect();
        let fit = linear_fit(&xs, &ys)?;
        (fit.slope, fit.slope_err)
    };
    Ok(EevScaling {
        dimensions,
        mean_difference,
        pairs,
        exponent,
        exponent_err,
        degenerate,
    })
}

/// Few-body operators used in size-scaling studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EevObservable {
    /// (1/N²) Σ_j j n_j.
    Dipole,
    /// Generalized imbalance against the alternating pattern.
    Imbalance,
}

impl EevObservable {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_lowercase().as_str() {
            "dipole" => Ok(EevObservable::Dipole),
            "imbalance" => Ok(EevObservable::Imbalance),
            other => Err(Error::InvalidArgument(format!(
                "unknown eev observable '{other}' (expected dipole or imbalance)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EevObservable::Dipole => "dipole",
            EevObservable::Imbalance => "imbalance",
        }
    }

    pub fn operator(&self, basis: &SectorBasis) -> Result<SparseOperator> {
        match self {
            EevObservable::Dipole => Ok(build_normalized_dipole_operator(basis)),
            EevObservable::Imbalance => build_imbalance_operator(alternating_bits(basis.n_sites()), basis),
        }
    }
}

/// Diagonalizes each graph at half filling under `potential` and fits the
/// EEV fluctuation exponent of every observable over ε ∈ `window`.
pub fn eev_size_scan(
    graphs: &[DeviceGraph],
    potential: &PotentialProfile,
    observables: &[EevObservable],
    window: (f64, f64),
    dense_cap: usize,
) -> Result<Vec<(EevObservable, EevScaling)>> {
    let mut tables: Vec<Vec<EevTable>> = vec![Vec::new(); observables.len()];
    for g in graphs {
        let basis = SectorBasis::new(g.n_sites(), g.n_sites() / 2)?;
        let h = build_hamiltonian(g, potential, &basis)?;
        let eig = full_diagonalize_capped(&h, dense_cap)?;
        for (o, obs) in observables.iter().enumerate() {
            tables[o].push(eev_table(&eig, &obs.operator(&basis)?, obs.name())?);
        }
    }
    observables
        .iter()
        .zip(&tables)
        .map(|(obs, t)| Ok((*obs, eev_fluctuations(&t.iter().collect::<Vec<_>>(), window)?)))
        .collect()
}

/// Integer dipole labels per eigenstate; `None` marks unresolved states.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentLabeling {
    pub labels: Vec<Option<i64>>,
    pub fragments: BTreeMap<i64, Vec<usize>>,
    pub tolerance: f64,
}

impl FragmentLabeling {
    pub fn unresolved_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn unresolved_fraction(&self) -> f64 {
        self.unresolved_count() as f64 / self.labels.len().max(1) as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,label\n");
        for (a, l) in self.labels.iter().enumerate() {
            match l {
                Some(d) => writeln!(out, "{a},{d}"),
                None => writeln!(out, "{a},unresolved"),
            }
            .expect("writing to a String");
        }
        out
    }
}

/// Labels each value by its nearest integer when within `tolerance`.
pub fn classify_values(values: &[f64], tolerance: f64) -> FragmentLabeling {
    let labels: Vec<Option<i64>> = values
        .iter()
        .map(|&d| {
            let r = d.round();
            ((d - r).abs() <= tolerance).then_some(r as i64)
        })
        .collect();
    let mut fragments: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (a, l) in labels.iter().enumerate() {
        if let Some(d) = l {
            fragments.entry(*d).or_default().push(a);
        }
    }
    FragmentLabeling {
        labels,
        fragments,
        tolerance,
    }
}

/// Fragment labels from the dipole EEVs ⟨α|d̂|α⟩.
pub fn classify_fragments(eig: &EigenDecomposition, dipole: &SparseOperator, tolerance: f64) -> Result<FragmentLabeling> {
    let t = eev_table(eig, dipole, "dipole")?;
    Ok(classify_values(&t.values, tolerance))
}

/// Gap ratios computed inside each fragment separately and pooled, plus the
/// number dropped as degenerate. ε refers to the full spectrum.
pub fn within_fragment_gap_ratios(eigenvalues: &[f64], labeling: &FragmentLabeling) -> (Vec<GapRatio>, usize) {
    let lo = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pooled = Vec::new();
    let mut dropped = 0;
    for members in labeling.fragments.values() {
        let mut e: Vec<f64> = members.iter().map(|&a| eigenvalues[a]).collect();
        e.sort_by(f64::total_cmp);
        let (r, d) = gap_ratios(&e);
        dropped += d;
        pooled.extend(r.into_iter().map(|(k, r)| GapRatio {
            epsilon: (e[k] - lo) / (hi - lo),
            r,
        }));
    }
    (pooled, dropped)
}
