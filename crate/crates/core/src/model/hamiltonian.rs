//! Sector-restricted operators of the excitation-conserving XY model
//!
//! H = Σ_{(i,j)} J_ij (σ⁺_i σ⁻_j + σ⁻_i σ⁺_j) + Σ_j W_j σ⁺_j σ⁻_j
//!
//! Couplings and potentials come in as frequency/2π in MHz and are stored
//! as angular frequency in rad/μs.

use std::f64::consts::TAU;

use super::basis::SectorBasis;
use super::graph::DeviceGraph;
use super::operator::SparseOperator;
use super::potential::PotentialProfile;
use crate::error::{Error, Result};

/// MHz (f = ω/2π) to rad/μs.
pub const MHZ_TO_ANGULAR: f64 = TAU;

/// Phase accumulated by angular frequency `omega` (rad/μs) over `t_ns`.
#[inline]
pub fn phase(omega: f64, t_ns: f64) -> f64 {
    omega * t_ns * 1e-3
}

pub fn build_hamiltonian(
    graph: &DeviceGraph,
    potential: &PotentialProfile,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    if graph.n_sites() != basis.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_sites(),
            found: graph.n_sites(),
        });
    }
    let w: Vec<f64> = potential
        .site_energies(graph.n_sites())?
        .into_iter()
        .map(|x| x * MHZ_TO_ANGULAR)
        .collect();
    let hops: Vec<(u64, f64)> = graph
        .edges()
        .iter()
        .map(|e| ((1u64 << e.i) | (1u64 << e.j), e.coupling * MHZ_TO_ANGULAR))
        .collect();

    let dim = basis.dimension();
    let mut diagonal = Vec::with_capacity(dim);
    let mut rows = Vec::with_capacity(dim);
    for s in basis.states() {
        diagonal.push(occupied_sum(s, &w));
        let row: Vec<(usize, f64)> = hops
            .iter()
            .filter(|(mask, _)| (s & mask).count_ones() == 1)
            .map(|&(mask, j)| (basis.rank_unchecked(s ^ mask), j))
            .collect();
        rows.push(row);
    }
    SparseOperator::from_rows(diagonal, rows)
}

fn occupied_sum(mut bits: u64, weights: &[f64]) -> f64 {
    let mut acc = 0.0;
    while bits != 0 {
        acc += weights[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    acc
}

/// ⟨s|H|s⟩ for a product state, in rad/μs. The hopping term has no diagonal
/// part, so only the potential contributes.
pub fn product_state_energy(bits: u64, potential: &PotentialProfile, graph: &DeviceGraph) -> Result<f64> {
    let n = graph.n_sites();
    if n < 64 && bits >> n != 0 {
        return Err(Error::InvalidArgument(format!("bitstring has bits beyond site {}", n - 1)));
    }
    let w = potential.site_energies(n)?;
    Ok(occupied_sum(bits, &w) * MHZ_TO_ANGULAR)
}

/// Product-state energies for a whole sector, reusing one potential
/// expansion.
pub fn product_state_energies(basis: &SectorBasis, potential: &PotentialProfile) -> Result<Vec<f64>> {
    let w: Vec<f64> = potential
        .site_energies(basis.n_sites())?
        .into_iter()
        .map(|x| x * MHZ_TO_ANGULAR)
        .collect();
    Ok(basis.states().map(|s| occupied_sum(s, &w)).collect())
}

/// Diagonal dipole operator d̂ = Σ_j j n̂_j.
pub fn build_dipole_operator(basis: &SectorBasis) -> SparseOperator {
    let weights: Vec<f64> = (0..basis.n_sites()).map(|j| j as f64).collect();
    SparseOperator::from_diagonal(basis.states().map(|s| occupied_sum(s, &weights)).collect())
}

/// (1/N²) d̂, the size-normalized dipole.
pub fn build_normalized_dipole_operator(basis: &SectorBasis) -> SparseOperator {
    let n = basis.n_sites() as f64;
    build_dipole_operator(basis).scaled(1.0 / (n * n))
}

/// Site weights λ_i of the generalized imbalance: +1/N_exc on sites excited
/// in `initial`, -1/N_gnd elsewhere.
pub fn imbalance_weights(initial: u64, n_sites: usize) -> Result<Vec<f64>> {
    let excited = (0..n_sites).filter(|&j| initial >> j & 1 == 1).count();
    if excited == 0 || excited == n_sites || (n_sites < 64 && initial >> n_sites != 0) {
        return Err(Error::ImbalanceUndefined { excited, n_sites });
    }
    let ground = n_sites - excited;
    Ok((0..n_sites)
        .map(|j| {
            if initial >> j & 1 == 1 {
                1.0 / excited as f64
            } else {
                -1.0 / ground as f64
            }
        })
        .collect())
}

/// Diagonal generalized-imbalance operator relative to `initial`.
pub fn build_imbalance_operator(initial: u64, basis: &SectorBasis) -> Result<SparseOperator> {
    basis.check(initial)?;
    let lambda = imbalance_weights(initial, basis.n_sites())?;
    Ok(SparseOperator::from_diagonal(
        basis.states().map(|s| occupied_sum(s, &lambda)).collect(),
    ))
}

/// Néel-like reference pattern with even sites excited.
pub fn alternating_bits(n_sites: usize) -> u64 {
    (0..n_sites).step_by(2).fold(0u64, |acc, j| acc | 1 << j)
}
