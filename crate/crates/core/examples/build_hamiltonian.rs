//! Builds the half-filled sector of a 12-qubit ladder, checks a few basis
//! round-trips, and prints the spectral range for two tilts.

use starkmbl::evolution::eigenvalues;
use starkmbl::model::{build_hamiltonian, format_bits, DeviceGraph, PotentialProfile, SectorBasis};

fn main() -> starkmbl::Result<()> {
    let n = 12;
    let graph = DeviceGraph::default_ladder(n)?;
    let basis = SectorBasis::new(n, n / 2)?;
    println!("N = {n}, {} couplings, mean J/2π = {:.3} MHz", graph.edges().len(), graph.mean_coupling());
    println!("sector dimension {}", basis.dimension());
    for idx in [0, 1, basis.dimension() - 1] {
        let bits = basis.unrank(idx)?;
        println!("  index {idx:>3} <-> {}", format_bits(bits, n));
    }
    for gamma in [0.0, 8.0] {
        let h = build_hamiltonian(&graph, &PotentialProfile::stark(gamma), &basis)?;
        let v = eigenvalues(&h)?;
        println!(
            "γ/2π = {gamma} MHz: nnz {}, E in [{:.2}, {:.2}] rad/μs",
            h.nnz(),
            v[0],
            v[v.len() - 1]
        );
    }
    Ok(())
}
