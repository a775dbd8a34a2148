//! Draws mid-spectrum product states, audits their energy density against
//! full diagonalization, and prints the pairwise Hamming histogram.

use starkmbl::evolution::eigenvalues;
use starkmbl::model::{build_hamiltonian, format_bits, DeviceGraph, PotentialProfile, SectorBasis};
use starkmbl::protocol::{gamma_rng, pairwise_hamming_histogram, select_initial_states};

fn main() -> starkmbl::Result<()> {
    let n = 12;
    let graph = DeviceGraph::default_ladder(n)?;
    let basis = SectorBasis::new(n, n / 2)?;
    let potential = PotentialProfile::stark(4.0);
    let sel = select_initial_states(&basis, &graph, &potential, 0.5, 0.02, 8, &mut gamma_rng(0, 0))?;
    let v = eigenvalues(&build_hamiltonian(&graph, &potential, &basis)?)?;
    let (lo, hi) = (v[0], v[v.len() - 1]);
    println!("{} of {:?} qualifying states", sel.bitstrings.len(), sel.qualifying);
    for (b, e) in sel.bitstrings.iter().zip(&sel.energies) {
        println!("  {}  ε = {:.4}", format_bits(*b, n), (e - lo) / (hi - lo));
    }
    println!("pairwise Hamming histogram {:?}", pairwise_hamming_histogram(&sel.bitstrings, n)?);
    Ok(())
}
