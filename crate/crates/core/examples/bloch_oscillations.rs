//! Single-state dynamics at a strong tilt and the site-averaged Fourier
//! amplitude of ⟨σz⟩, which peaks at the tilt frequency and its harmonic.

use starkmbl::evolution::{run_quench, KrylovConfig, Observable, ObserverSet, Propagator, TimeGrid};
use starkmbl::model::{alternating_bits, build_hamiltonian, DeviceGraph, PotentialProfile, QuantumState, SectorBasis};
use starkmbl::observables::half_open_spectrum;

fn main() -> starkmbl::Result<()> {
    let n = 12;
    let gamma = 16.0;
    let bits = alternating_bits(n);
    let basis = SectorBasis::new(n, n / 2)?;
    let h = build_hamiltonian(&DeviceGraph::default_ladder(n)?, &PotentialProfile::stark(gamma), &basis)?;
    let psi0 = QuantumState::product(&basis, bits)?;
    let grid = TimeGrid::uniform(1000.0, 5.0)?;
    let series = run_quench(
        &h,
        &psi0,
        bits,
        &grid,
        &ObserverSet::new([Observable::SigmaZ]),
        Propagator::Krylov(KrylovConfig::default()),
    )?;
    let spectrum = half_open_spectrum(&series.times, &series.site_columns("sz"))?;
    println!("resolution {} MHz; strongest local maxima:", spectrum.resolution);
    for k in spectrum.peaks().into_iter().take(5) {
        println!("  {:>5} MHz  amplitude {:.4}", spectrum.frequencies[k], spectrum.mean_amplitude[k]);
    }
    Ok(())
}
