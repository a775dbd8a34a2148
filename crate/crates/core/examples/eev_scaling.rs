//! Size scaling of eigenstate-to-eigenstate fluctuations of the normalized
//! dipole and the imbalance in the central energy window.

use starkmbl::model::{DeviceGraph, PotentialProfile};
use starkmbl::spectral::{eev_size_scan, EevObservable, CENTRAL_WINDOW};

fn main() -> starkmbl::Result<()> {
    let graphs = [8, 10, 12].map(|n| DeviceGraph::default_ladder(n).unwrap());
    let observables = [EevObservable::Dipole, EevObservable::Imbalance];
    for gamma in [1.0, 12.0] {
        let scan = eev_size_scan(&graphs, &PotentialProfile::stark(gamma), &observables, CENTRAL_WINDOW, 20_000)?;
        for (obs, s) in scan {
            println!(
                "γ/2π = {gamma:>4} MHz {:<9} ΔO = {:?}  exponent {:.3} ± {:.3}",
                obs.name(),
                s.mean_difference.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>(),
                s.exponent,
                s.exponent_err
            );
        }
    }
    Ok(())
}
