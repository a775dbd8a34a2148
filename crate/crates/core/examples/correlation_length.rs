//! Distance-binned connected correlations after a quench and the fitted
//! correlation length for a weak and a strong tilt.

use starkmbl::evolution::Observable;
use starkmbl::observables::{distance_binned_correlations, fit_correlation_length};
use starkmbl::protocol::{run_ensemble, DeviceSpec, EnsembleSpec, TimeSpec};

fn main() -> starkmbl::Result<()> {
    let mut spec = EnsembleSpec::new(DeviceSpec::ladder(12), vec![1.0, 8.0]);
    spec.k = 6;
    spec.times = TimeSpec::Uniform { t_max: 500.0, dt: 100.0 };
    spec.observables = vec![Observable::Imbalance];
    spec.correlation_times = vec![500.0];
    for g in run_ensemble(&spec)?.per_gamma {
        let (t, c) = &g.mean_correlations[0];
        let bins = distance_binned_correlations(c);
        let fit = fit_correlation_length(&bins)?;
        println!("γ/2π = {} MHz, t = {t} ns", g.gamma);
        for b in bins.iter().take(6) {
            println!("  d = {:>2}: C = {:+.4}", b.distance, b.mean);
        }
        let note = if fit.xi_at_bound { " (at bound: lower limit)" } else { "" };
        println!("  ξ = {:.2} ± {:.2} sites{note}", fit.xi, fit.xi_err);
    }
    Ok(())
}
