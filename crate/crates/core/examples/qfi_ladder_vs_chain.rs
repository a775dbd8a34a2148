//! Slow logarithmic QFI growth on the ladder versus the nearest-neighbour
//! chain formed by every other ladder site, both at a strong tilt.

use starkmbl::evolution::Observable;
use starkmbl::observables::linear_fit;
use starkmbl::protocol::{alternating_sites, run_ensemble, DeviceSpec, EnsembleSpec, TimeSpec};

fn log_slope(device: DeviceSpec) -> starkmbl::Result<(f64, f64)> {
    let mut spec = EnsembleSpec::new(device, vec![8.0]);
    spec.k = 6;
    spec.times = TimeSpec::Uniform { t_max: 1000.0, dt: 20.0 };
    spec.observables = vec![Observable::Qfi];
    let r = run_ensemble(&spec)?;
    let agg = &r.per_gamma[0].aggregate;
    let qfi = &agg.column("qfi").expect("requested").mean;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        agg.times.iter().zip(qfi).filter(|(t, _)| **t >= 100.0).map(|(t, q)| (t.ln(), *q)).unzip();
    let fit = linear_fit(&xs, &ys)?;
    Ok((fit.slope, fit.slope_err))
}

fn main() -> starkmbl::Result<()> {
    let (s, e) = log_slope(DeviceSpec::ladder(12))?;
    println!("ladder: dF/dln t = {s:.4} ± {e:.4}");
    let chain = DeviceSpec::Ladder { n_sites: 24, params: Default::default(), sites: Some(alternating_sites(24)) };
    let (s, e) = log_slope(chain)?;
    println!("chain:  dF/dln t = {s:.4} ± {e:.4}");
    Ok(())
}
