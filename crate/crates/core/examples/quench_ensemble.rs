//! Ensemble quench from mid-spectrum product states on a 12-qubit ladder:
//! Hamming distance, imbalance and QFI at the final time for three tilts.

use starkmbl::evolution::Observable;
use starkmbl::protocol::{run_ensemble, DeviceSpec, EnsembleSpec, TimeSpec};

fn main() -> starkmbl::Result<()> {
    let mut spec = EnsembleSpec::new(DeviceSpec::ladder(12), vec![1.0, 4.0, 8.0]);
    spec.k = 8;
    spec.seed = 1;
    spec.times = TimeSpec::Uniform { t_max: 500.0, dt: 25.0 };
    spec.observables = vec![Observable::Hd, Observable::Imbalance, Observable::Qfi];
    let result = run_ensemble(&spec)?;
    println!("γ/2π (MHz)   HD        imbalance   QFI      (t = 500 ns, k = {})", spec.k);
    for g in &result.per_gamma {
        let at = |name| g.aggregate.mean_at(name, 500.0).unwrap_or(f64::NAN);
        println!("{:>8}     {:.3}     {:.3}       {:.3}", g.gamma, at("hd"), at("imbalance"), at("qfi"));
    }
    Ok(())
}
