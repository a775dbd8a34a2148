use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-site energies W_j, all in MHz (W/2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PotentialProfile {
    /// Linear tilt, W_j = -j·γ.
    Stark { gamma: f64 },
    /// W_j uniform in [-V, V], drawn from a ChaCha8 stream seeded with `seed`.
    Random { half_width: f64, seed: u64 },
    Explicit { w: Vec<f64> },
}

impl PotentialProfile {
    pub fn stark(gamma: f64) -> Self {
        PotentialProfile::Stark { gamma }
    }

    pub fn zero() -> Self {
        PotentialProfile::Stark { gamma: 0.0 }
    }

    /// Site energies for an `n_sites` device, MHz.
    pub fn site_energies(&self, n_sites: usize) -> Result<Vec<f64>> {
        let w = match self {
            PotentialProfile::Stark { gamma } => {
                (0..n_sites).map(|j| -(j as f64) * gamma).collect()
            }
            PotentialProfile::Random { half_width, seed } => {
                if !(*half_width >= 0.0) {
                    return Err(Error::InvalidPotential(format!(
                        "random half width must be non-negative, got {half_width}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n_sites)
                    .map(|_| rng.random_range(-1.0..=1.0) * half_width)
                    .collect()
            }
            PotentialProfile::Explicit { w } => {
                if w.len() != n_sites {
                    return Err(Error::InvalidPotential(format!(
                        "explicit potential has {} entries for {n_sites} sites",
                        w.len()
                    )));
                }
                w.clone()
            }
        };
        if w.iter().any(|x: &f64| !x.is_finite()) {
            return Err(Error::InvalidPotential("non-finite site energy".into()));
        }
        Ok(w)
    }
}
