//! Energy-window selection of initial product states.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::hamiltonian::product_state_energies;
use crate::model::{build_hamiltonian, format_bits, DeviceGraph, PotentialProfile, SectorBasis};
use crate::spectral::extremal_energies;

/// Sectors up to this size are enumerated; larger ones are sampled.
pub const ENUMERATION_LIMIT: usize = 1_000_000;
/// Proposal cap of the rejection sampler.
pub const MAX_PROPOSALS: usize = 10_000_000;

/// Outcome of [`select_initial_states`].
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub bitstrings: Vec<u64>,
    pub epsilons: Vec<f64>,
    pub energies: Vec<f64>,
    pub e_gs: f64,
    pub e_max: f64,
    /// Number of qualifying sector states; known only when enumerated.
    pub qualifying: Option<usize>,
}

impl Selection {
    pub fn to_csv(&self, n_sites: usize) -> String {
        let mut out = String::from("index,bitstring,energy,epsilon\n");
        for (i, b) in self.bitstrings.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{},{},{}",
                format_bits(*b, n_sites),
                self.energies[i],
                self.epsilons[i]
            );
        }
        out
    }
}

/// Picks `k` distinct product states with ε within `tolerance` of `target`,
/// using Lanczos extremes of H for the energy scale.
pub fn select_initial_states<R: Rng + ?Sized>(
    basis: &SectorBasis,
    graph: &DeviceGraph,
    potential: &PotentialProfile,
    target: f64,
    tolerance: f64,
    k: usize,
    rng: &mut R,
) -> Result<Selection> {
    let h = build_hamiltonian(graph, potential, basis)?;
    let extremes = extremal_energies(&h)?;
    select_with_extremes(basis, potential, extremes, target, tolerance, k, rng)
}

/// As [`select_initial_states`] with known (E_GS, E_max).
pub fn select_with_extremes<R: Rng + ?Sized>(
    basis: &SectorBasis,
    potential: &PotentialProfile,
    (e_gs, e_max): (f64, f64),
    target: f64,
    tolerance: f64,
    k: usize,
    rng: &mut R,
) -> Result<Selection> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !(e_max > e_gs) {
        return Err(Error::DegenerateSpectrum { e_gs, e_max });
    }
    let eps = |e: f64| (e - e_gs) / (e_max - e_gs);
    let inside = |e: f64| (eps(e) - target).abs() <= tolerance;

    let (indices, qualifying) = if basis.dimension() <= ENUMERATION_LIMIT {
        let energies = product_state_energies(basis, potential)?;
        let pool: Vec<usize> = (0..energies.len()).filter(|&r| inside(energies[r])).collect();
        if pool.len() < k {
            return Err(Error::InsufficientStates {
                qualifying: pool.len(),
                requested: k,
            });
        }
        let picks = rand::seq::index::sample(rng, pool.len(), k);
        (picks.into_iter().map(|p| pool[p]).collect::<Vec<_>>(), Some(pool.len()))
    } else {
        let w = potential.site_energies(basis.n_sites())?;
        let mut seen = HashSet::new();
        let mut chosen = Vec::with_capacity(k);
        for _ in 0..MAX_PROPOSALS {
            if chosen.len() == k {
                break;
            }
            let r = rng.random_range(0..basis.dimension());
            if seen.contains(&r) {
                continue;
            }
            let bits = basis.unrank(r)?;
            let e: f64 = (0..basis.n_sites())
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| w[j] * crate::model::MHZ_TO_ANGULAR)
                .sum();
            if inside(e) {
                seen.insert(r);
                chosen.push(r);
            }
        }
        if chosen.len() < k {
            return Err(Error::InsufficientStates {
                qualifying: chosen.len(),
                requested: k,
            });
        }
        (chosen, None)
    };

    let w = potential.site_energies(basis.n_sites())?;
    let mut bitstrings = Vec::with_capacity(k);
    let mut energies = Vec::with_capacity(k);
    for &r in &indices {
        let bits = basis.unrank(r)?;
        let e: f64 = (0..basis.n_sites())
            .filter(|j| bits >> j & 1 == 1)
            .map(|j| w[j] * crate::model::MHZ_TO_ANGULAR)
            .sum();
        bitstrings.push(bits);
        energies.push(e);
    }
    Ok(Selection {
        epsilons: energies.iter().map(|&e| eps(e)).collect(),
        bitstrings,
        energies,
        e_gs,
        e_max,
        qualifying,
    })
}

/// Counts of popcount(a ⊕ b) over unordered pairs; index = distance,
/// length n_sites + 1.
pub fn pairwise_hamming_histogram(bitstrings: &[u64], n_sites: usize) -> Result<Vec<usize>> {
    if bitstrings.len() < 2 {
        return Err(Error::InvalidArgument("need at least two states for pair distances".into()));
    }
    let mut counts = vec![0usize; n_sites + 1];
    for (a, x) in bitstrings.iter().enumerate() {
        for y in &bitstrings[a + 1..] {
            let d = (x ^ y).count_ones() as usize;
            if d > n_sites {
                return Err(Error::InvalidArgument(format!("bitstrings exceed {n_sites} sites")));
            }
            counts[d] += 1;
        }
    }
    Ok(counts)
}

pub fn histogram_csv(counts: &[usize]) -> String {
    let mut out = String::from("distance,count\n");
    for (d, c) in counts.iter().enumerate() {
        let _ = writeln!(out, "{d},{c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn histogram_basics() {
        assert_eq!(pairwise_hamming_histogram(&[0b1100, 0b1100], 4).unwrap()[0], 1);
        let h = pairwise_hamming_histogram(&[0x00ff, 0xff00], 16).unwrap();
        assert_eq!(h[16], 1);
        assert!(pairwise_hamming_histogram(&[1], 4).is_err());
    }

    #[test]
    fn wide_window_accepts_any_state() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let g = DeviceGraph::default_ladder(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = select_initial_states(&basis, &g, &PotentialProfile::stark(2.0), 0.5, 0.5, 1, &mut rng).unwrap();
        assert_eq!(s.bitstrings.len(), 1);
        assert_eq!(s.qualifying, Some(20));
    }

    #[test]
    fn zero_potential_puts_every_state_at_zero_energy() {
        let basis = SectorBasis::new(6, 3).unwrap();
        let g = DeviceGraph::default_ladder(6).unwrap();
        let h = build_hamiltonian(&g, &PotentialProfile::zero(), &basis).unwrap();
        let (lo, hi) = extremal_energies(&h).unwrap();
        let eps0 = -lo / (hi - lo);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let near = select_initial_states(&basis, &g, &PotentialProfile::zero(), eps0, 1e-6, 20, &mut rng).unwrap();
        assert_eq!(near.qualifying, Some(20));
        let far = eps0 + 0.2;
        let err = select_initial_states(&basis, &g, &PotentialProfile::zero(), far, 0.01, 1, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InsufficientStates { qualifying: 0, requested: 1 }));
    }

    #[test]
    fn too_many_requested() {
        let basis = SectorBasis::new(4, 2).unwrap();
        let g = DeviceGraph::default_ladder(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = select_initial_states(&basis, &g, &PotentialProfile::stark(1.0), 0.5, 0.5, 7, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InsufficientStates { qualifying: 6, requested: 7 }));
    }
}
