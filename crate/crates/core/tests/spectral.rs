use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use starkmbl::evolution::{eigenvalues, full_diagonalize};
use starkmbl::model::{
    alternating_bits, build_dipole_operator, build_hamiltonian, DeviceGraph, PotentialProfile,
    QuantumState, SectorBasis, SparseOperator,
};
use starkmbl::spectral::{
    classify_fragments, eev_fluctuations, eev_table, extremal_energies, extremal_energies_with,
    gap_ratio_statistics, initial_state_width, overlap_distribution, within_fragment_gap_ratios,
    EnergyWindows, LanczosConfig, GOE_MEAN_RATIO, POISSON_MEAN_RATIO,
};

fn ladder_h(n: usize, gamma: f64) -> (SectorBasis, SparseOperator) {
    let graph = DeviceGraph::default_ladder(n).unwrap();
    let basis = SectorBasis::new(n, n / 2).unwrap();
    let h = build_hamiltonian(&graph, &PotentialProfile::stark(gamma), &basis).unwrap();
    (basis, h)
}

#[test]
fn lanczos_extremes_match_full_spectrum() {
    for gamma in [0.5, 6.0] {
        let (_, h) = ladder_h(12, gamma);
        let v = eigenvalues(&h).unwrap();
        let (lo, hi) = extremal_energies(&h).unwrap();
        let scale = h.norm_inf();
        assert!((lo - v[0]).abs() <= 1e-8 * scale, "ground {lo} vs {}", v[0]);
        assert!((hi - v[v.len() - 1]).abs() <= 1e-8 * scale);
        let e = extremal_energies_with(&h, &LanczosConfig::default()).unwrap();
        assert!(e.ground_residual <= 1e-8 * scale && e.max_residual <= 1e-8 * scale);
    }
}

fn goe_levels(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut rows = vec![Vec::new(); dim];
    let mut diag = vec![0.0; dim];
    for i in 0..dim {
        diag[i] = 2f64.sqrt() * rng.sample::<f64, _>(StandardNormal);
        for j in i + 1..dim {
            let x: f64 = rng.sample(StandardNormal);
            rows[i].push((j, x));
            rows[j].push((i, x));
        }
    }
    eigenvalues(&SparseOperator::from_rows(diag, rows).unwrap()).unwrap()
}

#[test]
fn sampled_ensembles_reproduce_reference_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let windows = EnergyWindows::default();
    let mut goe = Vec::new();
    for _ in 0..4 {
        let s = gap_ratio_statistics(&goe_levels(400, &mut rng), None, &windows, 20).unwrap();
        goe.push(s.mean_in(0.3, 0.7).0);
    }
    let goe_mean = goe.iter().sum::<f64>() / goe.len() as f64;
    assert!((goe_mean - GOE_MEAN_RATIO).abs() < 0.015, "GOE sample mean {goe_mean}");

    let mut levels: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
    levels.sort_by(f64::total_cmp);
    let s = gap_ratio_statistics(&levels, None, &windows, 20).unwrap();
    assert!((s.mean() - POISSON_MEAN_RATIO).abs() < 0.01, "Poisson sample mean {}", s.mean());
}

#[test]
fn gap_ratios_are_invariant_under_affine_maps() {
    let (_, h) = ladder_h(10, 1.5);
    let v = eigenvalues(&h).unwrap();
    let w = EnergyWindows::default();
    let a = gap_ratio_statistics(&v, None, &w, 30).unwrap();
    let mapped: Vec<f64> = v.iter().map(|x| 3.5 * x - 120.0).collect();
    let b = gap_ratio_statistics(&mapped, None, &w, 30).unwrap();
    assert_eq!(a.ratios.len(), b.ratios.len());
    for (x, y) in a.ratios.iter().zip(&b.ratios) {
        assert!((x.r - y.r).abs() < 1e-9 && (x.epsilon - y.epsilon).abs() < 1e-9);
    }
}

#[test]
fn energy_width_routes_agree_and_overlaps_sum_to_one() {
    let (basis, h) = ladder_h(10, 3.0);
    let eig = full_diagonalize(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..5 {
        let psi = if k == 0 {
            QuantumState::product(&basis, alternating_bits(10)).unwrap()
        } else {
            QuantumState::random(&basis, &mut rng)
        };
        let dist = overlap_distribution(&psi, &eig).unwrap();
        assert!((dist.total() - 1.0).abs() < 1e-12);
        let windowed: f64 = dist.windowed_sums(&EnergyWindows { lo: 0.0, hi: 1.0, width: 0.1 }).iter().map(|w| w.2).sum();
        assert!((windowed - 1.0).abs() < 1e-12);
        assert!((initial_state_width(&h, &psi).unwrap() - dist.energy_width()).abs() < 1e-9);
    }
}

#[test]
fn strong_tilt_resolves_integer_dipole_fragments() {
    let (basis, h) = ladder_h(10, 60.0);
    let eig = full_diagonalize(&h).unwrap();
    let dipole = build_dipole_operator(&basis);
    let labels = classify_fragments(&eig, &dipole, 0.1).unwrap();
    assert!(labels.unresolved_fraction() < 0.05, "unresolved {}", labels.unresolved_fraction());
    // every resolved label is an attainable dipole value of the sector
    let attainable: Vec<i64> = basis
        .states()
        .map(|b| (0..10).filter(|j| b >> j & 1 == 1).sum::<usize>() as i64)
        .collect();
    assert!(labels.fragments.keys().all(|d| attainable.contains(d)));
    let (ratios, _) = within_fragment_gap_ratios(eig.eigenvalues(), &labels);
    assert!(!ratios.is_empty());
    assert!(ratios.iter().all(|g| (0.0..=1.0).contains(&g.r)));

    // weakly tilted: dipole values are smeared between integers
    let (_, h) = ladder_h(10, 0.5);
    let weak = classify_fragments(&full_diagonalize(&h).unwrap(), &dipole, 0.1).unwrap();
    assert!(weak.unresolved_fraction() > 0.5);
}

#[test]
fn eev_fluctuations_shrink_with_size_when_ergodic() {
    let tables: Vec<_> = [8, 10, 12]
        .iter()
        .map(|&n| {
            let (basis, h) = ladder_h(n, 1.0);
            let eig = full_diagonalize(&h).unwrap();
            let op = starkmbl::spectral::EevObservable::Imbalance.operator(&basis).unwrap();
            eev_table(&eig, &op, "imbalance").unwrap()
        })
        .collect();
    let refs: Vec<_> = tables.iter().collect();
    let scaling = eev_fluctuations(&refs, (0.4, 0.6)).unwrap();
    assert!(scaling.mean_difference.windows(2).all(|w| w[1] < w[0]));
    assert!(scaling.exponent < -0.2, "exponent {}", scaling.exponent);
    for t in &tables {
        assert!(t.values.iter().all(|v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(v)));
    }
}
