use proptest::prelude::*;

use num_complex::Complex64;
use starkmbl::evolution::{evolve_krylov, KrylovConfig};
use starkmbl::model::{
    build_hamiltonian, format_bits, parse_bits, DeviceGraph, PotentialProfile, QuantumState, SectorBasis,
};
use starkmbl::observables::{generalized_imbalance, hamming_distance, quantum_fisher_information, site_densities};
use starkmbl::spectral::gap_ratios;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sector() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=14).prop_flat_map(|n| (Just(n), 0..=n))
}

fn state(basis: &SectorBasis, re: &[f64], im: &[f64]) -> QuantumState {
    let amps: Vec<Complex64> = (0..basis.dimension())
        .map(|i| Complex64::new(re[i % re.len()] + 1e-3, im[(3 * i) % im.len()]))
        .collect();
    let mut psi = QuantumState::from_amplitudes(basis, amps).unwrap();
    psi.normalize();
    psi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_and_unrank_are_inverse((n, k) in sector(), pick in any::<u64>()) {
        let basis = SectorBasis::new(n, k).unwrap();
        prop_assert_eq!(basis.dimension() as u64, binomial(n as u64, k as u64));
        let idx = (pick % basis.dimension() as u64) as usize;
        let bits = basis.unrank(idx).unwrap();
        prop_assert_eq!(bits.count_ones() as usize, k);
        prop_assert!(bits < 1 << n);
        prop_assert_eq!(basis.rank(bits).unwrap(), idx);
        prop_assert_eq!(parse_bits(&format_bits(bits, n)).unwrap(), bits);
    }

    #[test]
    fn sector_states_are_sorted_and_complete((n, k) in (1usize..=10).prop_flat_map(|n| (Just(n), 0..=n))) {
        let basis = SectorBasis::new(n, k).unwrap();
        let listed: Vec<u64> = basis.states().collect();
        let brute: Vec<u64> = (0u64..1 << n).filter(|b| b.count_ones() as usize == k).collect();
        prop_assert_eq!(listed, brute);
    }

    #[test]
    fn gap_ratios_ignore_shift_and_scale(
        mut levels in prop::collection::vec(-50.0f64..50.0, 3..60),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        levels.sort_by(f64::total_cmp);
        let mapped: Vec<f64> = levels.iter().map(|x| scale * x + shift).collect();
        let (a, da) = gap_ratios(&levels);
        let (b, db) = gap_ratios(&mapped);
        prop_assert_eq!(da, db);
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.0, y.0);
            prop_assert!((x.1 - y.1).abs() < 1e-6);
            prop_assert!((0.0..=1.0).contains(&x.1));
        }
    }

    #[test]
    fn energy_width_is_shift_invariant(
        gamma in -10.0f64..10.0,
        shift in -100.0f64..100.0,
        re in prop::collection::vec(-1.0f64..1.0, 1..30),
        im in prop::collection::vec(-1.0f64..1.0, 1..30),
    ) {
        let graph = DeviceGraph::default_ladder(6).unwrap();
        let basis = SectorBasis::new(6, 3).unwrap();
        let h = build_hamiltonian(&graph, &PotentialProfile::stark(gamma), &basis).unwrap();
        let psi = state(&basis, &re, &im);
        let a = starkmbl::spectral::initial_state_width(&h, &psi).unwrap();
        let b = starkmbl::spectral::initial_state_width(&h.shifted(shift), &psi).unwrap();
        prop_assert!((a - b).abs() < 1e-8 * (1.0 + a));
    }

    #[test]
    fn krylov_conserves_norm_and_excitations(
        gamma in 0.0f64..20.0,
        t in 0.1f64..200.0,
        re in prop::collection::vec(-1.0f64..1.0, 1..30),
        im in prop::collection::vec(-1.0f64..1.0, 1..30),
    ) {
        let graph = DeviceGraph::default_ladder(8).unwrap();
        let basis = SectorBasis::new(8, 3).unwrap();
        let h = build_hamiltonian(&graph, &PotentialProfile::stark(gamma), &basis).unwrap();
        let psi = state(&basis, &re, &im);
        let (out, diag) = evolve_krylov(&h, &psi, t, &KrylovConfig::default()).unwrap();
        prop_assert!(diag.norm_drift < 1e-10);
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let total: f64 = site_densities(&out).iter().sum();
        prop_assert!((total - 3.0).abs() < 1e-10);
        let e0 = h.expectation(psi.amplitudes());
        prop_assert!((h.expectation(out.amplitudes()) - e0).abs() < 1e-8 * (1.0 + e0.abs()));
    }

    #[test]
    fn observables_stay_in_range(
        pick in any::<u64>(),
        re in prop::collection::vec(-1.0f64..1.0, 1..30),
        im in prop::collection::vec(-1.0f64..1.0, 1..30),
    ) {
        let basis = SectorBasis::new(8, 4).unwrap();
        let initial = basis.unrank((pick % 70) as usize).unwrap();
        let psi = state(&basis, &re, &im);
        let hd = hamming_distance(&psi, initial);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&hd));
        let imb = generalized_imbalance(&psi, initial).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&imb));
        prop_assert!(quantum_fisher_information(&psi, initial).unwrap() >= -1e-12);
        let product = QuantumState::product(&basis, initial).unwrap();
        prop_assert!((generalized_imbalance(&product, initial).unwrap() - 1.0).abs() < 1e-14);
        prop_assert!(hamming_distance(&product, initial).abs() < 1e-14);
        prop_assert!(quantum_fisher_information(&product, initial).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hamming_and_imbalance_are_linked_at_half_filling(
        half in 1usize..=5,
        pick in any::<u64>(),
        re in prop::collection::vec(-1.0f64..1.0, 1..30),
        im in prop::collection::vec(-1.0f64..1.0, 1..30),
    ) {
        let n = 2 * half;
        let basis = SectorBasis::new(n, half).unwrap();
        let initial = basis.unrank((pick % basis.dimension() as u64) as usize).unwrap();
        let psi = state(&basis, &re, &im);
        let hd = hamming_distance(&psi, initial);
        let imb = generalized_imbalance(&psi, initial).unwrap();
        prop_assert!((hd - (1.0 - imb) / 2.0).abs() < 1e-12);
    }
}
