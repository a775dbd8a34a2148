use starkmbl::evolution::{eigenvalues, Method, Observable};
use starkmbl::model::{build_hamiltonian, format_bits, DeviceGraph, PotentialProfile, SectorBasis};
use starkmbl::protocol::{
    alternating_sites, extract_subgraph, gamma_rng, pairwise_hamming_histogram, run_ensemble,
    select_initial_states, DeviceSpec, EnsembleSpec, TimeSpec,
};
use starkmbl::Error;

fn small_spec() -> EnsembleSpec {
    let mut spec = EnsembleSpec::new(DeviceSpec::ladder(8), vec![2.0, 9.0]);
    spec.k = 3;
    spec.seed = 21;
    spec.times = TimeSpec::Uniform { t_max: 100.0, dt: 20.0 };
    spec.observables = vec![Observable::Hd, Observable::Imbalance, Observable::Qfi, Observable::Excitations];
    spec
}

#[test]
fn ensemble_runs_are_deterministic_across_thread_counts() {
    let mut a = small_spec();
    a.threads = Some(1);
    let mut b = small_spec();
    b.threads = Some(3);
    let ra = run_ensemble(&a).unwrap();
    let rb = run_ensemble(&b).unwrap();
    for (ga, gb) in ra.per_gamma.iter().zip(&rb.per_gamma) {
        assert_eq!(ga.aggregate.to_csv(), gb.aggregate.to_csv());
        assert_eq!(ga.audit.selection, gb.audit.selection);
    }
    let mut c = small_spec();
    c.seed = 22;
    let rc = run_ensemble(&c).unwrap();
    assert_ne!(ra.per_gamma[0].audit.selection.bitstrings, rc.per_gamma[0].audit.selection.bitstrings);
}

#[test]
fn aggregate_mean_and_sem_follow_sample_formulas() {
    let r = run_ensemble(&small_spec()).unwrap();
    let g = &r.per_gamma[0];
    let k = g.raw.len() as f64;
    let agg = g.aggregate.column("hd").unwrap();
    for t in 0..g.aggregate.times.len() {
        let xs: Vec<f64> = g.raw.iter().map(|s| s.column("hd").unwrap()[t]).collect();
        let mean = xs.iter().sum::<f64>() / k;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        assert!((agg.mean[t] - mean).abs() < 1e-14);
        assert!((agg.sem[t] - (var / k).sqrt()).abs() < 1e-14);
    }
    let exc = g.aggregate.column("excitations").unwrap();
    assert!(exc.mean.iter().all(|x| (x - 4.0).abs() < 1e-10));
}

#[test]
fn single_state_ensemble_has_undefined_sem() {
    let mut spec = small_spec();
    spec.k = 1;
    let r = run_ensemble(&spec).unwrap();
    let g = &r.per_gamma[0];
    assert!(!g.aggregate.sem_defined);
    assert!(g.aggregate.column("hd").unwrap().sem.iter().all(|s| s.is_nan()));
    assert!(g.audit.hamming_histogram.is_empty());
}

#[test]
fn provided_states_are_used_verbatim_and_duplicates_rejected() {
    let mut spec = small_spec();
    spec.initial_states = Some(vec!["01010101".into(), "00110011".into()]);
    let r = run_ensemble(&spec).unwrap();
    let sel = &r.per_gamma[1].audit.selection;
    assert!(r.per_gamma[1].audit.provided);
    assert_eq!(sel.bitstrings, vec![0b01010101, 0b00110011]);

    spec.initial_states = Some(vec!["01010101".into(), "01010101".into()]);
    assert!(matches!(run_ensemble(&spec), Err(Error::InvalidArgument(_))));
    spec.initial_states = Some(vec!["01110101".into()]);
    assert!(matches!(run_ensemble(&spec), Err(Error::WrongPopcount { .. })));
}

#[test]
fn exact_method_respects_dense_cap() {
    let mut spec = small_spec();
    spec.method = Method::Exact;
    spec.dense_cap = 10;
    assert!(matches!(run_ensemble(&spec), Err(Error::DimensionOverCap { dimension: 70, cap: 10 })));
}

#[test]
fn selection_survives_full_diagonalization_audit() {
    let n = 12;
    let graph = DeviceGraph::default_ladder(n).unwrap();
    let basis = SectorBasis::new(n, n / 2).unwrap();
    for (idx, gamma) in [1.0, 8.0].into_iter().enumerate() {
        let potential = PotentialProfile::stark(gamma);
        let mut rng = gamma_rng(4, idx);
        let sel = select_initial_states(&basis, &graph, &potential, 0.5, 0.02, 15, &mut rng).unwrap();
        let v = eigenvalues(&build_hamiltonian(&graph, &potential, &basis).unwrap()).unwrap();
        let (lo, hi) = (v[0], v[v.len() - 1]);
        let mut seen = std::collections::HashSet::new();
        for (b, e) in sel.bitstrings.iter().zip(&sel.energies) {
            assert!(seen.insert(*b), "duplicate {}", format_bits(*b, n));
            assert!(((e - lo) / (hi - lo) - 0.5).abs() <= 0.02 + 1e-9);
        }
        assert_eq!(sel.bitstrings.len(), 15);
        let hist = pairwise_hamming_histogram(&sel.bitstrings, n).unwrap();
        assert_eq!(hist.iter().sum::<usize>(), 15 * 14 / 2);
        assert!(hist.iter().skip(1).step_by(2).all(|&c| c == 0), "same popcount gives even distances");
    }
}

#[test]
fn too_narrow_window_reports_insufficient_states() {
    let graph = DeviceGraph::default_ladder(6).unwrap();
    let basis = SectorBasis::new(6, 3).unwrap();
    let mut rng = gamma_rng(0, 0);
    let err = select_initial_states(&basis, &graph, &PotentialProfile::stark(3.0), 0.5, 1e-6, 5, &mut rng).unwrap_err();
    assert!(matches!(err, Error::InsufficientStates { .. }));
}

#[test]
fn alternating_sites_of_ladder_form_a_nearest_neighbour_chain() {
    let ladder = DeviceGraph::default_ladder(20).unwrap();
    let sub = extract_subgraph(&ladder, &alternating_sites(20)).unwrap();
    assert_eq!(sub.graph.n_sites(), 10);
    assert_eq!(sub.sites, (0..20).step_by(2).collect::<Vec<_>>());
    assert_eq!(sub.graph.edges().len(), 9);
    assert!(sub.graph.edges().iter().all(|e| e.j == e.i + 1));
    // the chain couplings are the ladder's second-neighbour couplings
    for e in sub.graph.edges() {
        let parent = ladder.edges().iter().find(|p| p.i == 2 * e.i && p.j == 2 * e.j).unwrap();
        assert_eq!(parent.coupling, e.coupling);
    }
    assert!(!sub.dropped.is_empty());
}
