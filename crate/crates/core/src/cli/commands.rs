use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{parse_scan, RunConfig};
use super::plot::{line_plot, Series};
use super::{BlochArgs, Cli, Command, QuenchArgs, SelectArgs, SpectrumArgs};
use crate::error::{Error, Result};
use crate::evolution::quench::series_file_stem;
use crate::evolution::{
    eigenvalues, full_diagonalize, full_diagonalize_capped, run_quench, EigenDecomposition, KrylovConfig,
    Method, Observable, ObserverSet, Propagator, TimeGrid,
};
use crate::evolution::eigen::eigenvalues_capped;
use crate::model::{
    alternating_bits, build_dipole_operator, build_hamiltonian, format_bits, parse_bits, DeviceGraph,
    PotentialProfile, QuantumState, SectorBasis,
};
use crate::observables::{
    amplitude_spectrum, distance_binned_correlations, fit_correlation_length, generalized_imbalance,
    half_open_spectrum,
};
use crate::protocol::{
    gamma_rng, run_ensemble, select_initial_states, write_ensemble, DeviceSpec, OutputTree, RunManifest,
    TimeSpec,
};
use crate::protocol::selection::histogram_csv;
use crate::protocol::pairwise_hamming_histogram;
use crate::spectral::levels::simpson;
use crate::spectral::{
    classify_fragments, eev_size_scan, eev_table, gap_ratio_statistics, initial_state_width,
    long_format_csv, overlap_distribution, p_goe, p_poisson, within_fragment_gap_ratios, EevObservable,
    EnergyWindows, MapPoint, CENTRAL_WINDOW, GOE_MEAN_RATIO, POISSON_MEAN_RATIO,
};

/// Loads the config, applies global flags, and dispatches.
pub fn run(cli: &Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(m) = cli.method {
        cfg.method = m.into();
    }
    match &cli.command {
        Command::Quench(a) => cmd_quench(cli, a, cfg),
        Command::Spectrum(a) => cmd_spectrum(cli, a, cfg),
        Command::Bloch(a) => cmd_bloch(cli, a, cfg),
        Command::SelectStates(a) => cmd_select_states(cli, a, cfg),
        Command::Selftest => selftest(),
    }
}

fn run_dir(cli: &Cli, command: &str, cfg: &RunConfig) -> PathBuf {
    match &cli.out_dir {
        Some(d) => d.clone(),
        None => {
            let hash = crate::protocol::config_hash(cfg);
            cli.output_root.join(format!("{command}-{}", &hash[..12]))
        }
    }
}

fn open_tree(cli: &Cli, command: &str, cfg: &RunConfig) -> Result<OutputTree> {
    let manifest = RunManifest::new(command, cfg, vec![cfg.seed], Some(cfg.method), cfg.threads);
    OutputTree::create(run_dir(cli, command, cfg), manifest)
}

fn override_times(times: &mut TimeSpec, t_max: Option<f64>, dt: Option<f64>) {
    if t_max.is_none() && dt.is_none() {
        return;
    }
    let (t0, d0) = match times {
        TimeSpec::Uniform { t_max, dt } => (*t_max, *dt),
        TimeSpec::Explicit(_) => (1000.0, 5.0),
    };
    *times = TimeSpec::Uniform {
        t_max: t_max.unwrap_or(t0),
        dt: dt.unwrap_or(d0),
    };
}

fn graph_and_basis(cfg: &RunConfig, n_excitations: Option<usize>) -> Result<(DeviceGraph, SectorBasis)> {
    let graph = cfg.device.build()?;
    let n = graph.n_sites();
    let basis = SectorBasis::new(n, n_excitations.unwrap_or(n / 2))?;
    Ok((graph, basis))
}

fn cmd_quench(cli: &Cli, a: &QuenchArgs, mut cfg: RunConfig) -> Result<String> {
    let q = &mut cfg.quench;
    if let Some(g) = &a.gamma {
        q.gammas = g.clone();
    }
    if let Some(obs) = &a.observables {
        q.observables = obs.iter().map(|o| Observable::parse(o)).collect::<Result<_>>()?;
    }
    if let Some(k) = a.k {
        q.k = k;
    }
    if let Some(e) = a.epsilon_target {
        q.epsilon_target = e;
    }
    if let Some(e) = a.epsilon_tolerance {
        q.epsilon_tolerance = e;
    }
    override_times(&mut q.times, a.t_max, a.dt);
    if let Some(c) = &a.correlation_times {
        q.correlation_times = c.clone();
    }
    if let Some(s) = &a.states {
        q.initial_states = Some(s.clone());
    }
    let spec = cfg.ensemble_spec();
    spec.validate()?;

    let mut tree = open_tree(cli, "quench", &cfg)?;
    let result = run_ensemble(&spec)?;
    write_ensemble(&mut tree, &result, cfg.seed)?;

    let mut xi_csv = String::from("gamma,time_ns,xi,xi_err,amplitude,offset,at_bound,degenerate\n");
    let mut xi_points = Vec::new();
    for g in &result.per_gamma {
        for (t, c) in &g.mean_correlations {
            let fit = fit_correlation_length(&distance_binned_correlations(c))?;
            let _ = writeln!(
                xi_csv,
                "{},{t},{},{},{},{},{},{}",
                g.gamma, fit.xi, fit.xi_err, fit.amplitude, fit.offset, fit.xi_at_bound, fit.degenerate
            );
            xi_points.push((g.gamma, fit.xi));
        }
    }
    if !spec.correlation_times.is_empty() {
        tree.write("agg/xi_vs_gamma.csv", &xi_csv)?;
    }

    if !cli.no_plots {
        let names: Vec<String> = result.per_gamma[0]
            .aggregate
            .columns
            .iter()
            .map(|c| c.name.clone())
            .filter(|n| !n.starts_with("n") || n == "norm")
            .filter(|n| !n.starts_with("sz"))
            .collect();
        for name in names {
            let data: Vec<(String, Vec<(f64, f64)>)> = result
                .per_gamma
                .iter()
                .map(|g| {
                    let col = g.aggregate.column(&name).expect("column present");
                    (
                        format!("γ/2π = {} MHz", g.gamma),
                        g.aggregate.times.iter().copied().zip(col.mean.iter().copied()).collect(),
                    )
                })
                .collect();
            let series: Vec<Series<'_>> = data
                .iter()
                .map(|(l, p)| Series {
                    label: l.clone(),
                    points: p,
                })
                .collect();
            tree.write(&format!("plots/{name}.svg"), line_plot(&name, "t (ns)", &name, &series)?)?;
        }
        if xi_points.len() > 1 {
            let s = [Series {
                label: "ξ".into(),
                points: &xi_points,
            }];
            tree.write("plots/xi_vs_gamma.svg", line_plot("correlation length", "γ/2π (MHz)", "ξ (sites)", &s)?)?;
        }
    }

    let mut summary = format!(
        "quench: N={} N_exc={} method={} k={}",
        result.n_sites,
        result.n_excitations,
        result.method.name(),
        spec.initial_states.as_ref().map_or(spec.k, Vec::len)
    );
    for g in &result.per_gamma {
        let last = *g.aggregate.times.last().expect("non-empty grid");
        let _ = write!(summary, "\n  gamma={} MHz:", g.gamma);
        for c in g.aggregate.columns.iter().filter(|c| ["hd", "imbalance", "qfi"].contains(&c.name.as_str())) {
            let _ = write!(summary, " {}({last} ns)={:.4}", c.name, c.mean.last().expect("non-empty"));
        }
    }
    let root = tree.root().display().to_string();
    let m = tree.finish()?;
    let _ = write!(summary, "\n  {} files in {root}", m.outputs.len());
    Ok(summary)
}

fn cmd_spectrum(cli: &Cli, a: &SpectrumArgs, mut cfg: RunConfig) -> Result<String> {
    let s = &mut cfg.spectrum;
    if let Some(g) = &a.gamma {
        s.gammas = g.clone();
    }
    if let Some(scan) = &a.gamma_scan {
        s.gammas = parse_scan(scan)?;
    }
    if let Some(w) = a.window {
        s.window = w;
    }
    s.fragments |= a.fragments;
    s.overlaps |= a.overlaps;
    if let Some(sz) = &a.sizes {
        s.sizes = sz.clone();
    }
    if let Some(o) = &a.eev_scaling {
        s.eev_scaling = o.clone();
    }
    if !(s.window > 0.0 && s.window <= 0.8) {
        return Err(Error::InvalidArgument(format!("window {} outside (0, 0.8]", s.window)));
    }
    let scaling: Vec<EevObservable> = s.eev_scaling.iter().map(|o| EevObservable::parse(o)).collect::<Result<_>>()?;
    if !scaling.is_empty() && s.sizes.len() < 3 {
        return Err(Error::InvalidArgument("eev scaling needs --sizes with at least 3 entries".into()));
    }
    let s = cfg.spectrum.clone();
    let (graph, basis) = graph_and_basis(&cfg, None)?;
    let windows = EnergyWindows {
        width: s.window,
        ..EnergyWindows::default()
    };
    let overlap_bits = match &s.overlap_state {
        Some(b) => basis.parse_state(b)?,
        None => alternating_bits(graph.n_sites()),
    };

    let mut tree = open_tree(cli, "spectrum", &cfg)?;
    let mut rbar_map = Vec::new();
    let mut overlap_map = Vec::new();
    let mut central = Vec::new();
    let mut frag_csv = String::from("gamma,fragments,unresolved_fraction,within_fragment_rbar,within_fragment_ratios,degenerate_dropped\n");
    let mut width_csv = String::from("gamma,energy,epsilon,sigma_direct,sigma_eigenbasis\n");
    let mut notes = Vec::new();
    let need_vectors = s.fragments || s.overlaps;

    for &gamma in &s.gammas {
        let potential = PotentialProfile::stark(gamma);
        let h = build_hamiltonian(&graph, &potential, &basis)?;
        let eig: Option<EigenDecomposition> = if need_vectors {
            Some(full_diagonalize_capped(&h, cfg.dense_cap)?)
        } else {
            None
        };
        let values = match &eig {
            Some(e) => e.eigenvalues().to_vec(),
            None => eigenvalues_capped(&h, cfg.dense_cap)?,
        };
        let stats = gap_ratio_statistics(&values, None, &windows, s.histogram_bins)?;
        for w in &stats.windows {
            rbar_map.push(MapPoint {
                gamma,
                epsilon: 0.5 * (w.lo + w.hi),
                value: w.mean,
            });
        }
        if !stats.skipped_windows.is_empty() {
            notes.push(format!(
                "gamma={gamma}: {} windows skipped (fewer than 3 ratios)",
                stats.skipped_windows.len()
            ));
        }
        let (c_mean, c_count) = stats.mean_in(CENTRAL_WINDOW.0, CENTRAL_WINDOW.1);
        central.push((gamma, c_mean));
        let stem = format!("gamma{gamma}_N{}", graph.n_sites());
        tree.write(&format!("spectrum/{stem}_gap_histogram.csv"), stats.histogram_csv())?;
        tree.write(&format!("spectrum/{stem}_gap_windows.csv"), stats.windows_csv())?;
        if stats.degenerate_dropped > 0 {
            notes.push(format!("gamma={gamma}: {} ratios dropped at degeneracies", stats.degenerate_dropped));
        }
        let _ = c_count;

        if let Some(eig) = &eig {
            let dipole = build_dipole_operator(&basis);
            let eev = eev_table(eig, &dipole, "dipole")?;
            tree.write(&format!("spectrum/{stem}_eev_dipole.csv"), eev.to_csv())?;
            if s.fragments {
                let labels = classify_fragments(eig, &dipole, s.fragment_tolerance)?;
                let (ratios, dropped) = within_fragment_gap_ratios(eig.eigenvalues(), &labels);
                let rbar = ratios.iter().map(|g| g.r).sum::<f64>() / ratios.len() as f64;
                let _ = writeln!(
                    frag_csv,
                    "{gamma},{},{},{rbar},{},{dropped}",
                    labels.fragments.len(),
                    labels.unresolved_fraction(),
                    ratios.len()
                );
                tree.write(&format!("spectrum/{stem}_fragments.csv"), labels.to_csv())?;
                notes.push(format!(
                    "gamma={gamma}: unresolved fraction {:.3}",
                    labels.unresolved_fraction()
                ));
            }
            if s.overlaps {
                let psi0 = QuantumState::product(&basis, overlap_bits)?;
                let dist = overlap_distribution(&psi0, eig)?;
                for (lo, hi, w) in dist.windowed_sums(&windows) {
                    overlap_map.push(MapPoint {
                        gamma,
                        epsilon: 0.5 * (lo + hi),
                        value: w,
                    });
                }
                let e0 = h.expectation(psi0.amplitudes());
                let v = eig.eigenvalues();
                let _ = writeln!(
                    width_csv,
                    "{gamma},{e0},{},{},{}",
                    (e0 - v[0]) / (v[v.len() - 1] - v[0]),
                    initial_state_width(&h, &psi0)?,
                    dist.energy_width()
                );
                tree.write(&format!("spectrum/{stem}_overlaps.csv"), dist.to_csv())?;
            }
        }
    }
    tree.write("spectrum/rbar_map.csv", long_format_csv(&rbar_map))?;
    let mut central_csv = String::from("gamma,rbar_central\n");
    for (g, r) in &central {
        let _ = writeln!(central_csv, "{g},{r}");
    }
    tree.write("spectrum/rbar_central.csv", &central_csv)?;
    if s.fragments {
        tree.write("spectrum/fragments_summary.csv", &frag_csv)?;
    }
    if s.overlaps {
        tree.write("spectrum/overlap_map.csv", long_format_csv(&overlap_map))?;
        tree.write("spectrum/energy_width.csv", &width_csv)?;
    }

    let mut exps = Vec::new();
    if !scaling.is_empty() {
        let graphs: Vec<DeviceGraph> = s
            .sizes
            .iter()
            .map(|&n| match &cfg.device {
                DeviceSpec::Ladder { params, .. } => DeviceGraph::triangular_ladder(n, params),
                DeviceSpec::Graph { .. } => Err(Error::InvalidArgument(
                    "eev size scaling needs a ladder device".into(),
                )),
            })
            .collect::<Result<_>>()?;
        let mut csv = String::from("gamma,observable,exponent,exponent_err,degenerate,dimensions,mean_differences\n");
        for &gamma in &s.gammas {
            for (obs, sc) in eev_size_scan(&graphs, &PotentialProfile::stark(gamma), &scaling, CENTRAL_WINDOW, cfg.dense_cap)? {
                let join = |v: Vec<String>| v.join(";");
                let _ = writeln!(
                    csv,
                    "{gamma},{},{},{},{},{},{}",
                    obs.name(),
                    sc.exponent,
                    sc.exponent_err,
                    sc.degenerate,
                    join(sc.dimensions.iter().map(|d| d.to_string()).collect()),
                    join(sc.mean_difference.iter().map(|d| d.to_string()).collect())
                );
                exps.push((obs, gamma, sc.exponent));
            }
        }
        tree.write("spectrum/eev_scaling.csv", &csv)?;
    }

    if !cli.no_plots {
        if central.len() > 1 {
            let goe: Vec<(f64, f64)> = central.iter().map(|&(g, _)| (g, GOE_MEAN_RATIO)).collect();
            let poi: Vec<(f64, f64)> = central.iter().map(|&(g, _)| (g, POISSON_MEAN_RATIO)).collect();
            let series = [
                Series { label: "r̄ (0.4 ≤ ε ≤ 0.6)".into(), points: &central },
                Series { label: "GOE".into(), points: &goe },
                Series { label: "Poisson".into(), points: &poi },
            ];
            tree.write("plots/rbar_vs_gamma.svg", line_plot("mean gap ratio", "γ/2π (MHz)", "r̄", &series)?)?;
        }
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let pg: Vec<(f64, f64)> = grid.iter().map(|&r| (r, p_goe(r))).collect();
        let pp: Vec<(f64, f64)> = grid.iter().map(|&r| (r, p_poisson(r))).collect();
        let series = [
            Series { label: "P_GOE".into(), points: &pg },
            Series { label: "P_P".into(), points: &pp },
        ];
        tree.write("plots/reference_distributions.svg", line_plot("gap-ratio references", "r", "P(r)", &series)?)?;
        for obs in &scaling {
            let pts: Vec<(f64, f64)> = exps.iter().filter(|e| e.0 == *obs).map(|e| (e.1, e.2)).collect();
            if pts.len() > 1 {
                let s = [Series { label: obs.name().into(), points: &pts }];
                tree.write(
                    &format!("plots/eev_exponent_{}.svg", obs.name()),
                    line_plot("EEV fluctuation exponent", "γ/2π (MHz)", "a", &s)?,
                )?;
            }
        }
    }

    let mut summary = format!("spectrum: N={} dimension={}", graph.n_sites(), basis.dimension());
    for (g, r) in &central {
        let _ = write!(summary, "\n  gamma={g} MHz: rbar(0.4..0.6)={r:.4}");
    }
    for (obs, g, e) in &exps {
        let _ = write!(summary, "\n  eev {} gamma={g}: exponent={e:.3}", obs.name());
    }
    for n in &notes {
        let _ = write!(summary, "\n  note: {n}");
    }
    let root = tree.root().display().to_string();
    let m = tree.finish()?;
    let _ = write!(summary, "\n  {} files in {root}", m.outputs.len());
    Ok(summary)
}

fn cmd_bloch(cli: &Cli, a: &BlochArgs, mut cfg: RunConfig) -> Result<String> {
    if let Some(g) = a.gamma {
        cfg.bloch.gamma = g;
    }
    if let Some(s) = &a.state {
        cfg.bloch.initial_state = Some(s.clone());
    }
    override_times(&mut cfg.bloch.times, a.t_max, a.dt);
    let graph = cfg.device.build()?;
    let n = graph.n_sites();
    let bits = match &cfg.bloch.initial_state {
        Some(s) if s.trim().len() == n => parse_bits(s)?,
        Some(s) => {
            return Err(Error::InvalidArgument(format!("bitstring '{s}' does not have {n} characters")));
        }
        None => alternating_bits(n),
    };
    let basis = SectorBasis::new(n, bits.count_ones() as usize)?;
    let grid = cfg.bloch.times.grid()?;
    let gamma = cfg.bloch.gamma;

    let mut tree = open_tree(cli, "bloch", &cfg)?;
    let h = build_hamiltonian(&graph, &PotentialProfile::stark(gamma), &basis)?;
    let psi0 = QuantumState::product(&basis, bits)?;
    let observers = ObserverSet::new([Observable::SigmaZ, Observable::Imbalance, Observable::Hd]);
    let eig = match cfg.method {
        Method::Exact => Some(full_diagonalize_capped(&h, cfg.dense_cap)?),
        Method::Krylov => None,
    };
    let prop = match &eig {
        Some(e) => Propagator::Exact(e),
        None => Propagator::Krylov(cfg.krylov),
    };
    let mut series = run_quench(&h, &psi0, bits, &grid, &observers, prop)?;
    series.metadata.gamma_mhz = Some(gamma);
    series.metadata.seed = Some(cfg.seed);
    series.metadata.config_hash = Some(tree.manifest().config_hash.clone());
    let signals = series.site_columns("sz");
    let spectrum = half_open_spectrum(&series.times, &signals)?;

    let stem = series_file_stem(Some(gamma), n, Some(cfg.seed), Some(cfg.method));
    tree.write(&format!("bloch/{stem}_series.csv"), series.to_csv())?;
    tree.write(&format!("bloch/{stem}_series.json"), series.to_json())?;
    tree.write(&format!("bloch/{stem}_spectrum.csv"), spectrum.to_csv())?;

    let peaks = spectrum.peaks();
    let peak_f = |i: usize| peaks.get(i).map_or(f64::NAN, |&k| spectrum.frequencies[k]);
    let mut summary = format!(
        "bloch: N={n} gamma={gamma} MHz state={} resolution={} MHz\n  peaks: {} MHz, {} MHz",
        format_bits(bits, n),
        spectrum.resolution,
        peak_f(0),
        peak_f(1)
    );

    if a.self_test {
        let tone: Vec<f64> = series.times.iter().map(|t| (TAU * gamma * t * 1e-3).cos()).collect();
        let s = half_open_spectrum(&series.times, &[tone])?;
        let got = s.frequencies[s.peak_bin()];
        if (got - gamma).abs() > s.resolution {
            return Err(Error::SelfTestFailed(format!("tone at {gamma} MHz peaked at {got} MHz")));
        }
        let _ = write!(summary, "\n  self-test: tone at {gamma} MHz peaks at {got} MHz");
    }

    if !cli.no_plots {
        let lines: Vec<(String, Vec<(f64, f64)>)> = signals
            .iter()
            .enumerate()
            .take(4)
            .map(|(q, s)| (format!("q{q}"), series.times.iter().copied().zip(s.iter().copied()).collect()))
            .collect();
        let ls: Vec<Series<'_>> = lines.iter().map(|(l, p)| Series { label: l.clone(), points: p }).collect();
        tree.write("plots/bloch_sigmaz.svg", line_plot("⟨σz⟩", "t (ns)", "⟨σz⟩", &ls)?)?;
        let pts: Vec<(f64, f64)> = spectrum
            .frequencies
            .iter()
            .copied()
            .zip(spectrum.mean_amplitude.iter().copied())
            .skip(1)
            .collect();
        let s = [Series { label: "mean".into(), points: &pts }];
        tree.write("plots/bloch_spectrum.svg", line_plot("averaged Fourier amplitude", "f (MHz)", "amplitude", &s)?)?;
    }
    let root = tree.root().display().to_string();
    let m = tree.finish()?;
    let _ = write!(summary, "\n  {} files in {root}", m.outputs.len());
    Ok(summary)
}

fn cmd_select_states(cli: &Cli, a: &SelectArgs, mut cfg: RunConfig) -> Result<String> {
    let q = &mut cfg.quench;
    if let Some(g) = &a.gamma {
        q.gammas = g.clone();
    }
    if let Some(k) = a.k {
        q.k = k;
    }
    if let Some(e) = a.epsilon_target {
        q.epsilon_target = e;
    }
    if let Some(e) = a.epsilon_tolerance {
        q.epsilon_tolerance = e;
    }
    cfg.ensemble_spec().validate()?;
    let q = cfg.quench.clone();
    let (graph, basis) = graph_and_basis(&cfg, q.n_excitations)?;
    let n = graph.n_sites();
    let mut tree = open_tree(cli, "select-states", &cfg)?;
    let mut summary = format!("select-states: N={n} dimension={} k={}", basis.dimension(), q.k);
    for (idx, &gamma) in q.gammas.iter().enumerate() {
        let potential = PotentialProfile::stark(gamma);
        let mut rng = gamma_rng(cfg.seed, idx);
        let sel = select_initial_states(&basis, &graph, &potential, q.epsilon_target, q.epsilon_tolerance, q.k, &mut rng)?;
        let stem = series_file_stem(Some(gamma), n, Some(cfg.seed), None);
        tree.write(&format!("audit/{stem}_selection.csv"), sel.to_csv(n))?;
        if sel.bitstrings.len() > 1 {
            let hist = pairwise_hamming_histogram(&sel.bitstrings, n)?;
            tree.write(&format!("audit/{stem}_pair_hamming.csv"), histogram_csv(&hist))?;
        }
        let _ = write!(
            summary,
            "\n  gamma={gamma} MHz: {} selected, qualifying={}",
            sel.bitstrings.len(),
            sel.qualifying.map_or("unknown".into(), |c| c.to_string())
        );
        if a.audit_ed {
            let h = build_hamiltonian(&graph, &potential, &basis)?;
            let v = eigenvalues_capped(&h, cfg.dense_cap)?;
            let (lo, hi) = (v[0], v[v.len() - 1]);
            let mut csv = String::from("bitstring,epsilon_lanczos,epsilon_ed,inside\n");
            let mut all_inside = true;
            for (i, &b) in sel.bitstrings.iter().enumerate() {
                let e = (sel.energies[i] - lo) / (hi - lo);
                let inside = (e - q.epsilon_target).abs() <= q.epsilon_tolerance;
                all_inside &= inside;
                let _ = writeln!(csv, "{},{},{e},{inside}", format_bits(b, n), sel.epsilons[i]);
            }
            tree.write(&format!("audit/{stem}_ed_audit.csv"), &csv)?;
            let _ = write!(summary, " ed-audit={}", if all_inside { "pass" } else { "FAIL" });
        }
    }
    let root = tree.root().display().to_string();
    let m = tree.finish()?;
    let _ = write!(summary, "\n  {} files in {root}", m.outputs.len());
    Ok(summary)
}

/// Dense 2^N Hamiltonian from σ⁺σ⁻ products, projected onto the sector.
fn dense_sector_reference(graph: &DeviceGraph, w: &[f64], basis: &SectorBasis) -> Vec<f64> {
    let n = graph.n_sites();
    let full = 1usize << n;
    let mut h = vec![0.0; full * full];
    for s in 0..full {
        h[s * full + s] = (0..n).filter(|j| s >> j & 1 == 1).map(|j| TAU * w[j]).sum();
        for e in graph.edges() {
            // σ⁺_i σ⁻_j + σ⁺_j σ⁻_i
            for (a, b) in [(e.i, e.j), (e.j, e.i)] {
                if s >> b & 1 == 1 && s >> a & 1 == 0 {
                    let t = s ^ (1 << a) ^ (1 << b);
                    h[t * full + s] += TAU * e.coupling;
                }
            }
        }
    }
    let states: Vec<usize> = basis.states().map(|b| b as usize).collect();
    let d = states.len();
    let mut out = vec![0.0; d * d];
    for (r, &sr) in states.iter().enumerate() {
        for (c, &sc) in states.iter().enumerate() {
            out[r * d + c] = h[sr * full + sc];
        }
    }
    out
}

/// Quick consistency checks that run in well under a second.
pub fn selftest() -> Result<String> {
    let mut lines = Vec::new();
    let fail = |m: String| Err(Error::SelfTestFailed(m));

    let n = 6;
    let graph = DeviceGraph::default_ladder(n)?;
    let potential = PotentialProfile::stark(3.0);
    let basis = SectorBasis::new(n, 3)?;
    let h = build_hamiltonian(&graph, &potential, &basis)?;
    let reference = dense_sector_reference(&graph, &potential.site_energies(n)?, &basis);
    let diff = h
        .to_dense()
        .iter()
        .zip(&reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if diff > 1e-12 {
        return fail(format!("sector hamiltonian differs from dense reference by {diff:e}"));
    }
    lines.push(format!("sector vs dense reference: max diff {diff:.1e}"));

    let eig = full_diagonalize(&h)?;
    let psi0 = QuantumState::product(&basis, alternating_bits(n))?;
    let grid = TimeGrid::uniform(200.0, 10.0)?;
    let obs = ObserverSet::new([Observable::Imbalance]);
    let ex = run_quench(&h, &psi0, alternating_bits(n), &grid, &obs, Propagator::Exact(&eig))?;
    let kr = run_quench(&h, &psi0, alternating_bits(n), &grid, &obs, Propagator::Krylov(KrylovConfig::default()))?;
    let kdiff = ex.columns[0]
        .values
        .iter()
        .zip(&kr.columns[0].values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if kdiff > 1e-8 {
        return fail(format!("krylov and exact imbalance differ by {kdiff:e}"));
    }
    lines.push(format!("krylov vs exact imbalance: max diff {kdiff:.1e}"));

    let two = DeviceGraph::chain(2, 2.0)?;
    let b2 = SectorBasis::new(2, 1)?;
    let h2 = build_hamiltonian(&two, &PotentialProfile::zero(), &b2)?;
    let e2 = full_diagonalize(&h2)?;
    let start = QuantumState::product(&b2, 0b01)?;
    let t = 37.0;
    let p = crate::evolution::evolve_exact(&e2, &start, t)?.amplitudes()[b2.rank(0b01)?].norm_sqr();
    let expect = (TAU * 2.0 * t * 1e-3).cos().powi(2);
    if (p - expect).abs() > 1e-12 {
        return fail(format!("two-site swap population {p} vs {expect}"));
    }
    lines.push("two-site swap matches cos²(2πJt)".into());

    let goe = simpson(|r| r * p_goe(r), 0.0, 1.0, 20_000);
    let poi = simpson(|r| r * p_poisson(r), 0.0, 1.0, 20_000);
    if (goe - GOE_MEAN_RATIO).abs() > 1e-6 || (poi - POISSON_MEAN_RATIO).abs() > 1e-6 {
        return fail(format!("reference means {goe} / {poi}"));
    }
    lines.push(format!("reference means: GOE {goe:.4}, Poisson {poi:.4}"));

    let times: Vec<f64> = (0..200).map(|k| 5.0 * k as f64).collect();
    let tone: Vec<f64> = times.iter().map(|t| (TAU * 16.0 * t * 1e-3).cos()).collect();
    let s = amplitude_spectrum(&times, &[tone])?;
    if s.frequencies[s.peak_bin()] != 16.0 {
        return fail("16 MHz tone not in the 16 MHz bin".into());
    }
    lines.push("16 MHz tone lands in the 16 MHz bin".into());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let random = QuantumState::random(&basis, &mut rng);
    let direct = initial_state_width(&h, &random)?;
    let via = overlap_distribution(&random, &eig)?.energy_width();
    if (direct - via).abs() > 1e-8 {
        return fail(format!("energy width routes differ: {direct} vs {via}"));
    }
    lines.push("energy width: direct and eigenbasis routes agree".into());
    let imb = generalized_imbalance(&psi0, alternating_bits(n))?;
    if (imb - 1.0).abs() > 1e-15 {
        return fail(format!("imbalance of the reference state is {imb}"));
    }
    let v = eigenvalues(&h)?;
    if v.len() != basis.dimension() {
        return fail("eigenvalue count".into());
    }

    Ok(format!("selftest: all {} checks passed\n  {}", lines.len(), lines.join("\n  ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let s = selftest().unwrap();
        assert!(s.starts_with("selftest: all"));
    }
}
