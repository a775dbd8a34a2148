use std::path::Path;

use starkmbl::cli::{main_with_args, EXIT_CONFIG, EXIT_INSUFFICIENT_STATES, EXIT_OK, EXIT_PHYSICS, EXIT_USAGE};
use starkmbl::protocol::{sha256_hex, RunManifest};

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["starkmbl", "--no-plots"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn usage_and_config_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(run(&["--out-dir", out, "frobnicate"]), EXIT_USAGE);
    assert_eq!(run(&["--out-dir", out, "quench", "--k", "abc"]), EXIT_USAGE);
    let bad = write(dir.path(), "bad.json", r#"{"device": {"kind": "ladder", "n_sites": 8}, "colour": 1}"#);
    assert_eq!(run(&["--config", &bad, "--out-dir", out, "selftest"]), EXIT_CONFIG);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["--config", missing.to_str().unwrap(), "selftest"]), EXIT_CONFIG);
    assert_eq!(run(&["--out-dir", out, "spectrum", "--window", "0"]), EXIT_CONFIG);
    assert_eq!(run(&["--out-dir", out, "bloch", "--state", "0111"]), EXIT_CONFIG);
}

#[test]
fn physics_and_selection_failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"device": {"kind": "ladder", "n_sites": 8}, "dense_cap": 10}"#);
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(run(&["--config", &cfg, "--out-dir", out, "--method", "exact", "quench", "--k", "2"]), EXIT_PHYSICS);
    assert_eq!(
        run(&["--config", &cfg, "--out-dir", out, "select-states", "--k", "30", "--epsilon-tolerance", "0.01"]),
        EXIT_INSUFFICIENT_STATES
    );
    assert_eq!(run(&["selftest"]), EXIT_OK);
}

#[test]
fn quench_writes_manifest_with_hashes_of_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"device": {"kind": "ladder", "n_sites": 8}, "seed": 3,
            "quench": {"gammas": [2], "k": 2, "times": {"t_max": 100, "dt": 10}, "correlation_times": [100]}}"#,
    );
    let root = dir.path().join("runs");
    let code = main_with_args([
        "starkmbl",
        "--config",
        &cfg,
        "--output-root",
        root.to_str().unwrap(),
        "quench",
    ]);
    assert_eq!(code, EXIT_OK);
    let run_dir = std::fs::read_dir(&root).unwrap().next().unwrap().unwrap().path();
    assert!(run_dir.file_name().unwrap().to_str().unwrap().starts_with("quench-"));
    let manifest = RunManifest::load(&run_dir.join("manifest.json")).unwrap();
    assert_eq!(manifest.seeds, vec![3]);
    assert!(manifest.outputs.iter().any(|o| o.path.ends_with(".svg")));
    assert!(manifest.outputs.iter().any(|o| o.path == "agg/xi_vs_gamma.csv"));
    for o in &manifest.outputs {
        let bytes = std::fs::read(run_dir.join(&o.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), o.sha256, "{}", o.path);
    }
    let agg = std::fs::read_to_string(run_dir.join("agg/gamma2_N8_seed3_krylov.csv")).unwrap();
    assert!(agg.starts_with("time_ns,hd_mean,hd_sem,imbalance_mean,imbalance_sem,qfi_mean,qfi_sem"));
    assert_eq!(agg.lines().count(), 12);
}

#[test]
fn spectrum_and_bloch_produce_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"device": {"kind": "ladder", "n_sites": 8}}"#);
    let out = dir.path().join("s");
    let code = run(&[
        "--config",
        &cfg,
        "--out-dir",
        out.to_str().unwrap(),
        "spectrum",
        "--gamma-scan",
        "1:3:1",
        "--fragments",
        "--overlaps",
    ]);
    assert_eq!(code, EXIT_OK);
    let map = std::fs::read_to_string(out.join("spectrum/rbar_map.csv")).unwrap();
    assert!(map.starts_with("gamma,epsilon,value\n"));
    let widths = std::fs::read_to_string(out.join("spectrum/energy_width.csv")).unwrap();
    assert_eq!(widths.lines().count(), 4);
    for line in widths.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[3] - f[4]).abs() < 1e-8);
    }

    let out = dir.path().join("b");
    let code = run(&["--config", &cfg, "--out-dir", out.to_str().unwrap(), "bloch", "--self-test", "--gamma", "20"]);
    assert_eq!(code, EXIT_OK);
    let spec = std::fs::read_to_string(out.join("bloch/gamma20_N8_seed0_krylov_spectrum.csv")).unwrap();
    assert_eq!(spec.lines().count(), 1 + 101);
}
