//! Run directory layout: `raw/`, `agg/`, `audit/` and `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ensemble::EnsembleResult;
use super::selection::histogram_csv;
use crate::error::{Error, Result};
use crate::evolution::quench::series_file_stem;
use crate::evolution::Method;
use crate::model::format_bits;
use crate::observables::{binned_to_csv, distance_binned_correlations};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the effective configuration. `serde_json` maps keep sorted keys,
/// so the compact serialization is canonical.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let value = serde_json::to_value(config).expect("config serializes");
    sha256_hex(serde_json::to_string(&value).expect("value serializes").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written before any result file and finalized with
/// the list of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub effective_config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub method: Option<Method>,
    pub threads: Option<usize>,
    pub started_unix: u64,
    pub elapsed_seconds: Option<f64>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new<T: Serialize>(command: &str, config: &T, seeds: Vec<u64>, method: Option<Method>, threads: Option<usize>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: config_hash(config),
            effective_config: serde_json::to_value(config).expect("config serializes"),
            seeds,
            method,
            threads,
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            elapsed_seconds: None,
            outputs: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        crate::model::config::parse_json(&text)
    }
}

/// Output directory that records every file it writes.
#[derive(Debug)]
pub struct OutputTree {
    root: PathBuf,
    manifest: RunManifest,
    started: std::time::Instant,
}

impl OutputTree {
    /// Creates `root` and writes the initial manifest.
    pub fn create(root: impl Into<PathBuf>, manifest: RunManifest) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        let tree = OutputTree {
            root,
            manifest,
            started: std::time::Instant::now(),
        };
        tree.write_manifest()?;
        Ok(tree)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn write_manifest(&self) -> Result<()> {
        let path = self.root.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text).map_err(|e| Error::io(path, e))
    }

    /// Writes `contents` to `rel` under the root, creating parents.
    pub fn write(&mut self, rel: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let bytes = contents.as_ref();
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.outputs.push(OutputFile {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Records elapsed time and the output list.
    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.elapsed_seconds = Some(self.started.elapsed().as_secs_f64());
        self.write_manifest()?;
        Ok(self.manifest)
    }
}

/// Writes raw, aggregated and audit files for every γ.
pub fn write_ensemble(tree: &mut OutputTree, result: &EnsembleResult, seed: u64) -> Result<()> {
    let n = result.n_sites;
    for g in &result.per_gamma {
        let stem = series_file_stem(Some(g.gamma), n, Some(seed), Some(result.method));
        for (i, s) in g.raw.iter().enumerate() {
            let bits = format_bits(g.audit.selection.bitstrings[i], n);
            tree.write(&format!("raw/{stem}_state{i:02}_{bits}.csv"), s.to_csv())?;
        }
        tree.write(&format!("agg/{stem}.csv"), g.aggregate.to_csv())?;
        for (t, c) in &g.mean_correlations {
            tree.write(&format!("agg/{stem}_corr_t{t}.csv"), c.to_csv())?;
            tree.write(
                &format!("agg/{stem}_corr_binned_t{t}.csv"),
                binned_to_csv(&distance_binned_correlations(c)),
            )?;
        }
        tree.write(&format!("audit/{stem}_selection.csv"), g.audit.selection.to_csv(n))?;
        if !g.audit.hamming_histogram.is_empty() {
            tree.write(&format!("audit/{stem}_pair_hamming.csv"), histogram_csv(&g.audit.hamming_histogram))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": [1, 2]}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"a": [1, 2], "b": 1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn tree_records_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("test", &serde_json::json!({"x": 1}), vec![4], None, None);
        let mut tree = OutputTree::create(dir.path().join("run"), m).unwrap();
        tree.write("agg/a.csv", "t\n0\n").unwrap();
        let m = tree.finish().unwrap();
        assert_eq!(m.outputs.len(), 1);
        let back = RunManifest::load(&dir.path().join("run/manifest.json")).unwrap();
        assert_eq!(back.outputs[0].path, "agg/a.csv");
        assert_eq!(back.config_hash, m.config_hash);
    }
}
