//! Result files: CSV tables stamped with the config hash, and the run manifest.
//!
//! All writes of a run go through one [`Emitter`], so the manifest lists every
//! file and each CSV row is traceable to the manifest's config hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::format::num;
use crate::widths::WidthCurve;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance of one run: timings, cache use and every warning raised.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// `(stage, seconds)` in execution order.
    pub timings: Vec<(String, f64)>,
    pub cache_hits: usize,
    pub cache_misses: usize,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

/// Serialized writer for one output directory.
#[derive(Debug)]
pub struct Emitter {
    dir: PathBuf,
    pub manifest: RunManifest,
}

impl Emitter {
    pub fn new(dir: &Path, command: &str, config_hash: &str, seed: u64) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let manifest = RunManifest {
            config_hash: config_hash.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            ..RunManifest::default()
        };
        Ok(Self { dir: dir.to_path_buf(), manifest })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.manifest.warnings.push(message.into());
    }

    fn record(&mut self, name: &str) -> PathBuf {
        if !self.manifest.files.iter().any(|f| f == name) {
            self.manifest.files.push(name.into());
        }
        self.dir.join(name)
    }

    /// Writes a CSV table; the first line is `# config_hash=<hash> version=<v>`.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut text = format!("# config_hash={} version={}\n{}\n", self.manifest.config_hash, VERSION, columns.join(","));
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let path = self.record(name);
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.record(name);
        fs::write(&path, body)?;
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let body = serde_json::to_string_pretty(value).expect("result types serialize") + "\n";
        self.text(name, &body)
    }

    /// Writes `manifest.json` (which lists itself last).
    pub fn finish(mut self) -> Result<RunManifest> {
        self.record("manifest.json");
        let body = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        fs::write(self.dir.join("manifest.json"), body)?;
        Ok(self.manifest)
    }
}

pub const WIDTH_COLUMNS: [&str; 8] = ["scale_id", "n", "kind", "value", "method", "kernel_id", "p", "seed"];

pub fn width_rows(curves: &[WidthCurve]) -> Vec<Vec<String>> {
    curves
        .iter()
        .flat_map(|c| {
            c.entries.iter().map(move |e| {
                vec![
                    c.scale_id.as_str().to_string(),
                    e.n.to_string(),
                    e.kind.as_str().to_string(),
                    num(e.value),
                    e.method.clone(),
                    c.kernel_id.clone(),
                    e.p_label(),
                    e.seed.map_or_else(|| "-".into(), |s| s.to_string()),
                ]
            })
        })
        .collect()
}

/// Rows of a CSV file written by [`Emitter::csv`], without the stamp and header lines.
pub fn read_csv(path: &Path) -> Result<(String, Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let stamp = lines.next().unwrap_or_default().to_string();
    let header = lines.next().unwrap_or_default().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    Ok((stamp, header, rows))
}
