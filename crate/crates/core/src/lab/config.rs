//! Experiment configuration: TOML with a fixed schema and strict rejection of
//! unknown keys.
//!
//! ```toml
//! [kernel]
//! id = "brownian_motion"        # catalog identifier
//! # length_scale = 0.5          # Matérn and Gaussian kernels
//! # domain = [[0.0, 1.0]]       # one [lo, hi] pair per axis, default [0, 1]^dim
//! # dim = 1
//!
//! [spectrum]
//! source = "nystrom"            # or "analytic"
//! cells = 2000                  # midpoint cells per axis
//! n_eigs = 256
//!
//! [widths]
//! n = [0, 1, 2, 4, 8]           # or n_max = 64 for 0..=64
//! p = [2.0, inf]
//! strategies = ["uniform", "greedy"]
//!
//! [run]
//! seed = 7                      # required
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sha256_hex;
use crate::interpolation::{Exponent, Strategy};
use crate::kernel::{BoxDomain, Kernel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernel: KernelConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub widths: WidthsConfig,
    #[serde(default)]
    pub entropy: EntropyConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub campaign: CampaignConfig,
    pub run: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub id: String,
    pub length_scale: Option<f64>,
    pub domain: Option<Vec<[f64; 2]>>,
    pub dim: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Nystrom,
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub source: SpectrumSource,
    /// Midpoint cells per axis; defaults to 2000 in 1D and 64 per axis otherwise.
    pub cells: Option<usize>,
    /// Eigenpairs to keep; defaults to `4 · max(n) + 1`, capped by the node count.
    pub n_eigs: Option<usize>,
    pub cache: bool,
    /// Cache directory; defaults to `<out>/cache`.
    pub cache_dir: Option<String>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { source: SpectrumSource::Nystrom, cells: None, n_eigs: None, cache: true, cache_dir: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WidthsConfig {
    pub n: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    pub p: Vec<f64>,
    pub strategies: Vec<String>,
    /// Closed trapezoid evaluation grid, cells per axis (4096 in 1D, 128 otherwise).
    pub eval_cells: Option<usize>,
    /// Midpoint quadrature for the L_2 operator norm, cells per axis (1024 in 1D, 32 otherwise).
    pub l2_cells: Option<usize>,
    /// Indices at which the sup-norm subspace residual is computed.
    pub subspace_n: Vec<usize>,
    /// Grid cells per axis for the ellipsoid model.
    pub subspace_cells: usize,
    pub subspace_restarts: usize,
    /// Multistart designs are refined only for `n` up to this size.
    pub multistart_max_n: usize,
}

impl Default for WidthsConfig {
    fn default() -> Self {
        Self {
            n: None,
            n_max: Some(64),
            p: vec![2.0, f64::INFINITY],
            strategies: vec!["uniform".into(), "greedy".into()],
            eval_cells: None,
            l2_cells: None,
            subspace_n: Vec::new(),
            subspace_cells: 511,
            subspace_restarts: 4,
            multistart_max_n: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyConfig {
    pub n_max: usize,
    pub carl_p: Vec<f64>,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self { n_max: 64, carl_p: vec![1.0, 2.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub window: [usize; 2],
    pub dyadic: bool,
    pub slope_tol: f64,
    pub ratio_cap: f64,
    pub regularity_cap: f64,
    /// Entropy exponent α with `e_n ≍ n^{-1/α}`; defaults to `d / m` from the kernel's Sobolev order.
    pub alpha: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { window: [4, 64], dyadic: false, slope_tol: 0.1, ratio_cap: 32.0, regularity_cap: 16.0, alpha: None }
    }
}

/// Expected slope of a named campaign series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeTarget {
    pub series: String,
    pub slope: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub name: Option<String>,
    /// Misses are reported as exploratory rather than failures.
    pub exploratory: bool,
    /// Premise labels attached to the report, e.g. hypotheses used beyond their stated range.
    pub premise_flags: Vec<String>,
    pub targets: Vec<SlopeTarget>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<String>,
    pub workers: Option<usize>,
    /// Wall-clock budget in seconds, checked between stages.
    pub time_budget_s: Option<f64>,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

impl ExperimentConfig {
    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let field = e.span().map_or_else(
                || "config".to_string(),
                |s| format!("config line {}", text[..s.start].matches('\n').count() + 1),
            );
            config_err(&field, e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel()?;
        let ns = self.n_grid()?;
        if let Some(w) = ns.windows(2).find(|w| w[1] <= w[0]) {
            return Err(config_err("widths.n", format!("grid must be strictly increasing ({} then {})", w[0], w[1])));
        }
        for &p in &self.widths.p {
            Exponent::new(p).map_err(|_| config_err("widths.p", format!("p = {p} must be in [2, inf]")))?;
        }
        for s in &self.widths.strategies {
            if Strategy::parse(s).is_none() {
                return Err(config_err("widths.strategies", format!("unknown strategy `{s}` (uniform, greedy, multistart)")));
            }
        }
        if self.spectrum.source == SpectrumSource::Analytic && crate::kernel::AnalyticSystem::from_id(&self.kernel.id).is_none() {
            return Err(config_err("spectrum.source", format!("kernel `{}` has no closed-form spectrum", self.kernel.id)));
        }
        if self.spectrum.source == SpectrumSource::Analytic && self.kernel()?.domain() != &BoxDomain::unit(1) {
            return Err(config_err("spectrum.source", "closed-form spectra are tabulated on [0, 1] only"));
        }
        if self.spectrum.cells == Some(0) || self.widths.eval_cells == Some(0) || self.widths.l2_cells == Some(0) {
            return Err(config_err("cells", "cell counts must be positive"));
        }
        let [lo, hi] = self.fit.window;
        if lo == 0 || lo >= hi {
            return Err(config_err("fit.window", format!("window [{lo}, {hi}] must satisfy 1 ≤ lo < hi")));
        }
        if let Some(a) = self.fit.alpha {
            if !(a > 0.0 && a < 2.0) {
                return Err(config_err("fit.alpha", format!("α = {a} must lie in (0, 2)")));
            }
        }
        if self.entropy.carl_p.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(config_err("entropy.carl_p", "Carl exponents must be positive and finite"));
        }
        if self.run.workers == Some(0) {
            return Err(config_err("run.workers", "worker count must be positive"));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        let domain = match (&self.kernel.domain, self.kernel.dim) {
            (Some(axes), dim) => {
                if dim.is_some_and(|d| d != axes.len()) {
                    return Err(config_err("kernel.dim", "dim disagrees with the number of domain axes"));
                }
                BoxDomain::new(axes.iter().map(|a| (a[0], a[1])).collect()).map_err(|e| config_err("kernel.domain", e.to_string()))?
            }
            (None, dim) => BoxDomain::unit(dim.unwrap_or(1)),
        };
        Kernel::from_id(&self.kernel.id, self.kernel.length_scale, domain).map_err(|e| match e {
            Error::Config { .. } => e,
            other => config_err("kernel", other.to_string()),
        })
    }

    pub fn n_grid(&self) -> Result<Vec<usize>> {
        match (&self.widths.n, self.widths.n_max) {
            (Some(ns), _) => Ok(ns.clone()),
            (None, Some(m)) => Ok((0..=m).collect()),
            (None, None) => Err(config_err("widths.n", "give either n or n_max")),
        }
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        self.widths.p.iter().filter_map(|&p| Exponent::new(p).ok()).collect()
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.widths.strategies.iter().filter_map(|s| Strategy::parse(s)).collect()
    }

    pub fn dim(&self) -> usize {
        self.kernel.domain.as_ref().map_or(self.kernel.dim.unwrap_or(1), Vec::len)
    }

    pub fn spectrum_cells(&self) -> usize {
        self.spectrum.cells.unwrap_or(if self.dim() == 1 { 2000 } else { 64 })
    }

    pub fn eval_cells(&self) -> usize {
        self.widths.eval_cells.unwrap_or(if self.dim() == 1 { 4096 } else { 128 })
    }

    pub fn l2_cells(&self) -> usize {
        self.widths.l2_cells.unwrap_or(if self.dim() == 1 { 1024 } else { 32 })
    }

    pub fn n_eigs(&self) -> usize {
        let nodes = self.spectrum_cells().pow(self.dim() as u32);
        let n_max = self.n_grid().ok().and_then(|g| g.last().copied()).unwrap_or(0);
        let wanted = self.spectrum.n_eigs.unwrap_or(4 * n_max.max(self.entropy.n_max) + 1);
        if self.spectrum.source == SpectrumSource::Nystrom {
            wanted.min(nodes)
        } else {
            wanted
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.run.out.clone().unwrap_or_else(|| "nwidth-out".into()))
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.spectrum.cache_dir.as_ref().map_or_else(|| self.out_dir().join("cache"), PathBuf::from)
    }

    /// Hash of every setting that can change numeric output (output location and worker count excluded).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.run.out = None;
        c.run.workers = None;
        c.run.time_budget_s = None;
        c.spectrum.cache_dir = None;
        sha256_hex(&serde_json::to_string(&c).expect("config serializes"))[..16].to_string()
    }
}

/// Built-in campaign presets.
pub const PRESETS: [(&str, &str); 3] = [
    ("bm_gap", include_str!("../../presets/bm_gap.toml")),
    ("bridge_gap", include_str!("../../presets/bridge_gap.toml")),
    ("matern2d_gap", include_str!("../../presets/matern2d_gap.toml")),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        config_err("--preset", format!("unknown preset `{name}` (known: {})", PRESETS.map(|p| p.0).join(", ")))
    })?;
    ExperimentConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[kernel]\nid = \"brownian_motion\"\n[run]\nseed = 1\n";

    #[test]
    fn minimal_config_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.n_grid().unwrap().len(), 65);
        assert_eq!(c.exponents(), vec![Exponent::Finite(2.0), Exponent::Infinity]);
        assert_eq!((c.spectrum_cells(), c.eval_cells(), c.n_eigs()), (2000, 4096, 257));
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = format!("{MINIMAL}[widths]\nbogus = 3\n");
        let e = ExperimentConfig::from_toml(&unknown).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let no_seed = "[kernel]\nid = \"brownian_motion\"\n[run]\n";
        assert!(matches!(ExperimentConfig::from_toml(no_seed), Err(Error::Config { .. })));
        let bad_kernel = "[kernel]\nid = \"wiener\"\n[run]\nseed = 1\n";
        match ExperimentConfig::from_toml(bad_kernel) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "kernel.id"),
            other => panic!("{other:?}"),
        }
        let bad_p = format!("{MINIMAL}[widths]\np = [1.0]\n");
        assert!(ExperimentConfig::from_toml(&bad_p).is_err());
        let unsorted = format!("{MINIMAL}[widths]\nn = [1, 4, 2]\n");
        assert!(ExperimentConfig::from_toml(&unsorted).is_err());
    }

    #[test]
    fn presets_parse() {
        for (name, _) in PRESETS {
            preset(name).unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let mut b = a.clone();
        b.run.out = Some("/tmp/elsewhere".into());
        b.run.workers = Some(3);
        assert_eq!(a.hash(), b.hash());
        b.run.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }
}
