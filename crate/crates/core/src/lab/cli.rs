//! Command-line front end of the laboratory.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

use super::campaign::CampaignReport;
use super::config::{preset, ExperimentConfig};
use super::emit::Emitter;
use super::run::Lab;
use super::exit_code;

#[derive(Debug, Parser)]
#[command(name = "nwidth-lab", version, about = "Numerical laboratory for n-widths of RKHS embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the kernel integral operator (cached Nyström or closed form).
    Spectrum(Common),
    /// Width curves across scales, n grid and exponents, with the chain check.
    Widths(Common),
    /// P-greedy design on the sup-norm evaluation grid.
    Greedy(Common),
    /// Entropy-number bounds of the diagonal surrogate and Carl checks.
    Entropy(Common),
    /// Full pipeline with slope fits, targets and verdicts.
    Campaign(Common),
    /// Re-render `report.txt` from `<out>/campaign.json`.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in preset: bm_gap, bridge_gap, matern2d_gap.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output directory (overrides the configuration).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for independent cells.
    #[arg(long, value_name = "K")]
    pub workers: Option<usize>,
    /// Seed for randomized stages (overrides the configuration).
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `campaign.json`.
    #[arg(long, value_name = "DIR", default_value = "nwidth-out")]
    pub out: PathBuf,
}

impl Common {
    /// The configuration with command-line overrides applied.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => {
                return Err(Error::Config { field: "--config".into(), message: "give --config PATH or --preset NAME".into() })
            }
        };
        if let Some(out) = &self.out {
            cfg.run.out = Some(out.display().to_string());
        }
        if let Some(w) = self.workers {
            cfg.run.workers = Some(w);
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a stage command; failures still leave a manifest behind.
fn with_lab(args: &Common, command: &str, body: impl FnOnce(&Lab, &mut Emitter) -> Result<i32>) -> Result<i32> {
    let lab = Lab::new(args.config()?)?;
    let mut em = lab.emitter(command)?;
    let outcome = body(&lab, &mut em);
    if let Err(e) = &outcome {
        em.warn(format!("aborted: {e}"));
    }
    let manifest = em.finish()?;
    let code = outcome?;
    eprintln!(
        "{command}: wrote {} files to {} (config_hash={})",
        manifest.files.len(),
        lab.cfg.out_dir().display(),
        manifest.config_hash
    );
    Ok(code)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Spectrum(a) => with_lab(&a, "spectrum", |lab, em| {
            let spec = lab.spectrum(em)?;
            let show = spec.len().min(5);
            for (i, l) in spec.eigenvalues()[..show].iter().enumerate() {
                println!("lambda_{} = {l:.9e}", i + 1);
            }
            Ok(0)
        }),
        Command::Widths(a) => with_lab(&a, "widths", |lab, em| {
            let spec = lab.spectrum(em)?;
            let w = lab.widths(em, &spec)?;
            let failures = w.failures();
            for f in &failures {
                eprintln!("{f}");
            }
            Ok(if failures.is_empty() { 0 } else { 1 })
        }),
        Command::Greedy(a) => with_lab(&a, "greedy", |lab, em| {
            let g = lab.greedy(em)?;
            println!("selected {} points, final sup power {:.6e}", g.selected.len(), g.sup_history.last().copied().unwrap_or(0.0));
            Ok(0)
        }),
        Command::Entropy(a) => with_lab(&a, "entropy", |lab, em| {
            let spec = lab.spectrum(em)?;
            let e = lab.entropy(em, &spec)?;
            let mut code = 0;
            for c in &e.carl {
                if !c.passed() {
                    eprintln!("Carl inequality (p = {}) violated at n = {:?}", c.p, c.violations);
                    code = 1;
                }
            }
            Ok(code)
        }),
        Command::Campaign(a) => with_lab(&a, "campaign", |lab, em| {
            let report = lab.campaign(em)?;
            print!("{}", report.render());
            Ok(if report.failures().is_empty() { 0 } else { 1 })
        }),
        Command::Report(a) => {
            let report = CampaignReport::load(&a.out.join("campaign.json"))?;
            let text = report.render();
            std::fs::write(a.out.join("report.txt"), &text)?;
            print!("{text}");
            Ok(if report.failures().is_empty() { 0 } else { 1 })
        }
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> ! {
    std::process::exit(run(std::env::args_os()))
}
