//! Batch experiment runner: configuration, stage orchestration, caching and
//! result emission, plus preset campaigns for the width-rate claims.
//!
//! Exit codes: 0 success, 1 invariant or target failure, 2 configuration
//! error, 3 time budget exceeded.

pub mod campaign;
pub mod cli;
pub mod config;
pub mod emit;
pub mod run;

pub use campaign::{CampaignReport, TargetCheck};
pub use config::{preset, ExperimentConfig, PRESETS};
pub use emit::{Emitter, RunManifest};
pub use run::{EntropyStage, Lab, WidthsStage};

use crate::error::Error;

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config { .. } => 2,
        Error::BudgetExceeded(_) => 3,
        _ => 1,
    }
}
