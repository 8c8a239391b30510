//! Simulated experiments: TILAM, an ICP-only baseline and dead reckoning on
//! the same world and sensor streams, plus their evaluation.

mod config;
mod report;
mod run;
mod simulate;
mod stats;

pub use config::{ConvergenceConfig, Mode, PathConfig, RunConfig};
pub use report::{parse_stats_report, write_alignment_log, write_convergence_csv, write_stats_report};
pub use run::{
    convergence_study, run_dead_reckoning, run_icp_slam_baseline, run_mode, run_tilam, AlignmentRecord, ModelRecord,
    RunOutput,
};
pub use simulate::{scan_at, scan_ticks, simulate_truth, TruthRun};
pub use stats::{
    compute_error_stats, convergence_period, position_at, reference_markers, ConvergenceRecord, ErrorStats,
    TimingStats,
};

use crate::error::PipelineError;

/// Paired results of the three modes on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRun {
    pub seed: u64,
    pub tilam: RunOutput,
    pub baseline: RunOutput,
    pub dead_reckoning: RunOutput,
}

/// Runs all three modes on the same world and sensor streams.
pub fn paired_run(cfg: &RunConfig, seed: u64) -> Result<PairedRun, PipelineError> {
    let cfg = cfg.clone().with_seed(seed);
    let truth = simulate_truth(&cfg)?;
    Ok(PairedRun {
        seed,
        tilam: run_tilam(&cfg, &truth)?,
        baseline: run_icp_slam_baseline(&cfg, &truth)?,
        dead_reckoning: run_dead_reckoning(&cfg, &truth)?,
    })
}
