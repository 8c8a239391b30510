use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::io::TimedPose;

/// Absolute position error statistics over the reference markers.
///
/// Variances are population variances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean: [f64; 3],
    pub variance: [f64; 3],
    pub d_mean: f64,
    pub d_variance: f64,
    pub markers: usize,
}

/// `count` marker times spread evenly over `(0, duration]`.
pub fn reference_markers(duration: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| duration * i as f64 / count as f64).collect()
}

/// Position of `traj` at time `t` by linear interpolation; `None` outside its span.
pub fn position_at(traj: &[TimedPose], t: f64) -> Option<Vector3<f64>> {
    let first = traj.first()?;
    let last = traj.last()?;
    if t < first.t || t > last.t {
        return None;
    }
    let i = traj.partition_point(|p| p.t <= t);
    if i >= traj.len() {
        return Some(last.pose.position());
    }
    let (a, b) = (&traj[i - 1], &traj[i]);
    let w = (t - a.t) / (b.t - a.t);
    Some(a.pose.position() * (1.0 - w) + b.pose.position() * w)
}

fn mean_var(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    let var = v.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Per-axis absolute errors and Euclidean distance at every marker covered
/// by both trajectories.
pub fn compute_error_stats(est: &[TimedPose], truth: &[TimedPose], markers: &[f64]) -> Result<ErrorStats, PipelineError> {
    let errs: Vec<Vector3<f64>> = markers
        .iter()
        .filter_map(|&t| Some(position_at(est, t)? - position_at(truth, t)?))
        .collect();
    if errs.is_empty() {
        return Err(PipelineError::EmptyMarkers);
    }
    let mut out = ErrorStats {
        markers: errs.len(),
        ..Default::default()
    };
    for k in 0..3 {
        (out.mean[k], out.variance[k]) = mean_var(errs.iter().map(|e| e[k].abs()));
    }
    (out.d_mean, out.d_variance) = mean_var(errs.iter().map(|e| e.norm()));
    Ok(out)
}

/// Wall-clock cost of the two phases of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TimingStats {
    /// Inter-scan localization intervals (model build plus filter, or dead reckoning).
    pub localization_calls: usize,
    pub localization_ticks: usize,
    pub localization_seconds: f64,
    /// Scan alignments (ground separation, ICP and map merge).
    pub matching_calls: usize,
    pub matching_seconds: f64,
}

impl TimingStats {
    pub fn total_seconds(&self) -> f64 {
        self.localization_seconds + self.matching_seconds
    }

    pub fn localization_per_call(&self) -> f64 {
        per(self.localization_seconds, self.localization_calls)
    }

    pub fn localization_per_tick(&self) -> f64 {
        per(self.localization_seconds, self.localization_ticks)
    }

    pub fn matching_per_call(&self) -> f64 {
        per(self.matching_seconds, self.matching_calls)
    }
}

fn per(total: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// Outcome of one initial-offset trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub initial_error: [f64; 3],
    /// Seconds until the error settles; `None` when it never does inside the interval.
    pub period: Option<f64>,
    pub final_error: f64,
}

impl ConvergenceRecord {
    pub fn converged(&self) -> bool {
        self.period.is_some()
    }
}

/// First time from which `errors` (sampled every `dt`) stay below
/// `threshold` for at least `window` seconds.
pub fn convergence_period(errors: &[f64], dt: f64, threshold: f64, window: f64) -> Option<f64> {
    let need = (window / dt - 1e-9).ceil() as usize;
    let mut run_start = None;
    for (i, &e) in errors.iter().enumerate() {
        if e < threshold {
            let s = *run_start.get_or_insert(i);
            if i - s >= need {
                return Some(s as f64 * dt);
            }
        } else {
            run_start = None;
        }
    }
    None
}
