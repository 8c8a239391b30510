use std::time::Instant;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::kdtree::KdTree3;
use super::rigid::estimate_rigid_transform;
use super::voxel::{reduce_labeled, reduce_points};
use crate::cloud::{LabeledCloud, PointCloud};
use crate::error::RegistrationError;
use crate::geometry::RigidTransform;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IcpConfig {
    pub max_iterations: usize,
    /// Stop once the relative MSE decrease falls below this.
    pub convergence_eps: f64,
    /// Correspondence gate, meters.
    pub max_correspondence_dist: f64,
    /// Voxel edge for point reduction, meters.
    pub voxel_size: f64,
    /// Keep only pairs whose points are each other's nearest neighbour.
    pub reciprocal: bool,
}

impl Default for IcpConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            convergence_eps: 1e-5,
            max_correspondence_dist: 1.0,
            voxel_size: 0.10,
            reciprocal: false,
        }
    }
}

impl IcpConfig {
    pub fn validate(&self) -> Result<(), RegistrationError> {
        if self.max_iterations == 0 {
            return Err(RegistrationError::InvalidConfig("max_iterations must be positive"));
        }
        if !(self.convergence_eps > 0.0 && self.max_correspondence_dist > 0.0 && self.voxel_size > 0.0) {
            return Err(RegistrationError::InvalidConfig(
                "convergence_eps, max_correspondence_dist and voxel_size must be positive",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcpResult {
    /// Maps the source cloud onto the target cloud.
    pub transform: RigidTransform,
    pub final_mse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Wall-clock seconds, including point reduction and tree build.
    pub elapsed: f64,
    /// MSE after the initial guess and after every accepted iteration.
    pub mse_history: Vec<f64>,
    /// Reduced point counts `(source, target)`.
    pub reduced_sizes: (usize, usize),
}

struct Matches {
    pairs: Vec<(Vector3<f64>, Vector3<f64>)>,
    mse: f64,
}

fn correspond(
    tree: &KdTree3,
    target: &[Vector3<f64>],
    source: &[Vector3<f64>],
    t: &RigidTransform,
    gate: f64,
    reciprocal: bool,
    iteration: usize,
) -> Result<Matches, RegistrationError> {
    let nearest: Vec<(Vector3<f64>, usize, f64)> = source
        .iter()
        .filter_map(|s| {
            let moved = t.apply(s);
            let (j, d) = tree.nearest_vec(&moved)?;
            Some((moved, j, d))
        })
        .collect();
    let back = reciprocal.then(|| {
        let moved: Vec<Vector3<f64>> = nearest.iter().map(|p| p.0).collect();
        KdTree3::from_vectors(&moved)
    });
    let matched: Vec<bool> = nearest
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.2 <= gate
                && back
                    .as_ref()
                    .is_none_or(|b| b.nearest_vec(&target[p.1]).is_some_and(|(k, _)| k == i))
        })
        .collect();
    // Unmatched points count as the gate distance, which keeps the error
    // from rising when a step brings new points inside the gate.
    let mse = nearest
        .iter()
        .zip(&matched)
        .map(|(p, &m)| if m { p.2 * p.2 } else { gate * gate })
        .sum::<f64>()
        / nearest.len().max(1) as f64;
    let pairs: Vec<_> = nearest
        .iter()
        .zip(&matched)
        .filter(|(_, &m)| m)
        .map(|(p, _)| (p.0, target[p.1]))
        .collect();
    if pairs.is_empty() {
        return Err(RegistrationError::NoCorrespondences { iteration, gate });
    }
    Ok(Matches { pairs, mse })
}

/// Point-to-point ICP from `initial_guess`; the result maps `source` into
/// the frame of `target`.
///
/// Both clouds are voxel-reduced first. The MSE is taken over every reduced
/// source point, unmatched points counting at the gate distance. Iterations
/// continue through up to `STALL_LIMIT` steps that fail to lower the MSE;
/// the best transform seen is returned, so the reported MSE sequence never
/// increases.
pub fn icp_align(
    source: &PointCloud,
    target: &PointCloud,
    initial_guess: &RigidTransform,
    cfg: &IcpConfig,
) -> Result<IcpResult, RegistrationError> {
    const STALL_LIMIT: usize = 5;
    let start = Instant::now();
    cfg.validate()?;
    if source.is_empty() || target.is_empty() {
        return Err(RegistrationError::EmptyCloud);
    }
    let src = reduce_points(source, cfg.voxel_size)?.points;
    let tgt = reduce_points(target, cfg.voxel_size)?.points;
    let tree = KdTree3::from_vectors(&tgt);
    let gate = cfg.max_correspondence_dist;
    let matches = |t: &RigidTransform, it| correspond(&tree, &tgt, &src, t, gate, cfg.reciprocal, it);

    let mut transform = *initial_guess;
    let mut current = matches(&transform, 0)?;
    let mut history = vec![current.mse];
    let mut best = (transform, current.mse);
    let mut iterations = 0;
    let mut stalled = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        if best.1 <= f64::MIN_POSITIVE {
            converged = true;
            break;
        }
        let delta = estimate_rigid_transform(&current.pairs)?;
        transform = delta.compose(&transform);
        iterations += 1;
        current = matches(&transform, iterations)?;
        if current.mse < best.1 {
            let relative = (best.1 - current.mse) / best.1;
            best = (transform, current.mse);
            history.push(current.mse);
            stalled = 0;
            if relative < cfg.convergence_eps {
                converged = true;
                break;
            }
        } else {
            stalled += 1;
            if stalled >= STALL_LIMIT {
                converged = true;
                break;
            }
        }
    }
    let (transform, final_mse) = best;

    Ok(IcpResult {
        transform,
        final_mse,
        iterations,
        converged,
        elapsed: start.elapsed().as_secs_f64(),
        mse_history: history,
        reduced_sizes: (src.len(), tgt.len()),
    })
}

/// Moves `new_scan` into the map frame with `alignment`, appends it to
/// `global` and deduplicates the result on a grid of `voxel_size / 2`.
pub fn merge_maps(
    global: &LabeledCloud,
    new_scan: &LabeledCloud,
    alignment: &RigidTransform,
    voxel_size: f64,
) -> Result<LabeledCloud, RegistrationError> {
    if new_scan.is_empty() {
        return Ok(global.clone());
    }
    let mut merged = global.clone();
    merged.cloud.scanline_breaks.clear();
    merged
        .cloud
        .points
        .extend(new_scan.cloud.points.iter().map(|p| alignment.apply(p)));
    merged.labels.extend_from_slice(&new_scan.labels);
    reduce_labeled(&merged, 0.5 * voxel_size)
}
