//! Voxel-grid point reduction.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::cloud::{Label, LabeledCloud, PointCloud};
use crate::error::RegistrationError;

type VoxelKey = (i64, i64, i64);

fn key(p: &Vector3<f64>, size: f64) -> VoxelKey {
    (
        (p.x / size).floor() as i64,
        (p.y / size).floor() as i64,
        (p.z / size).floor() as i64,
    )
}

/// Replaces the points of every occupied voxel by their centroid.
///
/// Output is ordered by voxel index (x, then y, then z). Scan line
/// structure does not survive the reordering.
pub fn reduce_points(cloud: &PointCloud, voxel_size: f64) -> Result<PointCloud, RegistrationError> {
    if !(voxel_size > 0.0) {
        return Err(RegistrationError::InvalidConfig("voxel size must be positive"));
    }
    let mut grid: BTreeMap<VoxelKey, (Vector3<f64>, usize)> = BTreeMap::new();
    for p in &cloud.points {
        let e = grid.entry(key(p, voxel_size)).or_insert((Vector3::zeros(), 0));
        e.0 += p;
        e.1 += 1;
    }
    Ok(PointCloud::new(
        grid.into_values().map(|(sum, n)| sum / n as f64).collect(),
        cloud.frame,
    ))
}

/// Label-aware variant of [`reduce_points`]: one centroid per voxel and label.
pub fn reduce_labeled(cloud: &LabeledCloud, voxel_size: f64) -> Result<LabeledCloud, RegistrationError> {
    if !(voxel_size > 0.0) {
        return Err(RegistrationError::InvalidConfig("voxel size must be positive"));
    }
    let mut grid: BTreeMap<(VoxelKey, Label), (Vector3<f64>, usize)> = BTreeMap::new();
    for (p, l) in cloud.cloud.points.iter().zip(&cloud.labels) {
        let e = grid.entry((key(p, voxel_size), *l)).or_insert((Vector3::zeros(), 0));
        e.0 += p;
        e.1 += 1;
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut labels = Vec::with_capacity(grid.len());
    for ((_, l), (sum, n)) in grid {
        points.push(sum / n as f64);
        labels.push(l);
    }
    Ok(LabeledCloud {
        cloud: PointCloud::new(points, cloud.cloud.frame),
        labels,
    })
}
