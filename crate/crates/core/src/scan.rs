//! Laser measurement geometry and terrain / non-terrain separation.

use nalgebra::Vector3;

use crate::cloud::{Frame, Label, LabeledCloud, PointCloud};
use crate::error::CloudError;
use crate::geometry::Pose6D;

const MIN_HORIZONTAL_SPACING: f64 = 1e-9;

/// One return of the turntable-mounted 2D scanner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawScanPoint {
    /// Measured range, meters.
    pub range: f64,
    /// Elevation of the beam above the laser x-y plane.
    pub gamma: f64,
    /// Turntable azimuth, 0 to pi.
    pub turntable_angle: f64,
}

/// Thresholds of the pseudo-scan-line ground filter.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SeparationConfig {
    /// Maximum elevation step between neighbouring terrain points, meters.
    pub limit_dz: f64,
    /// Maximum absolute slope between neighbouring terrain points.
    pub limit_s: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            limit_dz: 0.08,
            limit_s: 0.35,
        }
    }
}

impl SeparationConfig {
    pub fn validate(&self) -> Result<(), CloudError> {
        if self.limit_dz > 0.0 && self.limit_s > 0.0 {
            Ok(())
        } else {
            Err(CloudError::InvalidThresholds {
                limit_dz: self.limit_dz,
                limit_s: self.limit_s,
            })
        }
    }
}

/// Converts a raw return to laser-frame Cartesian coordinates.
pub fn polar_to_laser_frame(raw: &RawScanPoint) -> Vector3<f64> {
    let (sg, cg) = raw.gamma.sin_cos();
    let (st, ct) = raw.turntable_angle.sin_cos();
    Vector3::new(raw.range * cg * st, raw.range * cg * ct, raw.range * sg)
}

/// Maps a laser-frame cloud into the world frame for a robot at `scan_pose`.
///
/// `mount_offset` is the laser origin expressed in the robot frame; the laser
/// axes are parallel to the robot axes.
pub fn cloud_to_world(
    cloud: &PointCloud,
    scan_pose: &Pose6D,
    mount_offset: &Vector3<f64>,
) -> Result<PointCloud, CloudError> {
    if cloud.frame != Frame::Laser {
        return Err(CloudError::WrongFrame {
            expected: Frame::Laser,
            actual: cloud.frame,
        });
    }
    let r = scan_pose.rotation();
    let t = scan_pose.position();
    Ok(PointCloud {
        points: cloud
            .points
            .iter()
            .map(|p| r * (p + mount_offset) + t)
            .collect(),
        frame: Frame::World,
        scanline_breaks: cloud.scanline_breaks.clone(),
    })
}

/// Output of [`separate_ground_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSeparation {
    pub labeled: LabeledCloud,
    /// Points rejected because they sit (horizontally) on top of their reference.
    pub degenerate: Vec<usize>,
}

/// Labels every point of a world-frame cloud as terrain or non-terrain.
pub fn separate_ground(cloud: &PointCloud, cfg: &SeparationConfig) -> Result<LabeledCloud, CloudError> {
    separate_ground_report(cloud, cfg).map(|s| s.labeled)
}

/// Same as [`separate_ground`], also returning the indices that hit the
/// degenerate-spacing guard.
///
/// Each scan line is walked in order. The first point is terrain; every
/// following point is compared with the most recent terrain point of the same
/// line and is terrain when both the elevation step and the absolute slope are
/// below their limits.
pub fn separate_ground_report(
    cloud: &PointCloud,
    cfg: &SeparationConfig,
) -> Result<GroundSeparation, CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    if cloud.frame != Frame::World {
        return Err(CloudError::WrongFrame {
            expected: Frame::World,
            actual: cloud.frame,
        });
    }
    cfg.validate()?;
    cloud.validate()?;

    let per_line: Vec<(Vec<Label>, Vec<usize>)> = cloud
        .scanlines()
        .into_iter()
        .map(|range| label_line(&cloud.points[range.clone()], range.start, cfg))
        .collect();

    let mut labels = Vec::with_capacity(cloud.len());
    let mut degenerate = Vec::new();
    for (l, d) in per_line {
        labels.extend(l);
        degenerate.extend(d);
    }
    Ok(GroundSeparation {
        labeled: LabeledCloud {
            cloud: cloud.clone(),
            labels,
        },
        degenerate,
    })
}

fn label_line(points: &[Vector3<f64>], offset: usize, cfg: &SeparationConfig) -> (Vec<Label>, Vec<usize>) {
    let mut labels = Vec::with_capacity(points.len());
    let mut degenerate = Vec::new();
    let mut reference = match points.first() {
        Some(p) => *p,
        None => return (labels, degenerate),
    };
    labels.push(Label::Terrain);
    for (i, p) in points.iter().enumerate().skip(1) {
        let horizontal = (p.x - reference.x).hypot(p.y - reference.y);
        if horizontal < MIN_HORIZONTAL_SPACING {
            labels.push(Label::NonTerrain);
            degenerate.push(offset + i);
            continue;
        }
        let dz = p.z - reference.z;
        let slope = dz / horizontal;
        if dz.abs() < cfg.limit_dz && slope.abs() < cfg.limit_s {
            labels.push(Label::Terrain);
            reference = *p;
        } else {
            labels.push(Label::NonTerrain);
        }
    }
    (labels, degenerate)
}
