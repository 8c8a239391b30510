use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::terrain::TerrainField;
use crate::cloud::{Frame, Label, PointCloud};
use crate::geometry::Pose6D;
use crate::scan::{polar_to_laser_frame, RawScanPoint};

const MARCH_STEP: f64 = 0.02;
const REFINE_TOLERANCE: f64 = 1e-3;
/// How far tree trunks extend below their base height.
const TRUNK_FOOTING: f64 = 1.0;

/// A tree trunk: vertical cylinder standing on the terrain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub center: [f64; 2],
    pub radius: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleSet {
    pub cylinders: Vec<Cylinder>,
}

impl ObstacleSet {
    pub fn validate(&self) -> Result<(), String> {
        for c in &self.cylinders {
            if c.radius <= 0.0 || c.height <= 0.0 {
                return Err(format!(
                    "cylinder at {:?} needs positive radius and height",
                    c.center
                ));
            }
        }
        Ok(())
    }
}

/// Closed-form first intersection of a ray with a vertical cylinder whose
/// axis passes through `(cx, cy)` and spans `z_lo..=z_hi` (side and top cap).
pub fn ray_cylinder(
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    center: [f64; 2],
    radius: f64,
    z_lo: f64,
    z_hi: f64,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut keep = |t: f64| {
        if t > 1e-9 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    let ox = origin.x - center[0];
    let oy = origin.y - center[1];
    let a = dir.x * dir.x + dir.y * dir.y;
    if a > 1e-15 {
        let b = 2.0 * (ox * dir.x + oy * dir.y);
        let c = ox * ox + oy * oy - radius * radius;
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                let z = origin.z + t * dir.z;
                if (z_lo..=z_hi).contains(&z) {
                    keep(t);
                    break;
                }
            }
        }
    }
    if dir.z.abs() > 1e-15 {
        let t = (z_hi - origin.z) / dir.z;
        let x = ox + t * dir.x;
        let y = oy + t * dir.y;
        if x * x + y * y <= radius * radius {
            keep(t);
        }
    }
    best
}

/// Turntable scanner geometry and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScannerConfig {
    /// Turntable sweep, radians.
    pub horizontal_fov: f64,
    /// Elevation sweep centred on the laser x-y plane, radians.
    pub vertical_fov: f64,
    /// Step of both sweeps, radians.
    pub angular_resolution: f64,
    pub max_range: f64,
    pub range_noise_sigma: f64,
    /// Laser origin in the robot frame.
    pub mount_offset: [f64; 3],
}

impl Default for ScannerConfig {
    fn default() -> Self {
        Self {
            horizontal_fov: PI,
            vertical_fov: 80f64.to_radians(),
            angular_resolution: 0.5f64.to_radians(),
            max_range: 8.0,
            range_noise_sigma: 0.002,
            mount_offset: [0.0, 0.0, 1.0],
        }
    }
}

impl ScannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.angular_resolution <= 0.0 || self.max_range <= 0.0 {
            return Err("scanner resolution and max range must be positive".into());
        }
        if self.range_noise_sigma < 0.0 {
            return Err("range noise sigma must be non-negative".into());
        }
        Ok(())
    }

    pub fn mount(&self) -> Vector3<f64> {
        Vector3::from(self.mount_offset)
    }

    /// Horizontal distance to the closest ground return on level terrain.
    pub fn blind_radius(&self) -> f64 {
        self.mount_offset[2].max(0.0) / (0.5 * self.vertical_fov).tan()
    }

    fn steps(fov: f64, res: f64) -> usize {
        (fov / res + 1e-9).floor() as usize + 1
    }

    pub fn turntable_angles(&self) -> Vec<f64> {
        (0..Self::steps(self.horizontal_fov, self.angular_resolution))
            .map(|i| i as f64 * self.angular_resolution)
            .collect()
    }

    pub fn elevation_angles(&self) -> Vec<f64> {
        let lo = -0.5 * self.vertical_fov;
        (0..Self::steps(self.vertical_fov, self.angular_resolution))
            .map(|i| lo + i as f64 * self.angular_resolution)
            .collect()
    }
}

/// What a simulated return hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceTag {
    Surface,
    Obstacle,
}

impl SurfaceTag {
    pub fn label(self) -> Label {
        match self {
            SurfaceTag::Surface => Label::Terrain,
            SurfaceTag::Obstacle => Label::NonTerrain,
        }
    }
}

/// Laser-frame cloud plus the ground-truth origin of every return.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedScan {
    pub cloud: PointCloud,
    pub raw: Vec<RawScanPoint>,
    pub origins: Vec<SurfaceTag>,
}

impl SimulatedScan {
    pub fn truth_labels(&self) -> Vec<Label> {
        self.origins.iter().map(|t| t.label()).collect()
    }
}

/// First terrain crossing along the ray, refined by bisection.
fn ray_terrain(field: &TerrainField, origin: &Vector3<f64>, dir: &Vector3<f64>, max_t: f64) -> Option<f64> {
    let gap = |t: f64| {
        let p = origin + dir * t;
        p.z - field.height(p.x, p.y)
    };
    let lipschitz = dir.z.abs() + field.lipschitz_bound() * dir.x.hypot(dir.y);
    let bump_top = field.max_bump_height();
    // Height above the base plane changes linearly along the ray.
    let plane_rate = dir.z - field.gradient_x * dir.x - field.gradient_y * dir.y;
    let plane_gap0 = origin.z - field.gradient_x * origin.x - field.gradient_y * origin.y;

    let mut t_prev = 0.0;
    let mut g_prev = gap(0.0);
    if g_prev <= 0.0 {
        return None;
    }
    while t_prev < max_t {
        if plane_rate >= 0.0 && plane_gap0 + plane_rate * t_prev > bump_top {
            return None;
        }
        let step = (g_prev / lipschitz).max(MARCH_STEP);
        let t = (t_prev + step).min(max_t);
        let g = gap(t);
        if g <= 0.0 {
            let (mut lo, mut hi) = (t_prev, t);
            while hi - lo > REFINE_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if gap(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        if t >= max_t {
            break;
        }
        t_prev = t;
        g_prev = g;
    }
    None
}

/// Nearest hit along a world-frame ray against terrain and trunks.
pub fn cast_ray(
    field: &TerrainField,
    obstacles: &ObstacleSet,
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    max_range: f64,
) -> Option<(f64, SurfaceTag)> {
    let mut best = ray_terrain(field, origin, dir, max_range).map(|t| (t, SurfaceTag::Surface));
    for c in &obstacles.cylinders {
        let base = field.height(c.center[0], c.center[1]);
        if let Some(t) = ray_cylinder(origin, dir, c.center, c.radius, base - TRUNK_FOOTING, base + c.height) {
            if t <= max_range && best.is_none_or(|(b, _)| t < b) {
                best = Some((t, SurfaceTag::Obstacle));
            }
        }
    }
    best
}

/// Sweeps the turntable scanner from `true_pose` and returns a laser-frame cloud.
///
/// Scan lines are ordered by turntable angle; inside a line the elevation
/// increases. Returns beyond `max_range` are dropped. Ray casting runs in
/// parallel while the range noise is drawn sequentially from `rng`, so the
/// output only depends on the inputs and the RNG state.
pub fn simulate_scan<R: Rng>(
    field: &TerrainField,
    obstacles: &ObstacleSet,
    cfg: &ScannerConfig,
    true_pose: &Pose6D,
    rng: &mut R,
) -> SimulatedScan {
    let rot = true_pose.rotation();
    let origin = rot * cfg.mount() + true_pose.position();
    let gammas = cfg.elevation_angles();

    let lines: Vec<Vec<(RawScanPoint, SurfaceTag)>> = cfg
        .turntable_angles()
        .into_par_iter()
        .map(|turntable_angle| {
            gammas
                .iter()
                .filter_map(|&gamma| {
                    let unit = RawScanPoint {
                        range: 1.0,
                        gamma,
                        turntable_angle,
                    };
                    let dir = rot * polar_to_laser_frame(&unit);
                    cast_ray(field, obstacles, &origin, &dir, cfg.max_range).map(|(range, tag)| {
                        (
                            RawScanPoint {
                                range,
                                gamma,
                                turntable_angle,
                            },
                            tag,
                        )
                    })
                })
                .collect()
        })
        .collect();

    let noise = (cfg.range_noise_sigma > 0.0).then(|| Normal::new(0.0, cfg.range_noise_sigma).expect("sigma checked"));
    let total: usize = lines.iter().map(Vec::len).sum();
    let mut raw = Vec::with_capacity(total);
    let mut origins = Vec::with_capacity(total);
    let mut points = Vec::with_capacity(total);
    let mut breaks = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        if !points.is_empty() {
            breaks.push(points.len());
        }
        for (mut r, tag) in line {
            if let Some(n) = &noise {
                r.range = (r.range + n.sample(rng)).max(0.0);
            }
            points.push(polar_to_laser_frame(&r));
            raw.push(r);
            origins.push(tag);
        }
    }
    SimulatedScan {
        cloud: PointCloud {
            points,
            frame: Frame::Laser,
            scanline_breaks: breaks,
        },
        raw,
        origins,
    }
}
