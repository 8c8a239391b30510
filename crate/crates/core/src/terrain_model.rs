//! Robot-terrain inclination model: triangular patches cut from the terrain
//! points along a planned path, their pitch/roll, and piecewise-linear maps
//! from position to expected attitude.

use std::io::{BufRead, Write};

use nalgebra::{SMatrix, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::cloud::{Frame, Label, LabeledCloud};
use crate::error::{CloudError, FormatError, TerrainModelError};
use crate::geometry::{wrap_angle, Pose6D};
use crate::io::fmt_num;
use crate::registration::KdTree2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    /// Direction of travel leaving this waypoint.
    pub heading: f64,
}

/// Horizontal polyline the robot is planned to follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    waypoints: Vec<Waypoint>,
    arc_length: Vec<f64>,
}

/// Nearest point on a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProjection {
    pub s: f64,
    pub distance: f64,
    /// `ds / d(x, y)`; zero when the projection is clamped to an end.
    pub gradient: Vector2<f64>,
}

const MIN_WAYPOINT_GAP: f64 = 1e-9;

impl PlannedPath {
    /// Consecutive points must be distinct.
    pub fn new(points: &[[f64; 2]]) -> Result<Self, TerrainModelError> {
        if points.len() < 2 {
            return Err(TerrainModelError::InvalidPath);
        }
        let mut arc_length = Vec::with_capacity(points.len());
        let mut waypoints = Vec::with_capacity(points.len());
        let mut s = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                let q = points[i - 1];
                let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                if !(d > MIN_WAYPOINT_GAP) {
                    return Err(TerrainModelError::InvalidPath);
                }
                s += d;
            }
            let (from, to) = if i + 1 < points.len() { (*p, points[i + 1]) } else { (points[i - 1], *p) };
            arc_length.push(s);
            waypoints.push(Waypoint {
                x: p[0],
                y: p[1],
                heading: (to[1] - from[1]).atan2(to[0] - from[0]),
            });
        }
        Ok(Self { waypoints, arc_length })
    }

    /// Polyline through the horizontal positions of `poses`, skipping points
    /// closer than `min_spacing` to the previous kept one. The last pose is
    /// always kept.
    pub fn from_poses(poses: &[Pose6D], min_spacing: f64) -> Result<Self, TerrainModelError> {
        Self::from_points_thinned(poses.iter().map(|p| [p.x, p.y]), min_spacing)
    }

    pub fn from_points_thinned<I: IntoIterator<Item = [f64; 2]>>(
        points: I,
        min_spacing: f64,
    ) -> Result<Self, TerrainModelError> {
        let gap = min_spacing.max(MIN_WAYPOINT_GAP * 10.0);
        let dist = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
        let mut kept: Vec<[f64; 2]> = Vec::new();
        let mut last = None;
        for p in points {
            last = Some(p);
            if kept.last().is_none_or(|&q| dist(p, q) >= gap) {
                kept.push(p);
            }
        }
        if let (Some(p), Some(&q)) = (last, kept.last()) {
            if dist(p, q) > MIN_WAYPOINT_GAP * 10.0 {
                // Move the final kept point onto the true end rather than adding a tiny segment.
                if kept.len() >= 2 {
                    kept.pop();
                }
                kept.push(p);
            }
        }
        Self::new(&kept)
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn arc_lengths(&self) -> &[f64] {
        &self.arc_length
    }

    pub fn length(&self) -> f64 {
        *self.arc_length.last().unwrap_or(&0.0)
    }

    fn segment_of(&self, s: f64) -> usize {
        let i = self.arc_length.partition_point(|&a| a <= s);
        i.saturating_sub(1).min(self.waypoints.len() - 2)
    }

    /// Position and segment heading at arc length `s`, clamped to the path.
    pub fn point_at(&self, s: f64) -> (Vector2<f64>, f64) {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_of(s);
        let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
        let t = (s - self.arc_length[i]) / (self.arc_length[i + 1] - self.arc_length[i]);
        (
            Vector2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)),
            a.heading,
        )
    }

    /// Orthogonal projection of `(x, y)` onto the nearest segment.
    pub fn project(&self, x: f64, y: f64) -> PathProjection {
        let q = Vector2::new(x, y);
        let mut best = PathProjection {
            s: 0.0,
            distance: f64::INFINITY,
            gradient: Vector2::zeros(),
        };
        let last = self.waypoints.len() - 2;
        for i in 0..=last {
            let a = Vector2::new(self.waypoints[i].x, self.waypoints[i].y);
            let b = Vector2::new(self.waypoints[i + 1].x, self.waypoints[i + 1].y);
            let seg = b - a;
            let len = self.arc_length[i + 1] - self.arc_length[i];
            let raw = (q - a).dot(&seg) / (len * len);
            let t = raw.clamp(0.0, 1.0);
            let d = (a + seg * t - q).norm();
            if d < best.distance {
                let outside = (i == 0 && raw < 0.0) || (i == last && raw > 1.0);
                best = PathProjection {
                    s: self.arc_length[i] + t * len,
                    distance: d,
                    gradient: if outside { Vector2::zeros() } else { seg / len },
                };
            }
        }
        best
    }

    /// The part of the path between arc lengths `s0 < s1`.
    pub fn window(&self, s0: f64, s1: f64) -> Result<PlannedPath, TerrainModelError> {
        let s0 = s0.clamp(0.0, self.length());
        let s1 = s1.clamp(0.0, self.length());
        if !(s1 - s0 > MIN_WAYPOINT_GAP * 10.0) {
            return Err(TerrainModelError::InvalidPath);
        }
        let start = self.point_at(s0).0;
        let end = self.point_at(s1).0;
        let mut pts = vec![[start.x, start.y]];
        for (w, &s) in self.waypoints.iter().zip(&self.arc_length) {
            if s > s0 + 1e-6 && s < s1 - 1e-6 {
                pts.push([w.x, w.y]);
            }
        }
        pts.push([end.x, end.y]);
        Self::new(&pts)
    }
}

/// Triangle with `B` and `A` on the path (A ahead of B) and `C` to the left of `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriPatch {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub c: Vector3<f64>,
    /// Path arc length at `B`.
    pub arc_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PatchConfig {
    /// Distance from `B` to `A` along the path (robot length), meters.
    pub length: f64,
    /// Distance from `B` to `C` (half the robot width), meters.
    pub half_width: f64,
    /// Terrain points used for the inverse-distance height estimate.
    pub neighbors: usize,
    pub coverage_radius: f64,
    /// Minimum terrain points within `coverage_radius` of every vertex.
    pub min_coverage: usize,
    /// Samples per local regression line.
    pub fit_window: usize,
}

impl Default for PatchConfig {
    fn default() -> Self {
        Self {
            length: 0.15,
            half_width: 0.2,
            neighbors: 8,
            coverage_radius: 0.5,
            min_coverage: 3,
            fit_window: 5,
        }
    }
}

impl PatchConfig {
    pub fn validate(&self) -> Result<(), TerrainModelError> {
        if !(self.length > 0.0 && self.half_width > 0.0 && self.coverage_radius > 0.0)
            || self.neighbors == 0
            || self.fit_window < 2
        {
            return Err(TerrainModelError::InvalidPatchSize);
        }
        Ok(())
    }
}

/// A patch that could not be built because the terrain points around one of
/// its vertices were too sparse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedPatch {
    pub index: usize,
    pub arc_length: f64,
    /// Terrain points found within the coverage radius of the worst vertex.
    pub coverage: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatchSet {
    pub patches: Vec<TriPatch>,
    pub skipped: Vec<SkippedPatch>,
}

struct HeightSampler {
    tree: KdTree2,
    z: Vec<f64>,
}

impl HeightSampler {
    fn new(cloud: &LabeledCloud) -> Self {
        let mut xy = Vec::new();
        let mut z = Vec::new();
        for (p, l) in cloud.cloud.points.iter().zip(&cloud.labels) {
            if *l == Label::Terrain {
                xy.push([p.x, p.y]);
                z.push(p.z);
            }
        }
        Self { tree: KdTree2::new(xy), z }
    }

    /// Inverse-distance weighted height and the local coverage count.
    fn height(&self, x: f64, y: f64, cfg: &PatchConfig) -> (f64, usize) {
        let near = self.tree.knn(&[x, y], cfg.neighbors);
        let coverage = near.iter().filter(|(_, d)| *d <= cfg.coverage_radius).count();
        if let Some(&(i, d)) = near.first() {
            if d < 1e-9 {
                return (self.z[i], coverage);
            }
        }
        let (num, den) = near.iter().fold((0.0, 0.0), |(num, den), &(i, d)| {
            let w = 1.0 / (d * d);
            (num + w * self.z[i], den + w)
        });
        (if den > 0.0 { num / den } else { f64::NAN }, coverage)
    }
}

/// Cuts the path into consecutive patches of horizontal length `cfg.length`
/// and reads vertex heights from the terrain points of `cloud`.
pub fn extract_patches(path: &PlannedPath, cloud: &LabeledCloud, cfg: &PatchConfig) -> Result<PatchSet, TerrainModelError> {
    cfg.validate()?;
    if cloud.cloud.frame != Frame::World {
        return Err(CloudError::WrongFrame {
            expected: Frame::World,
            actual: cloud.cloud.frame,
        }
        .into());
    }
    let sampler = HeightSampler::new(cloud);
    let count = (path.length() / cfg.length + 1e-9).floor() as usize;
    let mut out = PatchSet::default();
    for k in 0..count {
        let s = k as f64 * cfg.length;
        let (b, _) = path.point_at(s);
        let (a, _) = path.point_at(s + cfg.length);
        let dir = (a - b).normalize();
        let c = b + Vector2::new(-dir.y, dir.x) * cfg.half_width;

        let mut worst = usize::MAX;
        let mut vertex = |p: Vector2<f64>| {
            let (z, cov) = sampler.height(p.x, p.y, cfg);
            worst = worst.min(cov);
            Vector3::new(p.x, p.y, z)
        };
        let (a, b, c) = (vertex(a), vertex(b), vertex(c));
        if worst < cfg.min_coverage {
            out.skipped.push(SkippedPatch {
                index: k,
                arc_length: s,
                coverage: worst,
            });
        } else {
            out.patches.push(TriPatch { a, b, c, arc_length: s });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchAngles {
    pub theta: f64,
    pub alpha: f64,
    pub phi: f64,
    /// `sin(beta) / cos(alpha)` left [-1, 1] and was clamped.
    pub roll_clamped: bool,
}

/// Yaw from the heading of `BA`, pitch from the rise of `A` over `B`, roll
/// from the rise of `C` over `B` corrected for pitch.
pub fn patch_angles(p: &TriPatch) -> Result<PatchAngles, TerrainModelError> {
    let ba_vec = p.a - p.b;
    let bc_vec = p.c - p.b;
    let ba = ba_vec.norm();
    let bc = bc_vec.norm();
    if !(ba >= 1e-6 && bc >= 1e-6) {
        return Err(TerrainModelError::DegeneratePatch { ba, bc });
    }
    let alpha = (ba_vec.z / ba).clamp(-1.0, 1.0).asin();
    let sin_beta = (bc_vec.z / bc).clamp(-1.0, 1.0);
    let ratio = sin_beta / alpha.cos();
    let roll_clamped = ratio.abs() > 1.0;
    Ok(PatchAngles {
        theta: ba_vec.y.atan2(ba_vec.x),
        alpha,
        phi: ratio.clamp(-1.0, 1.0).asin(),
        roll_clamped,
    })
}

/// Attitude expected at one place on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclinationSample {
    /// Midpoint of the patch edge `BA`.
    pub position: Vector3<f64>,
    pub arc_length: f64,
    pub theta: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl InclinationSample {
    pub fn from_patch(p: &TriPatch) -> Result<(Self, bool), TerrainModelError> {
        let ang = patch_angles(p)?;
        let half = 0.5 * Vector2::new(p.a.x - p.b.x, p.a.y - p.b.y).norm();
        Ok((
            Self {
                position: 0.5 * (p.a + p.b),
                arc_length: p.arc_length + half,
                theta: ang.theta,
                alpha: ang.alpha,
                phi: ang.phi,
            },
            ang.roll_clamped,
        ))
    }
}

/// Continuous piecewise-linear function through sorted knots; constant
/// outside the knot range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Knots must be non-empty with strictly increasing keys.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Option<Self> {
        if knots.is_empty() || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return None;
        }
        Some(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn contains(&self, u: f64) -> bool {
        let (lo, hi) = self.support();
        u >= lo && u <= hi
    }

    fn segment(&self, u: f64) -> usize {
        let i = self.knots.partition_point(|k| k.0 <= u);
        i.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub fn eval(&self, u: f64) -> f64 {
        if self.knots.len() == 1 {
            return self.knots[0].1;
        }
        let (lo, hi) = self.support();
        let u = u.clamp(lo, hi);
        let i = self.segment(u);
        let (u0, v0) = self.knots[i];
        let (u1, v1) = self.knots[i + 1];
        v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    }

    /// Slope at `u`; zero outside the support.
    pub fn derivative(&self, u: f64) -> f64 {
        if self.knots.len() == 1 || !self.contains(u) {
            return 0.0;
        }
        let i = self.segment(u);
        let (u0, v0) = self.knots[i];
        let (u1, v1) = self.knots[i + 1];
        (v1 - v0) / (u1 - u0)
    }
}

/// Least-squares lines over every run of `window` consecutive samples; each
/// knot takes the mean prediction of the lines whose window covers it.
fn sliding_fit(keys: &[f64], values: &[f64], window: usize) -> PiecewiseLinear {
    let n = keys.len();
    let w = window.min(n).max(1);
    let mut sum = vec![0.0; n];
    let mut hits = vec![0usize; n];
    for start in 0..=(n - w) {
        let ks = &keys[start..start + w];
        let vs = &values[start..start + w];
        let mk = ks.iter().sum::<f64>() / w as f64;
        let mv = vs.iter().sum::<f64>() / w as f64;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (k, v) in ks.iter().zip(vs) {
            sxy += (k - mk) * (v - mv);
            sxx += (k - mk) * (k - mk);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        for i in start..start + w {
            sum[i] += mv + slope * (keys[i] - mk);
            hits[i] += 1;
        }
    }
    let knots = keys
        .iter()
        .zip(sum.iter().zip(&hits))
        .map(|(&k, (&s, &h))| (k, s / h as f64))
        .collect();
    PiecewiseLinear { knots }
}

/// What the three maps take as input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Parameterization {
    /// `h1(x)`, `h2(y)`, `h3(z)`.
    Axes,
    /// All three maps take the arc length of the position projected on this path.
    ArcLength(PlannedPath),
}

/// Fitted maps from robot position to expected yaw, pitch and roll.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerrainInclinationModel {
    pub h1: PiecewiseLinear,
    pub h2: PiecewiseLinear,
    pub h3: PiecewiseLinear,
    pub parameterization: Parameterization,
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])
}

fn fit_axis(keys: &[f64], values: &[f64], window: usize) -> PiecewiseLinear {
    if keys.len() >= 2 && keys[0] > keys[keys.len() - 1] {
        let k: Vec<f64> = keys.iter().rev().copied().collect();
        let v: Vec<f64> = values.iter().rev().copied().collect();
        sliding_fit(&k, &v, window)
    } else {
        sliding_fit(keys, values, window)
    }
}

/// Unwraps yaw so that consecutive samples differ by less than pi.
fn unwrap(angles: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for a in angles {
        match out.last() {
            Some(&prev) => out.push(prev + wrap_angle(a - prev)),
            None => out.push(a),
        }
    }
    out
}

/// Fits the three maps with the default window of 5 samples.
pub fn fit_inclination_model(samples: &[InclinationSample]) -> Result<TerrainInclinationModel, TerrainModelError> {
    fit_inclination_model_windowed(samples, PatchConfig::default().fit_window)
}

/// Fits `theta = h1(x)`, `alpha = h2(y)`, `phi = h3(z)`. When any of x, y or
/// z is not strictly monotone over the samples, all three maps are fitted
/// against arc length along the polyline through the sample positions.
pub fn fit_inclination_model_windowed(
    samples: &[InclinationSample],
    window: usize,
) -> Result<TerrainInclinationModel, TerrainModelError> {
    if samples.len() < 2 {
        return Err(TerrainModelError::InsufficientSamples(samples.len()));
    }
    if window < 2 {
        return Err(TerrainModelError::InvalidPatchSize);
    }
    let mut ordered = samples.to_vec();
    ordered.sort_by(|a, b| a.arc_length.total_cmp(&b.arc_length));
    let theta = unwrap(ordered.iter().map(|s| s.theta));
    let alpha: Vec<f64> = ordered.iter().map(|s| s.alpha).collect();
    let phi: Vec<f64> = ordered.iter().map(|s| s.phi).collect();
    let xs: Vec<f64> = ordered.iter().map(|s| s.position.x).collect();
    let ys: Vec<f64> = ordered.iter().map(|s| s.position.y).collect();
    let zs: Vec<f64> = ordered.iter().map(|s| s.position.z).collect();

    if strictly_monotone(&xs) && strictly_monotone(&ys) && strictly_monotone(&zs) {
        return Ok(TerrainInclinationModel {
            h1: fit_axis(&xs, &theta, window),
            h2: fit_axis(&ys, &alpha, window),
            h3: fit_axis(&zs, &phi, window),
            parameterization: Parameterization::Axes,
        });
    }

    let path = PlannedPath::new(&ordered.iter().map(|s| [s.position.x, s.position.y]).collect::<Vec<_>>())?;
    let s = path.arc_lengths().to_vec();
    Ok(TerrainInclinationModel {
        h1: sliding_fit(&s, &theta, window),
        h2: sliding_fit(&s, &alpha, window),
        h3: sliding_fit(&s, &phi, window),
        parameterization: Parameterization::ArcLength(path),
    })
}

impl TerrainInclinationModel {
    /// Constant maps, mostly useful in tests.
    pub fn constant(theta: f64, alpha: f64, phi: f64) -> Self {
        let k = |v| PiecewiseLinear { knots: vec![(0.0, v)] };
        Self {
            h1: k(theta),
            h2: k(alpha),
            h3: k(phi),
            parameterization: Parameterization::Axes,
        }
    }

    pub fn is_arc_length(&self) -> bool {
        matches!(self.parameterization, Parameterization::ArcLength(_))
    }

    fn inputs(&self, p: &Vector3<f64>) -> [f64; 3] {
        match &self.parameterization {
            Parameterization::Axes => [p.x, p.y, p.z],
            Parameterization::ArcLength(path) => {
                let s = path.project(p.x, p.y).s;
                [s, s, s]
            }
        }
    }

    /// Expected `(theta, alpha, phi)` at `p`. Inputs outside the support are
    /// clamped to the nearest end; see [`Self::contains`].
    pub fn evaluate(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let u = self.inputs(p);
        Vector3::new(wrap_angle(self.h1.eval(u[0])), self.h2.eval(u[1]), self.h3.eval(u[2]))
    }

    /// Whether `p` lies inside the support of all three maps.
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        match &self.parameterization {
            Parameterization::Axes => self.h1.contains(p.x) && self.h2.contains(p.y) && self.h3.contains(p.z),
            Parameterization::ArcLength(path) => {
                let pr = path.project(p.x, p.y);
                pr.gradient != Vector2::zeros() && self.h1.contains(pr.s)
            }
        }
    }

    /// Jacobian of [`Self::evaluate`] with respect to the 6-D pose state.
    pub fn jacobian(&self, p: &Vector3<f64>) -> SMatrix<f64, 3, 6> {
        let mut h = SMatrix::<f64, 3, 6>::zeros();
        match &self.parameterization {
            Parameterization::Axes => {
                h[(0, 0)] = self.h1.derivative(p.x);
                h[(1, 1)] = self.h2.derivative(p.y);
                h[(2, 2)] = self.h3.derivative(p.z);
            }
            Parameterization::ArcLength(path) => {
                let pr = path.project(p.x, p.y);
                for (row, map) in [&self.h1, &self.h2, &self.h3].into_iter().enumerate() {
                    let d = map.derivative(pr.s);
                    h[(row, 0)] = d * pr.gradient.x;
                    h[(row, 1)] = d * pr.gradient.y;
                }
            }
        }
        h
    }
}

/// Result of building a model from a labeled cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBuild {
    pub model: TerrainInclinationModel,
    pub samples: Vec<InclinationSample>,
    pub skipped: Vec<SkippedPatch>,
    pub roll_clamped: usize,
}

impl ModelBuild {
    /// Mean squared difference between the model and its own samples, per channel.
    pub fn residual(&self) -> Vector3<f64> {
        let n = self.samples.len().max(1) as f64;
        self.samples.iter().fold(Vector3::zeros(), |acc, s| {
            let m = self.model.evaluate(&s.position);
            let d = Vector3::new(wrap_angle(m[0] - s.theta), m[1] - s.alpha, m[2] - s.phi);
            acc + d.component_mul(&d) / n
        })
    }
}

/// Patch extraction, angle computation and fitting in one call.
pub fn build_inclination_model(
    path: &PlannedPath,
    cloud: &LabeledCloud,
    cfg: &PatchConfig,
) -> Result<ModelBuild, TerrainModelError> {
    let set = extract_patches(path, cloud, cfg)?;
    let mut samples = Vec::with_capacity(set.patches.len());
    let mut roll_clamped = 0;
    for p in &set.patches {
        let (s, clamped) = InclinationSample::from_patch(p)?;
        roll_clamped += usize::from(clamped);
        samples.push(s);
    }
    let model = fit_inclination_model_windowed(&samples, cfg.fit_window)?;
    Ok(ModelBuild {
        model,
        samples,
        skipped: set.skipped,
        roll_clamped,
    })
}

/// Writes the knots of every map as `map,key,value` rows. Arc-length models
/// also carry their path as `path,x,y` rows.
pub fn write_model_csv<W: Write>(mut w: W, m: &TerrainInclinationModel) -> Result<(), FormatError> {
    writeln!(w, "map,key,value")?;
    for (name, map) in [("h1", &m.h1), ("h2", &m.h2), ("h3", &m.h3)] {
        for (k, v) in map.knots() {
            writeln!(w, "{name},{},{}", fmt_num(*k), fmt_num(*v))?;
        }
    }
    if let Parameterization::ArcLength(path) = &m.parameterization {
        for p in path.waypoints() {
            writeln!(w, "path,{},{}", fmt_num(p.x), fmt_num(p.y))?;
        }
    }
    Ok(())
}

pub fn read_model_csv<R: BufRead>(r: R) -> Result<TerrainInclinationModel, FormatError> {
    let mut maps: [Vec<(f64, f64)>; 3] = Default::default();
    let mut path = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let n = i + 1;
        if line.is_empty() || (i == 0 && line == "map,key,value") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(FormatError::Parse { line: n, msg: format!("expected 3 fields, got {}", f.len()) });
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| FormatError::Parse { line: n, msg: format!("{s:?}: {e}") })
        };
        let pair = (num(f[1])?, num(f[2])?);
        match f[0] {
            "h1" => maps[0].push(pair),
            "h2" => maps[1].push(pair),
            "h3" => maps[2].push(pair),
            "path" => path.push([pair.0, pair.1]),
            other => return Err(FormatError::Parse { line: n, msg: format!("unknown map {other:?}") }),
        }
    }
    let [k1, k2, k3] = maps;
    let build = |k: Vec<(f64, f64)>, name: &str| {
        PiecewiseLinear::from_knots(k)
            .ok_or_else(|| FormatError::Config(format!("{name}: knots must be non-empty and strictly increasing")))
    };
    let parameterization = if path.is_empty() {
        Parameterization::Axes
    } else {
        Parameterization::ArcLength(PlannedPath::new(&path).map_err(|e| FormatError::Config(e.to_string()))?)
    };
    Ok(TerrainInclinationModel {
        h1: build(k1, "h1")?,
        h2: build(k2, "h2")?,
        h3: build(k3, "h3")?,
        parameterization,
    })
}
