use std::time::Instant;

use nalgebra::Vector3;

use super::config::{Mode, RunConfig};
use super::simulate::{scan_at, scan_ticks, TruthRun};
use super::stats::{compute_error_stats, convergence_period, reference_markers, ConvergenceRecord, ErrorStats, TimingStats};
use crate::cloud::{Frame, Label, LabeledCloud, PointCloud};
use crate::ekf::{self, ControlInput, EkfState, EkfStep, Matrix6, Vector6};
use crate::error::PipelineError;
use crate::geometry::{Pose6D, RigidTransform};
use crate::io::TimedPose;
use crate::registration::{icp_align, merge_maps, reduce_labeled};
use crate::scan::{cloud_to_world, separate_ground};
use crate::sensor_sim::SimulatedScan;
use crate::terrain_model::{build_inclination_model, TerrainInclinationModel};

/// One scan-to-map alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentRecord {
    pub scan: usize,
    pub tick: usize,
    /// Robot pose in the map frame after alignment.
    pub transform: RigidTransform,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub elapsed: f64,
}

/// Summary of one terrain model build.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRecord {
    pub interval: usize,
    pub samples: usize,
    pub skipped_patches: usize,
    pub roll_clamped: usize,
    /// Mean squared fit residual per channel, rad^2.
    pub residual: [f64; 3],
    /// `None` when no model could be built; the filter then only predicts.
    pub model: Option<TerrainInclinationModel>,
    /// Why the build failed.
    pub failure: Option<String>,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub mode: Mode,
    pub seed: u64,
    pub trajectory: Vec<TimedPose>,
    pub stats: ErrorStats,
    pub timing: TimingStats,
    pub scans: usize,
    pub alignments: Vec<AlignmentRecord>,
    pub global_map: Option<LabeledCloud>,
    /// Filter steps with their timestamps (TILAM only).
    pub ekf_log: Vec<(f64, EkfStep)>,
    pub models: Vec<ModelRecord>,
}

impl RunOutput {
    /// Position error at the last tick.
    pub fn final_error(&self, truth: &TruthRun) -> f64 {
        match (self.trajectory.last(), truth.poses.last()) {
            (Some(e), Some(t)) => (e.pose.position() - t.position()).norm(),
            _ => f64::NAN,
        }
    }
}

fn control(truth: &TruthRun, i: usize) -> ControlInput {
    let o = &truth.odometry[i];
    ControlInput::forward(o.forward_speed, o.gyro, truth.dt)
}

fn laser_to_body(scan: &SimulatedScan, mount: &Vector3<f64>) -> PointCloud {
    PointCloud {
        points: scan.cloud.points.iter().map(|p| p + mount).collect(),
        frame: Frame::Robot,
        scanline_breaks: scan.cloud.scanline_breaks.clone(),
    }
}

fn with_labels(cloud: PointCloud, labels: Vec<Label>) -> LabeledCloud {
    LabeledCloud { cloud, labels }
}

/// Global map plus the bookkeeping of every scan folded into it.
struct Mapper<'a> {
    cfg: &'a RunConfig,
    global: LabeledCloud,
    records: Vec<AlignmentRecord>,
    seconds: f64,
}

impl<'a> Mapper<'a> {
    /// Starts the map from a scan taken at a known pose. Returns the scan
    /// labeled in the world frame.
    fn start(cfg: &'a RunConfig, scan: &SimulatedScan, pose: &Pose6D) -> Result<(Self, LabeledCloud), PipelineError> {
        let t0 = Instant::now();
        let err = |source| PipelineError::Scan { scan: 0, source };
        let world = cloud_to_world(&scan.cloud, pose, &cfg.world.scanner.mount()).map_err(err)?;
        let labeled = separate_ground(&world, &cfg.separation).map_err(err)?;
        let global = reduce_labeled(&labeled, 0.5 * cfg.icp.voxel_size)
            .map_err(|source| PipelineError::Registration { scan: 0, source })?;
        let mapper = Self {
            cfg,
            global,
            records: Vec::new(),
            seconds: t0.elapsed().as_secs_f64(),
        };
        Ok((mapper, labeled))
    }

    /// Labels a new scan placed at `guess`, aligns its non-terrain points to
    /// the map and merges it. Returns the corrected pose and the scan labeled
    /// in the world frame at that pose.
    fn add(
        &mut self,
        index: usize,
        tick: usize,
        scan: &SimulatedScan,
        guess: &Pose6D,
    ) -> Result<(Pose6D, LabeledCloud), PipelineError> {
        let t0 = Instant::now();
        let scan_err = |source| PipelineError::Scan { scan: index, source };
        let reg_err = |source| PipelineError::Registration { scan: index, source };
        let mount = self.cfg.world.scanner.mount();
        let world = cloud_to_world(&scan.cloud, guess, &mount).map_err(scan_err)?;
        let labels = separate_ground(&world, &self.cfg.separation).map_err(scan_err)?.labels;
        let body = with_labels(laser_to_body(scan, &mount), labels);

        let source = body.select(Label::NonTerrain);
        let target = self.global.select(Label::NonTerrain);
        let result = icp_align(&source, &target, &guess.to_transform(), &self.cfg.icp).map_err(reg_err)?;
        self.global = merge_maps(&self.global, &body, &result.transform, self.cfg.icp.voxel_size).map_err(reg_err)?;

        let mut placed = result.transform.apply_cloud(&body.cloud);
        placed.frame = Frame::World;
        self.records.push(AlignmentRecord {
            scan: index,
            tick,
            transform: result.transform,
            mse: result.final_mse,
            iterations: result.iterations,
            converged: result.converged,
            elapsed: result.elapsed,
        });
        self.seconds += t0.elapsed().as_secs_f64();
        Ok((Pose6D::from_transform(&result.transform), with_labels(placed, body.labels)))
    }
}

fn reseed_covariance(cfg: &RunConfig) -> Matrix6 {
    let p = cfg.reseed_position_sigma.powi(2);
    let a = cfg.reseed_angle_sigma.powi(2);
    Matrix6::from_diagonal(&Vector6::new(p, p, p, a, a, a))
}

fn timed(truth: &TruthRun, poses: Vec<Pose6D>) -> Vec<TimedPose> {
    poses
        .into_iter()
        .enumerate()
        .map(|(i, pose)| TimedPose { t: truth.time(i), pose })
        .collect()
}

fn finish(
    cfg: &RunConfig,
    truth: &TruthRun,
    mode: Mode,
    poses: Vec<Pose6D>,
    timing: TimingStats,
    mapper: Option<Mapper<'_>>,
    scans: usize,
    ekf_log: Vec<(f64, EkfStep)>,
    models: Vec<ModelRecord>,
) -> Result<RunOutput, PipelineError> {
    let trajectory = timed(truth, poses);
    let markers = reference_markers(truth.duration(), cfg.markers);
    let stats = compute_error_stats(&trajectory, &truth.trajectory(), &markers)?;
    let (alignments, global_map) = match mapper {
        Some(m) => (m.records, Some(m.global)),
        None => (Vec::new(), None),
    };
    Ok(RunOutput {
        mode,
        seed: cfg.seed(),
        trajectory,
        stats,
        timing,
        scans,
        alignments,
        global_map,
        ekf_log,
        models,
    })
}

struct TilamTrace<'a> {
    poses: Vec<Pose6D>,
    timing: TimingStats,
    mapper: Mapper<'a>,
    scans: usize,
    log: Vec<(f64, EkfStep)>,
    models: Vec<ModelRecord>,
}

/// The TILAM loop. The map is anchored at `map_pose`; the filter starts
/// from `filter_start`. With `first_interval_only` the loop stops before the
/// first alignment.
fn tilam_loop<'a>(
    cfg: &'a RunConfig,
    truth: &TruthRun,
    map_pose: &Pose6D,
    filter_start: &Pose6D,
    first_interval_only: bool,
) -> Result<TilamTrace<'a>, PipelineError> {
    let stops = scan_ticks(cfg, cfg.tilam_scan_spacing);
    let n = truth.ticks();
    let (mut mapper, mut labeled) = Mapper::start(cfg, &scan_at(cfg, truth, stops[0]), map_pose)?;
    let mut state = EkfState::new(filter_start, cfg.ekf.initial_covariance());
    let mut poses = vec![*filter_start];
    let mut log = vec![(
        0.0,
        EkfStep {
            state,
            innovation: Vector3::zeros(),
        },
    )];
    let mut timing = TimingStats::default();
    let mut models = Vec::new();
    let q = cfg.ekf.process_noise(cfg.speed);
    let correlated_steps = cfg.patch.fit_window as f64 * cfg.patch.length / (cfg.speed * cfg.dt);
    let mut scans = 1;

    for (interval, &start) in stops.iter().enumerate() {
        let end = stops.get(interval + 1).copied().unwrap_or(n);
        if end <= start {
            break;
        }
        let t0 = Instant::now();
        let s0 = truth.planned.project(state.mean[0], state.mean[1]).s;
        let travel = (end - start) as f64 * cfg.speed * cfg.dt;
        // Ground inside the blind radius is never observed, so the model starts beyond it.
        let near = s0 + cfg.world.scanner.blind_radius();
        let build = truth
            .planned
            .window(near, s0 + travel + 0.5)
            .and_then(|window| build_inclination_model(&window, &labeled, &cfg.patch));
        let rm = match &build {
            Ok(b) => cfg.ekf.measurement_noise_with_residual(&b.residual(), correlated_steps),
            Err(_) => cfg.ekf.measurement_noise(),
        };
        for i in start..end {
            let ekf_err = |source| PipelineError::Ekf { interval, source };
            let prior = ekf::predict(&state, &control(truth, i), &q).map_err(ekf_err)?;
            let step = match &build {
                Ok(b) => {
                    let c = ekf::update(&prior, &truth.imu[i], &b.model, &rm).map_err(ekf_err)?;
                    EkfStep {
                        state: c.state,
                        innovation: c.innovation,
                    }
                }
                Err(_) => EkfStep {
                    state: prior,
                    innovation: Vector3::zeros(),
                },
            };
            state = step.state;
            poses.push(state.pose());
            log.push((truth.time(i + 1), step));
        }
        timing.localization_calls += 1;
        timing.localization_ticks += end - start;
        timing.localization_seconds += t0.elapsed().as_secs_f64();
        models.push(match build {
            Ok(b) => ModelRecord {
                interval,
                samples: b.samples.len(),
                skipped_patches: b.skipped.len(),
                roll_clamped: b.roll_clamped,
                residual: b.residual().into(),
                model: Some(b.model),
                failure: None,
            },
            Err(e) => ModelRecord {
                interval,
                samples: 0,
                skipped_patches: 0,
                roll_clamped: 0,
                residual: [0.0; 3],
                model: None,
                failure: Some(e.to_string()),
            },
        });

        if first_interval_only || interval + 1 >= stops.len() {
            break;
        }
        let (corrected, next) = mapper.add(interval + 1, end, &scan_at(cfg, truth, end), &state.pose())?;
        scans += 1;
        labeled = next;
        state = EkfState::new(&corrected, reseed_covariance(cfg));
        *poses.last_mut().expect("poses never empty") = corrected;
        log.last_mut().expect("log never empty").1.state = state;
    }
    timing.matching_calls = mapper.records.len();
    timing.matching_seconds = mapper.seconds;
    Ok(TilamTrace {
        poses,
        timing,
        mapper,
        scans,
        log,
        models,
    })
}

/// Stop-scan-go with the terrain-inclination EKF between sparse scans.
pub fn run_tilam(cfg: &RunConfig, truth: &TruthRun) -> Result<RunOutput, PipelineError> {
    let start = truth.poses[0];
    let t = tilam_loop(cfg, truth, &start, &start, false)?;
    finish(cfg, truth, Mode::Tilam, t.poses, t.timing, Some(t.mapper), t.scans, t.log, t.models)
}

/// Dead reckoning between dense scans, every scan aligned to the map by ICP.
pub fn run_icp_slam_baseline(cfg: &RunConfig, truth: &TruthRun) -> Result<RunOutput, PipelineError> {
    let stops = scan_ticks(cfg, cfg.baseline_scan_spacing);
    let n = truth.ticks();
    let start = truth.poses[0];
    let (mut mapper, _) = Mapper::start(cfg, &scan_at(cfg, truth, stops[0]), &start)?;
    let mut poses = vec![start];
    let mut mean = start.to_vector();
    let mut timing = TimingStats::default();
    let mut scans = 1;

    for (interval, &from) in stops.iter().enumerate() {
        let end = stops.get(interval + 1).copied().unwrap_or(n);
        if end > from {
            let t0 = Instant::now();
            for i in from..end {
                mean = ekf::transition(&mean, &control(truth, i))
                    .map_err(|source| PipelineError::Ekf { interval, source })?;
                poses.push(Pose6D::from_vector(&mean));
            }
            timing.localization_calls += 1;
            timing.localization_ticks += end - from;
            timing.localization_seconds += t0.elapsed().as_secs_f64();
        }
        if interval + 1 >= stops.len() {
            break;
        }
        let (corrected, _) = mapper.add(interval + 1, end, &scan_at(cfg, truth, end), &Pose6D::from_vector(&mean))?;
        scans += 1;
        mean = corrected.to_vector();
        *poses.last_mut().expect("poses never empty") = corrected;
    }
    timing.matching_calls = mapper.records.len();
    timing.matching_seconds = mapper.seconds;
    finish(cfg, truth, Mode::IcpSlam, poses, timing, Some(mapper), scans, Vec::new(), Vec::new())
}

/// Odometry integration from the known start, never corrected.
pub fn run_dead_reckoning(cfg: &RunConfig, truth: &TruthRun) -> Result<RunOutput, PipelineError> {
    let t0 = Instant::now();
    let mut mean = truth.poses[0].to_vector();
    let mut poses = vec![truth.poses[0]];
    for i in 0..truth.ticks() {
        mean = ekf::transition(&mean, &control(truth, i)).map_err(|source| PipelineError::Ekf { interval: 0, source })?;
        poses.push(Pose6D::from_vector(&mean));
    }
    let timing = TimingStats {
        localization_calls: 1,
        localization_ticks: truth.ticks(),
        localization_seconds: t0.elapsed().as_secs_f64(),
        ..Default::default()
    };
    finish(cfg, truth, Mode::DeadReckoning, poses, timing, None, 0, Vec::new(), Vec::new())
}

pub fn run_mode(cfg: &RunConfig, truth: &TruthRun, mode: Mode) -> Result<RunOutput, PipelineError> {
    match mode {
        Mode::Tilam => run_tilam(cfg, truth),
        Mode::IcpSlam => run_icp_slam_baseline(cfg, truth),
        Mode::DeadReckoning => run_dead_reckoning(cfg, truth),
    }
}

/// For every initial position offset, starts the filter at truth plus the
/// offset (the first scan and the map stay at the true pose) and measures how
/// long the first inter-scan interval takes to settle.
pub fn convergence_study(
    cfg: &RunConfig,
    truth: &TruthRun,
    offsets: &[[f64; 3]],
) -> Result<Vec<ConvergenceRecord>, PipelineError> {
    let start = truth.poses[0];
    offsets
        .iter()
        .map(|o| {
            let mut seeded = start;
            seeded.x += o[0];
            seeded.y += o[1];
            seeded.z += o[2];
            let trace = tilam_loop(cfg, truth, &start, &seeded, true)?;
            let errors: Vec<f64> = trace
                .poses
                .iter()
                .zip(&truth.poses)
                .map(|(e, t)| (e.position() - t.position()).norm())
                .collect();
            Ok(ConvergenceRecord {
                initial_error: *o,
                period: convergence_period(&errors, truth.dt, cfg.convergence.threshold, cfg.convergence.window),
                final_error: errors.last().copied().unwrap_or(f64::NAN),
            })
        })
        .collect()
}
