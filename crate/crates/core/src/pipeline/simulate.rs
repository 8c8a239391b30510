use nalgebra::Vector3;

use super::config::RunConfig;
use crate::error::PipelineError;
use crate::geometry::Pose6D;
use crate::io::TimedPose;
use crate::sensor_sim::{
    imu_measurement, odometry_measurement, pose_on_terrain, simulate_scan, step_robot, stream_rng, OdometrySample,
    SimulatedScan,
};
use crate::terrain_model::PlannedPath;

const ODOMETRY_STREAM: u64 = 1;
const IMU_STREAM: u64 = 2;
const SCAN_STREAM_BASE: u64 = 1 << 20;

/// Ground truth and sensor streams of one run.
///
/// `odometry[i]` and `imu[i]` belong to the step from tick `i` to `i + 1`;
/// the IMU reading is taken at tick `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRun {
    pub poses: Vec<Pose6D>,
    pub odometry: Vec<OdometrySample>,
    pub imu: Vec<Vector3<f64>>,
    pub planned: PlannedPath,
    pub dt: f64,
}

impl TruthRun {
    pub fn ticks(&self) -> usize {
        self.odometry.len()
    }

    pub fn time(&self, tick: usize) -> f64 {
        tick as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.time(self.ticks())
    }

    pub fn trajectory(&self) -> Vec<TimedPose> {
        self.poses
            .iter()
            .enumerate()
            .map(|(i, p)| TimedPose { t: self.time(i), pose: *p })
            .collect()
    }
}

/// Drives the robot along the configured arc and records noisy odometry and
/// IMU readings. The planned path is the horizontal trace of the truth.
pub fn simulate_truth(cfg: &RunConfig) -> Result<TruthRun, PipelineError> {
    cfg.validate()?;
    let world = &cfg.world;
    let n = cfg.ticks();
    let yaw_rate = cfg.path.curvature * cfg.speed;
    let mut odo_rng = stream_rng(world.seed, ODOMETRY_STREAM);
    let mut imu_rng = stream_rng(world.seed, IMU_STREAM);

    let mut poses = Vec::with_capacity(n + 1);
    poses.push(pose_on_terrain(&world.terrain, cfg.path.start[0], cfg.path.start[1], cfg.path.heading));
    let mut odometry = Vec::with_capacity(n);
    let mut imu = Vec::with_capacity(n);
    for i in 0..n {
        let from = poses[i];
        let to = step_robot(&world.terrain, &from, cfg.speed, yaw_rate, cfg.dt);
        let odo = odometry_measurement(&from, &to, cfg.speed, cfg.dt, &world.noise, &mut odo_rng)
            .map_err(|e| PipelineError::InvalidConfig(format!("terrain too steep at tick {i}: {e}")))?;
        odometry.push(odo);
        imu.push(imu_measurement(&to, &world.noise, &mut imu_rng));
        poses.push(to);
    }
    let planned = PlannedPath::from_poses(&poses, 0.05)
        .map_err(|e| PipelineError::InvalidConfig(format!("planned path: {e}")))?;
    Ok(TruthRun {
        poses,
        odometry,
        imu,
        planned,
        dt: cfg.dt,
    })
}

/// Ticks at which the robot stops to scan: every `spacing` meters from the
/// start, up to and including the end of the path.
pub fn scan_ticks(cfg: &RunConfig, spacing: f64) -> Vec<usize> {
    let per_meter = 1.0 / (cfg.speed * cfg.dt);
    let count = (cfg.path_length / spacing + 1e-9).floor() as usize;
    let total = cfg.ticks();
    (0..=count)
        .map(|k| ((k as f64 * spacing * per_meter).round() as usize).min(total))
        .collect()
}

/// Laser scan taken at tick `tick`. The noise stream depends only on the seed
/// and the tick, so runs that scan at the same place see the same cloud.
pub fn scan_at(cfg: &RunConfig, truth: &TruthRun, tick: usize) -> SimulatedScan {
    let w = &cfg.world;
    let mut rng = stream_rng(w.seed, SCAN_STREAM_BASE + tick as u64);
    simulate_scan(&w.terrain, &w.obstacles, &w.scanner, &truth.poses[tick], &mut rng)
}
