use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::terrain::TerrainField;
use crate::error::GeometryError;
use crate::geometry::{euler_rate_matrix, wrap_angle, Pose6D};

/// Sensor noise levels of the on-board IMU, gyros and wheel encoders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Standard deviation of the absolute yaw/pitch/roll readings, radians.
    pub imu_angle_sigma: f64,
    /// Standard deviation of the encoder forward speed, m/s.
    pub encoder_vel_sigma: f64,
    /// Standard deviation of each gyro axis, rad/s.
    pub gyro_sigma: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            imu_angle_sigma: 0.5f64.to_radians(),
            encoder_vel_sigma: 0.02,
            gyro_sigma: 0.01,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            imu_angle_sigma: 0.0,
            encoder_vel_sigma: 0.0,
            gyro_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.imu_angle_sigma < 0.0 || self.encoder_vel_sigma < 0.0 || self.gyro_sigma < 0.0 {
            return Err("noise sigmas must be non-negative".into());
        }
        Ok(())
    }
}

fn gaussian<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        Normal::new(0.0, sigma).expect("positive sigma").sample(rng)
    } else {
        0.0
    }
}

/// Advances the robot by one time step under the no-slip assumption.
///
/// The robot travels `forward_speed * dt` along its body x axis (measured on
/// the surface), so the horizontal displacement is shortened by `cos(pitch)`.
/// Height and attitude are then re-read from the terrain at the new position.
pub fn step_robot(field: &TerrainField, state: &Pose6D, forward_speed: f64, yaw_rate: f64, dt: f64) -> Pose6D {
    let horizontal = forward_speed * dt * state.alpha.cos();
    let (s, c) = state.theta.sin_cos();
    let x = state.x + horizontal * c;
    let y = state.y + horizontal * s;
    let theta = wrap_angle(state.theta + yaw_rate * dt);
    let (alpha, phi) = field.attitude(x, y, theta);
    Pose6D {
        x,
        y,
        z: field.height(x, y),
        theta,
        alpha,
        phi,
    }
}

/// Places a robot with heading `theta` on the terrain at `(x, y)`.
pub fn pose_on_terrain(field: &TerrainField, x: f64, y: f64, theta: f64) -> Pose6D {
    let (alpha, phi) = field.attitude(x, y, theta);
    Pose6D::new(x, y, field.height(x, y), theta, alpha, phi)
}

/// Absolute attitude reading: true angles plus independent Gaussian noise.
pub fn imu_measurement<R: Rng>(true_pose: &Pose6D, noise: &NoiseConfig, rng: &mut R) -> Vector3<f64> {
    Vector3::new(
        wrap_angle(true_pose.theta + gaussian(rng, noise.imu_angle_sigma)),
        wrap_angle(true_pose.alpha + gaussian(rng, noise.imu_angle_sigma)),
        wrap_angle(true_pose.phi + gaussian(rng, noise.imu_angle_sigma)),
    )
}

/// Body angular rates that carry the Euler angles of `from` to those of `to`
/// in one explicit Euler step of length `dt`.
pub fn body_rates_between(from: &Pose6D, to: &Pose6D, dt: f64) -> Result<Vector3<f64>, GeometryError> {
    let b = euler_rate_matrix(from.alpha, from.phi)?;
    let rates = Vector3::new(
        wrap_angle(to.theta - from.theta),
        wrap_angle(to.alpha - from.alpha),
        wrap_angle(to.phi - from.phi),
    ) / dt;
    let inv = b.try_inverse().ok_or(GeometryError::GimbalLock {
        cos_alpha: from.alpha.cos(),
    })?;
    Ok(inv * rates)
}

/// One tick of proprioceptive sensing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdometrySample {
    pub forward_speed: f64,
    pub gyro: Vector3<f64>,
}

/// Encoder and gyro readings for the step `from -> to` taken at `forward_speed`.
pub fn odometry_measurement<R: Rng>(
    from: &Pose6D,
    to: &Pose6D,
    forward_speed: f64,
    dt: f64,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<OdometrySample, GeometryError> {
    let w = body_rates_between(from, to, dt)?;
    Ok(OdometrySample {
        forward_speed: forward_speed + gaussian(rng, noise.encoder_vel_sigma),
        gyro: Vector3::new(
            w.x + gaussian(rng, noise.gyro_sigma),
            w.y + gaussian(rng, noise.gyro_sigma),
            w.z + gaussian(rng, noise.gyro_sigma),
        ),
    })
}
