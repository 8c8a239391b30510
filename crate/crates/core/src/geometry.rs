//! Frames, the yaw-pitch-roll rotation convention and rigid-transform algebra.
//!
//! World frame: `y` points north, `z` up. A pose's rotation maps body
//! coordinates to world coordinates as `Rz(yaw) * Ry(-pitch) * Rx(roll)`,
//! which gives positive pitch when the nose climbs and positive roll when
//! the right side (body `-y`) goes down.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::cloud::PointCloud;
use crate::error::GeometryError;

const GIMBAL_GUARD: f64 = 1e-6;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped += 2.0 * PI;
    }
    wrapped
}

/// Position and yaw/pitch/roll attitude of the robot in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Pose6D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Yaw.
    pub theta: f64,
    /// Pitch, positive nose-up.
    pub alpha: f64,
    /// Roll, positive right side down.
    pub phi: f64,
}

impl Pose6D {
    /// Builds a pose, wrapping the angles.
    pub fn new(x: f64, y: f64, z: f64, theta: f64, alpha: f64, phi: f64) -> Self {
        Self {
            x,
            y,
            z,
            theta: wrap_angle(theta),
            alpha: wrap_angle(alpha),
            phi: wrap_angle(phi),
        }
    }

    pub fn from_vector(v: &nalgebra::SVector<f64, 6>) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn to_vector(&self) -> nalgebra::SVector<f64, 6> {
        nalgebra::SVector::<f64, 6>::from([self.x, self.y, self.z, self.theta, self.alpha, self.phi])
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        build_rotation(self.theta, self.alpha, self.phi)
    }

    /// Body-to-world transform of this pose.
    pub fn to_transform(&self) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation(),
            translation: self.position(),
        }
    }

    pub fn from_transform(t: &RigidTransform) -> Self {
        let (theta, alpha, phi) = euler_from_rotation(&t.rotation);
        Self::new(
            t.translation.x,
            t.translation.y,
            t.translation.z,
            theta,
            alpha,
            phi,
        )
    }
}

/// Body-to-world rotation for yaw `theta`, pitch `alpha` and roll `phi`.
///
/// The third row is `(sin a, cos a sin p, cos a cos p)`.
pub fn build_rotation(theta: f64, alpha: f64, phi: f64) -> Matrix3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Matrix3::new(
        ct * ca,
        -ct * sa * sp - st * cp,
        -ct * sa * cp + st * sp,
        st * ca,
        -st * sa * sp + ct * cp,
        -st * sa * cp - ct * sp,
        sa,
        ca * sp,
        ca * cp,
    )
}

/// Inverse of [`build_rotation`]. Returns `(theta, alpha, phi)`.
pub fn euler_from_rotation(r: &Matrix3<f64>) -> (f64, f64, f64) {
    let alpha = r[(2, 0)].clamp(-1.0, 1.0).asin();
    let phi = r[(2, 1)].atan2(r[(2, 2)]);
    let theta = r[(1, 0)].atan2(r[(0, 0)]);
    (wrap_angle(theta), alpha, wrap_angle(phi))
}

/// Maps body angular rates `(wx, wy, wz)` to Euler rates
/// `(theta_dot, alpha_dot, phi_dot)` such that `dR/dt = R [w]x`.
pub fn euler_rate_matrix(alpha: f64, phi: f64) -> Result<Matrix3<f64>, GeometryError> {
    let ca = alpha.cos();
    if ca.abs() <= GIMBAL_GUARD {
        return Err(GeometryError::GimbalLock { cos_alpha: ca });
    }
    let ta = alpha.tan();
    let (sp, cp) = phi.sin_cos();
    Ok(Matrix3::new(
        0.0,
        sp / ca,
        cp / ca,
        0.0,
        -cp,
        sp,
        1.0,
        -sp * ta,
        -cp * ta,
    ))
}

/// Skew-symmetric cross-product matrix.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Rotation + translation, applied as `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation,
        }
    }

    /// Builds a transform from yaw/pitch/roll and a translation.
    pub fn from_euler(theta: f64, alpha: f64, phi: f64, translation: Vector3<f64>) -> Self {
        Self {
            rotation: build_rotation(theta, alpha, phi),
            translation,
        }
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Maps every point, keeping order, frame tag and scan line breaks.
    pub fn apply_cloud(&self, cloud: &PointCloud) -> PointCloud {
        PointCloud {
            points: cloud.points.iter().map(|p| self.apply(p)).collect(),
            frame: cloud.frame,
            scanline_breaks: cloud.scanline_breaks.clone(),
        }
    }

    /// Yaw, pitch and roll of the rotation part.
    pub fn euler(&self) -> (f64, f64, f64) {
        euler_from_rotation(&self.rotation)
    }

    /// Rotation angle of the rotation part, radians.
    pub fn rotation_angle(&self) -> f64 {
        ((self.rotation.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }
}
