//! Extended Kalman filter over the 6-D pose: body-frame odometry drives the
//! prediction, IMU attitude compared against the terrain inclination model
//! drives the correction.

use std::io::Write;

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{EkfError, FormatError};
use crate::geometry::{build_rotation, euler_rate_matrix, wrap_angle, Pose6D};
use crate::io::fmt_num;
use crate::terrain_model::TerrainInclinationModel;

pub type Vector6 = SVector<f64, 6>;
pub type Matrix6 = SMatrix<f64, 6, 6>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkfState {
    /// `(x, y, z, theta, alpha, phi)`.
    pub mean: Vector6,
    pub covariance: Matrix6,
}

impl EkfState {
    pub fn new(pose: &Pose6D, covariance: Matrix6) -> Self {
        Self {
            mean: pose.to_vector(),
            covariance,
        }
    }

    pub fn pose(&self) -> Pose6D {
        Pose6D::from_vector(&self.mean)
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.mean[0], self.mean[1], self.mean[2])
    }

    fn symmetrize(&mut self) {
        self.covariance = 0.5 * (self.covariance + self.covariance.transpose());
    }
}

/// Body-frame velocities over one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    pub v_body: Vector3<f64>,
    pub omega_body: Vector3<f64>,
    pub dt: f64,
}

impl ControlInput {
    /// No-slip input: lateral and vertical body speeds are zero.
    pub fn forward(speed: f64, omega_body: Vector3<f64>, dt: f64) -> Self {
        Self {
            v_body: Vector3::new(speed, 0.0, 0.0),
            omega_body,
            dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessNoise {
    pub q: Matrix6,
}

impl ProcessNoise {
    pub fn diagonal(position_var: f64, angle_var: f64) -> Self {
        Self {
            q: Matrix6::from_diagonal(&Vector6::new(
                position_var,
                position_var,
                position_var,
                angle_var,
                angle_var,
                angle_var,
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementNoise {
    pub rm: Matrix3<f64>,
}

impl MeasurementNoise {
    pub fn isotropic(sigma: f64) -> Self {
        Self {
            rm: Matrix3::identity() * sigma * sigma,
        }
    }
}

/// Filter tuning, all variances per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EkfConfig {
    /// Position process variance per step at `reference_speed`, m^2.
    pub process_position_var: f64,
    /// Attitude process variance per step, rad^2.
    pub process_angle_var: f64,
    pub reference_speed: f64,
    /// Standard deviation of the attitude measurement, rad.
    pub measurement_sigma: f64,
    pub initial_position_sigma: f64,
    pub initial_angle_sigma: f64,
    /// Scale on the model error term of the measurement variance; see
    /// [`EkfConfig::measurement_noise_with_residual`].
    pub model_residual_weight: f64,
}

impl Default for EkfConfig {
    fn default() -> Self {
        Self {
            process_position_var: 1e-6,
            process_angle_var: 1e-6,
            reference_speed: 0.1,
            measurement_sigma: 0.5f64.to_radians(),
            initial_position_sigma: 0.05,
            initial_angle_sigma: 1f64.to_radians(),
            model_residual_weight: 1.0,
        }
    }
}

impl EkfConfig {
    pub fn validate(&self) -> Result<(), String> {
        let vals = [
            self.process_position_var,
            self.process_angle_var,
            self.measurement_sigma,
            self.initial_position_sigma,
            self.initial_angle_sigma,
            self.model_residual_weight,
        ];
        if vals.iter().any(|v| !(*v >= 0.0)) || !(self.reference_speed > 0.0) {
            return Err("EKF variances must be non-negative and reference_speed positive".into());
        }
        Ok(())
    }

    /// Position noise grows linearly with speed; attitude noise is constant.
    pub fn process_noise(&self, speed: f64) -> ProcessNoise {
        ProcessNoise::diagonal(
            self.process_position_var * speed.abs() / self.reference_speed,
            self.process_angle_var,
        )
    }

    pub fn measurement_noise(&self) -> MeasurementNoise {
        MeasurementNoise::isotropic(self.measurement_sigma)
    }

    /// Measurement noise for a model with per-channel mean squared fit
    /// residual `residual`. The model error stays the same for the
    /// `correlated_steps` updates made while the robot crosses one fit
    /// window, so its variance is counted that many times.
    pub fn measurement_noise_with_residual(&self, residual: &Vector3<f64>, correlated_steps: f64) -> MeasurementNoise {
        let mut m = self.measurement_noise();
        let w = self.model_residual_weight * correlated_steps.max(1.0);
        for k in 0..3 {
            m.rm[(k, k)] += w * residual[k];
        }
        m
    }

    pub fn initial_covariance(&self) -> Matrix6 {
        let p = self.initial_position_sigma.powi(2);
        let a = self.initial_angle_sigma.powi(2);
        Matrix6::from_diagonal(&Vector6::new(p, p, p, a, a, a))
    }
}

fn rz(t: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let (s, c) = t.sin_cos();
    (
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0),
    )
}

/// Pitch factor `Ry(-alpha)` and its derivative with respect to `alpha`.
fn ry_neg(a: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let (s, c) = a.sin_cos();
    (
        Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c),
        Matrix3::new(-s, 0.0, -c, 0.0, 0.0, 0.0, c, 0.0, -s),
    )
}

fn rx(p: f64) -> (Matrix3<f64>, Matrix3<f64>) {
    let (s, c) = p.sin_cos();
    (
        Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s),
    )
}

/// Mean after one explicit Euler step of the kinematics.
pub fn transition(mean: &Vector6, u: &ControlInput) -> Result<Vector6, EkfError> {
    let (th, al, ph) = (mean[3], mean[4], mean[5]);
    let b = euler_rate_matrix(al, ph)?;
    let dp = build_rotation(th, al, ph) * u.v_body * u.dt;
    let da = b * u.omega_body * u.dt;
    Ok(Vector6::new(
        mean[0] + dp.x,
        mean[1] + dp.y,
        mean[2] + dp.z,
        wrap_angle(th + da.x),
        wrap_angle(al + da.y),
        wrap_angle(ph + da.z),
    ))
}

/// Jacobian of [`transition`] with respect to the state.
pub fn transition_jacobian(mean: &Vector6, u: &ControlInput) -> Result<Matrix6, EkfError> {
    let (th, al, ph) = (mean[3], mean[4], mean[5]);
    euler_rate_matrix(al, ph)?;
    let (z, dz) = rz(th);
    let (y, dy) = ry_neg(al);
    let (x, dx) = rx(ph);
    let v = u.v_body;
    let dt = u.dt;

    let mut f = Matrix6::identity();
    let cols = [dz * y * x * v, z * dy * x * v, z * y * dx * v];
    for (k, c) in cols.iter().enumerate() {
        for r in 0..3 {
            f[(r, 3 + k)] = dt * c[r];
        }
    }

    let w = u.omega_body;
    let (sa, ca) = al.sin_cos();
    let (sp, cp) = ph.sin_cos();
    let m = sp * w.y + cp * w.z;
    let n = cp * w.y - sp * w.z;
    // Rows (theta, alpha, phi) of B(alpha, phi) w differentiated by alpha and phi.
    f[(3, 4)] = dt * m * sa / (ca * ca);
    f[(3, 5)] = dt * n / ca;
    f[(4, 5)] = dt * m;
    f[(5, 4)] = -dt * m / (ca * ca);
    f[(5, 5)] += -dt * n * sa / ca;
    Ok(f)
}

/// Mean through [`transition`], covariance as `F P F^T + Q`.
pub fn predict(state: &EkfState, u: &ControlInput, q: &ProcessNoise) -> Result<EkfState, EkfError> {
    if !(u.dt > 0.0) {
        return Err(EkfError::InvalidTimeStep(u.dt));
    }
    let f = transition_jacobian(&state.mean, u)?;
    let mut next = EkfState {
        mean: transition(&state.mean, u)?,
        covariance: f * state.covariance * f.transpose() + q.q,
    };
    next.symmetrize();
    Ok(next)
}

/// Correction output: posterior state plus the wrapped innovation used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correction {
    pub state: EkfState,
    pub innovation: Vector3<f64>,
}

/// EKF correction with the attitude predicted by `model` at the mean position.
/// The posterior covariance uses the Joseph form.
pub fn update(
    state: &EkfState,
    z: &Vector3<f64>,
    model: &TerrainInclinationModel,
    rm: &MeasurementNoise,
) -> Result<Correction, EkfError> {
    let pos = state.position();
    let predicted = model.evaluate(&pos);
    let innovation = Vector3::new(
        wrap_angle(z.x - predicted.x),
        wrap_angle(z.y - predicted.y),
        wrap_angle(z.z - predicted.z),
    );
    let h = model.jacobian(&pos);
    let p = state.covariance;
    let ph_t = p * h.transpose();
    let s = h * ph_t + rm.rm;
    let chol = s
        .cholesky()
        .or_else(|| (0.5 * (s + s.transpose())).cholesky())
        .ok_or(EkfError::NonPositiveInnovationCovariance)?;
    // K = P H^T S^-1, solved as S K^T = H P.
    let k: SMatrix<f64, 6, 3> = chol.solve(&ph_t.transpose()).transpose();
    let i_kh = Matrix6::identity() - k * h;
    let mut mean = state.mean + k * innovation;
    for a in 3..6 {
        mean[a] = wrap_angle(mean[a]);
    }
    let mut post = EkfState {
        mean,
        covariance: i_kh * p * i_kh.transpose() + k * rm.rm * k.transpose(),
    };
    post.symmetrize();
    Ok(Correction {
        state: post,
        innovation,
    })
}

/// One logged filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkfStep {
    pub state: EkfState,
    /// Zero for the initial entry.
    pub innovation: Vector3<f64>,
}

/// Predict with `controls[i]`, then correct with `measurements[i]`, for every
/// tick. The first entry of the result is `init`.
pub fn run_interval(
    init: &EkfState,
    controls: &[ControlInput],
    measurements: &[Vector3<f64>],
    model: &TerrainInclinationModel,
    q: &ProcessNoise,
    rm: &MeasurementNoise,
) -> Result<Vec<EkfStep>, EkfError> {
    if controls.len() != measurements.len() {
        return Err(EkfError::StreamLengthMismatch {
            controls: controls.len(),
            measurements: measurements.len(),
        });
    }
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(EkfStep {
        state: *init,
        innovation: Vector3::zeros(),
    });
    let mut state = *init;
    for (u, z) in controls.iter().zip(measurements) {
        let prior = predict(&state, u, q)?;
        let c = update(&prior, z, model, rm)?;
        state = c.state;
        out.push(EkfStep {
            state,
            innovation: c.innovation,
        });
    }
    Ok(out)
}

/// `t, x, y, z, theta, alpha, phi, p_x ... p_phi, innov_theta, innov_alpha, innov_phi`.
pub fn write_ekf_log<W: Write>(mut w: W, rows: &[(f64, EkfStep)]) -> Result<(), FormatError> {
    writeln!(
        w,
        "t,x,y,z,theta,alpha,phi,p_x,p_y,p_z,p_theta,p_alpha,p_phi,innov_theta,innov_alpha,innov_phi"
    )?;
    for (t, step) in rows {
        let mut fields = vec![fmt_num(*t)];
        fields.extend(step.state.mean.iter().map(|v| fmt_num(*v)));
        fields.extend(step.state.covariance.diagonal().iter().map(|v| fmt_num(*v)));
        fields.extend(step.innovation.iter().map(|v| fmt_num(*v)));
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain_model::{Parameterization, PiecewiseLinear};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> Vector6 {
        Vector6::new(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-3.1..3.1),
            rng.random_range(-1.2..1.2),
            rng.random_range(-1.2..1.2),
        )
    }

    fn random_input(rng: &mut ChaCha8Rng, max_w: f64) -> ControlInput {
        ControlInput {
            v_body: Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)),
            omega_body: Vector3::new(
                rng.random_range(-max_w..max_w),
                rng.random_range(-max_w..max_w),
                rng.random_range(-max_w..max_w),
            ),
            dt: 0.1,
        }
    }

    /// Rates of the continuous kinematics, written out independently.
    fn rates(s: &Vector6, u: &ControlInput) -> Vector6 {
        let r = build_rotation(s[3], s[4], s[5]);
        let v = r * u.v_body;
        let (sa, ca) = s[4].sin_cos();
        let (sp, cp) = s[5].sin_cos();
        let w = u.omega_body;
        Vector6::new(
            v.x,
            v.y,
            v.z,
            (sp * w.y + cp * w.z) / ca,
            -cp * w.y + sp * w.z,
            w.x - sa / ca * (sp * w.y + cp * w.z),
        )
    }

    fn angle_diff(a: &Vector6, b: &Vector6) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..6 {
            let d = if i < 3 { a[i] - b[i] } else { wrap_angle(a[i] - b[i]) };
            m = m.max(d.abs());
        }
        m
    }

    #[test]
    fn zero_input_keeps_mean_and_adds_q() {
        let s = EkfState::new(&Pose6D::new(1.0, 2.0, 0.3, 0.4, 0.1, -0.2), EkfConfig::default().initial_covariance());
        let q = ProcessNoise::diagonal(1e-6, 2e-6);
        let u = ControlInput::forward(0.0, Vector3::zeros(), 0.1);
        let n = predict(&s, &u, &q).unwrap();
        assert_eq!(n.mean, s.mean);
        assert!((n.covariance - (s.covariance + q.q)).abs().max() < 1e-18);
    }

    #[test]
    fn level_planar_motion() {
        let theta = 0.7f64;
        let s = EkfState::new(&Pose6D::new(0.0, 0.0, 0.0, theta, 0.0, 0.0), Matrix6::zeros());
        let n = predict(&s, &ControlInput::forward(0.1, Vector3::zeros(), 0.1), &ProcessNoise::diagonal(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(n.mean[0], 0.01 * theta.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(n.mean[1], 0.01 * theta.sin(), epsilon = 1e-15);
        assert_eq!(n.mean[2], 0.0);
    }

    #[test]
    fn transition_matches_independent_euler_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let u = random_input(&mut rng, 1.0);
            let ours = transition(&s, &u).unwrap();
            let theirs = s + rates(&s, &u) * u.dt;
            assert!(angle_diff(&ours, &theirs) < 1e-9);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let s = random_state(&mut rng);
            let u = random_input(&mut rng, 1.0);
            let f = transition_jacobian(&s, &u).unwrap();
            let h = 1e-6;
            for j in 0..6 {
                let mut sp = s;
                let mut sm = s;
                sp[j] += h;
                sm[j] -= h;
                let a = transition(&sp, &u).unwrap();
                let b = transition(&sm, &u).unwrap();
                for i in 0..6 {
                    let d = if i < 3 { a[i] - b[i] } else { wrap_angle(a[i] - b[i]) };
                    assert!((f[(i, j)] - d / (2.0 * h)).abs() < 1e-6, "F[{i},{j}]");
                }
            }
        }
    }

    #[test]
    fn euler_step_close_to_rk4() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let u = random_input(&mut rng, 0.1);
            let euler = transition(&s, &u).unwrap();
            let h = u.dt / 100.0;
            let mut y = s;
            for _ in 0..100 {
                let k1 = rates(&y, &u);
                let k2 = rates(&(y + k1 * (h / 2.0)), &u);
                let k3 = rates(&(y + k2 * (h / 2.0)), &u);
                let k4 = rates(&(y + k3 * h), &u);
                y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
            }
            let d = (Vector3::new(euler[0], euler[1], euler[2]) - Vector3::new(y[0], y[1], y[2])).norm();
            assert!(d < 1e-3, "{d}");
        }
    }

    #[test]
    fn gimbal_lock_rejected() {
        let s = EkfState::new(&Pose6D::new(0.0, 0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2, 0.0), Matrix6::identity());
        let r = predict(&s, &ControlInput::forward(0.1, Vector3::zeros(), 0.1), &ProcessNoise::diagonal(0.0, 0.0));
        assert!(matches!(r, Err(EkfError::Geometry(_))));
        let bad_dt = ControlInput::forward(0.1, Vector3::zeros(), 0.0);
        let s = EkfState::new(&Pose6D::default(), Matrix6::identity());
        assert_eq!(predict(&s, &bad_dt, &ProcessNoise::diagonal(0.0, 0.0)), Err(EkfError::InvalidTimeStep(0.0)));
    }

    fn linear_model(slope_y: f64) -> TerrainInclinationModel {
        TerrainInclinationModel {
            h1: PiecewiseLinear::from_knots(vec![(-100.0, 0.0), (100.0, 0.0)]).unwrap(),
            h2: PiecewiseLinear::from_knots(vec![(-100.0, -100.0 * slope_y), (100.0, 100.0 * slope_y)]).unwrap(),
            h3: PiecewiseLinear::from_knots(vec![(-100.0, 0.0), (100.0, 0.0)]).unwrap(),
            parameterization: Parameterization::Axes,
        }
    }

    #[test]
    fn exact_measurement_shrinks_covariance_only() {
        let m = linear_model(0.1);
        let s = EkfState::new(&Pose6D::new(0.5, 2.0, 0.1, 0.0, 0.2, 0.0), EkfConfig::default().initial_covariance());
        let z = m.evaluate(&s.position());
        let c = update(&s, &z, &m, &MeasurementNoise::isotropic(0.01)).unwrap();
        assert!((c.state.mean - s.mean).abs().max() < 1e-15);
        assert!(c.state.covariance.trace() < s.covariance.trace());
    }

    #[test]
    fn uninformative_measurement_changes_nothing() {
        let m = linear_model(0.1);
        let s = EkfState::new(&Pose6D::new(0.5, 2.0, 0.1, 0.0, 0.2, 0.0), EkfConfig::default().initial_covariance());
        let rm = MeasurementNoise { rm: Matrix3::identity() * 1e12 };
        let c = update(&s, &Vector3::new(0.3, -0.2, 0.1), &m, &rm).unwrap();
        assert!((c.state.mean - s.mean).abs().max() < 1e-6);
    }

    #[test]
    fn scalar_gain_oracle() {
        let m = linear_model(0.1);
        let (py, r) = (0.05f64.powi(2), 0.01f64.powi(2));
        let mut p = Matrix6::identity() * 1e-4;
        p[(1, 1)] = py;
        let s = EkfState::new(&Pose6D::new(0.0, 1.0, 0.0, 0.0, 0.1, 0.0), p);
        let z = Vector3::new(0.0, 0.1 + 0.01, 0.0);
        let c = update(&s, &z, &m, &MeasurementNoise::isotropic(0.01)).unwrap();
        // Scalar Kalman gain for the y state: K = P_yy h / (h^2 P_yy + r).
        let k = py * 0.1 / (0.01 * py + r);
        assert_abs_diff_eq!(c.state.mean[1] - 1.0, k * 0.01, epsilon = 1e-12);
        assert!(c.state.mean[1] > 1.0);
        assert_abs_diff_eq!(c.state.covariance[(1, 1)], (1.0 - k * 0.1) * py, epsilon = 1e-12);
    }

    #[test]
    fn innovation_is_wrapped() {
        let m = TerrainInclinationModel::constant(3.1, 0.0, 0.0);
        let s = EkfState::new(&Pose6D::default(), Matrix6::identity() * 1e-4);
        let c = update(&s, &Vector3::new(-3.1, 0.0, 0.0), &m, &MeasurementNoise::isotropic(0.01)).unwrap();
        assert_abs_diff_eq!(c.innovation.x, 2.0 * std::f64::consts::PI - 6.2, epsilon = 1e-12);
    }

    #[test]
    fn run_interval_streams() {
        let m = TerrainInclinationModel::constant(0.0, 0.0, 0.0);
        let s = EkfState::new(&Pose6D::default(), Matrix6::identity() * 1e-4);
        let q = ProcessNoise::diagonal(1e-6, 1e-6);
        let rm = MeasurementNoise::isotropic(0.01);
        let out = run_interval(&s, &[], &[], &m, &q, &rm).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].state, s);
        let u = ControlInput::forward(0.1, Vector3::zeros(), 0.1);
        assert!(matches!(
            run_interval(&s, &[u], &[], &m, &q, &rm),
            Err(EkfError::StreamLengthMismatch { controls: 1, measurements: 0 })
        ));
        let z = vec![Vector3::new(0.01, 0.0, 0.0); 5];
        let a = run_interval(&s, &[u; 5], &z, &m, &q, &rm).unwrap();
        let b = run_interval(&s, &[u; 5], &z, &m, &q, &rm).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn log_has_sixteen_columns() {
        let s = EkfState::new(&Pose6D::default(), Matrix6::identity());
        let mut buf = Vec::new();
        write_ekf_log(&mut buf, &[(0.0, EkfStep { state: s, innovation: Vector3::zeros() })]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 16);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn covariance_stays_symmetric_psd(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = linear_model(rng.random_range(-0.3..0.3));
            let mut s = EkfState::new(&Pose6D::default(), EkfConfig::default().initial_covariance());
            let q = ProcessNoise::diagonal(1e-6, 1e-6);
            let rm = MeasurementNoise::isotropic(0.5f64.to_radians());
            for _ in 0..300 {
                let mut u = random_input(&mut rng, 0.2);
                u.v_body.y = 0.0;
                u.v_body.z = 0.0;
                s = predict(&s, &u, &q).unwrap();
                let z = Vector3::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
                let before = s.covariance.trace();
                s = update(&s, &z, &m, &rm).unwrap().state;
                prop_assert!(s.covariance.trace() <= before + 1e-15);
                prop_assert!((s.covariance - s.covariance.transpose()).abs().max() <= 1e-10);
                let min_eig = s.covariance.symmetric_eigenvalues().min();
                prop_assert!(min_eig >= -1e-10);
            }
        }
    }
}
