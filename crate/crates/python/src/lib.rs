use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use tilam::cloud::{Frame, Label, PointCloud};
use tilam::geometry::{self, RigidTransform};
use tilam::pipeline::{self, Mode};
use tilam::registration::{self, IcpConfig};
use tilam::scan::{self, SeparationConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Mat3 = [[f64; 3]; 3];

fn rows(m: &Matrix3<f64>) -> Mat3 {
    [0, 1, 2].map(|r| [0, 1, 2].map(|c| m[(r, c)]))
}

fn cloud(points: &[[f64; 3]], frame: Frame) -> PointCloud {
    PointCloud::new(points.iter().map(|p| Vector3::from(*p)).collect(), frame)
}

/// Position and yaw/pitch/roll attitude.
#[pyclass(name = "Pose6D", from_py_object)]
#[derive(Clone, Copy)]
struct PyPose {
    inner: geometry::Pose6D,
}

#[pymethods]
impl PyPose {
    #[new]
    #[pyo3(signature = (x=0.0, y=0.0, z=0.0, theta=0.0, alpha=0.0, phi=0.0))]
    fn new(x: f64, y: f64, z: f64, theta: f64, alpha: f64, phi: f64) -> Self {
        Self {
            inner: geometry::Pose6D::new(x, y, z, theta, alpha, phi),
        }
    }

    #[getter]
    fn x(&self) -> f64 {
        self.inner.x
    }
    #[getter]
    fn y(&self) -> f64 {
        self.inner.y
    }
    #[getter]
    fn z(&self) -> f64 {
        self.inner.z
    }
    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi
    }

    fn rotation(&self) -> Mat3 {
        rows(&self.inner.rotation())
    }

    fn as_tuple(&self) -> (f64, f64, f64, f64, f64, f64) {
        let p = self.inner;
        (p.x, p.y, p.z, p.theta, p.alpha, p.phi)
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!("Pose6D(x={}, y={}, z={}, theta={}, alpha={}, phi={})", p.x, p.y, p.z, p.theta, p.alpha, p.phi)
    }
}

/// Body-to-world rotation for yaw `theta`, pitch `alpha`, roll `phi`.
#[pyfunction]
fn build_rotation(theta: f64, alpha: f64, phi: f64) -> Mat3 {
    rows(&geometry::build_rotation(theta, alpha, phi))
}

#[pyfunction]
fn euler_from_rotation(r: Mat3) -> (f64, f64, f64) {
    geometry::euler_from_rotation(&Matrix3::from_fn(|i, j| r[i][j]))
}

/// Full experiment configuration, world included.
#[pyclass(name = "RunConfig", from_py_object)]
#[derive(Clone)]
struct PyRunConfig {
    inner: pipeline::RunConfig,
}

#[pymethods]
impl PyRunConfig {
    #[new]
    #[pyo3(signature = (seed=None))]
    fn new(seed: Option<u64>) -> Self {
        let inner = pipeline::RunConfig::default();
        Self {
            inner: match seed {
                Some(s) => inner.with_seed(s),
                None => inner,
            },
        }
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = pipeline::RunConfig::from_toml_str(text).map_err(err)?;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    fn to_toml(&self) -> PyResult<String> {
        self.inner.to_toml_string().map_err(err)
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self {
            inner: self.inner.clone().with_seed(seed),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[getter]
    fn path_length(&self) -> f64 {
        self.inner.path_length
    }
}

/// Errors, timings and trajectory of one run.
#[pyclass(name = "RunResult", skip_from_py_object)]
struct PyRunResult {
    #[pyo3(get)]
    mode: String,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    scans: usize,
    #[pyo3(get)]
    alignments: usize,
    /// Report fields keyed by their stable names.
    #[pyo3(get)]
    stats: BTreeMap<String, String>,
    /// `(t, x, y, z, theta, alpha, phi)` rows.
    #[pyo3(get)]
    trajectory: Vec<(f64, f64, f64, f64, f64, f64, f64)>,
    #[pyo3(get)]
    final_error: f64,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn error_d_mean(&self) -> f64 {
        self.stats["error_d_mean"].parse().unwrap_or(f64::NAN)
    }

    #[getter]
    fn total_seconds(&self) -> f64 {
        self.stats["total_seconds"].parse().unwrap_or(f64::NAN)
    }
}

fn traj_rows(traj: &[tilam::io::TimedPose]) -> Vec<(f64, f64, f64, f64, f64, f64, f64)> {
    traj.iter()
        .map(|s| (s.t, s.pose.x, s.pose.y, s.pose.z, s.pose.theta, s.pose.alpha, s.pose.phi))
        .collect()
}

/// Ground-truth trajectory of the configured run.
#[pyfunction]
fn simulate_truth(py: Python<'_>, config: &PyRunConfig) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64, f64)>> {
    let truth = py.detach(|| pipeline::simulate_truth(&config.inner)).map_err(err)?;
    Ok(traj_rows(&truth.trajectory()))
}

/// Runs one mode (`"tilam"`, `"icp"` or `"dr"`).
#[pyfunction]
#[pyo3(signature = (config, mode="tilam"))]
fn run(py: Python<'_>, config: &PyRunConfig, mode: &str) -> PyResult<PyRunResult> {
    let mode: Mode = mode.parse().map_err(PyValueError::new_err)?;
    let cfg = config.inner.clone();
    let (out, fin) = py
        .detach(|| {
            let truth = pipeline::simulate_truth(&cfg)?;
            let out = pipeline::run_mode(&cfg, &truth, mode)?;
            let fin = out.final_error(&truth);
            Ok::<_, tilam::error::PipelineError>((out, fin))
        })
        .map_err(err)?;
    let mut report = Vec::new();
    pipeline::write_stats_report(&mut report, &out).map_err(err)?;
    Ok(PyRunResult {
        mode: out.mode.to_string(),
        seed: out.seed,
        scans: out.scans,
        alignments: out.alignments.len(),
        stats: pipeline::parse_stats_report(&report[..]).map_err(err)?,
        trajectory: traj_rows(&out.trajectory),
        final_error: fin,
    })
}

/// `(offset, period or None, final_error)` for each initial offset.
#[pyfunction]
#[pyo3(signature = (config, offsets=None))]
fn convergence_study(
    py: Python<'_>,
    config: &PyRunConfig,
    offsets: Option<Vec<[f64; 3]>>,
) -> PyResult<Vec<([f64; 3], Option<f64>, f64)>> {
    let cfg = config.inner.clone();
    let offsets = offsets.unwrap_or_else(|| cfg.convergence.offsets.clone());
    let records = py
        .detach(|| {
            let truth = pipeline::simulate_truth(&cfg)?;
            pipeline::convergence_study(&cfg, &truth, &offsets)
        })
        .map_err(err)?;
    Ok(records.iter().map(|r| (r.initial_error, r.period, r.final_error)).collect())
}

/// Labels every point of a world-frame scan, given as a list of scan lines
/// ordered by rising elevation; `True` marks terrain.
#[pyfunction]
#[pyo3(signature = (scan_lines, limit_dz=None, limit_s=None))]
fn separate_ground(scan_lines: Vec<Vec<[f64; 3]>>, limit_dz: Option<f64>, limit_s: Option<f64>) -> PyResult<Vec<bool>> {
    let mut cfg = SeparationConfig::default();
    cfg.limit_dz = limit_dz.unwrap_or(cfg.limit_dz);
    cfg.limit_s = limit_s.unwrap_or(cfg.limit_s);
    let mut points = Vec::new();
    let mut breaks = Vec::new();
    for line in scan_lines.iter().filter(|l| !l.is_empty()) {
        if !points.is_empty() {
            breaks.push(points.len());
        }
        points.extend(line.iter().map(|p| Vector3::from(*p)));
    }
    let mut c = PointCloud::new(points, Frame::World);
    c.scanline_breaks = breaks;
    let labeled = scan::separate_ground(&c, &cfg).map_err(err)?;
    Ok(labeled.labels.iter().map(|l| *l == Label::Terrain).collect())
}

/// Aligns `source` onto `target` from the pose guess `(x, y, z, theta, alpha, phi)`.
/// Returns `(pose, mse, iterations, converged)`.
#[pyfunction]
#[pyo3(signature = (source, target, guess=(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), max_correspondence_dist=None, voxel_size=None))]
fn icp_align(
    py: Python<'_>,
    source: Vec<[f64; 3]>,
    target: Vec<[f64; 3]>,
    guess: (f64, f64, f64, f64, f64, f64),
    max_correspondence_dist: Option<f64>,
    voxel_size: Option<f64>,
) -> PyResult<(PyPose, f64, usize, bool)> {
    let mut cfg = IcpConfig::default();
    cfg.max_correspondence_dist = max_correspondence_dist.unwrap_or(cfg.max_correspondence_dist);
    cfg.voxel_size = voxel_size.unwrap_or(cfg.voxel_size);
    let (x, y, z, t, a, f) = guess;
    let init = RigidTransform::from_euler(t, a, f, Vector3::new(x, y, z));
    let r = py
        .detach(|| registration::icp_align(&cloud(&source, Frame::Robot), &cloud(&target, Frame::World), &init, &cfg))
        .map_err(err)?;
    Ok((
        PyPose {
            inner: geometry::Pose6D::from_transform(&r.transform),
        },
        r.final_mse,
        r.iterations,
        r.converged,
    ))
}

#[pymodule]
pub fn tilam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPose>()?;
    m.add_class::<PyRunConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(build_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(euler_from_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_truth, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(separate_ground, m)?)?;
    m.add_function(wrap_pyfunction!(icp_align, m)?)?;
    Ok(())
}
