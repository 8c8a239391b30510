use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("gimbal lock: |cos(pitch)| = {cos_alpha:e} is below 1e-6")]
    GimbalLock { cos_alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloudError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("scan line break {index} is out of order or out of bounds (cloud has {len} points)")]
    InvalidScanlineBreak { index: usize, len: usize },
    #[error("expected a cloud in the {expected:?} frame, got {actual:?}")]
    WrongFrame {
        expected: crate::cloud::Frame,
        actual: crate::cloud::Frame,
    },
    #[error("label count {labels} does not match point count {points}")]
    LabelCountMismatch { labels: usize, points: usize },
    #[error("invalid separation thresholds: limit_dz = {limit_dz}, limit_s = {limit_s}")]
    InvalidThresholds { limit_dz: f64, limit_s: f64 },
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TerrainModelError {
    #[error("patch is degenerate: BA = {ba:e}, BC = {bc:e}")]
    DegeneratePatch { ba: f64, bc: f64 },
    #[error("need at least 2 inclination samples, got {0}")]
    InsufficientSamples(usize),
    #[error("planned path needs at least 2 distinct waypoints")]
    InvalidPath,
    #[error("patch length and half width must be positive")]
    InvalidPatchSize,
    #[error(transparent)]
    Cloud(#[from] CloudError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EkfError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("innovation covariance is not positive definite after re-symmetrization")]
    NonPositiveInnovationCovariance,
    #[error("control and measurement streams differ in length ({controls} vs {measurements})")]
    StreamLengthMismatch { controls: usize, measurements: usize },
    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistrationError {
    #[error("correspondence set is degenerate (collinear or coincident points)")]
    DegenerateConfiguration,
    #[error("no correspondences survived the {gate} m distance gate at iteration {iteration}")]
    NoCorrespondences { iteration: usize, gate: f64 },
    #[error("cannot register an empty cloud")]
    EmptyCloud,
    #[error("invalid ICP configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("scan {scan}: {source}")]
    Scan {
        scan: usize,
        #[source]
        source: CloudError,
    },
    #[error("terrain model at scan {scan}: {source}")]
    TerrainModel {
        scan: usize,
        #[source]
        source: TerrainModelError,
    },
    #[error("EKF during interval {interval}: {source}")]
    Ekf {
        interval: usize,
        #[source]
        source: EkfError,
    },
    #[error("alignment of scan {scan}: {source}")]
    Registration {
        scan: usize,
        #[source]
        source: RegistrationError,
    },
    #[error("no reference markers fall inside the trajectory")]
    EmptyMarkers,
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
}
