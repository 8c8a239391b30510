use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ekf::EkfConfig;
use crate::error::{FormatError, PipelineError};
use crate::registration::IcpConfig;
use crate::scan::SeparationConfig;
use crate::sensor_sim::World;
use crate::terrain_model::PatchConfig;

/// Which localization scheme a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Mode {
    /// EKF on the terrain inclination model between sparse scans.
    #[default]
    #[serde(rename = "tilam")]
    Tilam,
    /// Dead reckoning between dense scans, each aligned by ICP.
    #[serde(rename = "icp", alias = "icpSlam", alias = "icp_slam")]
    IcpSlam,
    /// Odometry only.
    #[serde(rename = "dr", alias = "deadReckoning", alias = "dead_reckoning")]
    DeadReckoning,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Tilam, Mode::IcpSlam, Mode::DeadReckoning];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tilam => "tilam",
            Mode::IcpSlam => "icp",
            Mode::DeadReckoning => "dr",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tilam" => Ok(Mode::Tilam),
            "icp" | "icpSlam" | "icp_slam" => Ok(Mode::IcpSlam),
            "dr" | "deadReckoning" | "dead_reckoning" => Ok(Mode::DeadReckoning),
            other => Err(format!("unknown mode {other:?} (expected tilam, icp or dr)")),
        }
    }
}

/// Planned route: a circular arc of constant horizontal curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathConfig {
    pub start: [f64; 2],
    /// Initial heading, radians.
    pub heading: f64,
    /// Heading change per meter travelled, rad/m.
    pub curvature: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            start: [0.0, 0.0],
            heading: 1.2,
            curvature: -0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceConfig {
    /// Position error below which the estimate counts as converged, m.
    pub threshold: f64,
    /// How long the error must stay below `threshold`, s.
    pub window: f64,
    /// Initial position offsets studied, m.
    pub offsets: Vec<[f64; 3]>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            window: 1.0,
            offsets: vec![[0.1; 3], [0.2; 3], [0.3; 3], [0.4; 3]],
        }
    }
}

/// Everything one simulated experiment needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Distance travelled on the surface, m.
    pub path_length: f64,
    pub speed: f64,
    pub dt: f64,
    pub tilam_scan_spacing: f64,
    pub baseline_scan_spacing: f64,
    pub mode: Mode,
    /// Number of equally spaced reference markers.
    pub markers: usize,
    /// Position and attitude uncertainty given to the filter after an alignment.
    pub reseed_position_sigma: f64,
    pub reseed_angle_sigma: f64,
    pub path: PathConfig,
    pub ekf: EkfConfig,
    pub icp: IcpConfig,
    pub separation: SeparationConfig,
    pub patch: PatchConfig,
    pub convergence: ConvergenceConfig,
    #[serde(flatten)]
    pub world: World,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            path_length: 15.0,
            speed: 0.1,
            dt: 0.1,
            tilam_scan_spacing: 6.0,
            baseline_scan_spacing: 3.0,
            mode: Mode::Tilam,
            markers: 12,
            reseed_position_sigma: 0.02,
            reseed_angle_sigma: 0.5f64.to_radians(),
            path: PathConfig::default(),
            // Tuned on simulated forest runs; the fit residual understates the
            // error of the model away from its samples.
            ekf: EkfConfig { model_residual_weight: 8.0, ..EkfConfig::default() },
            // Scans are seeded with poses good to a few centimeters, so a tight
            // gate keeps trunks hidden in one scan from pulling on their neighbours.
            // Finer voxels keep centroids of partly seen trunks in place, and
            // mutual nearest neighbours drop points seen from one side only.
            icp: IcpConfig {
                max_correspondence_dist: 0.2,
                voxel_size: 0.05,
                reciprocal: true,
                ..IcpConfig::default()
            },
            separation: SeparationConfig::default(),
            patch: PatchConfig::default(),
            convergence: ConvergenceConfig::default(),
            world: World::default(),
        }
    }
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.world.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.world.seed
    }

    pub fn scan_spacing(&self, mode: Mode) -> Option<f64> {
        match mode {
            Mode::Tilam => Some(self.tilam_scan_spacing),
            Mode::IcpSlam => Some(self.baseline_scan_spacing),
            Mode::DeadReckoning => None,
        }
    }

    /// Simulation ticks for the whole path.
    pub fn ticks(&self) -> usize {
        (self.path_length / (self.speed * self.dt)).round() as usize
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidConfig(m));
        if !(self.path_length > 0.0 && self.speed > 0.0 && self.dt > 0.0) {
            return bad("path_length, speed and dt must be positive".into());
        }
        if !(self.tilam_scan_spacing > 0.0 && self.baseline_scan_spacing > 0.0) {
            return bad("scan spacings must be positive".into());
        }
        if self.markers == 0 {
            return bad("markers must be positive".into());
        }
        if !(self.reseed_position_sigma >= 0.0 && self.reseed_angle_sigma >= 0.0) {
            return bad("reseed sigmas must be non-negative".into());
        }
        if !(self.convergence.threshold > 0.0 && self.convergence.window >= 0.0) {
            return bad("convergence threshold must be positive and window non-negative".into());
        }
        self.world.validate().map_err(PipelineError::InvalidConfig)?;
        self.ekf.validate().map_err(PipelineError::InvalidConfig)?;
        self.icp.validate().map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        self.separation.validate().map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        self.patch.validate().map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, FormatError> {
        toml::from_str(text).map_err(|e| FormatError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String, FormatError> {
        toml::to_string(self).map_err(|e| FormatError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}
