//! Deterministic synthetic world: inclined terrain with bumps, tree trunks,
//! a turntable laser scanner and noisy proprioceptive sensors.

mod motion;
mod scanner;
mod site;
mod terrain;

pub use motion::{
    body_rates_between, imu_measurement, odometry_measurement, pose_on_terrain, step_robot, NoiseConfig,
    OdometrySample,
};
pub use scanner::{
    cast_ray, ray_cylinder, simulate_scan, Cylinder, ObstacleSet, ScannerConfig, SimulatedScan, SurfaceTag,
};
pub use terrain::{terrain_attitude, terrain_height, Bump, TerrainField, MAX_BUMP_AMPLITUDE};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Everything the simulator needs to produce measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct World {
    pub terrain: TerrainField,
    pub obstacles: ObstacleSet,
    pub scanner: ScannerConfig,
    pub noise: NoiseConfig,
    /// Seed of every random stream in a run.
    pub seed: u64,
}

impl Default for World {
    fn default() -> Self {
        Self::default_site()
    }
}

/// Independent random stream for one consumer of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl World {
    pub fn validate(&self) -> Result<(), String> {
        self.terrain.validate()?;
        self.obstacles.validate()?;
        self.scanner.validate()?;
        self.noise.validate()
    }

    /// Grassy slope in a sparse forest of trunks and stumps around a gently
    /// curving 15 m track that starts at the origin heading east-north-east.
    pub fn default_site() -> Self {
        let terrain = TerrainField {
            gradient_x: 0.08,
            gradient_y: 0.13,
            bumps: vec![
                Bump { center: [0.2, 3.0], amplitude: 0.2, radius: 3.5 },
                Bump { center: [3.5, 5.0], amplitude: -0.2, radius: 3.0 },
                Bump { center: [3.0, 9.5], amplitude: 0.2, radius: 3.5 },
                Bump { center: [8.5, 10.0], amplitude: -0.2, radius: 3.5 },
                Bump { center: [9.0, 14.5], amplitude: 0.2, radius: 3.0 },
                Bump { center: [13.0, 12.5], amplitude: 0.15, radius: 3.0 },
            ],
            seed: 0,
        };
        Self {
            terrain,
            obstacles: ObstacleSet {
                cylinders: site::DEFAULT_SITE_TREES
                    .iter()
                    .map(|&(center, radius, height)| Cylinder { center, radius, height })
                    .collect(),
            },
            scanner: ScannerConfig::default(),
            noise: NoiseConfig::default(),
            seed: 0,
        }
    }

    /// Random slope, bumps and trees around the origin, used for
    /// scene-level statistics of the ground filter.
    pub fn random_scene(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5ce7e);
        let gradient = [rng.random_range(-0.12..0.12), rng.random_range(-0.12..0.12)];
        let terrain = TerrainField::random_bumps(gradient, 6, [-10.0, -10.0], [10.0, 10.0], 0.2, seed);
        let count = rng.random_range(6..14);
        let cylinders = (0..count)
            .map(|_| {
                let r: f64 = rng.random_range(1.5..9.0);
                let b: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                Cylinder {
                    center: [r * b.cos(), r * b.sin()],
                    radius: rng.random_range(0.1..0.3),
                    height: rng.random_range(2.0..4.5),
                }
            })
            .collect();
        Self {
            terrain,
            obstacles: ObstacleSet { cylinders },
            scanner: ScannerConfig::default(),
            noise: NoiseConfig::default(),
            seed,
        }
    }
}
