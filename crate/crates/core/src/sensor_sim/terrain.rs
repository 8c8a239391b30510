use std::f64::consts::PI;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest bump amplitude allowed, meters.
pub const MAX_BUMP_AMPLITUDE: f64 = 0.5;

/// Smooth radial cosine bump: `A (1 + cos(pi r / R)) / 2` inside radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub amplitude: f64,
    pub radius: f64,
}

impl Bump {
    pub fn height(&self, x: f64, y: f64) -> f64 {
        let r = (x - self.center[0]).hypot(y - self.center[1]);
        if r >= self.radius {
            0.0
        } else {
            0.5 * self.amplitude * (1.0 + (PI * r / self.radius).cos())
        }
    }

    pub fn gradient(&self, x: f64, y: f64) -> Vector2<f64> {
        let d = Vector2::new(x - self.center[0], y - self.center[1]);
        let r = d.norm();
        if r >= self.radius || r == 0.0 {
            return Vector2::zeros();
        }
        let slope = -0.5 * self.amplitude * PI / self.radius * (PI * r / self.radius).sin();
        d * (slope / r)
    }

    /// Largest slope magnitude of this bump.
    pub fn max_slope(&self) -> f64 {
        0.5 * self.amplitude.abs() * PI / self.radius
    }
}

/// Inclined plane plus smooth bumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainField {
    pub gradient_x: f64,
    pub gradient_y: f64,
    pub bumps: Vec<Bump>,
    pub seed: u64,
}

impl Default for TerrainField {
    fn default() -> Self {
        Self::flat()
    }
}

impl TerrainField {
    pub fn flat() -> Self {
        Self {
            gradient_x: 0.0,
            gradient_y: 0.0,
            bumps: Vec::new(),
            seed: 0,
        }
    }

    pub fn plane(gradient_x: f64, gradient_y: f64) -> Self {
        Self {
            gradient_x,
            gradient_y,
            ..Self::flat()
        }
    }

    /// Random bumps scattered over `[lo, hi]` on top of a plane.
    pub fn random_bumps(
        gradient: [f64; 2],
        count: usize,
        lo: [f64; 2],
        hi: [f64; 2],
        max_amplitude: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bumps = (0..count)
            .map(|_| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                Bump {
                    center: [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])],
                    amplitude: sign * rng.random_range(0.3 * max_amplitude..max_amplitude),
                    radius: rng.random_range(2.0..4.0),
                }
            })
            .collect();
        Self {
            gradient_x: gradient[0],
            gradient_y: gradient[1],
            bumps,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for b in &self.bumps {
            if b.amplitude.abs() > MAX_BUMP_AMPLITUDE {
                return Err(format!("bump amplitude {} exceeds {MAX_BUMP_AMPLITUDE} m", b.amplitude));
            }
            if b.radius <= 0.0 {
                return Err(format!("bump radius {} must be positive", b.radius));
            }
        }
        Ok(())
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        self.gradient_x * x
            + self.gradient_y * y
            + self.bumps.iter().map(|b| b.height(x, y)).sum::<f64>()
    }

    pub fn gradient(&self, x: f64, y: f64) -> Vector2<f64> {
        self.bumps
            .iter()
            .fold(Vector2::new(self.gradient_x, self.gradient_y), |g, b| g + b.gradient(x, y))
    }

    /// Upper bound of the horizontal slope anywhere on the field.
    pub fn lipschitz_bound(&self) -> f64 {
        self.gradient_x.hypot(self.gradient_y) + self.bumps.iter().map(Bump::max_slope).sum::<f64>()
    }

    /// Upper bound of the height above the base plane.
    pub(crate) fn max_bump_height(&self) -> f64 {
        self.bumps.iter().map(|b| b.amplitude.max(0.0)).sum()
    }

    /// Pitch and roll of a robot with heading `heading` resting on the tangent plane at `(x, y)`.
    ///
    /// Pitch is the inclination of the surface along the heading; roll is
    /// positive when the right-hand side is lower.
    pub fn attitude(&self, x: f64, y: f64, heading: f64) -> (f64, f64) {
        let g = self.gradient(x, y);
        let (s, c) = heading.sin_cos();
        let along = g.x * c + g.y * s;
        let across = -g.x * s + g.y * c;
        let alpha = along.atan();
        let phi = (across / (1.0 + along * along + across * across).sqrt()).asin();
        (alpha, phi)
    }
}

/// `terrainHeight` as a free function.
pub fn terrain_height(field: &TerrainField, x: f64, y: f64) -> f64 {
    field.height(x, y)
}

/// `terrainAttitude` as a free function.
pub fn terrain_attitude(field: &TerrainField, x: f64, y: f64, heading: f64) -> (f64, f64) {
    field.attitude(x, y, heading)
}
