//! Seeded random initial data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::AngleState;

/// Draws rejected before giving up on a separation constraint.
pub const MAX_DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomInit {
    pub seed: u64,
    /// Angles are uniform on `[−angle_spread, angle_spread]`.
    pub angle_spread: f64,
    /// Angular velocities are uniform on `[−velocity_spread, velocity_spread]`.
    pub velocity_spread: f64,
    /// Minimum `|sin(θ_n − θ_m)|` over pairs.
    pub min_separation: f64,
    /// Minimum `|cos θ_n|`, for models defined through `tan θ`.
    pub tan_margin: Option<f64>,
}

impl RandomInit {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_separation > 0.0) {
            return Err(Error::InvalidConfig("min_separation must be positive".into()));
        }
        if !(self.angle_spread > 0.0) || !self.angle_spread.is_finite() {
            return Err(Error::InvalidConfig("angle_spread must be positive".into()));
        }
        if !(self.velocity_spread >= 0.0) || !self.velocity_spread.is_finite() {
            return Err(Error::InvalidConfig("velocity_spread must be non-negative".into()));
        }
        if let Some(m) = self.tan_margin {
            if !(0.0..1.0).contains(&m) {
                return Err(Error::InvalidConfig("tan_margin must lie in [0, 1)".into()));
            }
        }
        Ok(())
    }

    /// One state of `n` particles from this spec's own seed.
    pub fn sample(&self, n: usize) -> Result<AngleState> {
        Sampler::new(self.seed).angle_state(n, self)
    }
}

/// Deterministic random source for initial data and parameters.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn uniform_vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }

    /// Rejection-samples an angle state satisfying the separation guard
    /// (and the tan margin, if any).
    pub fn angle_state(&mut self, n: usize, spec: &RandomInit) -> Result<AngleState> {
        spec.validate()?;
        for _ in 0..MAX_DRAWS {
            let theta = self.uniform_vec(n, -spec.angle_spread, spec.angle_spread);
            if !acceptable(&theta, spec) {
                continue;
            }
            let theta_dot = if spec.velocity_spread > 0.0 {
                self.uniform_vec(n, -spec.velocity_spread, spec.velocity_spread)
            } else {
                vec![0.0; n]
            };
            return AngleState::new(theta, theta_dot);
        }
        Err(Error::InvalidConfig(format!(
            "no admissible initial data for {n} particles in {MAX_DRAWS} draws"
        )))
    }
}

fn acceptable(theta: &[f64], spec: &RandomInit) -> bool {
    if let Some(margin) = spec.tan_margin {
        if theta.iter().any(|t| t.cos().abs() <= margin) {
            return false;
        }
    }
    for a in 0..theta.len() {
        for b in a + 1..theta.len() {
            if (theta[a] - theta[b]).sin().abs() <= spec.min_separation {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> RandomInit {
        RandomInit {
            seed: 7,
            angle_spread: 3.0,
            velocity_spread: 1.0,
            min_separation: 0.2,
            tan_margin: Some(0.2),
        }
    }

    #[test]
    fn deterministic_and_admissible() {
        let a = spec().sample(5).unwrap();
        let b = spec().sample(5).unwrap();
        assert_eq!(a, b);
        assert!(acceptable(a.theta(), &spec()));
    }

    #[test]
    fn impossible_constraints_fail() {
        let s = RandomInit {
            min_separation: 0.99,
            ..spec()
        };
        assert!(matches!(s.sample(6), Err(Error::InvalidConfig(_))));
        let s = RandomInit {
            min_separation: 0.0,
            ..spec()
        };
        assert!(s.sample(2).is_err());
    }
}
