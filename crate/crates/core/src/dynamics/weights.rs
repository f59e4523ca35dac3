use std::fmt;

use super::Coefficients;
use crate::interp::{cot_sum, sigma};

/// The pair `(ρ_n, γ_n)` relating the node values of a time-independent
/// seed combination to the particle velocities,
/// `f_n = ρ_n(θ) θ̇_n + γ_n(θ)`, together with their exact partials.
pub trait InterpolationWeights: Send + Sync {
    fn rho(&self, theta: &[f64], n: usize) -> f64;
    fn gamma(&self, theta: &[f64], n: usize) -> f64;
    /// `∂ρ_n / ∂θ_m`.
    fn rho_partial(&self, theta: &[f64], n: usize, m: usize) -> f64;
    /// `∂γ_n / ∂θ_m`.
    fn gamma_partial(&self, theta: &[f64], n: usize, m: usize) -> f64;
}

/// `ρ_n = μ_n`, `γ_n = η_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantWeights(pub Coefficients);

impl InterpolationWeights for ConstantWeights {
    fn rho(&self, _theta: &[f64], n: usize) -> f64 {
        self.0.mu()[n]
    }
    fn gamma(&self, _theta: &[f64], n: usize) -> f64 {
        self.0.eta()[n]
    }
    fn rho_partial(&self, _theta: &[f64], _n: usize, _m: usize) -> f64 {
        0.0
    }
    fn gamma_partial(&self, _theta: &[f64], _n: usize, _m: usize) -> f64 {
        0.0
    }
}

/// `ρ_n = μ_n σ_n`, `γ_n = η_n σ_n`, with partials from logarithmic
/// differentiation of `σ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaWeights(pub Coefficients);

fn log_sigma_partial(theta: &[f64], n: usize, m: usize) -> f64 {
    if n == m {
        cot_sum(theta, n)
    } else {
        let (s, c) = (theta[n] - theta[m]).sin_cos();
        -c / s
    }
}

impl InterpolationWeights for SigmaWeights {
    fn rho(&self, theta: &[f64], n: usize) -> f64 {
        self.0.mu()[n] * sigma(theta, n)
    }
    fn gamma(&self, theta: &[f64], n: usize) -> f64 {
        self.0.eta()[n] * sigma(theta, n)
    }
    fn rho_partial(&self, theta: &[f64], n: usize, m: usize) -> f64 {
        self.rho(theta, n) * log_sigma_partial(theta, n, m)
    }
    fn gamma_partial(&self, theta: &[f64], n: usize, m: usize) -> f64 {
        self.gamma(theta, n) * log_sigma_partial(theta, n, m)
    }
}

impl fmt::Debug for dyn InterpolationWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InterpolationWeights")
    }
}
