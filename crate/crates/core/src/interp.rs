//! Generalized Lagrangian interpolation on the seed basis
//! `s_n(θ) = exp(i(2n − N − 1)θ)`, `n = 1..N`.
//!
//! Indices in this module are 0-based: seed `k` has exponent `2k + 1 − N`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default collision guard on `|sin(θ_n − θ_m)|`.
pub const COLLISION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedBasis {
    n_seeds: usize,
}

impl SeedBasis {
    pub fn new(n_seeds: usize) -> Self {
        assert!(n_seeds >= 1, "seed basis needs at least one seed");
        Self { n_seeds }
    }

    pub fn len(&self) -> usize {
        self.n_seeds
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Integer exponent of seed `k`.
    pub fn exponent(&self, k: usize) -> i64 {
        assert!(k < self.n_seeds, "seed index {k} out of range");
        2 * k as i64 + 1 - self.n_seeds as i64
    }

    pub fn eval(&self, k: usize, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.exponent(k) as f64 * theta)
    }

    pub fn eval_derivative(&self, k: usize, theta: f64) -> Complex64 {
        let p = self.exponent(k) as f64;
        Complex64::new(0.0, p) * Complex64::from_polar(1.0, p * theta)
    }

    /// `Σ_k h_k s_k(θ)`.
    pub fn combination(&self, h: &[Complex64], theta: f64) -> Complex64 {
        debug_assert_eq!(h.len(), self.n_seeds);
        h.iter()
            .enumerate()
            .map(|(k, hk)| hk * self.eval(k, theta))
            .sum()
    }

    /// `Σ_k h_k s_k'(θ)`.
    pub fn combination_derivative(&self, h: &[Complex64], theta: f64) -> Complex64 {
        h.iter()
            .enumerate()
            .map(|(k, hk)| hk * self.eval_derivative(k, theta))
            .sum()
    }
}

/// Interpolation nodes, pairwise separated so that no `sin(θ_n − θ_m)`
/// vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<f64>,
}

/// Checks `|sin(θ_n − θ_m)| > tol` for every pair.
pub fn check_separation(theta: &[f64], tol: f64) -> Result<()> {
    for a in 0..theta.len() {
        for b in a + 1..theta.len() {
            let separation = (theta[a] - theta[b]).sin().abs();
            if !(separation > tol) {
                return Err(Error::CollisionSingularity {
                    first: a,
                    second: b,
                    separation,
                });
            }
        }
    }
    Ok(())
}

impl NodeSet {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(nodes, COLLISION_TOL)
    }

    pub fn with_tolerance(nodes: Vec<f64>, collision_tol: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidState("node set is empty".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidState("non-finite node".into()));
        }
        check_separation(&nodes, collision_tol)?;
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn basis(&self) -> SeedBasis {
        SeedBasis::new(self.nodes.len())
    }

    /// `σ_n = Π_{ℓ≠n} sin(θ_n − θ_ℓ)`; the empty product is 1.
    pub fn sigma(&self, n: usize) -> f64 {
        sigma(&self.nodes, n)
    }

    /// The cardinal function `q^(n)(θ)` in its factored Vandermonde form
    /// `s_1(θ − θ_n) Π_{ℓ≠n} (e^{2iθ} − e^{2iθ_ℓ}) / (e^{2iθ_n} − e^{2iθ_ℓ})`.
    pub fn interp_q(&self, n: usize, theta: f64) -> Complex64 {
        let basis = self.basis();
        let e = |t: f64| Complex64::from_polar(1.0, 2.0 * t);
        let (en, ez) = (e(self.nodes[n]), e(theta));
        let product: Complex64 = self
            .nodes
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != n)
            .map(|(_, &tl)| {
                let el = e(tl);
                (ez - el) / (en - el)
            })
            .product();
        basis.eval(0, theta - self.nodes[n]) * product
    }

    /// `Σ_n f_n q^(n)(θ)`.
    pub fn interpolate(&self, values: &[Complex64], theta: f64) -> Complex64 {
        values
            .iter()
            .enumerate()
            .map(|(n, f)| f * self.interp_q(n, theta))
            .sum()
    }

    /// The exact differentiation matrix on the seed space:
    /// `D_nn = Σ_{ℓ≠n} cot(θ_n − θ_ℓ)`,
    /// `D_nm = (σ_n/σ_m) / sin(θ_n − θ_m)` for `n ≠ m`.
    pub fn diff_matrix(&self) -> DiffMatrix {
        let n = self.nodes.len();
        let sig: Vec<f64> = (0..n).map(|k| self.sigma(k)).collect();
        let entries = DMatrix::from_fn(n, n, |a, b| {
            if a == b {
                cot_sum(&self.nodes, a)
            } else {
                sig[a] / sig[b] / (self.nodes[a] - self.nodes[b]).sin()
            }
        });
        DiffMatrix { entries }
    }
}

pub(crate) fn sigma(theta: &[f64], n: usize) -> f64 {
    let tn = theta[n];
    theta
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != n)
        .map(|(_, &tl)| (tn - tl).sin())
        .product()
}

pub(crate) fn cot_sum(theta: &[f64], n: usize) -> f64 {
    let tn = theta[n];
    theta
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != n)
        .map(|(_, &tl)| {
            let (s, c) = (tn - tl).sin_cos();
            c / s
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    entries: DMatrix<f64>,
}

impl DiffMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[(n, m)]
    }

    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.entries.nrows();
        assert_eq!(values.len(), n);
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| values[b] * self.entries[(a, b)])
                    .sum::<Complex64>()
            })
            .collect()
    }
}
