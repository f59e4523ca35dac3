//! Vector-form equations for points constrained to the unit circle.
//!
//! Each acceleration is `r̈_n = −(ṙ_n·ṙ_n) r_n + a_n ẑ∧r_n` (plus `g1 ṙ_n`
//! for the goldfish kind), with the tangential part `a_n` written in the
//! scalar invariants `r_ℓ·r_n`, `(r_ℓ∧r_n)·ẑ`, `(r_n∧ṙ_n)·ẑ` rather than
//! in angles.

use super::{Coefficients, GoldfishCouplings, InterpolationWeights, ModelSpec, COLLISION_GUARD};
use crate::error::{Error, Result};
use crate::geometry::{CircleState, Vec2, INPUT_CONSTRAINT_TOL, TAN_GUARD};

struct Frame<'a> {
    r: &'a [Vec2],
    v: &'a [Vec2],
    /// `(r_n ∧ ṙ_n)·ẑ`
    omega: Vec<f64>,
    /// `ṙ_n·ṙ_n`
    speed_sq: Vec<f64>,
}

impl<'a> Frame<'a> {
    fn new(c: &'a CircleState) -> Self {
        let (r, v) = (c.r(), c.r_dot());
        Self {
            r,
            v,
            omega: r.iter().zip(v).map(|(a, b)| a.wedge(*b)).collect(),
            speed_sq: v.iter().map(|b| b.norm_sq()).collect(),
        }
    }

    fn n(&self) -> usize {
        self.r.len()
    }

    /// `(r_ℓ ∧ r_n)·ẑ`, the sine of `θ_n − θ_ℓ`.
    fn sin(&self, n: usize, l: usize) -> f64 {
        self.r[l].wedge(self.r[n])
    }

    fn cos(&self, n: usize, l: usize) -> f64 {
        self.r[l].dot(self.r[n])
    }

    fn sigma(&self, n: usize) -> f64 {
        (0..self.n()).filter(|&l| l != n).map(|l| self.sin(n, l)).product()
    }

    fn others(&self, n: usize) -> impl Iterator<Item = usize> {
        (0..self.n()).filter(move |&l| l != n)
    }
}

/// Accelerations `r̈_n` of `model` at `c`.
pub fn rhs_circle(model: &ModelSpec, c: &CircleState) -> Result<Vec<Vec2>> {
    rhs_circle_with_tolerance(model, c, INPUT_CONSTRAINT_TOL)
}

/// Looser constraint check used on Runge–Kutta stage values.
pub const STAGE_CONSTRAINT_TOL: f64 = 1e-4;

/// [`rhs_circle`] with a caller-chosen constraint tolerance. Intermediate
/// integrator stages sit off the circle by the local truncation error, so
/// they are checked against [`STAGE_CONSTRAINT_TOL`] instead.
pub fn rhs_circle_with_tolerance(
    model: &ModelSpec,
    c: &CircleState,
    constraint_tol: f64,
) -> Result<Vec<Vec2>> {
    model.check_len(c.len())?;
    c.check_constraint(constraint_tol)?;
    let f = Frame::new(c);
    for a in 0..f.n() {
        for b in a + 1..f.n() {
            let separation = f.sin(a, b).abs();
            if separation <= COLLISION_GUARD {
                return Err(Error::CollisionSingularity {
                    first: a,
                    second: b,
                    separation,
                });
            }
        }
    }
    if model.kind().is_tan_derived() {
        for (index, r) in f.r.iter().enumerate() {
            if r.x.abs() <= TAN_GUARD {
                return Err(Error::TangentSingularity {
                    index,
                    theta: r.y.atan2(r.x),
                });
            }
        }
    }

    let tangential = match model {
        ModelSpec::ManyBody(k) => many_body(k, &f),
        ModelSpec::TwoBody(k) => two_body(k, &f),
        ModelSpec::Sutherland { g } => sutherland(*g, &f),
        ModelSpec::GoldfishCircle(k) => goldfish(k, &f),
        ModelSpec::IsochronousTan { g } => isochronous_tan(*g, &f),
        ModelSpec::GoldfishTan => goldfish_tan(&f),
        ModelSpec::GeneralInterp(w) => general(w.as_ref(), &f)?,
    };
    let g1 = match model {
        ModelSpec::GoldfishCircle(k) => k.g1,
        _ => 0.0,
    };

    Ok((0..f.n())
        .map(|i| {
            let r = f.r[i];
            -f.speed_sq[i] * r + tangential[i] * r.perp() + g1 * f.v[i]
        })
        .collect())
}

fn many_body(k: &Coefficients, f: &Frame) -> Vec<f64> {
    let (mu, eta) = (k.mu(), k.eta());
    let sig: Vec<f64> = (0..f.n()).map(|i| f.sigma(i)).collect();
    (0..f.n())
        .map(|i| {
            let cot: f64 = f.others(i).map(|l| f.cos(i, l) / f.sin(i, l)).sum();
            let coupling: f64 = f
                .others(i)
                .map(|l| sig[i] / sig[l] * (mu[l] * f.omega[l] + eta[l]) / f.sin(i, l))
                .sum();
            ((mu[i] * f.speed_sq[i] + eta[i] * f.omega[i]) * cot + f.omega[i] * coupling) / mu[i]
        })
        .collect()
}

fn two_body(k: &Coefficients, f: &Frame) -> Vec<f64> {
    let (mu, eta) = (k.mu(), k.eta());
    (0..f.n())
        .map(|i| {
            let w = f.omega[i];
            let sum: f64 = f
                .others(i)
                .map(|l| {
                    (w * (mu[l] * f.omega[l] + eta[l])
                        + (mu[i] * w + eta[i]) * f.omega[l] * f.cos(i, l))
                        / f.sin(i, l)
                })
                .sum();
            sum / mu[i]
        })
        .collect()
}

fn sutherland(g: f64, f: &Frame) -> Vec<f64> {
    (0..f.n())
        .map(|i| {
            let sum: f64 = f.others(i).map(|l| f.cos(i, l) / f.sin(i, l).powi(3)).sum();
            g * g * sum
        })
        .collect()
}

fn goldfish(k: &GoldfishCouplings, f: &Frame) -> Vec<f64> {
    (0..f.n())
        .map(|i| {
            let sum: f64 = f
                .others(i)
                .map(|l| {
                    let velocity = 2.0 * f.v[i].dot(f.v[l]);
                    let mixed = f.r[l].wedge(f.v[i]) + f.r[i].wedge(f.v[l]);
                    (velocity + k.g2 * mixed + k.g3 * f.cos(i, l)) / f.sin(i, l)
                })
                .sum();
            k.g0 + sum
        })
        .collect()
}

fn isochronous_tan(g: f64, f: &Frame) -> Vec<f64> {
    (0..f.n())
        .map(|i| {
            let Vec2 { x, y } = f.r[i];
            let sum: f64 = f.others(i).map(|l| (f.r[l].x / f.sin(i, l)).powi(3)).sum();
            -(2.0 * f.speed_sq[i] * y / x + 4.0 * x * y - g * g * x.powi(5) * sum)
        })
        .collect()
}

fn goldfish_tan(f: &Frame) -> Vec<f64> {
    (0..f.n())
        .map(|i| {
            let Vec2 { x, y } = f.r[i];
            let sum: f64 = f
                .others(i)
                .map(|l| {
                    let xl = f.r[l].x;
                    (2.0 * f.omega[i] * f.omega[l] + x * x * xl * xl) / (xl * f.sin(i, l))
                })
                .sum();
            -(2.0 * f.speed_sq[i] * y / x + x * y - x * sum)
        })
        .collect()
}

fn general(weights: &dyn InterpolationWeights, f: &Frame) -> Result<Vec<f64>> {
    let n = f.n();
    let theta: Vec<f64> = f.r.iter().map(|r| r.y.atan2(r.x)).collect();
    let rho: Vec<f64> = (0..n).map(|k| weights.rho(&theta, k)).collect();
    if let Some(index) = rho.iter().position(|&r| r == 0.0) {
        return Err(Error::ZeroMass { index });
    }
    let values: Vec<f64> = (0..n)
        .map(|k| rho[k] * f.omega[k] + weights.gamma(&theta, k))
        .collect();
    let sig: Vec<f64> = (0..n).map(|i| f.sigma(i)).collect();
    Ok((0..n)
        .map(|i| {
            let cot: f64 = f.others(i).map(|l| f.cos(i, l) / f.sin(i, l)).sum();
            let coupling: f64 = f
                .others(i)
                .map(|l| sig[i] / sig[l] * values[l] / f.sin(i, l))
                .sum();
            let mut acc = f.omega[i] * (values[i] * cot + coupling);
            for m in 0..n {
                acc -= (weights.rho_partial(&theta, i, m) * f.omega[i]
                    + weights.gamma_partial(&theta, i, m))
                    * f.omega[m];
            }
            acc / rho[i]
        })
        .collect())
}
