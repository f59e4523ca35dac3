use super::{check_tangent, Coefficients, GoldfishCouplings, InterpolationWeights, ModelSpec};
use crate::error::{Error, Result};
use crate::geometry::AngleState;
use crate::interp::{check_separation, cot_sum, sigma, COLLISION_TOL};

/// Angular accelerations `θ̈` of `model` at `s`.
pub fn rhs_angle(model: &ModelSpec, s: &AngleState) -> Result<Vec<f64>> {
    model.check_len(s.len())?;
    let theta = s.theta();
    let w = s.theta_dot();
    check_separation(theta, COLLISION_TOL)?;
    if model.kind().is_tan_derived() {
        check_tangent(theta)?;
    }
    match model {
        ModelSpec::ManyBody(c) => Ok(many_body(c, theta, w)),
        ModelSpec::TwoBody(c) => Ok(two_body(c, theta, w)),
        ModelSpec::Sutherland { g } => Ok(sutherland(*g, theta)),
        ModelSpec::GoldfishCircle(c) => Ok(goldfish(c, theta, w)),
        ModelSpec::IsochronousTan { g } => Ok(isochronous_tan(*g, theta, w)),
        ModelSpec::GoldfishTan => Ok(goldfish_tan(theta, w)),
        ModelSpec::GeneralInterp(weights) => general(weights.as_ref(), theta, w),
    }
}

fn many_body(c: &Coefficients, theta: &[f64], w: &[f64]) -> Vec<f64> {
    let (mu, eta) = (c.mu(), c.eta());
    let n = theta.len();
    let sig: Vec<f64> = (0..n).map(|k| sigma(theta, k)).collect();
    (0..n)
        .map(|i| {
            let mut acc = w[i] * (mu[i] * w[i] + eta[i]) * cot_sum(theta, i);
            let mut coupling = 0.0;
            for l in (0..n).filter(|&l| l != i) {
                coupling += sig[i] / sig[l] * (mu[l] * w[l] + eta[l]) / (theta[i] - theta[l]).sin();
            }
            acc += w[i] * coupling;
            acc / mu[i]
        })
        .collect()
}

fn two_body(c: &Coefficients, theta: &[f64], w: &[f64]) -> Vec<f64> {
    let (mu, eta) = (c.mu(), c.eta());
    let n = theta.len();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for l in (0..n).filter(|&l| l != i) {
                let (s, co) = (theta[i] - theta[l]).sin_cos();
                acc += (w[i] * (mu[l] * w[l] + eta[l]) + (mu[i] * w[i] + eta[i]) * w[l] * co) / s;
            }
            acc / mu[i]
        })
        .collect()
}

fn sutherland(g: f64, theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    (0..n)
        .map(|i| {
            let sum: f64 = (0..n)
                .filter(|&l| l != i)
                .map(|l| {
                    let (s, c) = (theta[i] - theta[l]).sin_cos();
                    c / (s * s * s)
                })
                .sum();
            g * g * sum
        })
        .collect()
}

fn goldfish(c: &GoldfishCouplings, theta: &[f64], w: &[f64]) -> Vec<f64> {
    let n = theta.len();
    (0..n)
        .map(|i| {
            let mut acc = c.g0 + c.g1 * w[i];
            for l in (0..n).filter(|&l| l != i) {
                let (s, co) = (theta[i] - theta[l]).sin_cos();
                acc += (2.0 * w[i] * w[l] + c.g2 * (w[i] + w[l]) + c.g3) * co / s;
            }
            acc
        })
        .collect()
}

fn isochronous_tan(g: f64, theta: &[f64], w: &[f64]) -> Vec<f64> {
    let n = theta.len();
    (0..n)
        .map(|i| {
            let (si, ci) = theta[i].sin_cos();
            let mut acc = -2.0 * w[i] * w[i] * si / ci - 4.0 * si * ci;
            let ci5 = ci.powi(5);
            for l in (0..n).filter(|&l| l != i) {
                let cl = theta[l].cos();
                let s = (theta[i] - theta[l]).sin();
                acc += g * g * ci5 * cl.powi(3) / s.powi(3);
            }
            acc
        })
        .collect()
}

fn goldfish_tan(theta: &[f64], w: &[f64]) -> Vec<f64> {
    let n = theta.len();
    (0..n)
        .map(|i| {
            let (si, ci) = theta[i].sin_cos();
            let mut acc = -2.0 * w[i] * w[i] * si / ci - si * ci;
            for l in (0..n).filter(|&l| l != i) {
                let cl = theta[l].cos();
                let s = (theta[i] - theta[l]).sin();
                acc += ci * (2.0 * w[i] * w[l] + ci * ci * cl * cl) / (cl * s);
            }
            acc
        })
        .collect()
}

fn general(weights: &dyn InterpolationWeights, theta: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let n = theta.len();
    let rho: Vec<f64> = (0..n).map(|k| weights.rho(theta, k)).collect();
    if let Some(index) = rho.iter().position(|&r| r == 0.0) {
        return Err(Error::ZeroMass { index });
    }
    let f: Vec<f64> = (0..n).map(|k| rho[k] * w[k] + weights.gamma(theta, k)).collect();
    let sig: Vec<f64> = (0..n).map(|k| sigma(theta, k)).collect();
    Ok((0..n)
        .map(|i| {
            // θ̇_n Σ_m D_nm f_m, with D the exact differentiation matrix.
            let mut df = f[i] * cot_sum(theta, i);
            for l in (0..n).filter(|&l| l != i) {
                df += sig[i] / sig[l] * f[l] / (theta[i] - theta[l]).sin();
            }
            let mut acc = w[i] * df;
            for m in 0..n {
                acc -= (weights.rho_partial(theta, i, m) * w[i] + weights.gamma_partial(theta, i, m))
                    * w[m];
            }
            acc / rho[i]
        })
        .collect())
}
