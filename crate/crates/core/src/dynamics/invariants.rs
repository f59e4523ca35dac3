use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ConstantWeights, InterpolationWeights, ModelSpec, SigmaWeights};
use crate::error::{Error, Result};
use crate::geometry::AngleState;
use crate::interp::{check_separation, SeedBasis, COLLISION_TOL};

/// The coefficients `h_m` of the time-independent seed combination
/// `f(θ) = Σ h_m s_m(θ)` that the interpolation-generated models carry.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVector {
    pub h: Vec<Complex64>,
}

impl InvariantVector {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `max_m |h_{N+1−m} − conj(h_m)|`, zero for real states.
    pub fn conjugation_defect(&self) -> f64 {
        let n = self.h.len();
        (0..n)
            .map(|m| (self.h[n - 1 - m] - self.h[m].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `max_m |h_m − h_m^ref| / (1 + |h_m^ref|)`.
    pub fn relative_drift(&self, reference: &InvariantVector) -> f64 {
        self.h
            .iter()
            .zip(&reference.h)
            .map(|(a, b)| (a - b).norm() / (1.0 + b.norm()))
            .fold(0.0, f64::max)
    }
}

/// Solves `Σ_m h_m s_m(θ_n) = ρ_n θ̇_n + γ_n` for the `h_m`.
pub fn constants_of_motion(model: &ModelSpec, s: &AngleState) -> Result<InvariantVector> {
    model.check_len(s.len())?;
    let theta = s.theta();
    check_separation(theta, COLLISION_TOL)?;
    let values = match model {
        ModelSpec::ManyBody(c) => node_values(&ConstantWeights(c.clone()), s),
        ModelSpec::TwoBody(c) => node_values(&SigmaWeights(c.clone()), s),
        ModelSpec::GeneralInterp(w) => node_values(w.as_ref(), s),
        _ => return Err(model.wrong_kind("many_body, two_body or general_interp")),
    };

    let n = s.len();
    let basis = SeedBasis::new(n);
    let m = DMatrix::from_fn(n, n, |a, b| basis.eval(b, theta[a]));
    let rhs = DVector::from_iterator(n, values.iter().map(|&v| Complex64::new(v, 0.0)));
    let singular = || Error::CollisionSingularity {
        first: 0,
        second: 1.min(n - 1),
        separation: 0.0,
    };
    let h = m.clone().lu().solve(&rhs).ok_or_else(singular)?;

    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let residual = (&m * &h - &rhs).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if !(residual <= 1e-10 * scale) {
        return Err(singular());
    }
    Ok(InvariantVector {
        h: h.iter().copied().collect(),
    })
}

fn node_values(weights: &dyn InterpolationWeights, s: &AngleState) -> Vec<f64> {
    let theta = s.theta();
    s.theta_dot()
        .iter()
        .enumerate()
        .map(|(k, w)| weights.rho(theta, k) * w + weights.gamma(theta, k))
        .collect()
}

/// Total angular momentum `P = Σ θ̇_n` and energy
/// `E = ½ Σ θ̇_n² + (g²/4) Σ_{n≠ℓ} sin^{-2}(θ_n − θ_ℓ)` of the Sutherland
/// kind. The potential normalisation is the one whose gradient reproduces
/// `θ̈_n = g² Σ cos/sin³`.
pub fn momentum_energy(model: &ModelSpec, s: &AngleState) -> Result<(f64, f64)> {
    let ModelSpec::Sutherland { g } = model else {
        return Err(model.wrong_kind("sutherland"));
    };
    let theta = s.theta();
    check_separation(theta, COLLISION_TOL)?;
    let w = s.theta_dot();
    let p = w.iter().sum();
    let kinetic = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let mut potential = 0.0;
    for a in 0..theta.len() {
        for b in 0..theta.len() {
            if a != b {
                potential += (theta[a] - theta[b]).sin().powi(-2);
            }
        }
    }
    Ok((p, kinetic + 0.25 * g * g * potential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_particle_constant() {
        let m = ModelSpec::many_body(vec![2.0], vec![3.0]).unwrap();
        let s = AngleState::new(vec![0.7], vec![5.0]).unwrap();
        let h = constants_of_motion(&m, &s).unwrap();
        assert!((h.h[0] - Complex64::new(13.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn two_particle_conjugate_pair() {
        let m = ModelSpec::many_body(vec![1.3, 0.8], vec![-0.4, 0.6]).unwrap();
        let s = AngleState::new(vec![0.2, 1.9], vec![0.5, -1.2]).unwrap();
        let h = constants_of_motion(&m, &s).unwrap();
        assert!((h.h[1] - h.h[0].conj()).norm() < 1e-12);
        // Independent check: the 2×2 system by Cramer's rule.
        let f = [1.3 * 0.5 - 0.4, 0.8 * -1.2 + 0.6];
        let e = |t: f64, p: f64| Complex64::from_polar(1.0, p * t);
        let (a, b, c, d) = (e(0.2, -1.0), e(0.2, 1.0), e(1.9, -1.0), e(1.9, 1.0));
        let det = a * d - b * c;
        let h1 = (d * f[0] - b * f[1]) / det;
        assert!((h.h[0] - h1).norm() < 1e-12);
    }

    #[test]
    fn wrong_kind_rejected() {
        let s = AngleState::new(vec![0.2, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            constants_of_motion(&ModelSpec::Sutherland { g: 1.0 }, &s),
            Err(Error::WrongKind { .. })
        ));
        assert!(matches!(
            momentum_energy(&ModelSpec::GoldfishTan, &s),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn sutherland_momentum_and_equilibrium_energy() {
        let m = ModelSpec::Sutherland { g: 1.0 };
        let (p, _) = momentum_energy(&m, &AngleState::new(vec![0.1, 1.0], vec![1.0, -1.0]).unwrap())
            .unwrap();
        assert_eq!(p, 0.0);
        let (p, e) =
            momentum_energy(&m, &AngleState::new(vec![FRAC_PI_2, 0.0], vec![0.0, 0.0]).unwrap())
                .unwrap();
        assert_eq!(p, 0.0);
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_gradient_matches_force() {
        // Finite-difference gradient of the potential part against the force.
        let m = ModelSpec::Sutherland { g: 1.3 };
        let theta = [0.2, 1.5, -1.9];
        let force = crate::dynamics::rhs_angle(&m, &AngleState::new(theta.to_vec(), vec![0.0; 3]).unwrap())
            .unwrap();
        let energy = |t: &[f64]| {
            momentum_energy(&m, &AngleState::new(t.to_vec(), vec![0.0; 3]).unwrap())
                .unwrap()
                .1
        };
        for i in 0..3 {
            let h = 1e-5;
            let mut up = theta;
            let mut down = theta;
            up[i] += h;
            down[i] -= h;
            let grad = (energy(&up) - energy(&down)) / (2.0 * h);
            assert!((force[i] + grad).abs() < 1e-7 * (1.0 + force[i].abs()), "{i}: {} vs {}", force[i], -grad);
        }
    }
}
