//! Algebraic solution of the many-body interpolation model.
//!
//! For the many-body kind the constants of motion decouple the particles:
//! each angle obeys the first-order equation
//! `μ_n θ̇_n = −η_n + Σ_m h_m s_m(θ_n)`. With `ζ = e^{iθ}` this becomes
//! `μ ζ^{N−2} ζ̇ / P(ζ) = i`, where
//! `P(ξ) = −η ξ^{N−1} + Σ_m h_m ξ^{2(m−1)}`, so
//! `F(ζ) = ∫_{ζ_0}^{ζ} ξ^{N−2}/P(ξ) dξ = i t/μ`. The quadrature is done in
//! closed form from the roots and residues of `P`, and `ζ(t)` is recovered by
//! Newton continuation in `t` with continuously tracked logarithms.

use num_complex::Complex64;

use crate::dynamics::{constants_of_motion, InvariantVector, ModelSpec};
use crate::error::{Error, Result};
use crate::geometry::AngleState;
use crate::integrator::Trajectory;
use crate::interp::{check_separation, SeedBasis, COLLISION_TOL};

type C = Complex64;

/// Per-particle first-order data `(h, μ_n, η_n, θ_n(0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub h: InvariantVector,
    pub mu: Vec<f64>,
    pub eta: Vec<f64>,
    pub theta0: Vec<f64>,
}

impl ReducedSystem {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `θ̇_n` from the reduced equation at angle `theta`.
    pub fn rate(&self, n: usize, theta: f64) -> f64 {
        let f = SeedBasis::new(self.len()).combination(&self.h.h, theta);
        (f.re - self.eta[n]) / self.mu[n]
    }

    /// `max_n |μ_n θ̇_n + η_n − Σ_m h_m s_m(θ_n)|` at `s`.
    pub fn consistency_residual(&self, s: &AngleState) -> f64 {
        let basis = SeedBasis::new(self.len());
        (0..self.len())
            .map(|n| {
                let f = basis.combination(&self.h.h, s.theta()[n]);
                (C::new(self.mu[n] * s.theta_dot()[n] + self.eta[n], 0.0) - f).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Reduces the many-body model at `s0` to uncoupled first-order equations.
pub fn reduce_to_first_order(model: &ModelSpec, s0: &AngleState) -> Result<ReducedSystem> {
    let ModelSpec::ManyBody(c) = model else {
        return Err(model.wrong_kind("many_body"));
    };
    check_separation(s0.theta(), COLLISION_TOL)?;
    let h = constants_of_motion(model, s0)?;
    Ok(ReducedSystem {
        h,
        mu: c.mu().to_vec(),
        eta: c.eta().to_vec(),
        theta0: s0.theta().to_vec(),
    })
}

/// Roots, residues and starting point of one particle's quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureData {
    n_particles: usize,
    /// Coefficients of `P`, lowest power first.
    pub poly_coeffs: Vec<C>,
    pub roots: Vec<C>,
    pub residues: Vec<C>,
    pub zeta0: C,
}

impl QuadratureData {
    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn leading(&self) -> C {
        *self.poly_coeffs.last().expect("polynomial has coefficients")
    }

    pub fn eval_poly(&self, xi: C) -> C {
        horner(&self.poly_coeffs, xi).0
    }

    /// `h_N^{-1} Σ_j φ_j / (ξ − ξ_j)`, which equals `1/P(ξ)`.
    pub fn partial_fractions(&self, xi: C) -> C {
        let sum: C = self
            .roots
            .iter()
            .zip(&self.residues)
            .map(|(r, phi)| phi / (xi - r))
            .sum();
        sum / self.leading()
    }

    /// Integrand `ξ^{N−2}/P(ξ)`.
    pub fn integrand(&self, xi: C) -> C {
        xi.powi(self.n_particles as i32 - 2) / self.eval_poly(xi)
    }

    /// Logarithm coefficient `φ_j ξ_j^{N−2}/h_N` of root `j`.
    fn log_weight(&self, j: usize) -> C {
        self.residues[j] * self.roots[j].powi(self.n_particles as i32 - 2) / self.leading()
    }

    /// Smallest `|2π i ξ_j^{N−2} φ_j / h_N|`: the jump `F` would make if a
    /// logarithm switched branch.
    pub fn min_branch_jump(&self) -> f64 {
        (0..self.roots.len())
            .map(|j| std::f64::consts::TAU * self.log_weight(j).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `F(ζ)` given `logs[j] = log((ζ − ξ_j)/(ζ_0 − ξ_j))` on the chosen branch.
    fn antiderivative_with_logs(&self, zeta: C, logs: &[C]) -> C {
        let m = self.n_particles - 2;
        let mut total = C::new(0.0, 0.0);
        for (j, &xi) in self.roots.iter().enumerate() {
            let (u, u0) = (zeta - xi, self.zeta0 - xi);
            let mut term = xi.powi(m as i32) * logs[j];
            let (mut uk, mut u0k) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
            for k in 1..=m {
                uk *= u;
                u0k *= u0;
                term += binomial(m, k) * xi.powi((m - k) as i32) / k as f64 * (uk - u0k);
            }
            total += self.residues[j] * term;
        }
        total / self.leading()
    }

    fn check_pole(&self, zeta: C) -> Result<()> {
        let scale = 1.0 + zeta.norm();
        match self
            .roots
            .iter()
            .position(|r| (zeta - r).norm() <= 1e-14 * scale)
        {
            Some(index) => Err(Error::PoleHit { index }),
            None => Ok(()),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(p(z), p'(z))` for coefficients given lowest power first.
fn horner(coeffs: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a polynomial (lowest power first, nonzero leading
/// coefficient) by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn polynomial_roots(coeffs: &[C]) -> Result<Vec<C>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    if lead == C::new(0.0, 0.0) {
        return Err(Error::DegenerateLeadingCoefficient { magnitude: 0.0 });
    }
    let monic: Vec<C> = coeffs.iter().map(|c| c / lead).collect();
    // Start on a circle whose radius is the geometric mean of the root moduli.
    let radius = if monic[0].norm() > 0.0 {
        monic[0].norm().powf(1.0 / degree as f64)
    } else {
        1.0
    };
    let mut z: Vec<C> = (0..degree)
        .map(|k| {
            C::from_polar(
                radius,
                std::f64::consts::TAU * k as f64 / degree as f64 + 0.4,
            )
        })
        .collect();

    for _ in 0..500 {
        let mut largest = 0.0f64;
        for k in 0..degree {
            let (p, dp) = horner(&monic, z[k]);
            if p == C::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C = (0..degree)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (C::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            largest = largest.max(step.norm() / z[k].norm().max(f64::MIN_POSITIVE));
        }
        if largest < 1e-15 {
            break;
        }
    }

    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coeffs, *root);
            if dp == C::new(0.0, 0.0) {
                break;
            }
            let candidate = *root - p / dp;
            if horner(coeffs, candidate).0.norm() < p.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Relative root separation below which roots count as repeated. A double
/// root splits into two simple ones about `sqrt(ε)` apart in floating point,
/// so the threshold sits safely above that.
pub const REPEATED_ROOT_TOL: f64 = 1e-7;

/// Assembles `P` for particle `n` and computes its roots and residues.
pub fn build_quadrature(data: &ReducedSystem, n: usize) -> Result<QuadratureData> {
    let big_n = data.len();
    if n >= big_n {
        return Err(Error::DimensionMismatch {
            expected: big_n,
            found: n + 1,
        });
    }
    let h = &data.h.h;
    let hmax = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let zeta0 = C::from_polar(1.0, data.theta0[n]);

    let mut coeffs = vec![C::new(0.0, 0.0); 2 * big_n - 1];
    for (m, hm) in h.iter().enumerate() {
        coeffs[2 * m] += hm;
    }
    coeffs[big_n - 1] -= data.eta[n];

    if big_n == 1 {
        return Ok(QuadratureData {
            n_particles: 1,
            poly_coeffs: coeffs,
            roots: Vec::new(),
            residues: Vec::new(),
            zeta0,
        });
    }

    let lead = h[big_n - 1].norm();
    if !(lead >= 1e-12 * hmax) || lead == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient { magnitude: lead });
    }
    let roots = polynomial_roots(&coeffs)?;

    let coeff_scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let root_scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut separation = f64::INFINITY;
    for a in 0..roots.len() {
        for b in a + 1..roots.len() {
            separation = separation.min((roots[a] - roots[b]).norm());
        }
    }
    if separation < REPEATED_ROOT_TOL * root_scale {
        return Err(Error::RepeatedRoots { separation });
    }
    for r in &roots {
        // Residual relative to the size of the terms being summed.
        let size: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * r.norm().powi(k as i32))
            .sum();
        let residual = horner(&coeffs, *r).0.norm();
        if residual > 1e-8 * coeff_scale.max(size) {
            return Err(Error::InvalidState(format!(
                "root finder did not converge (|P| = {residual:e})"
            )));
        }
    }
    let leading = coeffs[2 * big_n - 2];
    let residues = roots.iter().map(|r| leading / horner(&coeffs, *r).1).collect();
    Ok(QuadratureData {
        n_particles: big_n,
        poly_coeffs: coeffs,
        roots,
        residues,
        zeta0,
    })
}

/// `F(ζ) = ∫_{ζ_0}^{ζ} ξ^{N−2}/P(ξ) dξ` with principal logarithms of
/// `(ζ − ξ_j)/(ζ_0 − ξ_j)`; valid as long as the straight path from `ζ_0`
/// does not wind around a root. [`Continuation`] tracks branches along
/// longer paths.
pub fn antiderivative(q: &QuadratureData, zeta: C) -> Result<C> {
    if q.n_particles < 2 {
        return Err(Error::InvalidState(
            "the quadrature needs at least two particles".into(),
        ));
    }
    q.check_pole(zeta)?;
    let logs: Vec<C> = q
        .roots
        .iter()
        .map(|&xi| ((zeta - xi) / (q.zeta0 - xi)).ln())
        .collect();
    Ok(q.antiderivative_with_logs(zeta, &logs))
}

/// Largest change of any `arg(ζ − ξ_j)` allowed in one ladder step.
const MAX_ARG_STEP: f64 = 0.5;
const MIN_LADDER_STEP: f64 = 1e-13;

/// Newton continuation of `F(ζ(t)) = i t/μ` along a time ladder.
#[derive(Debug, Clone)]
pub struct Continuation<'a> {
    q: &'a QuadratureData,
    mu: f64,
    eta: f64,
    h: Vec<C>,
    t: f64,
    zeta: C,
    theta: f64,
    logs: Vec<C>,
    f_value: C,
    dt: f64,
    /// Largest `|ΔF|` between consecutive accepted ladder points.
    pub max_increment: f64,
    pub ladder_steps: usize,
}

impl<'a> Continuation<'a> {
    pub fn new(q: &'a QuadratureData, mu: f64, eta: f64, h: &[C]) -> Self {
        Self {
            q,
            mu,
            eta,
            h: h.to_vec(),
            t: 0.0,
            zeta: q.zeta0,
            theta: q.zeta0.arg(),
            logs: vec![C::new(0.0, 0.0); q.roots.len()],
            f_value: C::new(0.0, 0.0),
            dt: 0.05,
            max_increment: 0.0,
            ladder_steps: 0,
        }
    }

    /// Starts the unwrapped angle at `theta0` rather than `arg ζ_0`.
    pub fn with_theta(mut self, theta0: f64) -> Self {
        self.theta = theta0;
        self
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn zeta(&self) -> C {
        self.zeta
    }

    /// Continuously unwrapped `arg ζ`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `θ̇` from the reduced first-order equation.
    pub fn theta_dot(&self) -> f64 {
        rate(&self.h, self.eta, self.mu, self.theta)
    }

    /// `F` at the current point on the tracked branch.
    pub fn f_value(&self) -> C {
        self.f_value
    }

    /// `|F(ζ(t)) − i t/μ|` recomputed from the tracked logarithms.
    pub fn residual(&self) -> f64 {
        if self.q.n_particles < 2 {
            return 0.0;
        }
        let f = self.q.antiderivative_with_logs(self.zeta, &self.logs);
        (f - C::new(0.0, self.t / self.mu)).norm()
    }

    pub fn advance_to(&mut self, target: f64) -> Result<C> {
        if self.q.n_particles < 2 {
            // Constant rate: linear motion.
            self.theta += (target - self.t) * rate(&self.h, self.eta, self.mu, self.theta);
            self.t = target;
            self.zeta = C::from_polar(1.0, self.theta);
            return Ok(self.zeta);
        }
        while self.t != target {
            let remaining = target - self.t;
            let mut dt = self.dt.min(remaining.abs()) * remaining.signum();
            loop {
                if dt.abs() < MIN_LADDER_STEP * (1.0 + self.t.abs()) {
                    return Err(Error::ContinuationFailure {
                        last_good_t: self.t,
                        reason: format!("ladder step underflow near ζ = {}", self.zeta),
                    });
                }
                match self.try_step(dt) {
                    Ok(()) => break,
                    Err(Error::PoleHit { index }) => {
                        return Err(Error::ContinuationFailure {
                            last_good_t: self.t,
                            reason: format!("path reached root {index}"),
                        })
                    }
                    Err(_) => dt *= 0.5,
                }
            }
            self.dt = (2.0 * dt.abs()).min(0.25);
            if (target - self.t).abs() <= 1e-15 * (1.0 + target.abs()) {
                self.t = target;
            }
        }
        Ok(self.zeta)
    }

    fn try_step(&mut self, dt: f64) -> Result<()> {
        let q = self.q;
        let t_new = self.t + dt;
        let target = C::new(0.0, t_new / self.mu);

        // Classical RK4 on the real angle as predictor.
        let g = |th: f64| rate(&self.h, self.eta, self.mu, th);
        let k1 = g(self.theta);
        let k2 = g(self.theta + 0.5 * dt * k1);
        let k3 = g(self.theta + 0.5 * dt * k2);
        let k4 = g(self.theta + dt * k3);
        let theta_pred = self.theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let mut zeta = C::from_polar(1.0, theta_pred);

        let base = self.zeta;
        let increment = |z: C| -> Result<(C, Vec<C>)> {
            let mut logs = Vec::with_capacity(q.roots.len());
            for (j, &xi) in q.roots.iter().enumerate() {
                let ratio = (z - xi) / (base - xi);
                let step = ratio.ln();
                if step.im.abs() > MAX_ARG_STEP {
                    return Err(Error::ContinuationFailure {
                        last_good_t: self.t,
                        reason: "ladder step too large".into(),
                    });
                }
                logs.push(self.logs[j] + step);
            }
            Ok((q.antiderivative_with_logs(z, &logs), logs))
        };

        let tol = 1e-13 * (1.0 + target.norm());
        let mut converged = None;
        for _ in 0..40 {
            q.check_pole(zeta)?;
            let (f, logs) = increment(zeta)?;
            let g_val = f - target;
            let delta = g_val / q.integrand(zeta);
            if g_val.norm() <= tol || delta.norm() <= 1e-15 * zeta.norm() {
                converged = Some((f, logs));
                break;
            }
            // Damp steps that would leave the neighbourhood of the circle.
            let mut step = delta;
            while step.norm() > 0.25 {
                step *= 0.5;
            }
            zeta -= step;
        }
        let Some((f, logs)) = converged else {
            return Err(Error::ContinuationFailure {
                last_good_t: self.t,
                reason: "Newton stagnation".into(),
            });
        };
        if (f - target).norm() > 1e-10 * (1.0 + target.norm()) {
            return Err(Error::ContinuationFailure {
                last_good_t: self.t,
                reason: "residual above tolerance".into(),
            });
        }
        self.max_increment = self.max_increment.max((f - self.f_value).norm());
        self.theta += (zeta / self.zeta).arg();
        self.zeta = zeta;
        self.logs = logs;
        self.f_value = f;
        self.t = t_new;
        self.ladder_steps += 1;
        Ok(())
    }
}

fn rate(h: &[C], eta: f64, mu: f64, theta: f64) -> f64 {
    let f = SeedBasis::new(h.len()).combination(h, theta);
    (f.re - eta) / mu
}

/// `ζ(t)` for one particle: the solution of `F(ζ) = i t/μ` reached by
/// continuation from `ζ_0`.
pub fn solve_time(q: &QuadratureData, data: &ReducedSystem, n: usize, t: f64) -> Result<C> {
    if t == 0.0 {
        return Ok(q.zeta0);
    }
    let mut c = Continuation::new(q, data.mu[n], data.eta[n], &data.h.h).with_theta(data.theta0[n]);
    c.advance_to(t)
}

/// Angle trajectory of the many-body model built from the quadratures alone.
pub fn trajectory_algebraic(
    model: &ModelSpec,
    s0: &AngleState,
    t_grid: &[f64],
) -> Result<Trajectory<AngleState>> {
    let data = reduce_to_first_order(model, s0)?;
    let n = data.len();
    let quads = (0..n)
        .map(|k| build_quadrature(&data, k))
        .collect::<Result<Vec<_>>>()?;
    let mut conts: Vec<Continuation> = quads
        .iter()
        .enumerate()
        .map(|(k, q)| Continuation::new(q, data.mu[k], data.eta[k], &data.h.h).with_theta(data.theta0[k]))
        .collect();
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut theta = Vec::with_capacity(n);
        let mut theta_dot = Vec::with_capacity(n);
        for c in conts.iter_mut() {
            c.advance_to(t)?;
            theta.push(c.theta());
            theta_dot.push(c.theta_dot());
        }
        states.push(AngleState::new(theta, theta_dot)?);
    }
    Trajectory::new(t_grid.to_vec(), states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn many_body_data(theta: &[f64], w: &[f64], mu: &[f64], eta: &[f64]) -> ReducedSystem {
        let m = ModelSpec::many_body(mu.to_vec(), eta.to_vec()).unwrap();
        reduce_to_first_order(&m, &AngleState::new(theta.to_vec(), w.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn single_particle_is_linear() {
        let data = many_body_data(&[0.3], &[1.5], &[2.0], &[0.4]);
        let q = build_quadrature(&data, 0).unwrap();
        assert!(q.roots.is_empty());
        let z = solve_time(&q, &data, 0, 2.0).unwrap();
        assert!((z - C::from_polar(1.0, 0.3 + 2.0 * 1.5)).norm() < 1e-13);
    }

    #[test]
    fn quadratic_case_matches_closed_form() {
        let data = many_body_data(&[0.4, 2.1], &[0.7, -0.3], &[1.2, 0.8], &[0.3, -0.5]);
        let q = build_quadrature(&data, 0).unwrap();
        let (a, b, c) = (q.poly_coeffs[2], q.poly_coeffs[1], q.poly_coeffs[0]);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let exact = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        for (root, phi) in q.roots.iter().zip(&q.residues) {
            let k = if (root - exact[0]).norm() < (root - exact[1]).norm() { 0 } else { 1 };
            assert!((root - exact[k]).norm() < 1e-12);
            // φ_j = h_2 / P'(ξ_j) = 1/(ξ_j − ξ_other).
            let expected = (exact[k] - exact[1 - k]).inv();
            assert!((phi - expected).norm() < 1e-10 * expected.norm());
        }
    }

    #[test]
    fn antiderivative_vanishes_at_start() {
        let data = many_body_data(&[0.4, 2.1, -1.0], &[0.7, -0.3, 0.2], &[1.2, 0.8, 1.0], &[0.3, -0.5, 0.1]);
        let q = build_quadrature(&data, 1).unwrap();
        assert_eq!(antiderivative(&q, q.zeta0).unwrap(), C::new(0.0, 0.0));
        assert!(matches!(antiderivative(&q, q.roots[0]), Err(Error::PoleHit { index: 0 })));
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let data = ReducedSystem {
            h: InvariantVector {
                h: vec![C::new(1.0, 0.0), C::new(0.0, 0.0)],
            },
            mu: vec![1.0, 1.0],
            eta: vec![0.0, 0.0],
            theta0: vec![0.0, 1.0],
        };
        assert!(matches!(
            build_quadrature(&data, 0),
            Err(Error::DegenerateLeadingCoefficient { .. })
        ));
    }

    #[test]
    fn repeated_roots_rejected() {
        // P(ξ) = ξ² − 2ξ + 1 = (ξ − 1)².
        let data = ReducedSystem {
            h: InvariantVector {
                h: vec![C::new(1.0, 0.0), C::new(1.0, 0.0)],
            },
            mu: vec![1.0, 1.0],
            eta: vec![2.0, 2.0],
            theta0: vec![0.5, 1.0],
        };
        assert!(matches!(
            build_quadrature(&data, 0),
            Err(Error::RepeatedRoots { .. })
        ));
    }

    #[test]
    fn wrong_kind() {
        let s = AngleState::new(vec![0.1, 1.0], vec![0.0, 0.0]).unwrap();
        let m = ModelSpec::two_body(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(reduce_to_first_order(&m, &s), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn zero_time_returns_start() {
        let data = many_body_data(&[0.4, 2.1], &[0.7, -0.3], &[1.2, 0.8], &[0.3, -0.5]);
        let q = build_quadrature(&data, 1).unwrap();
        assert_eq!(solve_time(&q, &data, 1, 0.0).unwrap(), q.zeta0);
    }
}
