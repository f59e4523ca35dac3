use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

use circle_nbody::algebraic::{
    antiderivative, build_quadrature, polynomial_roots, reduce_to_first_order, solve_time,
    trajectory_algebraic, Continuation, QuadratureData, ReducedSystem,
};
use circle_nbody::dynamics::{constants_of_motion, rhs_angle, InvariantVector, ModelKind, ModelSpec};
use circle_nbody::geometry::periodic_distance;
use circle_nbody::integrator::{integrate_angle, uniform_grid, IntegratorConfig};
use circle_nbody::sampling::Sampler;
use circle_nbody::suites::{algebraic_vs_numeric, random_problem, require_margin};
use circle_nbody::{AngleState, Error};

fn random_many_body(n: usize, seed: u64) -> (ModelSpec, AngleState, ReducedSystem) {
    let (model, s0) = random_problem(ModelKind::ManyBody, n, &mut Sampler::new(seed)).unwrap();
    let data = reduce_to_first_order(&model, &s0).unwrap();
    (model, s0, data)
}

/// Up to `count` random many-body problems that stay well separated on
/// `[0, 1]` and whose algebraic trajectory can be continued there.
fn solvable_problems(n: usize, count: usize) -> Vec<(ModelSpec, AngleState, ReducedSystem)> {
    let grid = uniform_grid(1.0, 101);
    (0..200u64)
        .map(|seed| random_many_body(n, 1000 + seed))
        .filter(|(m, s0, _)| {
            integrate_angle(m, s0, &grid, &IntegratorConfig::default())
                .and_then(|t| require_margin(&t, ModelKind::ManyBody))
                .is_ok()
                && trajectory_algebraic(m, s0, &grid).is_ok()
        })
        .take(count)
        .collect()
}

fn coeff_scale(q: &QuadratureData) -> f64 {
    q.poly_coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Companion-matrix eigenvalues via complex Schur decomposition.
fn companion_eigenvalues(coeffs: &[C]) -> Vec<C> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let mut m = DMatrix::<C>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    m.schur().eigenvalues().unwrap().iter().copied().collect()
}

#[test]
fn roots_agree_with_companion_eigenvalues() {
    for n in 2..=5 {
        for seed in 0..10 {
            let (_, _, data) = random_many_body(n, seed);
            for k in 0..n {
                let q = build_quadrature(&data, k).unwrap();
                assert_eq!(q.roots.len(), 2 * (n - 1));
                let scale = coeff_scale(&q);
                for r in &q.roots {
                    assert!(q.eval_poly(*r).norm() < 1e-8 * scale);
                }
                let eig = companion_eigenvalues(&q.poly_coeffs);
                for r in &q.roots {
                    let nearest = eig.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
                    assert!(nearest < 1e-6 * (1.0 + r.norm()), "n={n} root {r} off by {nearest}");
                }
            }
        }
    }
}

#[test]
fn generic_polynomial_roots() {
    // (x − 1)(x + 2)(x − i) = x³ + (1 − i)x² + (−2 − i)x + 2i
    let coeffs = [C::new(0.0, 2.0), C::new(-2.0, -1.0), C::new(1.0, -1.0), C::new(1.0, 0.0)];
    let roots = polynomial_roots(&coeffs).unwrap();
    for expected in [C::new(1.0, 0.0), C::new(-2.0, 0.0), C::new(0.0, 1.0)] {
        assert!(roots.iter().any(|r| (r - expected).norm() < 1e-13));
    }
}

#[test]
fn partial_fractions_reconstruct_reciprocal() {
    let mut probes = Sampler::new(99);
    for n in 2..=5 {
        let (_, s0, data) = random_many_body(n, 7);
        for k in 0..n {
            let q = build_quadrature(&data, k).unwrap();
            assert!((q.zeta0.norm() - 1.0).abs() < 1e-12);
            assert_eq!(q.zeta0, C::from_polar(1.0, s0.theta()[k]));
            for _ in 0..20 {
                let xi = C::new(probes.uniform(-2.0, 2.0), probes.uniform(-2.0, 2.0));
                let exact = q.eval_poly(xi).inv();
                let rel = (q.partial_fractions(xi) - exact).norm() / exact.norm();
                assert!(rel < 1e-8, "n={n}: {rel}");
            }
        }
    }
}

#[test]
fn antiderivative_differentiates_to_integrand() {
    let mut probes = Sampler::new(5);
    for n in 2..=5 {
        let (_, _, data) = random_many_body(n, 3);
        let q = build_quadrature(&data, 0).unwrap();
        assert_eq!(antiderivative(&q, q.zeta0).unwrap(), C::new(0.0, 0.0));
        let mut checked = 0;
        while checked < 10 {
            // Points near ζ_0, where the principal logs are continuous.
            let zeta = q.zeta0 * C::from_polar(probes.uniform(0.8, 1.2), probes.uniform(-0.3, 0.3));
            let nearest = q.roots.iter().map(|r| (zeta - r).norm()).fold(f64::INFINITY, f64::min);
            if nearest < 0.1 {
                continue;
            }
            let d = 1e-5;
            let f = |z: C| antiderivative(&q, z).unwrap();
            let fd = (f(zeta + d) - f(zeta - d)) / (2.0 * d);
            let fd_im = (f(zeta + C::new(0.0, d)) - f(zeta - C::new(0.0, d))) / C::new(0.0, 2.0 * d);
            let exact = q.integrand(zeta);
            let tol = 1e-7 * (1.0 + exact.norm());
            assert!((fd - exact).norm() < tol, "n={n}: {} vs {}", fd, exact);
            assert!((fd_im - exact).norm() < tol);
            checked += 1;
        }
    }
}

#[test]
fn two_particle_antiderivative_is_pure_logarithms() {
    let (_, _, data) = random_many_body(2, 21);
    let q = build_quadrature(&data, 1).unwrap();
    let zeta = q.zeta0 * C::from_polar(1.0, 0.1);
    let logs: C = q
        .roots
        .iter()
        .zip(&q.residues)
        .map(|(xi, phi)| phi * ((zeta - xi) / (q.zeta0 - xi)).ln())
        .sum();
    let expected = logs / q.leading();
    assert!((antiderivative(&q, zeta).unwrap() - expected).norm() < 1e-14 * (1.0 + expected.norm()));
}

#[test]
fn pole_and_degeneracy_errors() {
    let (_, _, data) = random_many_body(3, 2);
    let q = build_quadrature(&data, 0).unwrap();
    assert!(matches!(antiderivative(&q, q.roots[0]), Err(Error::PoleHit { .. })));

    let mut degenerate = data.clone();
    degenerate.h = InvariantVector {
        h: vec![data.h.h[0], data.h.h[1], C::new(0.0, 0.0)],
    };
    assert!(matches!(
        build_quadrature(&degenerate, 0),
        Err(Error::DegenerateLeadingCoefficient { .. })
    ));
    assert!(matches!(build_quadrature(&data, 3), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn reduction_is_consistent_with_the_flow() {
    for n in 1..=5 {
        for seed in 0..5 {
            let (model, s0, data) = random_many_body(n, 40 + seed);
            assert!(data.consistency_residual(&s0) < 1e-10);

            // d/dt of μθ̇ = −η + Σ h_m s_m(θ) gives θ̈ = rate'(θ) θ̇.
            let accel = rhs_angle(&model, &s0).unwrap();
            for k in 0..n {
                let (th, d) = (s0.theta()[k], 1e-5);
                let slope = (data.rate(k, th + d) - data.rate(k, th - d)) / (2.0 * d);
                let derived = slope * s0.theta_dot()[k];
                assert!((derived - accel[k]).abs() < 1e-8 * (1.0 + accel[k].abs()), "n={n}");
            }
        }
    }
    assert!(matches!(
        reduce_to_first_order(&ModelSpec::two_body(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(), &AngleState::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap()),
        Err(Error::WrongKind { .. })
    ));
}

#[test]
fn reduced_equation_holds_along_integrated_trajectory() {
    let (model, s0, data) = random_many_body(3, 8);
    let traj = integrate_angle(&model, &s0, &uniform_grid(0.5, 6), &IntegratorConfig::default()).unwrap();
    for s in traj.states() {
        assert!(data.consistency_residual(s) < 1e-8);
    }
}

#[test]
fn single_particle_moves_linearly() {
    let model = ModelSpec::many_body(vec![2.0], vec![0.5]).unwrap();
    let s0 = AngleState::new(vec![0.3], vec![1.25]).unwrap();
    let data = reduce_to_first_order(&model, &s0).unwrap();
    let q = build_quadrature(&data, 0).unwrap();
    assert!(q.roots.is_empty());
    assert_eq!(solve_time(&q, &data, 0, 0.0).unwrap(), q.zeta0);
    let h1 = data.h.h[0].re;
    let expected = 0.3 + 3.0 * (h1 - 0.5) / 2.0;
    assert!((solve_time(&q, &data, 0, 3.0).unwrap() - C::from_polar(1.0, expected)).norm() < 1e-13);
}

#[test]
fn continuation_solves_quadrature_on_unit_circle() {
    for n in [2, 3, 4] {
        for (_, _, data) in solvable_problems(n, 3) {
            for k in 0..n {
                let q = build_quadrature(&data, k).unwrap();
                let mut c = Continuation::new(&q, data.mu[k], data.eta[k], &data.h.h).with_theta(data.theta0[k]);
                for step in 1..=10 {
                    let z = c.advance_to(step as f64 * 0.1).unwrap();
                    assert!(c.residual() < 1e-10, "n={n}: {}", c.residual());
                    assert!((z.norm() - 1.0).abs() < 1e-6);
                }
                // The tracked branch never jumps by a full log period.
                assert!(c.max_increment < 0.5 * q.min_branch_jump());
            }
        }
    }
}

#[test]
fn solved_zeta_satisfies_the_first_order_ode() {
    // μ ζ^N ζ̇ = i[−η ζ^{N+1} + Σ h_m ζ^{2m}]
    for n in [2, 3] {
        for (_, _, data) in solvable_problems(n, 2) {
            for k in 0..n {
                let q = build_quadrature(&data, k).unwrap();
                let z = |t: f64| solve_time(&q, &data, k, t).unwrap();
                let (t, d) = (0.5, 2e-3);
                let zdot = (z(t - 2.0 * d) - 8.0 * z(t - d) + 8.0 * z(t + d) - z(t + 2.0 * d)) / (12.0 * d);
                let zeta = z(t);
                let lhs = data.mu[k] * zeta.powi(n as i32) * zdot;
                let poly: C = data
                    .h
                    .h
                    .iter()
                    .enumerate()
                    .map(|(m, hm)| hm * zeta.powi(2 * (m as i32 + 1)))
                    .sum();
                let rhs = C::new(0.0, 1.0) * (poly - data.eta[k] * zeta.powi(n as i32 + 1));
                assert!((lhs - rhs).norm() < 1e-7 * (1.0 + rhs.norm()), "n={n}: {}", (lhs - rhs).norm());
            }
        }
    }
}

#[test]
fn algebraic_trajectory_matches_integration_and_conserves_h() {
    for n in [2, 3] {
        for (model, s0, _) in solvable_problems(n, 3) {
            let grid = uniform_grid(1.0, 51);
            let alg = trajectory_algebraic(&model, &s0, &grid).unwrap();
            let num = integrate_angle(&model, &s0, &grid, &IntegratorConfig::default()).unwrap();
            let h0 = constants_of_motion(&model, &s0).unwrap();
            for (a, b) in alg.states().iter().zip(num.states()) {
                for (x, y) in a.theta().iter().zip(b.theta()) {
                    assert!(periodic_distance(*x, *y, 2.0 * PI) < 1e-6);
                }
                assert!(constants_of_motion(&model, a).unwrap().relative_drift(&h0) < 1e-8);
            }
        }
    }
}

#[test]
fn verification_suite_values() {
    for n in [2, 3] {
        let r = algebraic_vs_numeric(n, 20_240_601).unwrap();
        assert!(r.deviation < 1e-6 && r.h_drift < 1e-8, "{r:?}");
    }
}
