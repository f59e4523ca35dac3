//! Acceptance criteria 1 to 10, one PASS/FAIL line each. Runs without the
//! libtest harness so the report is always printed; exits nonzero on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use circle_nbody::dynamics::ModelKind;
use circle_nbody::suites::{
    algebraic_vs_numeric, covariance, diff_matrix_residual, equivalence_deviation, identity_residual,
    invariant_drift, isochrony, kronecker_residual, sutherland_conservation, sutherland_control,
    DEFAULT_SEED, EQUIVALENCE_KINDS,
};
use circle_nbody::Result;

const SEED: u64 = DEFAULT_SEED;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = limit {
            if elapsed > limit {
                passed = false;
                detail.push_str(&format!("; runtime over {:.0?} limit", limit));
            }
        }
        if !passed {
            self.failures += 1;
        }
        println!(
            "{} criterion {id}: {title}: {detail} [{:.3} s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn below(name: &str, value: f64, threshold: f64) -> (bool, String) {
    (value < threshold, format!("{name} {value:.3e} < {threshold:.0e}"))
}

fn above(name: &str, value: f64, threshold: f64) -> (bool, String) {
    (value > threshold, format!("{name} {value:.3e} > {threshold:.0e}"))
}

fn all(parts: Vec<(bool, String)>) -> Outcome {
    let passed = parts.iter().all(|p| p.0);
    Outcome::new(passed, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join(", "))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut report = Report { failures: 0 };
    let mut constraints: Vec<(String, f64)> = Vec::new();

    report.run(1, "interpolation Kronecker property, 100 node sets, N = 2..10", Some(secs(1)), || {
        Ok(all(vec![below("max |q_n(theta_m) - delta_nm|", kronecker_residual(SEED, 100)?, 1e-12)]))
    });

    report.run(2, "differentiation matrix exactness, N <= 8", Some(secs(1)), || {
        Ok(all(vec![below("relative error", diff_matrix_residual(SEED, 100)?, 1e-10)]))
    });

    report.run(3, "constants of motion, N = 3, t in [0, 5]", Some(secs(10)), || {
        let mut parts = Vec::new();
        for kind in [ModelKind::ManyBody, ModelKind::TwoBody] {
            let d = invariant_drift(kind, SEED)?;
            parts.push(below(&format!("{kind} angle-form drift"), d.angle, 1e-6));
            parts.push(below(&format!("{kind} vector-form drift"), d.vector, 1e-6));
            constraints.push((format!("{kind} invariants run"), d.constraint));
        }
        Ok(all(parts))
    });

    report.run(4, "angle/vector equivalence, six models, t in [0, 5]", Some(secs(30)), || {
        let mut parts = Vec::new();
        for kind in EQUIVALENCE_KINDS {
            let r = equivalence_deviation(kind, SEED)?;
            parts.push(below(&kind.to_string(), r.deviation, 1e-7));
            constraints.push((format!("{kind} equivalence run"), r.constraint));
        }
        Ok(all(parts))
    });

    report.run(5, "isochrony at period pi, 20 runs, with Sutherland control", Some(secs(20)), || {
        let r = isochrony(SEED, 20)?;
        constraints.push(("isochronous_tan runs".into(), r.constraint));
        Ok(all(vec![
            below("isochronous_tan recurrence", r.recurrence, 1e-6),
            above("sutherland recurrence", sutherland_control(SEED)?, 1e-2),
        ]))
    });

    report.run(6, "algebraic solution vs integration, N = 2, 3, t in [0, 1]", Some(secs(5)), || {
        let mut parts = Vec::new();
        for n in [2, 3] {
            parts.push(below(&format!("N = {n} deviation"), algebraic_vs_numeric(n, SEED)?.deviation, 1e-6));
        }
        Ok(all(parts))
    });

    report.run(7, "kinematic identities, 10^4 states", Some(secs(2)), || {
        Ok(all(vec![below("max relative residual", identity_residual(SEED, 10_000)?, 1e-12)]))
    });

    report.run(8, "unit-circle constraint in vector runs of criteria 3 to 5", None, || {
        if constraints.is_empty() {
            return Ok(Outcome::new(false, "no vector runs completed".into()));
        }
        let (worst_name, worst) = constraints
            .iter()
            .cloned()
            .fold((String::new(), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let (passed, detail) = below(&format!("max ||r_n| - 1| ({worst_name})"), worst, 1e-9);
        Ok(Outcome::new(passed, format!("{detail}, {} runs", constraints.len())))
    });

    report.run(9, "Sutherland momentum and energy, t in [0, 10]", Some(secs(5)), || {
        let (p, e) = sutherland_conservation(SEED)?;
        Ok(all(vec![below("P drift", p, 1e-8), below("E drift", e, 1e-8)]))
    });

    report.run(10, "rotation covariance dichotomy", Some(secs(1)), || {
        let mut parts = Vec::new();
        for kind in EQUIVALENCE_KINDS {
            let c = covariance(kind, SEED)?;
            if kind.is_rotation_covariant() {
                let exact = c.dyadic == 0.0;
                parts.push((exact, format!("{kind} exact shift change {:.1e}", c.dyadic)));
                parts.push(below(&format!("{kind} generic shift change"), c.generic, 1e-12));
            } else {
                parts.push(above(&format!("{kind} shift change"), c.generic, 1e-6));
            }
        }
        Ok(all(parts))
    });

    println!("acceptance: {} of 10 criteria failed", report.failures);
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
