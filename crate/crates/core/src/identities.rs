//! Residual report for the kinematic identities linking angles, unit
//! vectors and tan-line coordinates.
//!
//! The vector-side quantities are never built from the identities under
//! test: `ṙ_n` and `ż_n` come from complex-step differentiation of
//! `r(θ(t))` and `tan θ(t)` along the path `θ(t) = θ + θ̇ t + θ̈ t²/2`, and
//! `r̈_n`, `z̈_n` from complex-step differentiation of the corresponding
//! velocity functions. Complex-step derivatives carry no cancellation
//! error, so every residual sits at rounding level.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{AngleState, Vec2};

/// Guards for identities with `cos θ_n` or `sin(θ_n − θ_m)` in a denominator.
pub const IDENTITY_GUARD: f64 = 1e-6;

const STEP: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdentityReport {
    pub entries: Vec<IdentityResidual>,
}

impl IdentityReport {
    fn record(&mut self, name: &'static str, lhs: f64, rhs: f64) {
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        let residual = (lhs - rhs).abs() / scale;
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => e.residual = e.residual.max(residual),
            None => self.entries.push(IdentityResidual { name, residual }),
        }
    }

    fn record_vec(&mut self, name: &'static str, lhs: Vec2, rhs: Vec2) {
        self.record(name, lhs.x, rhs.x);
        self.record(name, lhs.y, rhs.y);
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.residual)
    }
}

fn d_dt(f: impl Fn(Complex64) -> Complex64, t: f64) -> f64 {
    f(Complex64::new(t, STEP)).im / STEP
}

struct Kinematics {
    r: Vec2,
    r_dot: Vec2,
    r_ddot: Vec2,
    z: f64,
    z_dot: f64,
    z_ddot: f64,
}

fn kinematics(theta: f64, w: f64, a: f64) -> Kinematics {
    // θ(t) and θ̇(t) along the quadratic path through (θ, θ̇, θ̈) at t = 0.
    let th = move |t: Complex64| t * t * (0.5 * a) + t * w + theta;
    let thd = move |t: Complex64| t * a + w;

    let x = |t: Complex64| th(t).cos();
    let y = |t: Complex64| th(t).sin();
    let r_dot = Vec2::new(d_dt(x, 0.0), d_dt(y, 0.0));

    // Velocity components as analytic functions of t, differentiated once more.
    let xd = |t: Complex64| -thd(t) * th(t).sin();
    let yd = |t: Complex64| thd(t) * th(t).cos();
    let r_ddot = Vec2::new(d_dt(xd, 0.0), d_dt(yd, 0.0));

    let z_dot = d_dt(|t| th(t).tan(), 0.0);
    let zd = |t: Complex64| {
        let c = th(t).cos();
        thd(t) / (c * c)
    };
    let z_ddot = d_dt(zd, 0.0);

    let (s, c) = theta.sin_cos();
    Kinematics {
        r: Vec2::new(c, s),
        r_dot,
        r_ddot,
        z: s / c,
        z_dot,
        z_ddot,
    }
}

/// Evaluates both sides of every kinematic identity at `s`, with
/// caller-supplied second derivatives `theta_ddot`.
///
/// Residuals are `|lhs − rhs| / max(1, |lhs|, |rhs|)`, maximised over
/// particles (and pairs) for each identity.
pub fn verify_appendix_a(s: &AngleState, theta_ddot: &[f64]) -> Result<IdentityReport> {
    let n = s.len();
    if theta_ddot.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: theta_ddot.len(),
        });
    }
    let th = s.theta();
    let w = s.theta_dot();
    for (index, &t) in th.iter().enumerate() {
        if t.cos().abs() <= IDENTITY_GUARD {
            return Err(Error::TangentSingularity { index, theta: t });
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let separation = (th[a] - th[b]).sin().abs();
            if separation <= IDENTITY_GUARD {
                return Err(Error::CollisionSingularity {
                    first: a,
                    second: b,
                    separation,
                });
            }
        }
    }

    let k: Vec<Kinematics> = (0..n)
        .map(|i| kinematics(th[i], w[i], theta_ddot[i]))
        .collect();
    let zhat_wedge = |v: Vec2| v.perp();

    let mut report = IdentityReport::default();
    for i in 0..n {
        let ki = &k[i];
        let (wi, ai) = (w[i], theta_ddot[i]);
        let (si, ci) = th[i].sin_cos();

        report.record("r.r = 1", ki.r.dot(ki.r), 1.0);
        report.record_vec("r_dot = theta_dot z^r", ki.r_dot, wi * zhat_wedge(ki.r));
        report.record_vec(
            "r_ddot = theta_ddot z^r - theta_dot^2 r",
            ki.r_ddot,
            ai * zhat_wedge(ki.r) - (wi * wi) * ki.r,
        );
        report.record("r_dot.r = 0", ki.r_dot.dot(ki.r), 0.0);
        report.record("r_dot.r_dot = theta_dot^2", ki.r_dot.dot(ki.r_dot), wi * wi);
        report.record("(r^r_dot).z = theta_dot", ki.r.wedge(ki.r_dot), wi);
        report.record("r_ddot.r = -theta_dot^2", ki.r_ddot.dot(ki.r), -wi * wi);
        report.record("r_ddot.(z^r) = theta_ddot", ki.r_ddot.dot(zhat_wedge(ki.r)), ai);
        report.record_vec("z^r_dot = -theta_dot r", zhat_wedge(ki.r_dot), -wi * ki.r);
        report.record_vec(
            "z^r_ddot = -theta_ddot r - theta_dot^2 z^r",
            zhat_wedge(ki.r_ddot),
            -ai * ki.r - (wi * wi) * zhat_wedge(ki.r),
        );

        report.record("z = tan theta", ki.z, th[i].tan());
        report.record("z_dot = theta_dot / cos^2", ki.z_dot, wi / (ci * ci));
        report.record(
            "z_ddot = theta_ddot/cos^2 + 2 theta_dot^2 sin/cos^3",
            ki.z_ddot,
            ai / (ci * ci) + 2.0 * wi * wi * si / (ci * ci * ci),
        );
        report.record(
            "z_ddot = (theta_ddot + 2 theta_dot^2 tan)/cos^2",
            ki.z_ddot,
            (ai + 2.0 * wi * wi * th[i].tan()) / (ci * ci),
        );

        for m in 0..n {
            if m == i {
                continue;
            }
            let km = &k[m];
            let wm = w[m];
            let (sm, cm) = th[m].sin_cos();
            let d = th[i] - th[m];
            let (sd, cd) = d.sin_cos();

            report.record("r_n.r_m = cos(dtheta)", ki.r.dot(km.r), cd);
            report.record("(z^r_m).r_n = sin(dtheta)", zhat_wedge(km.r).dot(ki.r), sd);
            report.record("(r_m^r_n).z = sin(dtheta)", km.r.wedge(ki.r), sd);
            report.record(
                "r_dot_n.r_m = -theta_dot_n sin(dtheta)",
                ki.r_dot.dot(km.r),
                -wi * sd,
            );
            report.record(
                "r_dot_n.r_dot_m = theta_dot_n theta_dot_m cos(dtheta)",
                ki.r_dot.dot(km.r_dot),
                wi * wm * cd,
            );
            report.record(
                "(r_dot_n^r_m).z = -theta_dot_n cos(dtheta)",
                ki.r_dot.wedge(km.r),
                -wi * cd,
            );
            report.record(
                "(r_dot_n^r_dot_m).z = -theta_dot_n theta_dot_m sin(dtheta)",
                ki.r_dot.wedge(km.r_dot),
                -wi * wm * sd,
            );

            let dz = ki.z - km.z;
            report.record("z_n - z_m = sin(dtheta)/(cos cos)", dz, sd / (ci * cm));
            report.record("1/(z_n - z_m) = cos cos/sin(dtheta)", 1.0 / dz, ci * cm / sd);
            report.record(
                "z_dot_n z_m = theta_dot_n sin_m/(cos_n^2 cos_m)",
                ki.z_dot * km.z,
                wi * sm / (ci * ci * cm),
            );
            report.record(
                "z_dot_n z_dot_m = theta_dot_n theta_dot_m/(cos_n^2 cos_m^2)",
                ki.z_dot * km.z_dot,
                wi * wm / (ci * ci * cm * cm),
            );
            report.record(
                "(z_dot_n + z_dot_m)/(z_n - z_m)",
                (ki.z_dot + km.z_dot) / dz,
                (wi * cm * cm + wm * ci * ci) / (ci * cm * sd),
            );
            report.record(
                "(z_dot_n z_m + z_dot_m z_n)/(z_n - z_m)",
                (ki.z_dot * km.z + km.z_dot * ki.z) / dz,
                (wi * sm * cm + wm * si * ci) / (ci * cm * sd),
            );
            report.record(
                "z_dot_n z_dot_m/(z_n - z_m)",
                ki.z_dot * km.z_dot / dz,
                wi * wm / (ci * cm * sd),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_particle_example_is_at_rounding_level() {
        let s = AngleState::new(vec![1.0, 0.3], vec![0.7, -0.2]).unwrap();
        let report = verify_appendix_a(&s, &[0.4, -1.3]).unwrap();
        assert!(report.max_residual() < 1e-12, "{report:?}");
        assert!(report.get("(r_dot_n^r_dot_m).z = -theta_dot_n theta_dot_m sin(dtheta)").is_some());
    }

    #[test]
    fn single_particle_has_no_pair_identities() {
        let s = AngleState::new(vec![0.5], vec![2.0]).unwrap();
        let report = verify_appendix_a(&s, &[0.0]).unwrap();
        assert!(report.get("r_dot.r_dot = theta_dot^2").unwrap() < 1e-15);
        assert!(report.get("r_n.r_m = cos(dtheta)").is_none());
    }

    #[test]
    fn collision_is_reported() {
        let s = AngleState::new(vec![0.4, 0.4], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            verify_appendix_a(&s, &[0.0, 0.0]),
            Err(Error::CollisionSingularity { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn tangent_guard() {
        let s = AngleState::new(vec![std::f64::consts::FRAC_PI_2], vec![1.0]).unwrap();
        assert!(matches!(
            verify_appendix_a(&s, &[0.0]),
            Err(Error::TangentSingularity { .. })
        ));
    }
}
