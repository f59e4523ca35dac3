//! State representations and the conversions between them.
//!
//! Points live on the unit circle of the plane. The third component of the
//! position vectors is identically zero and is never stored; every
//! `ẑ`-wedge expression reduces to the scalar cross product
//! `a ∧ b · ẑ = a_x b_y − a_y b_x`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance on `|r|² − 1` and `r · ṙ` for circle states handed in from outside.
pub const INPUT_CONSTRAINT_TOL: f64 = 1e-9;

/// Minimum `|cos θ|` for the tan change of variables.
pub const TAN_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// `(self ∧ other) · ẑ`.
    pub fn wedge(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// `ẑ ∧ self`, the counter-clockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self * rhs.x, self * rhs.y)
    }
}

/// Angles and angular velocities of `N` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleState {
    theta: Vec<f64>,
    theta_dot: Vec<f64>,
}

impl AngleState {
    pub fn new(theta: Vec<f64>, theta_dot: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidState("at least one particle is required".into()));
        }
        if theta.len() != theta_dot.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.len(),
                found: theta_dot.len(),
            });
        }
        if theta.iter().chain(&theta_dot).any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite angle or velocity".into()));
        }
        Ok(Self { theta, theta_dot })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_dot(&self) -> &[f64] {
        &self.theta_dot
    }

    /// Same velocities, every angle shifted by `c`.
    pub fn rotated(&self, c: f64) -> Self {
        Self {
            theta: self.theta.iter().map(|t| t + c).collect(),
            theta_dot: self.theta_dot.clone(),
        }
    }

    /// Relabels particles so that particle `i` of the result is particle
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            theta: perm.iter().map(|&p| self.theta[p]).collect(),
            theta_dot: perm.iter().map(|&p| self.theta_dot[p]).collect(),
        }
    }
}

/// Unit 2-vectors and their tangent velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleState {
    r: Vec<Vec2>,
    r_dot: Vec<Vec2>,
}

impl CircleState {
    /// Builds a circle state without checking the unit-circle constraint.
    /// Integrators produce such states between projections.
    pub fn from_parts(r: Vec<Vec2>, r_dot: Vec<Vec2>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::InvalidState("at least one particle is required".into()));
        }
        if r.len() != r_dot.len() {
            return Err(Error::DimensionMismatch {
                expected: r.len(),
                found: r_dot.len(),
            });
        }
        if r
            .iter()
            .chain(&r_dot)
            .any(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(Error::InvalidState("non-finite position or velocity".into()));
        }
        Ok(Self { r, r_dot })
    }

    /// Builds a circle state and checks the constraint within `tol`.
    pub fn new(r: Vec<Vec2>, r_dot: Vec<Vec2>, tol: f64) -> Result<Self> {
        let state = Self::from_parts(r, r_dot)?;
        state.check_constraint(tol)?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r(&self) -> &[Vec2] {
        &self.r
    }

    pub fn r_dot(&self) -> &[Vec2] {
        &self.r_dot
    }

    /// Largest of `| |r_n|² − 1 |` and the velocity-scaled `|r_n · ṙ_n|`.
    pub fn constraint_residual(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.r_dot)
            .map(|(r, v)| {
                let radial = (r.norm_sq() - 1.0).abs();
                let tangency = r.dot(*v).abs() / v.norm().max(1.0);
                radial.max(tangency)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `| |r_n| − 1 |`.
    pub fn max_radius_deviation(&self) -> f64 {
        self.r
            .iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_constraint(&self, tol: f64) -> Result<()> {
        for (index, (r, v)) in self.r.iter().zip(&self.r_dot).enumerate() {
            let radial = (r.norm_sq() - 1.0).abs();
            if radial > tol {
                return Err(Error::ConstraintViolation {
                    index,
                    residual: radial,
                });
            }
            let tangency = r.dot(*v).abs() / v.norm().max(1.0);
            if tangency > tol {
                return Err(Error::ConstraintViolation {
                    index,
                    residual: tangency,
                });
            }
        }
        Ok(())
    }
}

/// Tan-line coordinates `z_n = tan θ_n` and their velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct LineState {
    z: Vec<f64>,
    z_dot: Vec<f64>,
}

impl LineState {
    pub fn new(z: Vec<f64>, z_dot: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidState("at least one particle is required".into()));
        }
        if z.len() != z_dot.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                found: z_dot.len(),
            });
        }
        if z.iter().chain(&z_dot).any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite coordinate or velocity".into()));
        }
        Ok(Self { z, z_dot })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn z_dot(&self) -> &[f64] {
        &self.z_dot
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Smallest `|a − b|` modulo `period`.
pub fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

pub fn angle_to_circle(s: &AngleState) -> CircleState {
    let (r, r_dot) = s
        .theta
        .iter()
        .zip(&s.theta_dot)
        .map(|(&t, &w)| {
            let r = Vec2::from_angle(t);
            (r, w * r.perp())
        })
        .unzip();
    CircleState { r, r_dot }
}

pub fn circle_to_angle(c: &CircleState) -> Result<AngleState> {
    for (index, r) in c.r.iter().enumerate() {
        let residual = (r.norm_sq() - 1.0).abs();
        if residual > INPUT_CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { index, residual });
        }
    }
    let theta = c
        .r
        .iter()
        .map(|r| {
            let t = r.y.atan2(r.x);
            // atan2 returns −π for (−1, −0); the branch is (−π, π].
            if t == -PI {
                PI
            } else {
                t
            }
        })
        .collect();
    let theta_dot = c.r.iter().zip(&c.r_dot).map(|(r, v)| r.wedge(*v)).collect();
    AngleState::new(theta, theta_dot)
}

pub fn angle_to_line(s: &AngleState) -> Result<LineState> {
    let mut z = Vec::with_capacity(s.len());
    let mut z_dot = Vec::with_capacity(s.len());
    for (index, (&t, &w)) in s.theta.iter().zip(&s.theta_dot).enumerate() {
        let (sin, cos) = t.sin_cos();
        if cos.abs() <= TAN_GUARD {
            return Err(Error::TangentSingularity { index, theta: t });
        }
        z.push(sin / cos);
        z_dot.push(w / (cos * cos));
    }
    LineState::new(z, z_dot)
}

pub fn line_to_angle(l: &LineState) -> AngleState {
    let (theta, theta_dot) = l
        .z
        .iter()
        .zip(&l.z_dot)
        .map(|(&z, &zd)| {
            // cos²(atan z) = 1 / (1 + z²)
            (z.atan(), zd / (1.0 + z * z))
        })
        .unzip();
    AngleState { theta, theta_dot }
}
