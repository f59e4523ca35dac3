//! Adaptive Dormand–Prince 5(4) integration with dense output.
//!
//! Second-order systems are integrated as first-order systems on the
//! doubled state `(q, q̇)`. Samples are produced by the method's
//! continuous extension at exactly the requested times, so the step-size
//! sequence never depends on the sample grid.

use std::f64::consts::{PI, TAU};

use crate::dynamics::{rhs_angle, rhs_circle_with_tolerance, rhs_line, ModelSpec, STAGE_CONSTRAINT_TOL};
use crate::error::{Error, Result};
use crate::geometry::{periodic_distance, AngleState, CircleState, LineState, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    #[default]
    Off,
    /// Renormalize positions and strip radial velocity after every step.
    Renormalize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub projection: Projection,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
            projection: Projection::Off,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig("max_step must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Smallest step the integrator will try before reporting a singularity.
pub const SINGULARITY_RESOLUTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Constraint residual of each sample (zero for unconstrained states).
    pub constraint_residual: Vec<f64>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    pub diagnostics: Diagnostics,
}

impl<S: PhaseState> Trajectory<S> {
    pub fn new(times: Vec<f64>, states: Vec<S>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::GridMismatch(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        check_grid(&times)?;
        let constraint_residual = states.iter().map(PhaseState::constraint_residual).collect();
        Ok(Self {
            times,
            states,
            diagnostics: Diagnostics {
                constraint_residual,
                stats: StepStats::default(),
            },
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectories are never empty")
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.diagnostics
            .constraint_residual
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::GridMismatch("empty sample grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::GridMismatch("non-finite sample time".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("sample times must be strictly increasing".into()));
    }
    Ok(())
}

/// A point in phase space that can be flattened to `(q, q̇)`.
pub trait PhaseState: Clone {
    /// Number of position coordinates.
    fn dof(&self) -> usize;
    fn to_flat(&self) -> Vec<f64>;
    fn rebuild(&self, y: &[f64]) -> Result<Self>;
    fn project(&self) -> Result<Self> {
        Ok(self.clone())
    }
    fn constraint_residual(&self) -> f64 {
        0.0
    }
}

impl PhaseState for AngleState {
    fn dof(&self) -> usize {
        self.len()
    }
    fn to_flat(&self) -> Vec<f64> {
        [self.theta(), self.theta_dot()].concat()
    }
    fn rebuild(&self, y: &[f64]) -> Result<Self> {
        let (q, v) = y.split_at(y.len() / 2);
        AngleState::new(q.to_vec(), v.to_vec())
    }
}

impl PhaseState for LineState {
    fn dof(&self) -> usize {
        self.len()
    }
    fn to_flat(&self) -> Vec<f64> {
        [self.z(), self.z_dot()].concat()
    }
    fn rebuild(&self, y: &[f64]) -> Result<Self> {
        let (q, v) = y.split_at(y.len() / 2);
        LineState::new(q.to_vec(), v.to_vec())
    }
}

impl PhaseState for CircleState {
    fn dof(&self) -> usize {
        2 * self.len()
    }
    fn to_flat(&self) -> Vec<f64> {
        self.r()
            .iter()
            .chain(self.r_dot())
            .flat_map(|v| [v.x, v.y])
            .collect()
    }
    fn rebuild(&self, y: &[f64]) -> Result<Self> {
        let pairs: Vec<Vec2> = y.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
        let (r, v) = pairs.split_at(pairs.len() / 2);
        CircleState::from_parts(r.to_vec(), v.to_vec())
    }
    fn project(&self) -> Result<Self> {
        project_unit_circle(self)
    }
    fn constraint_residual(&self) -> f64 {
        self.max_radius_deviation()
    }
}

/// Maps each `r_n` to `r_n/|r_n|` and removes the radial part of `ṙ_n`.
pub fn project_unit_circle(c: &CircleState) -> Result<CircleState> {
    let mut r = Vec::with_capacity(c.len());
    let mut v = Vec::with_capacity(c.len());
    for (index, (p, w)) in c.r().iter().zip(c.r_dot()).enumerate() {
        let norm = p.norm();
        if !(norm > 0.5) {
            return Err(Error::DegenerateVector { index, norm });
        }
        let unit = (1.0 / norm) * *p;
        r.push(unit);
        v.push(*w - w.dot(unit) * unit);
    }
    CircleState::from_parts(r, v)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

// PI step-size controller.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Raw first-order integration of `y' = f(t, y)` sampled on `t_grid`.
///
/// `post_step` runs on every accepted step (used for projection); samples
/// are passed through it as well.
pub fn integrate_first_order<F, P>(
    f: F,
    y0: &[f64],
    t_grid: &[f64],
    cfg: &IntegratorConfig,
    post_step: P,
) -> Result<(Vec<Vec<f64>>, StepStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    P: FnMut(&mut [f64]) -> Result<()>,
{
    integrate_first_order_guarded(f, y0, t_grid, cfg, post_step, |_: &[f64], _: &[f64]| None)
}

/// [`integrate_first_order`] with a boundary check. `crossed(y_old, y_new)`
/// reports a step that jumped over a singular surface; such steps are
/// rejected and halved like a failing right-hand side, so the crossing time
/// is localized to [`SINGULARITY_RESOLUTION`].
pub fn integrate_first_order_guarded<F, P, G>(
    mut f: F,
    y0: &[f64],
    t_grid: &[f64],
    cfg: &IntegratorConfig,
    mut post_step: P,
    mut crossed: G,
) -> Result<(Vec<Vec<f64>>, StepStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    P: FnMut(&mut [f64]) -> Result<()>,
    G: FnMut(&[f64], &[f64]) -> Option<Error>,
{
    cfg.validate()?;
    check_grid(t_grid)?;
    if t_grid[0] != 0.0 {
        return Err(Error::GridMismatch("sample grid must start at t = 0".into()));
    }
    let dim = y0.len();
    let mut stats = StepStats::default();
    let singular = |t: f64, e: Error| Error::SingularityEncountered {
        t,
        source: Box::new(e),
    };

    let mut y = y0.to_vec();
    post_step(&mut y)?;
    let mut samples = vec![y.clone()];
    let t_end = *t_grid.last().unwrap();
    if t_grid.len() == 1 {
        return Ok((samples, stats));
    }

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    f(0.0, &y, &mut k[0]).map_err(|e| singular(0.0, e))?;
    stats.rhs_evals += 1;

    let mut t = 0.0;
    let mut h = initial_step(&mut f, &y, &k[0], cfg, t_end, &mut stats).map_err(|e| singular(0.0, e))?;
    let mut next_sample = 1;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut steps = 0;

    while next_sample < t_grid.len() {
        if steps >= cfg.max_steps {
            return Err(Error::StepLimitExceeded {
                t,
                steps: cfg.max_steps,
            });
        }
        steps += 1;
        h = h.min(cfg.max_step);
        let mut last = false;
        if t + h >= t_end || t + 1.01 * h >= t_end {
            h = t_end - t;
            last = true;
        }

        // Stages 2..7; a failing right-hand side shrinks the step.
        let mut failure = None;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += h * a * k[j][i];
                }
                stage[i] = acc;
            }
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            stats.rhs_evals += 1;
            if let Err(e) = f(t + C[s] * h, &stage, &mut tail[0]) {
                failure = Some(e);
                break;
            }
        }
        if let Some(e) = failure {
            stats.rejected += 1;
            h *= 0.5;
            last_rejected = true;
            if h < SINGULARITY_RESOLUTION {
                return Err(singular(t, e));
            }
            continue;
        }

        let mut err = 0.0;
        for i in 0..dim {
            let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            err += (e / sk).powi(2);
        }
        err = (err / dim.max(1) as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.5;
            last_rejected = true;
            if h < SINGULARITY_RESOLUTION {
                return Err(singular(
                    t,
                    Error::InvalidState("non-finite error estimate".into()),
                ));
            }
            continue;
        }

        let fac11 = err.powf(EXPO);
        let mut fac = fac11 / fac_old.powf(BETA);
        fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFETY));
        let mut h_new = h / fac;

        if err <= 1.0 {
            if let Some(e) = crossed(&y, &y_new) {
                stats.rejected += 1;
                h *= 0.5;
                last_rejected = true;
                if h < SINGULARITY_RESOLUTION {
                    return Err(singular(t, e));
                }
                continue;
            }
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            let t_new = if last { t_end } else { t + h };

            // Continuous extension coefficients.
            let mut cont = vec![[0.0; 5]; dim];
            for i in 0..dim {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                let dsum: f64 = (0..7).map(|j| D[j] * k[j][i]).sum();
                cont[i] = [y[i], ydiff, bspl, ydiff - h * k[6][i] - bspl, h * dsum];
            }
            while next_sample < t_grid.len() && t_grid[next_sample] <= t_new {
                let ts = t_grid[next_sample];
                let mut sample: Vec<f64> = if ts == t_new {
                    y_new.clone()
                } else {
                    let th = (ts - t) / h;
                    let th1 = 1.0 - th;
                    cont.iter()
                        .map(|c| c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4]))))
                        .collect()
                };
                post_step(&mut sample)?;
                samples.push(sample);
                next_sample += 1;
            }

            y.copy_from_slice(&y_new);
            let fsal = k[6].clone();
            k[0] = fsal;
            if post_step_changes(&mut post_step, &mut y)? {
                f(t_new, &y, &mut k[0]).map_err(|e| singular(t_new, e))?;
                stats.rhs_evals += 1;
            }
            t = t_new;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h_new = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
            last_rejected = true;
        }
        h = h_new;
    }
    Ok((samples, stats))
}

fn post_step_changes<P>(post_step: &mut P, y: &mut [f64]) -> Result<bool>
where
    P: FnMut(&mut [f64]) -> Result<()>,
{
    let before = y.to_vec();
    post_step(y)?;
    Ok(before.iter().zip(y.iter()).any(|(a, b)| a != b))
}

fn initial_step<F>(
    f: &mut F,
    y0: &[f64],
    f0: &[f64],
    cfg: &IntegratorConfig,
    t_end: f64,
    stats: &mut StepStats,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len().max(1) as f64;
    let scale: Vec<f64> = y0.iter().map(|v| cfg.abs_tol + cfg.rel_tol * v.abs()).collect();
    let norm = |v: &[f64]| {
        (v.iter().zip(&scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / dim).sqrt()
    };
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(cfg.max_step).min(t_end);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    // A singular probe point just means the initial guess was too bold.
    if f(h0, &y1, &mut f1).is_err() {
        return Ok(h0 * 1e-3);
    }
    stats.rhs_evals += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(cfg.max_step).min(t_end))
}

/// Integrates the second-order system `q̈ = accel(state)` from `s0`,
/// sampling at `t_grid` (which must start at 0).
pub fn integrate<S, F>(
    accel: F,
    s0: &S,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>>
where
    S: PhaseState,
    F: Fn(&S) -> Result<Vec<f64>>,
{
    integrate_guarded(accel, |_: &S, _: &S| None, s0, t_grid, cfg)
}

/// [`integrate`] with a boundary check between consecutive accepted states.
pub fn integrate_guarded<S, F, G>(
    accel: F,
    crossed: G,
    s0: &S,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>>
where
    S: PhaseState,
    F: Fn(&S) -> Result<Vec<f64>>,
    G: Fn(&S, &S) -> Option<Error>,
{
    let dof = s0.dof();
    let template = s0.clone();
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let state = template.rebuild(y)?;
        let a = accel(&state)?;
        dy[..dof].copy_from_slice(&y[dof..]);
        dy[dof..].copy_from_slice(&a);
        Ok(())
    };
    let projection = cfg.projection;
    let project = |y: &mut [f64]| -> Result<()> {
        if projection == Projection::Renormalize {
            let p = template.rebuild(y)?.project()?;
            y.copy_from_slice(&p.to_flat());
        }
        Ok(())
    };
    let guard = |a: &[f64], b: &[f64]| -> Option<Error> {
        let (a, b) = (template.rebuild(a).ok()?, template.rebuild(b).ok()?);
        crossed(&a, &b)
    };
    let (raw, stats) =
        integrate_first_order_guarded(rhs, &s0.to_flat(), t_grid, cfg, project, guard)?;
    let states = raw
        .iter()
        .map(|y| s0.rebuild(y))
        .collect::<Result<Vec<S>>>()?;
    let mut traj = Trajectory::new(t_grid.to_vec(), states)?;
    traj.diagnostics.stats = stats;
    Ok(traj)
}

/// Integrates the angle form of `model`.
pub fn integrate_angle(
    model: &ModelSpec,
    s0: &AngleState,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<AngleState>> {
    let tan = model.kind().is_tan_derived();
    let crossed = |a: &AngleState, b: &AngleState| {
        let pair = |s: &AngleState, i: usize, j: usize| (s.theta()[i] - s.theta()[j]).sin();
        let wall = |s: &AngleState, i: usize| s.theta()[i].cos();
        first_crossing(a.len(), tan, a, b, pair, wall, |i| Error::TangentSingularity {
            index: i,
            theta: b.theta()[i],
        })
    };
    integrate_guarded(|s: &AngleState| rhs_angle(model, s), crossed, s0, t_grid, cfg)
}

/// First pair whose separation, or (if `tan`) first particle whose wall
/// coordinate, changed sign between `a` and `b`.
fn first_crossing<S>(
    n: usize,
    tan: bool,
    a: &S,
    b: &S,
    pair: impl Fn(&S, usize, usize) -> f64,
    wall: impl Fn(&S, usize) -> f64,
    tangent_error: impl Fn(usize) -> Error,
) -> Option<Error> {
    for i in 0..n {
        for j in i + 1..n {
            let (before, after) = (pair(a, i, j), pair(b, i, j));
            if before * after <= 0.0 {
                return Some(Error::CollisionSingularity {
                    first: i,
                    second: j,
                    separation: before.abs().min(after.abs()),
                });
            }
        }
    }
    if tan {
        for i in 0..n {
            if wall(a, i) * wall(b, i) <= 0.0 {
                return Some(tangent_error(i));
            }
        }
    }
    None
}

/// Integrates the unit-vector form of `model`.
pub fn integrate_circle(
    model: &ModelSpec,
    c0: &CircleState,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<CircleState>> {
    c0.check_constraint(crate::geometry::INPUT_CONSTRAINT_TOL)?;
    let accel = |c: &CircleState| -> Result<Vec<f64>> {
        Ok(rhs_circle_with_tolerance(model, c, STAGE_CONSTRAINT_TOL)?
            .into_iter()
            .flat_map(|a| [a.x, a.y])
            .collect())
    };
    let tan = model.kind().is_tan_derived();
    let crossed = |a: &CircleState, b: &CircleState| {
        let pair = |s: &CircleState, i: usize, j: usize| s.r()[i].perp().dot(s.r()[j]);
        let wall = |s: &CircleState, i: usize| s.r()[i].x;
        first_crossing(a.len(), tan, a, b, pair, wall, |i| Error::TangentSingularity {
            index: i,
            theta: b.r()[i].y.atan2(b.r()[i].x),
        })
    };
    integrate_guarded(accel, crossed, c0, t_grid, cfg)
}

/// Integrates the line (`z = tan θ`) form of a tan-derived `model`.
pub fn integrate_line(
    model: &ModelSpec,
    l0: &LineState,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<LineState>> {
    let crossed = |a: &LineState, b: &LineState| {
        let pair = |s: &LineState, i: usize, j: usize| s.z()[i] - s.z()[j];
        first_crossing(a.len(), false, a, b, pair, |_, _| 1.0, |_| unreachable!())
    };
    integrate_guarded(|l: &LineState| rhs_line(model, l), crossed, l0, t_grid, cfg)
}

/// `n` equally spaced samples on `[0, t_end]`, endpoints included.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two samples");
    (0..n)
        .map(|i| if i + 1 == n { t_end } else { t_end * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Which angles are identified when comparing states one period apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleModulus {
    /// Angles on the circle, compared mod 2π.
    FullTurn,
    /// Angles defined through `tan θ`, compared mod π.
    HalfTurn,
}

impl AngleModulus {
    pub fn period(self) -> f64 {
        match self {
            AngleModulus::FullTurn => TAU,
            AngleModulus::HalfTurn => PI,
        }
    }
}

/// Largest distance between the state at `t` and at `t + period` over all
/// sample pairs of `traj` that are one period apart. Angles are compared
/// modulo `modulus`, velocities directly.
pub fn recurrence_error(
    traj: &Trajectory<AngleState>,
    period: f64,
    modulus: AngleModulus,
) -> Result<f64> {
    let times = traj.times();
    let spacing_tol = 1e-9 * (1.0 + period.abs());
    let mut worst: Option<f64> = None;
    let mut j = 0;
    for (i, &t) in times.iter().enumerate() {
        let target = t + period;
        while j < times.len() && times[j] < target - spacing_tol {
            j += 1;
        }
        if j == times.len() {
            break;
        }
        if (times[j] - target).abs() > spacing_tol {
            continue;
        }
        let (a, b) = (&traj.states()[i], &traj.states()[j]);
        let m = modulus.period();
        let d = a
            .theta()
            .iter()
            .zip(b.theta())
            .map(|(x, y)| periodic_distance(*x, *y, m))
            .chain(
                a.theta_dot()
                    .iter()
                    .zip(b.theta_dot())
                    .map(|(x, y)| (x - y).abs()),
            )
            .fold(0.0, f64::max);
        worst = Some(worst.map_or(d, |w: f64| w.max(d)));
    }
    worst.ok_or_else(|| {
        Error::GridMismatch(format!("no pair of samples is {period} apart"))
    })
}
