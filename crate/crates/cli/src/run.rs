//! The `simulate` and `compare` subcommands.

use std::f64::consts::PI;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use circle_nbody::algebraic::trajectory_algebraic;
use circle_nbody::dynamics::{constants_of_motion, momentum_energy, ModelKind, ModelSpec};
use circle_nbody::geometry::{angle_to_circle, circle_to_angle, periodic_distance};
use circle_nbody::integrator::{integrate_angle, integrate_circle, uniform_grid, StepStats};
use circle_nbody::{AngleState, Error};

use crate::config::{invariants_available, ConfigError, Form, Output, RunConfig};
use crate::output::{numbered, save_json, trajectory_svg, unwrap_angles, write_atomic, Destination, Table};

/// Environment variable that overrides every output directory.
pub const OUTPUT_DIR_ENV: &str = "CIRCLE_NBODY_OUT";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Config(ConfigError),
    Runtime(Error),
    Io(PathBuf, io::Error),
}

impl Failure {
    /// 2 for singular dynamics, 1 for everything the user must fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Runtime(e) if e.is_singularity() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Runtime(e) if e.is_singularity() => write!(f, "singularity: {e}"),
            Failure::Runtime(e) => write!(f, "run failed: {e}"),
            Failure::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(path.to_path_buf(), e)
}

fn destination(config_path: &Path, cfg: &RunConfig) -> Result<Destination, Failure> {
    let dir = match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => match &cfg.output_dir {
            Some(d) => d.clone(),
            None => config_path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map_or_else(|| PathBuf::from("."), Path::to_path_buf),
        },
    };
    std::fs::create_dir_all(&dir).map_err(io_at(&dir))?;
    let stem = config_path
        .file_stem()
        .map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Destination { dir, stem })
}

/// Angle samples of one integration plus what the summary needs.
struct Solution {
    states: Vec<AngleState>,
    positions: Option<Vec<Vec<(f64, f64)>>>,
    constraint: f64,
    stats: StepStats,
}

fn solve(model: &ModelSpec, s0: &AngleState, grid: &[f64], form: Form, cfg: &RunConfig) -> Result<Solution, Failure> {
    match form {
        Form::Angle => {
            let traj = integrate_angle(model, s0, grid, &cfg.integrator)?;
            Ok(Solution {
                states: traj.states().to_vec(),
                positions: None,
                constraint: 0.0,
                stats: traj.diagnostics.stats,
            })
        }
        Form::Circle => {
            let traj = integrate_circle(model, &angle_to_circle(s0), grid, &cfg.integrator)?;
            let mut theta = Vec::with_capacity(traj.len());
            let mut theta_dot = Vec::with_capacity(traj.len());
            for c in traj.states() {
                let a = circle_to_angle(c)?;
                theta.push(a.theta().to_vec());
                theta_dot.push(a.theta_dot().to_vec());
            }
            // Continue from the configured initial angles, not their principal values.
            if let Some(first) = theta.first_mut() {
                first.copy_from_slice(s0.theta());
            }
            unwrap_angles(&mut theta);
            let states = theta
                .into_iter()
                .zip(theta_dot)
                .map(|(t, w)| AngleState::new(t, w))
                .collect::<Result<Vec<_>, _>>()?;
            let positions = traj
                .states()
                .iter()
                .map(|c| c.r().iter().map(|r| (r.x, r.y)).collect())
                .collect();
            Ok(Solution {
                states,
                positions: Some(positions),
                constraint: traj.max_constraint_residual(),
                stats: traj.diagnostics.stats,
            })
        }
    }
}

#[derive(Serialize)]
struct Steps {
    accepted: usize,
    rejected: usize,
    rhs_evals: usize,
}

#[derive(Serialize)]
struct InitialData {
    theta: Vec<f64>,
    theta_dot: Vec<f64>,
}

#[derive(Serialize)]
struct SimulateSummary {
    model: &'static str,
    n_particles: usize,
    form: &'static str,
    t_end: f64,
    n_samples: usize,
    initial: InitialData,
    max_constraint_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_invariant_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    momentum_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_drift: Option<f64>,
    steps: Steps,
    files: Vec<String>,
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::Angle => "angle",
        Form::Circle => "circle",
    }
}

/// Conserved-quantity table and its drift, for kinds that have one.
struct Invariants {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
    max_drift: f64,
    momentum_drift: Option<f64>,
    energy_drift: Option<f64>,
}

fn invariants(model: &ModelSpec, grid: &[f64], states: &[AngleState]) -> Result<Option<Invariants>, Failure> {
    if !invariants_available(model.kind()) {
        return Ok(None);
    }
    let mut rows = Vec::with_capacity(states.len());
    let mut max_drift = 0.0f64;
    if model.kind() == ModelKind::Sutherland {
        let (p0, e0) = momentum_energy(model, &states[0])?;
        let (mut dp_max, mut de_max) = (0.0f64, 0.0f64);
        for (&t, s) in grid.iter().zip(states) {
            let (p, e) = momentum_energy(model, s)?;
            let dp = (p - p0).abs() / p0.abs().max(1.0);
            let de = (e - e0).abs() / e0.abs().max(1.0);
            dp_max = dp_max.max(dp);
            de_max = de_max.max(de);
            max_drift = max_drift.max(dp.max(de));
            rows.push(vec![t, p, e, dp.max(de)]);
        }
        return Ok(Some(Invariants {
            header: ["t", "momentum", "energy", "drift"].map(String::from).to_vec(),
            rows,
            max_drift,
            momentum_drift: Some(dp_max),
            energy_drift: Some(de_max),
        }));
    }
    let h0 = constants_of_motion(model, &states[0])?;
    for (&t, s) in grid.iter().zip(states) {
        let h = constants_of_motion(model, s)?;
        let drift = h.relative_drift(&h0);
        max_drift = max_drift.max(drift);
        let mut row = vec![t];
        for c in &h.h {
            row.push(c.re);
            row.push(c.im);
        }
        row.push(drift);
        rows.push(row);
    }
    let mut header = vec!["t".to_string()];
    for m in 1..=h0.len() {
        header.push(format!("re_h_{m}"));
        header.push(format!("im_h_{m}"));
    }
    header.push("drift".into());
    Ok(Some(Invariants {
        header,
        rows,
        max_drift,
        momentum_drift: None,
        energy_drift: None,
    }))
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn save_svg(dest: &Destination, title: &str, grid: &[f64], states: &[AngleState], files: &mut Vec<String>) -> Result<(), Failure> {
    let angles: Vec<Vec<f64>> = states.iter().map(|s| s.theta().to_vec()).collect();
    let path = dest.file("svg");
    write_atomic(&path, trajectory_svg(title, grid, &angles).as_bytes()).map_err(io_at(&path))?;
    files.push(file_name(&path));
    Ok(())
}

pub fn simulate(config_path: &Path, svg: bool) -> Result<(), Failure> {
    let cfg = RunConfig::load(config_path)?;
    let s0 = cfg.initial_state()?;
    let dest = destination(config_path, &cfg)?;
    let grid = uniform_grid(cfg.t_end, cfg.n_samples);
    let sol = solve(&cfg.model, &s0, &grid, cfg.form, &cfg)?;
    let inv = invariants(&cfg.model, &grid, &sol.states)?;
    let n = cfg.n_particles;
    let mut files = Vec::new();

    if cfg.wants(Output::TrajectoryCsv) {
        let mut header = vec!["t".to_string()];
        header.extend(numbered("theta", n));
        header.extend(numbered("theta_dot", n));
        if sol.positions.is_some() {
            for k in 1..=n {
                header.push(format!("x_{k}"));
                header.push(format!("y_{k}"));
            }
        }
        let path = dest.file("trajectory.csv");
        let mut table = Table::new(&header).map_err(io_at(&path))?;
        for (k, (&t, s)) in grid.iter().zip(&sol.states).enumerate() {
            let mut row = vec![t];
            row.extend_from_slice(s.theta());
            row.extend_from_slice(s.theta_dot());
            if let Some(pos) = &sol.positions {
                row.extend(pos[k].iter().flat_map(|&(x, y)| [x, y]));
            }
            table.row(row).map_err(io_at(&path))?;
        }
        table.save(&path).map_err(io_at(&path))?;
        files.push(file_name(&path));
    }

    if let (true, Some(inv)) = (cfg.wants(Output::InvariantsCsv), &inv) {
        let path = dest.file("invariants.csv");
        let mut table = Table::new(&inv.header).map_err(io_at(&path))?;
        for row in &inv.rows {
            table.row(row.iter().copied()).map_err(io_at(&path))?;
        }
        table.save(&path).map_err(io_at(&path))?;
        files.push(file_name(&path));
    }

    if svg {
        let title = format!("{} N = {} ({} form)", cfg.model.kind(), n, form_name(cfg.form));
        save_svg(&dest, &title, &grid, &sol.states, &mut files)?;
    }

    let summary_path = dest.file("summary.json");
    if cfg.wants(Output::SummaryJson) {
        files.push(file_name(&summary_path));
    }
    let summary = SimulateSummary {
        model: cfg.model.kind().name(),
        n_particles: n,
        form: form_name(cfg.form),
        t_end: cfg.t_end,
        n_samples: cfg.n_samples,
        initial: InitialData {
            theta: s0.theta().to_vec(),
            theta_dot: s0.theta_dot().to_vec(),
        },
        max_constraint_residual: sol.constraint,
        max_invariant_drift: inv.as_ref().map(|i| i.max_drift),
        momentum_drift: inv.as_ref().and_then(|i| i.momentum_drift),
        energy_drift: inv.as_ref().and_then(|i| i.energy_drift),
        steps: Steps {
            accepted: sol.stats.accepted,
            rejected: sol.stats.rejected,
            rhs_evals: sol.stats.rhs_evals,
        },
        files: files.clone(),
    };
    if cfg.wants(Output::SummaryJson) {
        save_json(&summary_path, &summary).map_err(io_at(&summary_path))?;
    }

    println!(
        "{} N = {}: {} samples on [0, {}], {} steps ({} rejected)",
        summary.model, n, cfg.n_samples, cfg.t_end, summary.steps.accepted, summary.steps.rejected
    );
    if cfg.form == Form::Circle {
        println!("max ||r_n| - 1| = {:.3e}", sol.constraint);
    }
    if let Some(d) = summary.max_invariant_drift {
        println!("max invariant drift = {d:.3e}");
    }
    for f in &files {
        println!("wrote {}", dest.dir.join(f).display());
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareSummary {
    model: &'static str,
    n_particles: usize,
    t_end: f64,
    n_samples: usize,
    methods: Vec<&'static str>,
    max_deviation: Vec<PairDeviation>,
    worst_deviation: f64,
    files: Vec<String>,
}

#[derive(Serialize)]
struct PairDeviation {
    pair: String,
    value: f64,
}

/// Largest angular distance (mod 2π) over particles at one sample.
fn deviation(a: &AngleState, b: &AngleState) -> f64 {
    a.theta()
        .iter()
        .zip(b.theta())
        .map(|(x, y)| periodic_distance(*x, *y, 2.0 * PI))
        .fold(0.0, f64::max)
}

pub fn compare(config_path: &Path, svg: bool) -> Result<(), Failure> {
    let cfg = RunConfig::load(config_path)?;
    let s0 = cfg.initial_state()?;
    let dest = destination(config_path, &cfg)?;
    let grid = uniform_grid(cfg.t_end, cfg.n_samples);
    let n = cfg.n_particles;

    let mut methods: Vec<(&'static str, Vec<AngleState>)> = vec![
        ("angle", solve(&cfg.model, &s0, &grid, Form::Angle, &cfg)?.states),
        ("vector", solve(&cfg.model, &s0, &grid, Form::Circle, &cfg)?.states),
    ];
    // Only the many-body model reduces to uncoupled quadratures.
    if cfg.model.kind() == ModelKind::ManyBody {
        let traj = trajectory_algebraic(&cfg.model, &s0, &grid)?;
        methods.push(("algebraic", traj.states().to_vec()));
    }

    let pairs: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|a| (a + 1..methods.len()).map(move |b| (a, b)))
        .collect();
    let mut header = vec!["t".to_string()];
    for (name, _) in &methods {
        header.extend(numbered(&format!("{name}_theta"), n));
    }
    for &(a, b) in &pairs {
        header.push(format!("dev_{}_{}", methods[a].0, methods[b].0));
    }
    let path = dest.file("compare.csv");
    let mut table = Table::new(&header).map_err(io_at(&path))?;
    let mut worst = vec![0.0f64; pairs.len()];
    for (k, &t) in grid.iter().enumerate() {
        let mut row = vec![t];
        for (_, states) in &methods {
            row.extend_from_slice(states[k].theta());
        }
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let d = deviation(&methods[a].1[k], &methods[b].1[k]);
            worst[p] = worst[p].max(d);
            row.push(d);
        }
        table.row(row).map_err(io_at(&path))?;
    }
    table.save(&path).map_err(io_at(&path))?;
    let mut files = vec![file_name(&path)];

    if svg {
        let title = format!("{} N = {} (angle form)", cfg.model.kind(), n);
        save_svg(&dest, &title, &grid, &methods[0].1, &mut files)?;
    }

    let summary_path = dest.file("compare.json");
    files.push(file_name(&summary_path));
    let summary = CompareSummary {
        model: cfg.model.kind().name(),
        n_particles: n,
        t_end: cfg.t_end,
        n_samples: cfg.n_samples,
        methods: methods.iter().map(|m| m.0).collect(),
        max_deviation: pairs
            .iter()
            .zip(&worst)
            .map(|(&(a, b), &value)| PairDeviation {
                pair: format!("{}/{}", methods[a].0, methods[b].0),
                value,
            })
            .collect(),
        worst_deviation: worst.iter().copied().fold(0.0, f64::max),
        files: files.clone(),
    };
    save_json(&summary_path, &summary).map_err(io_at(&summary_path))?;

    for d in &summary.max_deviation {
        println!("max deviation {}: {:.3e}", d.pair, d.value);
    }
    for f in &files {
        println!("wrote {}", dest.dir.join(f).display());
    }
    Ok(())
}
