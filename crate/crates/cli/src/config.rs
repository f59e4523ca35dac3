//! Run configuration files (TOML).

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use circle_nbody::dynamics::{GoldfishCouplings, ModelKind, ModelSpec};
use circle_nbody::integrator::{IntegratorConfig, Projection};
use circle_nbody::sampling::RandomInit;
use circle_nbody::{AngleState, Error};

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_particles: usize,
    t_end: f64,
    n_samples: usize,
    #[serde(default)]
    form: Form,
    outputs: Option<Vec<Output>>,
    output_dir: Option<PathBuf>,
    model: RawModel,
    initial: RawInitial,
    #[serde(default)]
    integrator: RawIntegrator,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: String,
    mu: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
    g: Option<f64>,
    g0: Option<f64>,
    g1: Option<f64>,
    g2: Option<f64>,
    g3: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    theta: Option<Vec<f64>>,
    theta_dot: Option<Vec<f64>>,
    random: Option<RawRandom>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRandom {
    seed: u64,
    #[serde(default = "default_angle_spread")]
    angle_spread: f64,
    #[serde(default = "default_velocity_spread")]
    velocity_spread: f64,
    min_separation: f64,
    tan_margin: Option<f64>,
}

fn default_angle_spread() -> f64 {
    PI
}

fn default_velocity_spread() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    #[serde(default = "default_rel_tol")]
    rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    abs_tol: f64,
    max_step: Option<f64>,
    #[serde(default = "default_max_steps")]
    max_steps: usize,
    #[serde(default)]
    projection: RawProjection,
}

impl Default for RawIntegrator {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            max_step: None,
            max_steps: default_max_steps(),
            projection: RawProjection::Off,
        }
    }
}

fn default_rel_tol() -> f64 {
    IntegratorConfig::default().rel_tol
}

fn default_abs_tol() -> f64 {
    IntegratorConfig::default().abs_tol
}

fn default_max_steps() -> usize {
    IntegratorConfig::default().max_steps
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawProjection {
    #[default]
    Off,
    Renormalize,
}

/// Which equations of motion are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    #[default]
    Angle,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    TrajectoryCsv,
    InvariantsCsv,
    SummaryJson,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Explicit(AngleState),
    Random(RandomInit),
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub n_particles: usize,
    pub initial: Initial,
    pub t_end: f64,
    pub n_samples: usize,
    pub form: Form,
    pub integrator: IntegratorConfig,
    pub outputs: Vec<Output>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // Relative output directories are taken relative to the config file.
        if let (Some(dir), Some(parent)) = (&cfg.output_dir, path.parent()) {
            if dir.is_relative() {
                cfg.output_dir = Some(parent.join(dir));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))?;
        let n = raw.n_particles;
        if n == 0 {
            return Err(ConfigError::new("n_particles", "must be at least 1"));
        }
        if !raw.t_end.is_finite() || raw.t_end <= 0.0 {
            return Err(ConfigError::new("t_end", "must be positive and finite"));
        }
        if raw.n_samples < 2 {
            return Err(ConfigError::new("n_samples", "must be at least 2"));
        }
        let model = build_model(&raw.model, n)?;
        let initial = build_initial(&raw.initial, n, model.kind())?;
        let integrator = build_integrator(&raw.integrator)?;
        let has_invariants = invariants_available(model.kind());
        let outputs = match raw.outputs {
            Some(list) => {
                if list.is_empty() {
                    return Err(ConfigError::new("outputs", "must list at least one output"));
                }
                if list.contains(&Output::InvariantsCsv) && !has_invariants {
                    return Err(ConfigError::new(
                        "outputs",
                        format!(
                            "invariants_csv needs a model with known constants of motion \
                             (many_body, two_body, sutherland), not {}",
                            model.kind()
                        ),
                    ));
                }
                list
            }
            None if has_invariants => vec![Output::TrajectoryCsv, Output::InvariantsCsv, Output::SummaryJson],
            None => vec![Output::TrajectoryCsv, Output::SummaryJson],
        };
        Ok(Self {
            model,
            n_particles: n,
            initial,
            t_end: raw.t_end,
            n_samples: raw.n_samples,
            form: raw.form,
            integrator,
            outputs,
            output_dir: raw.output_dir,
        })
    }

    pub fn initial_state(&self) -> Result<AngleState, ConfigError> {
        match &self.initial {
            Initial::Explicit(s) => Ok(s.clone()),
            Initial::Random(spec) => spec
                .sample(self.n_particles)
                .map_err(|e| ConfigError::new("initial.random", e.to_string())),
        }
    }

    pub fn wants(&self, output: Output) -> bool {
        self.outputs.contains(&output)
    }
}

/// Kinds whose conserved quantities the tool can monitor.
pub fn invariants_available(kind: ModelKind) -> bool {
    matches!(kind, ModelKind::ManyBody | ModelKind::TwoBody | ModelKind::Sutherland)
}

fn build_model(raw: &RawModel, n: usize) -> Result<ModelSpec, ConfigError> {
    let kind = ModelKind::from_name(&raw.kind).ok_or_else(|| {
        let known: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        ConfigError::new("model.kind", format!("unknown kind {:?} (expected one of {})", raw.kind, known.join(", ")))
    })?;
    let allowed: &[&str] = match kind {
        ModelKind::ManyBody | ModelKind::TwoBody => &["mu", "eta"],
        ModelKind::Sutherland | ModelKind::IsochronousTan => &["g"],
        ModelKind::GoldfishCircle => &["g0", "g1", "g2", "g3"],
        ModelKind::GoldfishTan => &[],
        ModelKind::GeneralInterp => {
            return Err(ConfigError::new(
                "model.kind",
                "general_interp takes user-supplied weight functions and is only available through the library",
            ))
        }
    };
    let given = [
        ("mu", raw.mu.is_some()),
        ("eta", raw.eta.is_some()),
        ("g", raw.g.is_some()),
        ("g0", raw.g0.is_some()),
        ("g1", raw.g1.is_some()),
        ("g2", raw.g2.is_some()),
        ("g3", raw.g3.is_some()),
    ];
    for (name, present) in given {
        if present && !allowed.contains(&name) {
            return Err(ConfigError::new(format!("model.{name}"), format!("not a parameter of {kind}")));
        }
    }
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ConfigError::new(format!("model.{name}"), "must be finite"))
        }
    };
    let required = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| ConfigError::new(format!("model.{name}"), format!("required for {kind}")))
            .and_then(|v| finite(name, v))
    };
    match kind {
        ModelKind::ManyBody | ModelKind::TwoBody => {
            let list = |name: &str, v: &Option<Vec<f64>>| -> Result<Vec<f64>, ConfigError> {
                let v = v
                    .clone()
                    .ok_or_else(|| ConfigError::new(format!("model.{name}"), format!("required for {kind}")))?;
                if v.len() != n {
                    return Err(ConfigError::new(
                        format!("model.{name}"),
                        format!("expected {n} values (n_particles), found {}", v.len()),
                    ));
                }
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(ConfigError::new(format!("model.{name}[{i}]"), "must be finite"));
                }
                Ok(v)
            };
            let mu = list("mu", &raw.mu)?;
            let eta = list("eta", &raw.eta)?;
            if let Some(i) = mu.iter().position(|&m| m == 0.0) {
                return Err(ConfigError::new(format!("model.mu[{i}]"), "mass coefficient must be nonzero"));
            }
            let built = if kind == ModelKind::ManyBody {
                ModelSpec::many_body(mu, eta)
            } else {
                ModelSpec::two_body(mu, eta)
            };
            built.map_err(|e| ConfigError::new("model", e.to_string()))
        }
        ModelKind::Sutherland => Ok(ModelSpec::Sutherland { g: required("g", raw.g)? }),
        ModelKind::IsochronousTan => Ok(ModelSpec::IsochronousTan { g: required("g", raw.g)? }),
        ModelKind::GoldfishCircle => Ok(ModelSpec::GoldfishCircle(GoldfishCouplings {
            g0: finite("g0", raw.g0.unwrap_or(0.0))?,
            g1: finite("g1", raw.g1.unwrap_or(0.0))?,
            g2: finite("g2", raw.g2.unwrap_or(0.0))?,
            g3: finite("g3", raw.g3.unwrap_or(0.0))?,
        })),
        ModelKind::GoldfishTan => Ok(ModelSpec::GoldfishTan),
        ModelKind::GeneralInterp => unreachable!("rejected above"),
    }
}

fn build_initial(raw: &RawInitial, n: usize, kind: ModelKind) -> Result<Initial, ConfigError> {
    match (&raw.theta, &raw.theta_dot, &raw.random) {
        (Some(theta), Some(theta_dot), None) => {
            for (name, v) in [("theta", theta), ("theta_dot", theta_dot)] {
                if v.len() != n {
                    return Err(ConfigError::new(
                        format!("initial.{name}"),
                        format!("expected {n} values (n_particles), found {}", v.len()),
                    ));
                }
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(ConfigError::new(format!("initial.{name}[{i}]"), "must be finite"));
                }
            }
            AngleState::new(theta.clone(), theta_dot.clone())
                .map(Initial::Explicit)
                .map_err(|e| ConfigError::new("initial", e.to_string()))
        }
        (None, None, Some(r)) => {
            // Tan-derived models also need particles away from cos θ = 0.
            let tan_margin = match (r.tan_margin, kind.is_tan_derived()) {
                (Some(m), _) => Some(m),
                (None, true) => Some(0.1),
                (None, false) => None,
            };
            let spec = RandomInit {
                seed: r.seed,
                angle_spread: r.angle_spread,
                velocity_spread: r.velocity_spread,
                min_separation: r.min_separation,
                tan_margin,
            };
            spec.validate().map_err(|e| match e {
                Error::InvalidConfig(msg) => {
                    let field = msg.split_whitespace().next().unwrap_or("").to_string();
                    ConfigError::new(format!("initial.random.{field}"), msg)
                }
                other => ConfigError::new("initial.random", other.to_string()),
            })?;
            Ok(Initial::Random(spec))
        }
        (_, _, Some(_)) => Err(ConfigError::new(
            "initial",
            "give either theta and theta_dot, or a [initial.random] table, not both",
        )),
        (None, _, None) => Err(ConfigError::new("initial.theta", "required (or use [initial.random])")),
        (Some(_), None, None) => Err(ConfigError::new("initial.theta_dot", "required alongside initial.theta")),
    }
}

fn build_integrator(raw: &RawIntegrator) -> Result<IntegratorConfig, ConfigError> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && !v.is_nan() {
            Ok(v)
        } else {
            Err(ConfigError::new(format!("integrator.{name}"), "must be positive"))
        }
    };
    let cfg = IntegratorConfig {
        rel_tol: positive("rel_tol", raw.rel_tol)?,
        abs_tol: positive("abs_tol", raw.abs_tol)?,
        max_step: positive("max_step", raw.max_step.unwrap_or(f64::INFINITY))?,
        max_steps: raw.max_steps,
        projection: match raw.projection {
            RawProjection::Off => Projection::Off,
            RawProjection::Renormalize => Projection::Renormalize,
        },
    };
    if cfg.max_steps == 0 {
        return Err(ConfigError::new("integrator.max_steps", "must be at least 1"));
    }
    cfg.validate().map_err(|e| ConfigError::new("integrator", e.to_string()))?;
    Ok(cfg)
}
