//! Model catalogue: right-hand sides in angle, circle-vector and line
//! form, and the constants of motion.
//!
//! Every equation is stored in explicit form `θ̈_n = …`, i.e. divided
//! through by `μ_n` (or `ρ_n`) where the model carries one.

mod angle;
mod circle;
mod invariants;
mod line;
mod weights;

use std::fmt;
use std::sync::Arc;

pub use angle::rhs_angle;
pub use circle::{rhs_circle, rhs_circle_with_tolerance, STAGE_CONSTRAINT_TOL};
pub use invariants::{constants_of_motion, momentum_energy, InvariantVector};
pub use line::rhs_line;
pub use weights::{ConstantWeights, InterpolationWeights, SigmaWeights};

use crate::error::{Error, Result};

/// Mass-like and shift coefficients `(μ_n, η_n)` of the two
/// interpolation-generated models. Every `μ_n` is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    mu: Vec<f64>,
    eta: Vec<f64>,
}

impl Coefficients {
    pub fn new(mu: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidState("no coefficients given".into()));
        }
        if mu.len() != eta.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len(),
                found: eta.len(),
            });
        }
        if let Some(index) = mu.iter().position(|&m| m == 0.0) {
            return Err(Error::ZeroMass { index });
        }
        if mu.iter().chain(&eta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite coefficient".into()));
        }
        Ok(Self { mu, eta })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// Couplings of the rotation-invariant goldfish model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GoldfishCouplings {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    ManyBody,
    TwoBody,
    Sutherland,
    GoldfishCircle,
    IsochronousTan,
    GoldfishTan,
    GeneralInterp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::ManyBody,
        ModelKind::TwoBody,
        ModelKind::Sutherland,
        ModelKind::GoldfishCircle,
        ModelKind::IsochronousTan,
        ModelKind::GoldfishTan,
        ModelKind::GeneralInterp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ManyBody => "many_body",
            ModelKind::TwoBody => "two_body",
            ModelKind::Sutherland => "sutherland",
            ModelKind::GoldfishCircle => "goldfish_circle",
            ModelKind::IsochronousTan => "isochronous_tan",
            ModelKind::GoldfishTan => "goldfish_tan",
            ModelKind::GeneralInterp => "general_interp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Kinds whose equations depend on the angles only through differences.
    pub fn is_rotation_covariant(self) -> bool {
        matches!(
            self,
            ModelKind::ManyBody
                | ModelKind::TwoBody
                | ModelKind::Sutherland
                | ModelKind::GoldfishCircle
        )
    }

    /// Kinds obtained through `z = tan θ`; they are singular at `cos θ = 0`.
    pub fn is_tan_derived(self) -> bool {
        matches!(self, ModelKind::IsochronousTan | ModelKind::GoldfishTan)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone)]
pub enum ModelSpec {
    /// `ρ_n = μ_n`, `γ_n = η_n`: many-body forces, solvable.
    ManyBody(Coefficients),
    /// `ρ_n = μ_n σ_n`, `γ_n = η_n σ_n`: two-body forces, integrable.
    TwoBody(Coefficients),
    Sutherland { g: f64 },
    GoldfishCircle(GoldfishCouplings),
    /// Angle transcription of `z̈ = −4z + g² Σ (z_n − z_ℓ)^{-3}`.
    IsochronousTan { g: f64 },
    /// Angle transcription of `z̈ = −z + Σ (2 ż_n ż_ℓ + 1)/(z_n − z_ℓ)`.
    GoldfishTan,
    GeneralInterp(Arc<dyn InterpolationWeights>),
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::ManyBody(c) => f.debug_tuple("ManyBody").field(c).finish(),
            ModelSpec::TwoBody(c) => f.debug_tuple("TwoBody").field(c).finish(),
            ModelSpec::Sutherland { g } => f.debug_struct("Sutherland").field("g", g).finish(),
            ModelSpec::GoldfishCircle(c) => f.debug_tuple("GoldfishCircle").field(c).finish(),
            ModelSpec::IsochronousTan { g } => {
                f.debug_struct("IsochronousTan").field("g", g).finish()
            }
            ModelSpec::GoldfishTan => f.write_str("GoldfishTan"),
            ModelSpec::GeneralInterp(_) => f.write_str("GeneralInterp(..)"),
        }
    }
}

impl ModelSpec {
    pub fn many_body(mu: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        Ok(ModelSpec::ManyBody(Coefficients::new(mu, eta)?))
    }

    pub fn two_body(mu: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        Ok(ModelSpec::TwoBody(Coefficients::new(mu, eta)?))
    }

    pub fn general(weights: impl InterpolationWeights + 'static) -> Self {
        ModelSpec::GeneralInterp(Arc::new(weights))
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::ManyBody(_) => ModelKind::ManyBody,
            ModelSpec::TwoBody(_) => ModelKind::TwoBody,
            ModelSpec::Sutherland { .. } => ModelKind::Sutherland,
            ModelSpec::GoldfishCircle(_) => ModelKind::GoldfishCircle,
            ModelSpec::IsochronousTan { .. } => ModelKind::IsochronousTan,
            ModelSpec::GoldfishTan => ModelKind::GoldfishTan,
            ModelSpec::GeneralInterp(_) => ModelKind::GeneralInterp,
        }
    }

    /// Particle count fixed by the parameters, if any.
    pub fn n_particles(&self) -> Option<usize> {
        match self {
            ModelSpec::ManyBody(c) | ModelSpec::TwoBody(c) => Some(c.len()),
            _ => None,
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        match self.n_particles() {
            Some(expected) if expected != n => Err(Error::DimensionMismatch { expected, found: n }),
            _ => Ok(()),
        }
    }

    pub(crate) fn wrong_kind(&self, expected: &'static str) -> Error {
        Error::WrongKind {
            expected,
            found: self.kind().name().to_string(),
        }
    }
}

/// Pairwise collision guard on `|sin(θ_n − θ_ℓ)|`, shared by every kind.
pub const COLLISION_GUARD: f64 = crate::interp::COLLISION_TOL;

pub(crate) fn check_tangent(theta: &[f64]) -> Result<()> {
    for (index, &t) in theta.iter().enumerate() {
        if t.cos().abs() <= crate::geometry::TAN_GUARD {
            return Err(Error::TangentSingularity { index, theta: t });
        }
    }
    Ok(())
}
