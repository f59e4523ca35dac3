//! Integrable and solvable N-body models on the unit circle.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] holds the three state representations (angles, unit
//!   2-vectors, tan-line coordinates) and the conversions between them,
//!   plus [`identities`], a residual report for the kinematic identities
//!   relating them.
//! * [`interp`] implements generalized Lagrangian interpolation on the
//!   exponential seed basis `exp(i(2n-N-1)θ)` and its exact differentiation
//!   matrix.
//! * [`dynamics`] is the catalogue of model right-hand sides in angle,
//!   circle-vector and line form, together with the constants of motion.
//! * [`integrator`] is an adaptive Dormand–Prince 5(4) integrator with dense
//!   output, used for every numerical trajectory.
//! * [`algebraic`] solves the many-body interpolation model without
//!   integrating the second-order system: roots, residues, a closed-form
//!   antiderivative and Newton continuation in time.
//! * [`suites`] bundles the randomized cross-checks run by `circle-nbody verify`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebraic;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod integrator;
pub mod interp;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};
pub use geometry::{AngleState, CircleState, LineState, Vec2};
