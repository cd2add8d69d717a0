//! Deterministic Lipschitz global optimization through space-filling curves.
//!
//! An `N`-dimensional problem `min F(y)` over a box is reduced to the
//! one-dimensional `f(x) = F(p_M(x))` on `[0, 1]` with a level-M Hilbert
//! curve approximation `p_M` ([`curve`]). The reduced function is Hölder
//! continuous with exponent `1/N`, and [`mgas`] minimizes it by trisecting
//! intervals selected from the lower-right convex hull of the `(h, F)`
//! diagram ([`diagram`], [`hull`]), i.e. for every Hölder constant estimate
//! at once.
//!
//! Also included: a DIRECT baseline ([`direct`]), a GKLS-style test class
//! generator ([`gkls`]) and the benchmark harness that compares the two
//! optimizers on it ([`bench`]).

// `!(a < b)` checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod curve;
pub mod diagram;
pub mod direct;
pub mod error;
pub mod gkls;
pub mod hull;
pub mod mgas;
pub mod objective;
pub mod parallel;
pub mod run;

pub use curve::CurveMap;
pub use diagram::{DiagramPoint, IntervalRecord};
pub use direct::{direct_run, DirectConfig};
pub use error::{Error, Result};
pub use gkls::{generate, GklsClassSpec, GklsFunction};
pub use hull::{filter_improving, nondominated, HullSelection};
pub use mgas::{global_lower_bound, run, run_recording_hulls, MgasConfig, OptimizerState};
pub use objective::{Objective, Paraboloid};
pub use parallel::Execution;
pub use run::{Algorithm, RunResult, StopReason, StoppingRule, TraceEntry};
