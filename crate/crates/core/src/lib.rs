//! Shock propagation in two-dimensional periodic nonlinear media.
//!
//! The crate predicts the speed of plane shock waves travelling through
//! layered or smoothly varying periodic media by applying Rankine-Hugoniot
//! conditions to a leading-order homogenized system, and measures that speed
//! with a second-order f-wave finite-volume solver.
//!
//! Modules:
//! - [`media`]: periodic material fields and nonlinear stress laws.
//! - [`homogenize`]: effective (averaged) material parameters.
//! - [`rh`]: effective Rankine-Hugoniot speeds, state connection, thresholds.
//! - [`solver`]: dimensionally split f-wave solver with TVD limiting.
//! - [`diagnostics`]: front tracking, speed fitting, entropy and run classification.
//! - [`harness`]: configuration files, parameter sweeps and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod homogenize;
pub mod media;
pub mod rh;
pub mod solver;

pub use diagnostics::{EntropyTrace, FrontTrace, RunClass};
pub use error::{Error, Result};
pub use homogenize::{EffectiveMedium, HomogenizedSystem};
pub use media::{ConstitutiveLaw, Material, MediumSpec, Profile, Scaling};
pub use rh::{Direction, ShockSetup};
pub use solver::{Grid2D, Limiter, SolverConfig, StateField};
