//! Finite-volume f-wave solver for the two-dimensional system on a uniform
//! grid, advanced by Strang splitting into one-dimensional sweeps.

mod grid;
mod run;
mod snapshot;
mod state;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::{Grid2D, GHOST};
pub use run::{run, run_homogenized_1d, DiagnosticSample, RunOutput, Simulation, Snapshot};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotData, SnapshotFormat};
pub use state::{MaterialField, StateField};
pub use sweep::{max_courant, riemann_sweep, step, Axis, WaveFan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    /// Monotonized central.
    #[default]
    #[serde(alias = "MC")]
    Mc,
    Minmod,
    /// Unlimited second-order corrections.
    None,
}

impl Limiter {
    #[inline]
    pub fn phi(self, theta: f64) -> f64 {
        match self {
            Limiter::Mc => (0.5 * (1.0 + theta)).min(2.0).min(2.0 * theta).max(0.0),
            Limiter::Minmod => theta.clamp(0.0, 1.0),
            Limiter::None => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Zero-order extrapolation.
    #[default]
    Outflow,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Courant number aimed for when choosing the time step.
    pub cfl_target: f64,
    /// Steps whose observed Courant number exceeds this are redone.
    pub cfl_max: f64,
    pub limiter: Limiter,
    pub t_final: f64,
    pub bc_x: BoundaryCondition,
    pub bc_y: BoundaryCondition,
    /// Interval between stored snapshots; `None` keeps only the first and last.
    pub snapshot_interval: Option<f64>,
    /// Interval between diagnostic samples; `None` samples only at the ends.
    pub diagnostic_interval: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl_target: 0.9,
            cfl_max: 1.0,
            limiter: Limiter::Mc,
            t_final: 1.0,
            bc_x: BoundaryCondition::Outflow,
            bc_y: BoundaryCondition::Periodic,
            snapshot_interval: None,
            diagnostic_interval: None,
            max_steps: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    pub fn with_limiter(mut self, limiter: Limiter) -> Self {
        self.limiter = limiter;
        self
    }

    pub fn with_bc_x(mut self, bc: BoundaryCondition) -> Self {
        self.bc_x = bc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSolverConfig(msg));
        if !(self.cfl_target > 0.0 && self.cfl_target <= self.cfl_max && self.cfl_max <= 1.0) {
            return bad(format!(
                "need 0 < cfl_target <= cfl_max <= 1, got {} and {}",
                self.cfl_target, self.cfl_max
            ));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!(
                "t_final must be finite and non-negative, got {}",
                self.t_final
            ));
        }
        for (name, v) in [
            ("snapshot_interval", self.snapshot_interval),
            ("diagnostic_interval", self.diagnostic_interval),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        Ok(())
    }
}
