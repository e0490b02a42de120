use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    entropy, entropy_1d, shock_position, y_average, EntropyTrace, FrontTrace,
};
use crate::error::{Error, Result};
use crate::homogenize::HomogenizedSystem;
use crate::media::ConstitutiveLaw;

use super::grid::Grid2D;
use super::state::StateField;
use super::sweep::{advance, max_speed};
use super::{BoundaryCondition, SolverConfig};

/// Diagnostics recorded at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub t: f64,
    /// Last accepted step size (0 before the first step).
    pub dt: f64,
    pub eta: f64,
    /// Entropy with the `u` kinetic term only.
    pub eta_1d: f64,
    /// Net energy that entered through the `x` boundaries so far.
    pub boundary_work: f64,
    pub front: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub state: StateField,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub samples: Vec<DiagnosticSample>,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl RunOutput {
    pub fn final_state(&self) -> &StateField {
        &self
            .snapshots
            .last()
            .expect("run stores the initial snapshot")
            .state
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.t)
    }

    pub fn entropy_trace(&self) -> Result<EntropyTrace> {
        EntropyTrace::new(
            self.samples.iter().map(|s| s.t).collect(),
            self.samples.iter().map(|s| s.eta).collect(),
            self.samples.iter().map(|s| s.boundary_work).collect(),
        )
    }

    /// Samples with a detected front.
    pub fn front_trace(&self) -> Result<FrontTrace> {
        let mut tr = FrontTrace::default();
        for s in &self.samples {
            if let Some(x) = s.front {
                tr.push(s.t, x)?;
            }
        }
        Ok(tr)
    }
}

/// Time integrator holding one evolving state.
#[derive(Debug, Clone)]
pub struct Simulation {
    state: StateField,
    law: ConstitutiveLaw,
    config: SolverConfig,
    t: f64,
    dt_next: f64,
    dt_last: f64,
    boundary_work: f64,
    steps: usize,
    rejected: usize,
    front_levels: Option<(f64, f64)>,
}

impl Simulation {
    pub fn new(state: StateField, law: ConstitutiveLaw, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        law.validate()?;
        if !state.is_finite() {
            return Err(Error::NonFiniteState { t: 0.0 });
        }
        let mut sim = Self {
            state,
            law,
            config,
            t: 0.0,
            dt_next: 0.0,
            dt_last: 0.0,
            boundary_work: 0.0,
            steps: 0,
            rejected: 0,
            front_levels: None,
        };
        sim.dt_next = sim.stable_dt(max_speed(&sim.state, &sim.law)?);
        Ok(sim)
    }

    /// Records the front between the two stress levels in every sample.
    pub fn track_front(mut self, sigma_l: f64, sigma_r: f64) -> Self {
        self.front_levels = Some((sigma_l, sigma_r));
        self
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &StateField {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    fn spacing(&self) -> f64 {
        let g = self.state.grid;
        if g.ny == 1 {
            g.dx
        } else {
            g.min_spacing()
        }
    }

    fn stable_dt(&self, cmax: f64) -> f64 {
        if cmax > 0.0 {
            self.config.cfl_target * self.spacing() / cmax
        } else {
            f64::INFINITY
        }
    }

    /// Net power `sum_j ([sigma u]_right - [sigma u]_left) dy` through the
    /// outflow boundaries.
    fn boundary_power(&self) -> f64 {
        if self.config.bc_x != BoundaryCondition::Outflow {
            return 0.0;
        }
        let s = &self.state;
        let g = s.grid;
        let flux = |k: usize| {
            s.mom_x[k] / s.material.density[k] * self.law.stress(s.material.stiffness[k], s.eps[k])
        };
        let mut p = 0.0;
        for j in 0..g.ny {
            p += flux(g.index(g.nx - 1, j)) - flux(g.index(0, j));
        }
        p * g.row_width()
    }

    /// Takes adaptive steps until `t_target`, landing on it exactly.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        let h = self.spacing();
        while self.t < t_target {
            if self.steps >= self.config.max_steps {
                return Err(Error::StepLimit(self.config.max_steps));
            }
            let remaining = t_target - self.t;
            let last = self.dt_next >= remaining;
            let dt = if last { remaining } else { self.dt_next };
            let before = self.state.clone();
            let p0 = self.boundary_power();
            let cmax =
                advance(&mut self.state, &self.law, &self.config, dt).map_err(|e| match e {
                    Error::NonFiniteState { .. } => Error::NonFiniteState { t: self.t },
                    e => e,
                })?;
            let courant = dt * cmax / h;
            if courant > self.config.cfl_max {
                self.state = before;
                self.rejected += 1;
                self.dt_next = self.stable_dt(cmax);
                continue;
            }
            self.boundary_work += 0.5 * (p0 + self.boundary_power()) * dt;
            self.t = if last { t_target } else { self.t + dt };
            self.dt_last = dt;
            self.steps += 1;
            self.dt_next = self.stable_dt(cmax);
        }
        Ok(())
    }

    pub fn sample(&self) -> DiagnosticSample {
        let front = self.front_levels.and_then(|(sl, sr)| {
            let p = y_average(&self.state, &self.law);
            shock_position(&p.x, &p.sigma, sl, sr).ok()
        });
        DiagnosticSample {
            t: self.t,
            dt: self.dt_last,
            eta: entropy(&self.state, &self.law),
            eta_1d: entropy_1d(&self.state, &self.law),
            boundary_work: self.boundary_work,
            front,
        }
    }

    /// Runs to `t_final`, handing every snapshot to `on_snapshot` instead of
    /// storing it. The returned output keeps only the final state.
    pub fn run_with(
        mut self,
        mut on_snapshot: impl FnMut(f64, &StateField) -> Result<()>,
    ) -> Result<RunOutput> {
        let t_final = self.config.t_final;
        let snap_dt = self.config.snapshot_interval;
        let diag_dt = self.config.diagnostic_interval;
        let mut samples = vec![self.sample()];
        on_snapshot(self.t, &self.state)?;
        let (mut ks, mut kd) = (1usize, 1usize);
        let event = |k: usize, d: Option<f64>| d.map_or(f64::INFINITY, |d| k as f64 * d);
        while self.t < t_final {
            let ts = event(ks, snap_dt);
            let td = event(kd, diag_dt);
            let target = ts.min(td).min(t_final);
            self.advance_to(target)?;
            let at_end = self.t >= t_final;
            if ts <= target || at_end {
                on_snapshot(self.t, &self.state)?;
                while event(ks, snap_dt) <= self.t {
                    ks += 1;
                }
            }
            if td <= target || at_end {
                samples.push(self.sample());
                while event(kd, diag_dt) <= self.t {
                    kd += 1;
                }
            }
        }
        Ok(RunOutput {
            snapshots: vec![Snapshot {
                t: self.t,
                state: self.state,
            }],
            samples,
            steps: self.steps,
            rejected_steps: self.rejected,
        })
    }

    /// Runs to `t_final` keeping every snapshot in memory.
    pub fn run(self) -> Result<RunOutput> {
        let mut snaps = Vec::new();
        let mut out = self.run_with(|t, s| {
            snaps.push(Snapshot {
                t,
                state: s.clone(),
            });
            Ok(())
        })?;
        out.snapshots = snaps;
        Ok(out)
    }
}

/// Runs `state` to `config.t_final`, storing all snapshots.
pub fn run(state: StateField, law: &ConstitutiveLaw, config: &SolverConfig) -> Result<RunOutput> {
    Simulation::new(state, *law, *config)?.run()
}

/// One-dimensional run of the homogenized system on `nx` cells over
/// `[0, length]`, from `ic(x) -> (eps, u)`.
pub fn run_homogenized_1d(
    system: &HomogenizedSystem,
    ic: impl Fn(f64) -> (f64, f64),
    nx: usize,
    length: f64,
    config: &SolverConfig,
) -> Result<RunOutput> {
    let grid = Grid2D::line(nx, length)?;
    let mut state = StateField::uniform(grid, system.material());
    state.fill(|x, _, _| {
        let (e, u) = ic(x);
        (e, u, 0.0)
    });
    run(state, &system.law, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::Material;

    #[test]
    fn zero_final_time_returns_initial_snapshot() {
        let grid = Grid2D::line(16, 1.0).unwrap();
        let mut state = StateField::uniform(grid, Material::new(1.0, 1.0));
        state.fill(|x, _, _| (0.1 * x, 0.0, 0.0));
        let cfg = SolverConfig::default().with_t_final(0.0);
        let out = run(state.clone(), &ConstitutiveLaw::Exponential, &cfg).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.snapshots[0].t, 0.0);
        assert_eq!(out.snapshots[0].state.eps, state.eps);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn lands_on_event_times() {
        let grid = Grid2D::line(50, 1.0).unwrap();
        let mut state = StateField::uniform(grid, Material::new(1.0, 1.0));
        state.fill(|x, _, _| ((-100.0 * (x - 0.5) * (x - 0.5)).exp() * 0.1, 0.0, 0.0));
        let cfg = SolverConfig {
            t_final: 0.3,
            snapshot_interval: Some(0.1),
            diagnostic_interval: Some(0.05),
            bc_x: BoundaryCondition::Periodic,
            ..Default::default()
        };
        let out = run(state, &ConstitutiveLaw::linear(), &cfg).unwrap();
        let ts: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ts.len(), 4);
        for (t, want) in ts.iter().zip([0.0, 0.1, 0.2, 0.3]) {
            assert!((t - want).abs() < 1e-12);
        }
        assert_eq!(out.samples.len(), 7);
        assert_eq!(out.final_time(), 0.3);
    }

    #[test]
    fn step_limit_is_reported() {
        let grid = Grid2D::line(50, 1.0).unwrap();
        let state = StateField::uniform(grid, Material::new(1.0, 1.0));
        let cfg = SolverConfig {
            t_final: 10.0,
            max_steps: 3,
            ..Default::default()
        };
        let err = run(state, &ConstitutiveLaw::linear(), &cfg).unwrap_err();
        assert!(matches!(err, Error::StepLimit(3)));
    }
}
