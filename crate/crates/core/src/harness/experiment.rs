use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    classify_run, shock_position, y_average, ColumnProfile, EntropyTrace, FrontTrace, RunClass,
    SpeedFit,
};
use crate::error::{Error, Result};
use crate::homogenize::{effective_parameters, homogenized_system};
use crate::media::MediumSpec;
use crate::rh::{connect_right_going, threshold_ch, threshold_cm, ShockSetup};
use crate::solver::{write_snapshot, Grid2D, RunOutput, Simulation, SnapshotFormat, StateField};

use super::config::ExperimentConfig;

/// `|Z_B / Z_A - 1| + |c_B / c_A - 1|` with linear impedances and speeds.
pub fn dispersion_proxy(spec: &MediumSpec) -> f64 {
    let (a, b) = (spec.material_a(), spec.material_b());
    (b.linear_impedance() / a.linear_impedance() - 1.0).abs()
        + (b.linear_speed() / a.linear_speed() - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    /// The front could not be tracked; no measured speed.
    FrontNotFound,
}

impl RecordStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::FrontNotFound => "front_not_found",
        }
    }
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: usize,
    pub digest: String,
    pub profile: String,
    pub law: String,
    pub theta_deg: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
    #[serde(rename = "rho_B")]
    pub rho_b: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub s_predicted: f64,
    pub s_measured: Option<f64>,
    pub rel_error: Option<f64>,
    pub fit_residual: Option<f64>,
    pub c_h: f64,
    pub c_m: f64,
    pub entropy_loss: Option<f64>,
    pub classification: Option<RunClass>,
    pub dispersion_proxy: f64,
    pub status: RecordStatus,
    pub t_final: f64,
    #[serde(skip)]
    pub entropy: Option<EntropyTrace>,
    #[serde(skip)]
    pub front: Option<FrontTrace>,
}

/// Initial data and solver settings derived from a configuration.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub spec: MediumSpec,
    pub setup: ShockSetup,
    pub t_final: f64,
    pub x_front: f64,
}

pub fn prepare(config: &ExperimentConfig) -> Result<PreparedRun> {
    config.validate_static()?;
    let spec = config.spec();
    let med = effective_parameters(&spec)?;
    let setup = connect_right_going(
        config.sigma_l,
        config.sigma_r,
        config.u_r,
        &config.law,
        &med,
    )?;
    config.validate_for_speed(setup.speed)?;
    Ok(PreparedRun {
        spec,
        setup,
        t_final: config.final_time(setup.speed),
        x_front: config.front_position(),
    })
}

/// Initial shock state on the configuration's grid at `resolution`.
pub fn initial_state(
    config: &ExperimentConfig,
    prep: &PreparedRun,
    resolution: f64,
) -> Result<StateField> {
    let grid = Grid2D::for_medium(&prep.spec, resolution, config.domain_length())?;
    let mut state = StateField::from_medium(grid, &prep.spec);
    state.set_shock(&prep.setup, &config.law, prep.x_front)?;
    Ok(state)
}

/// Runs the variable-coefficient problem at `resolution`, optionally writing
/// snapshots into `snapshots`.
pub fn simulate(
    config: &ExperimentConfig,
    prep: &PreparedRun,
    resolution: f64,
    snapshots: Option<(&Path, SnapshotFormat)>,
) -> Result<RunOutput> {
    let state = initial_state(config, prep, resolution)?;
    let sim = Simulation::new(state, config.law, config.solver_config(prep.t_final))?;
    let sim = if config.diagnostics.front {
        sim.track_front(config.sigma_l, config.sigma_r)
    } else {
        sim
    };
    let mut frame = 0usize;
    sim.run_with(|t, s| {
        if let Some((dir, fmt)) = snapshots {
            let path = dir.join(format!("snapshot_{frame:05}.{}", fmt.extension()));
            write_snapshot(&path, t, s, fmt)?;
        }
        frame += 1;
        Ok(())
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    run_experiment_with(config, 0, None)
}

/// [`run_experiment`] with a record id and optional snapshot output.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    id: usize,
    snapshots: Option<(&Path, SnapshotFormat)>,
) -> Result<ExperimentRecord> {
    let prep = prepare(config)?;
    let spec = prep.spec;
    let s_predicted = prep.setup.speed;
    let out = simulate(config, &prep, config.resolution, snapshots)?;
    let diag = &config.diagnostics;

    let mut status = RecordStatus::Ok;
    let (mut s_measured, mut fit_residual, mut front) = (None, None, None);
    if diag.front {
        let mut trace = out.front_trace()?;
        trace.fit_window = diag.fit_window;
        match trace.fit() {
            Ok(SpeedFit {
                speed, residual, ..
            }) => {
                s_measured = Some(speed);
                fit_residual = Some(residual);
            }
            Err(Error::InsufficientSamples { .. }) => status = RecordStatus::FrontNotFound,
            Err(e) => return Err(e),
        }
        front = Some(trace);
    }

    let trace = out.entropy_trace()?;
    let entropy_loss = diag.entropy.then(|| trace.final_loss());
    let classification = if diag.classify {
        let coarse = config.resolution / 2.0;
        let mut companion = config.clone();
        companion.resolution = coarse;
        companion.diagnostics.front = false;
        let low = simulate(&companion, &prep, coarse, None)?.entropy_trace()?;
        Some(classify_run(
            &[(coarse, &low), (config.resolution, &trace)],
            prep.t_final,
            &diag.thresholds,
        )?)
    } else {
        None
    };

    Ok(ExperimentRecord {
        id,
        digest: config.digest(),
        profile: spec.profile.name().to_string(),
        law: config.law.name().to_string(),
        theta_deg: spec.theta,
        k_b: spec.k_b,
        rho_b: spec.rho_b,
        sigma_l: config.sigma_l,
        sigma_r: config.sigma_r,
        s_predicted,
        s_measured,
        rel_error: s_measured.map(|s| (s - s_predicted).abs() / s_predicted),
        fit_residual,
        c_h: threshold_ch(&spec, &config.law, config.sigma_r)?,
        c_m: threshold_cm(&spec, &config.law, config.sigma_r)?,
        entropy_loss,
        classification,
        dispersion_proxy: dispersion_proxy(&spec),
        status,
        t_final: prep.t_final,
        entropy: diag.entropy.then_some(trace),
        front,
    })
}

/// Runs every configuration, concurrently, returning records in input order.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Vec<Result<ExperimentRecord>> {
    configs
        .par_iter()
        .enumerate()
        .map(|(id, c)| run_experiment_with(c, id, None))
        .collect()
}

/// Entropy losses of one configuration over several resolutions.
#[derive(Debug, Clone)]
pub struct EntropyStudy {
    pub resolutions: Vec<f64>,
    pub traces: Vec<EntropyTrace>,
    pub losses: Vec<f64>,
    pub t_probe: f64,
    pub classification: Option<RunClass>,
}

pub fn entropy_study(config: &ExperimentConfig, resolutions: &[f64]) -> Result<EntropyStudy> {
    if resolutions.is_empty() {
        return Err(Error::EmptySweep("resolutions"));
    }
    let prep = prepare(config)?;
    let mut traces = Vec::with_capacity(resolutions.len());
    for &r in resolutions {
        let mut c = config.clone();
        c.resolution = r;
        c.diagnostics.front = false;
        c.validate_static()?;
        traces.push(simulate(&c, &prep, r, None)?.entropy_trace()?);
    }
    let losses = traces
        .iter()
        .map(|t| t.loss_at(prep.t_final))
        .collect::<Result<Vec<_>>>()?;
    let classification = if resolutions.len() >= 2 {
        let pairs: Vec<_> = resolutions.iter().copied().zip(traces.iter()).collect();
        Some(classify_run(
            &pairs,
            prep.t_final,
            &config.diagnostics.thresholds,
        )?)
    } else {
        None
    };
    Ok(EntropyStudy {
        resolutions: resolutions.to_vec(),
        traces,
        losses,
        t_probe: prep.t_final,
        classification,
    })
}

/// The `y`-averaged 2D solution next to the homogenized 1D solution of the
/// same shock problem at `t_final`.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub t: f64,
    pub dx: f64,
    pub full: ColumnProfile,
    pub homogenized: ColumnProfile,
    pub front_full: Option<f64>,
    pub front_homogenized: Option<f64>,
}

impl Overlay {
    /// Columns `x, sigma_2d, u_2d, sigma_hom, u_hom`.
    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "sigma_2d", "u_2d", "sigma_hom", "u_hom"])?;
        for i in 0..self.full.x.len() {
            w.write_record([
                self.full.x[i].to_string(),
                self.full.sigma[i].to_string(),
                self.full.u[i].to_string(),
                self.homogenized.sigma[i].to_string(),
                self.homogenized.u[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn overlay(config: &ExperimentConfig) -> Result<Overlay> {
    let prep = prepare(config)?;
    let out = simulate(config, &prep, config.resolution, None)?;
    let full = y_average(out.final_state(), &config.law);
    let hom = run_homogenized(config)?;
    let homogenized = y_average(hom.final_state(), &config.law);
    let (sl, sr) = (config.sigma_l, config.sigma_r);
    Ok(Overlay {
        t: out.final_time(),
        dx: out.final_state().grid().dx,
        front_full: shock_position(&full.x, &full.sigma, sl, sr).ok(),
        front_homogenized: shock_position(&homogenized.x, &homogenized.sigma, sl, sr).ok(),
        full,
        homogenized,
    })
}

/// Homogenized one-dimensional run from the configuration's shock data.
pub fn run_homogenized(config: &ExperimentConfig) -> Result<RunOutput> {
    let prep = prepare(config)?;
    let med = effective_parameters(&prep.spec)?;
    let system = homogenized_system(&med, &config.law);
    let setup = prep.setup;
    let x0 = prep.x_front;
    let l = config.domain_length();
    let nx = (l * config.resolution).round().max(1.0) as usize;
    let state_cfg = config.solver_config(prep.t_final);
    let grid = Grid2D::line(nx, l)?;
    let mut state = StateField::uniform(grid, system.material());
    state.fill(|x, _, _| {
        if x < x0 {
            (setup.eps_l, setup.u_l, 0.0)
        } else {
            (setup.eps_r, setup.u_r, 0.0)
        }
    });
    let sim =
        Simulation::new(state, system.law, state_cfg)?.track_front(config.sigma_l, config.sigma_r);
    sim.run_with(|_, _| Ok(()))
}
