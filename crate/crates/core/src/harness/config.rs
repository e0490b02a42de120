use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{ClassifyThresholds, DEFAULT_FIT_WINDOW};
use crate::error::{Error, Result};
use crate::media::{ConstitutiveLaw, MediumSpec, Profile};
use crate::solver::{Limiter, SolverConfig};

/// Smallest allowed number of cells per material period.
pub const MIN_CELLS_PER_PERIOD: f64 = 8.0;
/// Fraction of the domain the predicted front must keep from the outflow end.
pub const BOUNDARY_MARGIN: f64 = 0.1;

fn default_resolution() -> f64 {
    64.0
}

fn yes() -> bool {
    true
}

fn default_samples() -> usize {
    100
}

fn default_fit_window() -> f64 {
    DEFAULT_FIT_WINDOW
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub front: bool,
    pub entropy: bool,
    /// Repeat the run at half resolution and classify from both entropy traces.
    pub classify: bool,
    /// Write the homogenized one-dimensional reference next to the 2D profile.
    pub overlay: bool,
    /// Number of diagnostic samples over the run.
    pub samples: usize,
    pub fit_window: f64,
    pub thresholds: ClassifyThresholds,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            front: yes(),
            entropy: yes(),
            classify: yes(),
            overlay: false,
            samples: default_samples(),
            fit_window: default_fit_window(),
            thresholds: ClassifyThresholds::default(),
        }
    }
}

/// Solver settings exposed in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub cfl_target: f64,
    pub limiter: Limiter,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            cfl_target: d.cfl_target,
            limiter: d.limiter,
            max_steps: d.max_steps,
        }
    }
}

/// One experiment: a right-going shock launched into a periodic medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub medium: MediumSpec,
    pub law: ConstitutiveLaw,
    /// Overrides the medium's angle when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub sigma_l: f64,
    #[serde(default)]
    pub sigma_r: f64,
    #[serde(default)]
    pub u_r: f64,
    /// Cells per unit length.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Length of the domain in `x`; 20 periods by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_length: Option<f64>,
    /// Initial shock location; a quarter of the domain by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_position: Option<f64>,
    /// Final time; by default the time at which the predicted front is
    /// `BOUNDARY_MARGIN` of the domain away from the outflow end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_interval: Option<f64>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl ExperimentConfig {
    pub fn new(medium: MediumSpec, law: ConstitutiveLaw, sigma_l: f64, sigma_r: f64) -> Self {
        Self {
            medium,
            law,
            theta: None,
            sigma_l,
            sigma_r,
            u_r: 0.0,
            resolution: default_resolution(),
            domain_length: None,
            front_position: None,
            t_final: None,
            snapshot_interval: None,
            diagnostics: DiagnosticsConfig::default(),
            solver: SolverOptions::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate_static()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Medium with the effective angle applied.
    pub fn spec(&self) -> MediumSpec {
        match self.theta {
            Some(t) => self.medium.with_theta(t),
            None => self.medium,
        }
    }

    pub fn theta(&self) -> f64 {
        self.spec().theta
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length.unwrap_or(20.0 * self.medium.period)
    }

    pub fn front_position(&self) -> f64 {
        self.front_position.unwrap_or(0.25 * self.domain_length())
    }

    /// Final time for a front moving at `speed`.
    pub fn final_time(&self, speed: f64) -> f64 {
        self.t_final.unwrap_or_else(|| {
            ((1.0 - BOUNDARY_MARGIN) * self.domain_length() - self.front_position()) / speed
        })
    }

    /// Checks that need no prediction.
    pub fn validate_static(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.spec().validate()?;
        self.law.validate()?;
        if !(self.sigma_l.is_finite() && self.sigma_r.is_finite() && self.u_r.is_finite()) {
            return bad("sigma_l, sigma_r and u_r must be finite".into());
        }
        if !(self.resolution * self.medium.period >= MIN_CELLS_PER_PERIOD) {
            return bad(format!(
                "resolution {} gives fewer than {MIN_CELLS_PER_PERIOD} cells per period {}",
                self.resolution, self.medium.period
            ));
        }
        let l = self.domain_length();
        if !(l > 0.0 && l.is_finite()) {
            return bad(format!("domain_length must be positive, got {l}"));
        }
        let x0 = self.front_position();
        if !(x0 > 0.0 && x0 < l) {
            return bad(format!("front_position {x0} must lie inside (0, {l})"));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_final must be positive, got {t}"));
            }
        }
        if self.diagnostics.samples < 2 {
            return bad("diagnostics.samples must be at least 2".into());
        }
        Ok(())
    }

    /// Checks that the predicted front stays clear of the outflow boundary.
    pub fn validate_for_speed(&self, speed: f64) -> Result<()> {
        let t = self.final_time(speed);
        let l = self.domain_length();
        let reach = self.front_position() + speed * t;
        if !(t > 0.0) || reach > (1.0 - BOUNDARY_MARGIN) * l * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "predicted front reaches x = {reach} by t = {t}, closer than {} of the domain to the boundary at {l}",
                BOUNDARY_MARGIN
            )));
        }
        Ok(())
    }

    /// Solver settings for a run ending at `t_final`.
    pub fn solver_config(&self, t_final: f64) -> SolverConfig {
        SolverConfig {
            cfl_target: self.solver.cfl_target,
            limiter: self.solver.limiter,
            max_steps: self.solver.max_steps,
            t_final,
            snapshot_interval: self.snapshot_interval,
            diagnostic_interval: Some(t_final / self.diagnostics.samples as f64),
            ..SolverConfig::default()
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Cartesian product of experiment parameters.
///
/// When `K_B` is omitted it follows `rho_B`, giving media whose two materials
/// share the same linear sound speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(rename = "rho_B")]
    pub rho_b: Vec<f64>,
    #[serde(rename = "K_B", default, skip_serializing_if = "Option::is_none")]
    pub k_b: Option<Vec<f64>>,
    pub sigma_l: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub theta: Vec<f64>,
    pub profile: Vec<Profile>,
    pub law: Vec<ConstitutiveLaw>,
    #[serde(rename = "K_A", default = "one")]
    pub k_a: f64,
    #[serde(rename = "rho_A", default = "one")]
    pub rho_a: f64,
    #[serde(default = "one")]
    pub period: f64,
    #[serde(default = "half")]
    pub fraction: f64,
    #[serde(default)]
    pub u_r: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_position: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl SweepSpec {
    /// The published grid for one angle, profile and law.
    pub fn paper_grid(theta: f64, profile: Profile, law: ConstitutiveLaw) -> Self {
        Self {
            rho_b: vec![2.0, 3.5, 5.0],
            k_b: Some(vec![2.0, 3.5, 5.0]),
            sigma_l: vec![2.0, 4.0, 8.0],
            sigma_r: vec![0.0, 0.5, 1.0],
            theta: vec![theta],
            profile: vec![profile],
            law: vec![law],
            k_a: 1.0,
            rho_a: 1.0,
            period: 1.0,
            fraction: 0.5,
            u_r: 0.0,
            resolution: default_resolution(),
            domain_length: None,
            front_position: None,
            t_final: None,
            diagnostics: DiagnosticsConfig::default(),
            solver: SolverOptions::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let dims: [(&'static str, usize); 6] = [
            ("rho_B", self.rho_b.len()),
            ("sigma_l", self.sigma_l.len()),
            ("sigma_r", self.sigma_r.len()),
            ("theta", self.theta.len()),
            ("profile", self.profile.len()),
            ("law", self.law.len()),
        ];
        for (name, n) in dims {
            if n == 0 {
                return Err(Error::EmptySweep(name));
            }
        }
        if matches!(&self.k_b, Some(v) if v.is_empty()) {
            return Err(Error::EmptySweep("K_B"));
        }
        Ok(())
    }

    /// Number of configurations the sweep expands to.
    pub fn len(&self) -> usize {
        let nk = self.k_b.as_ref().map_or(1, Vec::len);
        self.rho_b.len()
            * nk
            * self.sigma_l.len()
            * self.sigma_r.len()
            * self.theta.len()
            * self.profile.len()
            * self.law.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Cartesian product in the order `rho_B, K_B, sigma_l, sigma_r, theta,
/// profile, law`, the last varying fastest.
pub fn expand_sweep(sweep: &SweepSpec) -> Result<Vec<ExperimentConfig>> {
    sweep.validate()?;
    let mut out = Vec::with_capacity(sweep.len());
    for &rho_b in &sweep.rho_b {
        let k_list = sweep.k_b.clone().unwrap_or_else(|| vec![rho_b]);
        for &k_b in &k_list {
            for &sigma_l in &sweep.sigma_l {
                for &sigma_r in &sweep.sigma_r {
                    for &theta in &sweep.theta {
                        for &profile in &sweep.profile {
                            for &law in &sweep.law {
                                let medium = MediumSpec {
                                    profile,
                                    theta,
                                    period: sweep.period,
                                    k_a: sweep.k_a,
                                    k_b,
                                    rho_a: sweep.rho_a,
                                    rho_b,
                                    fraction: sweep.fraction,
                                };
                                let cfg = ExperimentConfig {
                                    u_r: sweep.u_r,
                                    resolution: sweep.resolution,
                                    domain_length: sweep.domain_length,
                                    front_position: sweep.front_position,
                                    t_final: sweep.t_final,
                                    diagnostics: sweep.diagnostics,
                                    solver: sweep.solver,
                                    ..ExperimentConfig::new(medium, law, sigma_l, sigma_r)
                                };
                                cfg.validate_static()?;
                                out.push(cfg);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
