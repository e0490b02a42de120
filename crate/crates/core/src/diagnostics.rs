//! Front tracking, speed measurement, the entropy functional and the
//! shock/regularized classification built on it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::ConstitutiveLaw;
use crate::solver::StateField;

/// Column profile along `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
}

/// Mean over `y` of stress and `x` velocity in every column.
pub fn y_average(state: &StateField, law: &ConstitutiveLaw) -> ColumnProfile {
    let g = *state.grid();
    let mut sigma = vec![0.0; g.nx];
    let mut u = vec![0.0; g.nx];
    let (eps, mom) = (state.eps(), state.mom_x());
    let (k, rho) = (state.stiffness(), state.density());
    for j in 0..g.ny {
        let row = j * g.nx;
        for i in 0..g.nx {
            sigma[i] += law.stress(k[row + i], eps[row + i]);
            u[i] += mom[row + i] / rho[row + i];
        }
    }
    let inv = 1.0 / g.ny as f64;
    sigma.iter_mut().for_each(|s| *s *= inv);
    u.iter_mut().for_each(|s| *s *= inv);
    ColumnProfile {
        x: (0..g.nx).map(|i| g.x_center(i)).collect(),
        sigma,
        u,
    }
}

/// Row `j` of the stress and velocity fields.
pub fn y_slice(state: &StateField, law: &ConstitutiveLaw, j: usize) -> ColumnProfile {
    let g = *state.grid();
    let row = j.min(g.ny - 1) * g.nx;
    let r = row..row + g.nx;
    let (eps, mom) = (&state.eps()[r.clone()], &state.mom_x()[r.clone()]);
    let (k, rho) = (&state.stiffness()[r.clone()], &state.density()[r]);
    ColumnProfile {
        x: (0..g.nx).map(|i| g.x_center(i)).collect(),
        sigma: eps.iter().zip(k).map(|(&e, &k)| law.stress(k, e)).collect(),
        u: mom.iter().zip(rho).map(|(&m, &r)| m / r).collect(),
    }
}

/// Rightmost crossing of the level `(sigma_l + sigma_r) / 2`, linearly
/// interpolated between the bracketing cell centres.
pub fn shock_position(x: &[f64], sigma: &[f64], sigma_l: f64, sigma_r: f64) -> Result<f64> {
    if sigma_l == sigma_r {
        return Err(Error::DegenerateShock);
    }
    let level = 0.5 * (sigma_l + sigma_r);
    let n = sigma.len().min(x.len());
    for i in (0..n.saturating_sub(1)).rev() {
        let (a, b) = (sigma[i] - level, sigma[i + 1] - level);
        if a == 0.0 && b != 0.0 {
            return Ok(x[i]);
        }
        if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) {
            let f = a / (a - b);
            return Ok(x[i] + f * (x[i + 1] - x[i]));
        }
    }
    Err(Error::FrontNotFound)
}

pub const DEFAULT_FIT_WINDOW: f64 = 0.5;
pub const MIN_FIT_SAMPLES: usize = 5;

/// Least-squares line through the trailing part of a front trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedFit {
    pub speed: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the fitted samples from the line.
    pub residual: f64,
    pub samples: usize,
}

/// Front positions over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// Fraction of trailing samples used by the fit.
    pub fit_window: f64,
    pub fitted_speed: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl Default for FrontTrace {
    fn default() -> Self {
        Self::new(DEFAULT_FIT_WINDOW)
    }
}

impl FrontTrace {
    pub fn new(fit_window: f64) -> Self {
        Self {
            times: Vec::new(),
            positions: Vec::new(),
            fit_window,
            fitted_speed: None,
            fit_residual: None,
        }
    }

    pub fn from_samples(times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        let mut t = Self::default();
        for (a, b) in times.into_iter().zip(positions) {
            t.push(a, b)?;
        }
        Ok(t)
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, t: f64, x: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::InvalidConfig(format!(
                    "front trace times must increase, got {t} after {last}"
                )));
            }
        }
        self.times.push(t);
        self.positions.push(x);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Fits the trailing window and stores the result on the trace.
    pub fn fit(&mut self) -> Result<SpeedFit> {
        let fit = measure_speed(self)?;
        self.fitted_speed = Some(fit.speed);
        self.fit_residual = Some(fit.residual);
        Ok(fit)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x_front"])?;
        for (t, x) in self.times.iter().zip(&self.positions) {
            w.write_record([t.to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Slope of position against time over the trailing `fit_window` of samples.
pub fn measure_speed(trace: &FrontTrace) -> Result<SpeedFit> {
    let n = trace.times.len();
    let take = ((n as f64 * trace.fit_window.clamp(0.0, 1.0)).ceil() as usize).min(n);
    if take < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            have: take,
            need: MIN_FIT_SAMPLES,
        });
    }
    let t = &trace.times[n - take..];
    let x = &trace.positions[n - take..];
    let m = take as f64;
    let tm = t.iter().sum::<f64>() / m;
    let xm = x.iter().sum::<f64>() / m;
    let (mut stt, mut stx) = (0.0, 0.0);
    for (&ti, &xi) in t.iter().zip(x) {
        stt += (ti - tm) * (ti - tm);
        stx += (ti - tm) * (xi - xm);
    }
    let speed = stx / stt;
    let intercept = xm - speed * tm;
    let ss = t
        .iter()
        .zip(x)
        .map(|(&ti, &xi)| {
            let r = xi - (intercept + speed * ti);
            r * r
        })
        .sum::<f64>();
    Ok(SpeedFit {
        speed,
        intercept,
        residual: (ss / m).sqrt(),
        samples: take,
    })
}

/// Midpoint sum of `1/2 rho (u^2 + v^2) + W(K, eps)` over all cells.
pub fn entropy(state: &StateField, law: &ConstitutiveLaw) -> f64 {
    entropy_impl(state, law, true)
}

/// As [`entropy`] with the kinetic term restricted to `u`.
pub fn entropy_1d(state: &StateField, law: &ConstitutiveLaw) -> f64 {
    entropy_impl(state, law, false)
}

fn entropy_impl(state: &StateField, law: &ConstitutiveLaw, with_v: bool) -> f64 {
    let g = *state.grid();
    let (eps, mx, my) = (state.eps(), state.mom_x(), state.mom_y());
    let (k, rho) = (state.stiffness(), state.density());
    let mut total = 0.0;
    for j in 0..g.ny {
        let mut row = 0.0;
        for c in j * g.nx..(j + 1) * g.nx {
            let mut p2 = mx[c] * mx[c];
            if with_v {
                p2 += my[c] * my[c];
            }
            row += 0.5 * p2 / rho[c] + law.stress_potential(k[c], eps[c]);
        }
        total += row;
    }
    total * g.cell_area()
}

/// Entropy history of a run.
///
/// `boundary_work` is the time integral of the net power flowing in through
/// the domain boundary, so `eta - boundary_work` changes only through
/// dissipation. It is identically zero for closed domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta0: f64,
    pub normalized: Vec<f64>,
    pub boundary_work: Vec<f64>,
}

impl EntropyTrace {
    pub fn new(times: Vec<f64>, eta: Vec<f64>, boundary_work: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != eta.len() || eta.len() != boundary_work.len() {
            return Err(Error::InsufficientSamples {
                have: times.len().min(eta.len()).min(boundary_work.len()),
                need: 1,
            });
        }
        let eta0 = eta[0];
        let normalized = eta.iter().map(|e| e / eta0).collect();
        Ok(Self {
            times,
            eta,
            eta0,
            normalized,
            boundary_work,
        })
    }

    /// Trace of a closed system.
    pub fn closed(times: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        let w = vec![0.0; times.len()];
        Self::new(times, eta, w)
    }

    /// `(eta - boundary_work) / eta0` per sample.
    pub fn balanced_normalized(&self) -> Vec<f64> {
        self.eta
            .iter()
            .zip(&self.boundary_work)
            .map(|(e, w)| (e - w) / self.eta0)
            .collect()
    }

    fn sample_at(&self, t_probe: f64) -> Result<usize> {
        let tol = 1e-9 * t_probe.abs().max(1.0);
        self.times
            .iter()
            .position(|&t| (t - t_probe).abs() <= tol)
            .ok_or(Error::MismatchedProbe { t_probe })
    }

    /// Dissipated fraction `1 - (eta(t) - W(t)) / eta(0)` at a sampled time.
    pub fn loss_at(&self, t_probe: f64) -> Result<f64> {
        let k = self.sample_at(t_probe)?;
        Ok(1.0 - (self.eta[k] - self.boundary_work[k]) / self.eta0)
    }

    pub fn final_loss(&self) -> f64 {
        let k = self.times.len() - 1;
        1.0 - (self.eta[k] - self.boundary_work[k]) / self.eta0
    }

    /// Columns `t, eta, eta_normalized, boundary_work, eta_balanced_normalized`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "eta",
            "eta_normalized",
            "boundary_work",
            "eta_balanced_normalized",
        ])?;
        let bal = self.balanced_normalized();
        for (k, b) in bal.iter().enumerate() {
            w.write_record([
                self.times[k].to_string(),
                self.eta[k].to_string(),
                self.normalized[k].to_string(),
                self.boundary_work[k].to_string(),
                b.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunClass {
    Shock,
    Regularized,
    Indeterminate,
}

impl RunClass {
    pub fn name(&self) -> &'static str {
        match self {
            RunClass::Shock => "shock",
            RunClass::Regularized => "regularized",
            RunClass::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyThresholds {
    /// Minimum fine-grid loss for a shock.
    pub tau_abs: f64,
    /// Fine loss must keep at least this fraction of the coarse loss.
    pub rho_persist: f64,
    /// Fine loss at most this fraction of the coarse loss means regularized.
    pub kappa: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self {
            tau_abs: 0.01,
            rho_persist: 0.8,
            kappa: 0.6,
        }
    }
}

/// Classification from the entropy losses on a coarse and a fine grid.
pub fn classify_losses(coarse: f64, fine: f64, th: &ClassifyThresholds) -> RunClass {
    if fine > th.tau_abs && fine >= th.rho_persist * coarse {
        RunClass::Shock
    } else if fine <= th.kappa * coarse {
        RunClass::Regularized
    } else {
        RunClass::Indeterminate
    }
}

/// Classifies a run from entropy traces at several resolutions (cells per
/// unit length), comparing the two finest.
pub fn classify_run(
    traces: &[(f64, &EntropyTrace)],
    t_probe: f64,
    th: &ClassifyThresholds,
) -> Result<RunClass> {
    if traces.len() < 2 {
        return Err(Error::InvalidClassification(format!(
            "need traces at two resolutions, got {}",
            traces.len()
        )));
    }
    let mut sorted: Vec<_> = traces.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (rc, coarse) = sorted[sorted.len() - 2];
    let (rf, fine) = sorted[sorted.len() - 1];
    if rf < 2.0 * rc * (1.0 - 1e-12) {
        return Err(Error::InvalidClassification(format!(
            "resolutions {rc} and {rf} differ by less than a factor of two"
        )));
    }
    Ok(classify_losses(
        coarse.loss_at(t_probe)?,
        fine.loss_at(t_probe)?,
        th,
    ))
}
