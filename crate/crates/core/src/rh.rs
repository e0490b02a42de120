//! Rankine-Hugoniot conditions for the homogenized system.
//!
//! Jumps follow `[q] = q_l - q_r`. For the homogenized system
//! `eps_t - u_x = 0`, `rho_bar u_t - sigma_bar_x = 0` a discontinuity moving at
//! speed `s` satisfies
//!
//! ```text
//! s [eps] = -[u],    rho_bar s [u] = -[sigma_bar],
//! ```
//!
//! so `s = +-sqrt([sigma_bar] / (rho_bar [eps]))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogenize::{effective_parameters, harmonic_average, period_average, EffectiveMedium};
use crate::media::{ConstitutiveLaw, MediumSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Left => -1.0,
            Direction::Right => 1.0,
        }
    }
}

/// `[sigma] / [eps]` for the effective stiffness, checked for sign.
fn chord_slope(sigma_l: f64, sigma_r: f64, law: &ConstitutiveLaw, k: f64) -> Result<(f64, f64)> {
    if sigma_l == sigma_r {
        return Err(Error::DegenerateShock);
    }
    let eps_l = law.inverse_stress(k, sigma_l)?;
    let eps_r = law.inverse_stress(k, sigma_r)?;
    let jump_eps = eps_l - eps_r;
    if jump_eps == 0.0 {
        return Err(Error::DegenerateShock);
    }
    let ratio = (sigma_l - sigma_r) / jump_eps;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::NonPhysicalJump { ratio });
    }
    Ok((ratio, jump_eps))
}

/// Shock speed `+-sqrt([sigma_bar] / (rho_bar [eps]))` with strains from the
/// effective stiffness.
pub fn effective_shock_speed(
    sigma_l: f64,
    sigma_r: f64,
    law: &ConstitutiveLaw,
    med: &EffectiveMedium,
    direction: Direction,
) -> Result<f64> {
    let (ratio, _) = chord_slope(sigma_l, sigma_r, law, med.k_bar)?;
    Ok(direction.sign() * (ratio / med.rho_bar).sqrt())
}

/// Left and right states joined by a single homogenized shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockSetup {
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub u_l: f64,
    pub u_r: f64,
    pub eps_l: f64,
    pub eps_r: f64,
    /// Predicted shock speed `s_eff`.
    pub speed: f64,
    pub law: ConstitutiveLaw,
    pub medium: EffectiveMedium,
}

impl ShockSetup {
    /// Residuals of the two jump conditions,
    /// `s [eps] + [u]` and `rho_bar s [u] + [sigma_bar]`.
    pub fn rh_residuals(&self) -> [f64; 2] {
        let jump_eps = self.eps_l - self.eps_r;
        let jump_u = self.u_l - self.u_r;
        let jump_sigma = self.law.stress(self.medium.k_bar, self.eps_l)
            - self.law.stress(self.medium.k_bar, self.eps_r);
        [
            self.speed * jump_eps + jump_u,
            self.medium.rho_bar * self.speed * jump_u + jump_sigma,
        ]
    }
}

/// Builds the right-going shock joining `sigma_l` to the downstream state
/// `(sigma_r, u_r)`: `u_l = u_r - s [eps]`, which is
/// `u_r - sqrt([sigma_bar][eps] / rho_bar)` for compressive jumps (`[eps] > 0`).
pub fn connect_right_going(
    sigma_l: f64,
    sigma_r: f64,
    u_r: f64,
    law: &ConstitutiveLaw,
    med: &EffectiveMedium,
) -> Result<ShockSetup> {
    let (ratio, jump_eps) = chord_slope(sigma_l, sigma_r, law, med.k_bar)?;
    let speed = (ratio / med.rho_bar).sqrt();
    let eps_l = law.inverse_stress(med.k_bar, sigma_l)?;
    let eps_r = law.inverse_stress(med.k_bar, sigma_r)?;
    Ok(ShockSetup {
        sigma_l,
        sigma_r,
        u_l: u_r - speed * jump_eps,
        u_r,
        eps_l,
        eps_r,
        speed,
        law: *law,
        medium: *med,
    })
}

/// Transverse-propagation estimate `sqrt(H / rho_m)` where `H` is the harmonic
/// period average of the local chord slope `[sigma] / [eps](xi)`.
pub fn legacy_transverse_speed(
    spec: &MediumSpec,
    law: &ConstitutiveLaw,
    sigma_l: f64,
    sigma_r: f64,
) -> Result<f64> {
    spec.validate()?;
    if sigma_l == sigma_r {
        return Err(Error::DegenerateShock);
    }
    let jump_w = law.stress_hat_inverse(sigma_l)? - law.stress_hat_inverse(sigma_r)?;
    let jump_sigma = sigma_l - sigma_r;
    let slope = |k: f64| jump_sigma / (jump_w / k);
    let h = harmonic_average(spec, |m| slope(m.stiffness))?;
    if !(h > 0.0) {
        return Err(Error::NonPhysicalJump { ratio: h });
    }
    let rho_m = period_average(spec, |m| m.density)?;
    Ok((h / rho_m).sqrt())
}

/// Variant of the mean threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanThreshold {
    /// Arithmetic period mean of the downstream sound speed (a speed).
    #[default]
    MeanSoundSpeed,
    /// Period mean of `K f'(w_r) / rho`, i.e. of the squared sound speed.
    MeanSquaredSpeed,
}

/// Local downstream sound speed at every point of the period, for a uniform
/// downstream stress.
fn downstream_speed(law: &ConstitutiveLaw, sigma_r: f64) -> Result<impl Fn(f64, f64) -> f64> {
    let slope = law.g_of_sigma(sigma_r)?;
    if !(slope > 0.0) {
        return Err(Error::HyperbolicityLoss {
            arg: law.stress_hat_inverse(sigma_r)?,
            slope,
        });
    }
    Ok(move |k: f64, rho: f64| (k * slope / rho).sqrt())
}

/// Harmonic period mean of the downstream sound speed.
pub fn threshold_ch(spec: &MediumSpec, law: &ConstitutiveLaw, sigma_r: f64) -> Result<f64> {
    let c = downstream_speed(law, sigma_r)?;
    harmonic_average(spec, |m| c(m.stiffness, m.density))
}

/// Arithmetic period mean of the downstream sound speed.
pub fn threshold_cm(spec: &MediumSpec, law: &ConstitutiveLaw, sigma_r: f64) -> Result<f64> {
    threshold_cm_variant(spec, law, sigma_r, MeanThreshold::MeanSoundSpeed)
}

pub fn threshold_cm_variant(
    spec: &MediumSpec,
    law: &ConstitutiveLaw,
    sigma_r: f64,
    variant: MeanThreshold,
) -> Result<f64> {
    let c = downstream_speed(law, sigma_r)?;
    match variant {
        MeanThreshold::MeanSoundSpeed => period_average(spec, |m| c(m.stiffness, m.density)),
        MeanThreshold::MeanSquaredSpeed => {
            period_average(spec, |m| c(m.stiffness, m.density).powi(2))
        }
    }
}

/// Everything `predict-speed` reports for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedPrediction {
    pub s_eff: f64,
    pub u_l: f64,
    pub eps_l: f64,
    pub eps_r: f64,
    pub c_h: f64,
    pub c_m: f64,
    pub c_eff: f64,
}

pub fn predict(
    spec: &MediumSpec,
    law: &ConstitutiveLaw,
    sigma_l: f64,
    sigma_r: f64,
    u_r: f64,
) -> Result<SpeedPrediction> {
    let med = effective_parameters(spec)?;
    let setup = connect_right_going(sigma_l, sigma_r, u_r, law, &med)?;
    Ok(SpeedPrediction {
        s_eff: setup.speed,
        u_l: setup.u_l,
        eps_l: setup.eps_l,
        eps_r: setup.eps_r,
        c_h: threshold_ch(spec, law, sigma_r)?,
        c_m: threshold_cm(spec, law, sigma_r)?,
        c_eff: med.c_eff,
    })
}

/// Upstream stress `sigma_l > sigma_r` whose right-going effective shock
/// travels at `target` (bisection; the speed increases with `sigma_l` for the
/// convex laws considered here).
pub fn left_stress_for_speed(
    target: f64,
    sigma_r: f64,
    law: &ConstitutiveLaw,
    med: &EffectiveMedium,
) -> Result<f64> {
    let speed = |sl: f64| effective_shock_speed(sl, sigma_r, law, med, Direction::Right);
    let mut lo = sigma_r;
    let mut step = 1.0_f64.max(sigma_r.abs());
    let mut hi = sigma_r + step;
    let mut tries = 0;
    while speed(hi)? < target {
        lo = hi;
        step *= 2.0;
        hi = sigma_r + step;
        tries += 1;
        if tries > 60 {
            return Err(Error::BracketFailure { sigma: hi });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        // the lower end may still be the degenerate sigma_r itself
        let below = if mid == sigma_r {
            true
        } else {
            speed(mid)? < target
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> EffectiveMedium {
        EffectiveMedium::uniform(1.0, 1.0)
    }

    #[test]
    fn exponential_unit_speed() {
        let s = effective_shock_speed(
            1.0,
            0.0,
            &ConstitutiveLaw::Exponential,
            &unit(),
            Direction::Right,
        )
        .unwrap();
        assert!((s - (1.0 / std::f64::consts::LN_2).sqrt()).abs() < 1e-14);
        let s_left = effective_shock_speed(
            1.0,
            0.0,
            &ConstitutiveLaw::Exponential,
            &unit(),
            Direction::Left,
        )
        .unwrap();
        assert_eq!(s_left, -s);
    }

    #[test]
    fn linear_law_speed_is_effective_sound_speed() {
        let med = effective_parameters(&MediumSpec::layered(1.0, 2.0, 4.0, 3.0).with_theta(30.0))
            .unwrap();
        let s = effective_shock_speed(
            0.7,
            -0.2,
            &ConstitutiveLaw::linear(),
            &med,
            Direction::Right,
        )
        .unwrap();
        assert!((s - (med.k_bar / med.rho_bar).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_and_nonphysical_jumps() {
        let law = ConstitutiveLaw::Exponential;
        assert!(matches!(
            effective_shock_speed(0.5, 0.5, &law, &unit(), Direction::Right),
            Err(Error::DegenerateShock)
        ));
        assert!(matches!(
            connect_right_going(0.5, 0.5, 0.0, &law, &unit()),
            Err(Error::DegenerateShock)
        ));
        assert!(matches!(
            effective_shock_speed(-2.0, 0.0, &law, &unit(), Direction::Right),
            Err(Error::StressOutOfRange { .. })
        ));
    }

    #[test]
    fn connection_satisfies_jump_conditions() {
        let law = ConstitutiveLaw::Exponential;
        let setup = connect_right_going(1.0, 0.0, 0.0, &law, &unit()).unwrap();
        assert!((setup.u_l + std::f64::consts::LN_2.sqrt()).abs() < 1e-14);
        let [r1, r2] = setup.rh_residuals();
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
        // expansive jump: the sign of [u] follows [eps]
        let setup = connect_right_going(0.0, 1.0, 0.3, &law, &unit()).unwrap();
        let [r1, r2] = setup.rh_residuals();
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
        assert!(setup.u_l > setup.u_r);
    }

    #[test]
    fn thresholds_for_matched_impedance_layers() {
        let spec = MediumSpec::layered(1.0, 1.0, 4.0, 0.25);
        let law = ConstitutiveLaw::Exponential;
        assert!((threshold_ch(&spec, &law, 0.0).unwrap() - 1.6).abs() < 1e-14);
        assert!((threshold_cm(&spec, &law, 0.0).unwrap() - 2.5).abs() < 1e-14);
        let sq = threshold_cm_variant(&spec, &law, 0.0, MeanThreshold::MeanSquaredSpeed).unwrap();
        assert!((sq - 8.5).abs() < 1e-14);
    }

    #[test]
    fn thresholds_in_homogeneous_medium() {
        let spec = MediumSpec::homogeneous(1.0, 1.0);
        let law = ConstitutiveLaw::Exponential;
        assert!((threshold_ch(&spec, &law, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let c = law
            .sound_speed(1.0, 1.0, law.inverse_stress(1.0, 0.5).unwrap())
            .unwrap();
        assert!((threshold_ch(&spec, &law, 0.5).unwrap() - c).abs() < 1e-14);
        assert!((threshold_cm(&spec, &law, 0.5).unwrap() - c).abs() < 1e-14);
    }

    #[test]
    fn legacy_speed_collapses_for_homogeneous_medium() {
        let spec = MediumSpec::homogeneous(2.0, 3.0);
        let law = ConstitutiveLaw::Exponential;
        let (sl, sr) = (2.0, 0.5);
        let jump_eps = law.inverse_stress(2.0, sl).unwrap() - law.inverse_stress(2.0, sr).unwrap();
        let expected = ((sl - sr) / (3.0 * jump_eps)).sqrt();
        let s = legacy_transverse_speed(&spec, &law, sl, sr).unwrap();
        assert!((s - expected).abs() < 1e-14);
    }

    #[test]
    fn inverts_speed_for_left_stress() {
        let spec = MediumSpec::layered(1.0, 1.0, 4.0, 4.0);
        let med = effective_parameters(&spec).unwrap();
        let law = ConstitutiveLaw::Exponential;
        for target in [0.85, 0.95, 1.05, 1.6] {
            let sl = left_stress_for_speed(target, 0.0, &law, &med).unwrap();
            let s = effective_shock_speed(sl, 0.0, &law, &med, Direction::Right).unwrap();
            assert!((s - target).abs() < 1e-12, "{target} -> {s}");
        }
    }
}
