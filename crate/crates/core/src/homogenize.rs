//! Effective material parameters of a periodic medium and the leading-order
//! constant-coefficient system they define.
//!
//! All averages are taken over one period in the `xi` coordinate. The angle
//! only enters through the effective density, which interpolates between the
//! harmonic mean (propagation along the layers) and the arithmetic mean
//! (propagation across them).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{sin_cos_deg, ConstitutiveLaw, Material, MediumSpec, Profile};

/// Absolute tolerance of the period quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

const QUADRATURE_START: usize = 16;
const QUADRATURE_MAX: usize = 1 << 22;

/// Mean of a 1-periodic function over `[0, 1)` by the composite midpoint rule,
/// doubling the number of nodes until two successive estimates agree to `tol`.
pub fn periodic_mean(f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let midpoint = |n: usize| {
        let h = 1.0 / n as f64;
        (0..n).map(|k| f((k as f64 + 0.5) * h)).sum::<f64>() * h
    };
    let mut n = QUADRATURE_START;
    let mut prev = midpoint(n);
    while n < QUADRATURE_MAX {
        n *= 2;
        let next = midpoint(n);
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence { tol, points: n })
}

/// Average of `f(material(xi))` over one period.
///
/// Layered media use the exact two-term sum; smooth media use [`periodic_mean`].
pub fn period_average(spec: &MediumSpec, f: impl Fn(Material) -> f64) -> Result<f64> {
    match spec.profile {
        Profile::Layered => {
            let phi = spec.fraction;
            Ok(phi * f(spec.material_a()) + (1.0 - phi) * f(spec.material_b()))
        }
        Profile::Sinusoidal => period_average_by_quadrature(spec, f),
    }
}

/// Average over one period by quadrature regardless of the profile.
pub fn period_average_by_quadrature(spec: &MediumSpec, f: impl Fn(Material) -> f64) -> Result<f64> {
    periodic_mean(|phase| f(spec.material_at_phase(phase)), QUADRATURE_TOL)
}

/// `<z^-1>^-1` over one period.
pub fn harmonic_average(spec: &MediumSpec, f: impl Fn(Material) -> f64) -> Result<f64> {
    Ok(1.0 / period_average(spec, |m| 1.0 / f(m))?)
}

/// Homogenized coefficients of a periodic medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMedium {
    /// Harmonic mean of the bulk modulus.
    pub k_bar: f64,
    /// Arithmetic mean of the density.
    pub rho_m: f64,
    /// Harmonic mean of the density.
    pub rho_h: f64,
    /// Effective density along the propagation direction at `theta`.
    pub rho_bar: f64,
    pub theta: f64,
    /// Long-wavelength linear speed `sqrt(k_bar / rho_m)`.
    pub c_eff: f64,
}

impl EffectiveMedium {
    /// Constant-coefficient medium, e.g. to pose a problem directly in
    /// homogenized form.
    pub fn uniform(k: f64, rho: f64) -> Self {
        Self {
            k_bar: k,
            rho_m: rho,
            rho_h: rho,
            rho_bar: rho,
            theta: 90.0,
            c_eff: (k / rho).sqrt(),
        }
    }

    /// Same averages, different propagation angle.
    pub fn at_angle(&self, theta: f64) -> Self {
        Self {
            rho_bar: density_at_angle(self.rho_h, self.rho_m, theta),
            theta,
            ..*self
        }
    }
}

/// `(rho_h^-1 cos^2 theta + rho_m^-1 sin^2 theta)^-1`.
pub fn density_at_angle(rho_h: f64, rho_m: f64, theta: f64) -> f64 {
    let (s, c) = sin_cos_deg(theta);
    if s == 0.0 {
        rho_h
    } else if c == 0.0 {
        rho_m
    } else {
        1.0 / (c * c / rho_h + s * s / rho_m)
    }
}

pub fn effective_parameters(spec: &MediumSpec) -> Result<EffectiveMedium> {
    spec.validate()?;
    let (k_bar, rho_m, rho_h) = match spec.profile {
        Profile::Layered => {
            let phi = spec.fraction;
            (
                1.0 / (phi / spec.k_a + (1.0 - phi) / spec.k_b),
                phi * spec.rho_a + (1.0 - phi) * spec.rho_b,
                1.0 / (phi / spec.rho_a + (1.0 - phi) / spec.rho_b),
            )
        }
        Profile::Sinusoidal => (
            1.0 / period_average_by_quadrature(spec, |m| 1.0 / m.stiffness)?,
            period_average_by_quadrature(spec, |m| m.density)?,
            1.0 / period_average_by_quadrature(spec, |m| 1.0 / m.density)?,
        ),
    };
    Ok(EffectiveMedium {
        k_bar,
        rho_m,
        rho_h,
        rho_bar: density_at_angle(rho_h, rho_m, spec.theta),
        theta: spec.theta,
        c_eff: (k_bar / rho_m).sqrt(),
    })
}

/// Effective density of `spec` for propagation at angle `theta`.
pub fn effective_density(spec: &MediumSpec, theta: f64) -> Result<f64> {
    if !(0.0..=90.0).contains(&theta) {
        return Err(Error::InvalidMedium(format!(
            "theta must lie in [0, 90] degrees, got {theta}"
        )));
    }
    let med = effective_parameters(spec)?;
    Ok(density_at_angle(med.rho_h, med.rho_m, theta))
}

/// One-dimensional conservation law `eps_t - u_x = 0`, `rho_bar u_t - sigma_bar(eps)_x = 0`
/// with `sigma_bar(eps) = f(k_bar eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogenizedSystem {
    pub k_bar: f64,
    pub density: f64,
    pub law: ConstitutiveLaw,
}

impl HomogenizedSystem {
    pub fn stress(&self, eps: f64) -> f64 {
        self.law.stress(self.k_bar, eps)
    }

    pub fn inverse_stress(&self, sigma: f64) -> Result<f64> {
        self.law.inverse_stress(self.k_bar, sigma)
    }

    pub fn sound_speed(&self, eps: f64) -> Result<f64> {
        self.law.sound_speed(self.k_bar, self.density, eps)
    }

    /// Flux `(-u, -sigma_bar(eps))` of the conserved pair `(eps, rho_bar u)`.
    pub fn flux(&self, eps: f64, momentum: f64) -> [f64; 2] {
        [-momentum / self.density, -self.stress(eps)]
    }

    pub fn material(&self) -> Material {
        Material::new(self.k_bar, self.density)
    }
}

pub fn homogenized_system(med: &EffectiveMedium, law: &ConstitutiveLaw) -> HomogenizedSystem {
    HomogenizedSystem {
        k_bar: med.k_bar,
        density: med.rho_bar,
        law: *law,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn density_interpolates_between_means() {
        let spec = MediumSpec::layered(1.0, 1.0, 1.0, 4.0);
        let med = effective_parameters(&spec).unwrap();
        assert_eq!(effective_density(&spec, 90.0).unwrap(), med.rho_m);
        assert_eq!(effective_density(&spec, 0.0).unwrap(), med.rho_h);
        let mut last = 0.0;
        for k in 0..=90 {
            let r = effective_density(&spec, k as f64).unwrap();
            assert!(r >= med.rho_h * (1.0 - 1e-15) && r <= med.rho_m * (1.0 + 1e-15));
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn homogeneous_medium_has_trivial_averages() {
        let spec = MediumSpec::homogeneous(2.0, 3.0).with_theta(33.0);
        let med = effective_parameters(&spec).unwrap();
        assert!(close(med.k_bar, 2.0, 1e-15));
        for v in [med.rho_m, med.rho_h, med.rho_bar] {
            assert!(close(v, 3.0, 1e-15));
        }
        let sin = MediumSpec::sinusoidal(2.0, 3.0, 2.0, 3.0);
        let med = effective_parameters(&sin).unwrap();
        assert!(close(med.k_bar, 2.0, 1e-14));
        assert!(close(med.rho_bar, 3.0, 1e-14));
    }

    #[test]
    fn sinusoidal_stiffness_matches_closed_form() {
        let spec = MediumSpec::sinusoidal(1.0, 1.0, 5.0, 1.0);
        let med = effective_parameters(&spec).unwrap();
        assert!(close(med.k_bar, 5f64.sqrt(), 1e-10));
    }

    #[test]
    fn layered_example_values() {
        let spec = MediumSpec::layered(1.0, 1.0, 4.0, 4.0).with_theta(45.0);
        let med = effective_parameters(&spec).unwrap();
        assert!(close(med.k_bar, 1.6, 1e-15));
        assert!(close(med.rho_bar, 1.0 / (0.5 / 1.6 + 0.5 / 2.5), 1e-14));
        assert!(close(med.c_eff, (1.6f64 / 2.5).sqrt(), 1e-15));
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        // tolerance far below what the doubling can reach for a jump
        let spec = MediumSpec::layered(1.0, 1.0, 2.0, 1.0).with_fraction(1.0 / 3.0);
        let err = period_average_by_quadrature(&spec, |m| m.stiffness).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn homogenized_system_uses_effective_stiffness() {
        let spec = MediumSpec::layered(1.0, 1.0, 4.0, 1.0);
        let med = effective_parameters(&spec).unwrap();
        let sys = homogenized_system(&med, &ConstitutiveLaw::Exponential);
        assert!(close(sys.stress(0.3), (1.6f64 * 0.3).exp() - 1.0, 1e-14));
        let lin = homogenized_system(&med, &ConstitutiveLaw::linear());
        assert!(close(lin.sound_speed(0.7).unwrap(), med.c_eff, 1e-15));
    }
}
