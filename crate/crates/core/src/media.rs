//! Periodic material fields and nonlinear constitutive laws.
//!
//! A medium varies along a single direction `xi = x sin(theta) + y cos(theta)`
//! with period `period`. Stress depends on strain through `sigma = f(K eps)`,
//! where `f` is one of the [`ConstitutiveLaw`] shapes and `K` is the local bulk
//! modulus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local material coefficients at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Bulk modulus `K`.
    pub stiffness: f64,
    /// Density `rho`.
    pub density: f64,
}

impl Material {
    pub const fn new(stiffness: f64, density: f64) -> Self {
        Self { stiffness, density }
    }

    /// Linearised impedance `sqrt(K rho)` (stress slope at zero strain taken as one).
    pub fn linear_impedance(&self) -> f64 {
        (self.stiffness * self.density).sqrt()
    }

    /// Linearised sound speed `sqrt(K / rho)`.
    pub fn linear_speed(&self) -> f64 {
        (self.stiffness / self.density).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Piecewise constant: material A then material B within each period.
    Layered,
    /// `mean + amplitude * sin(2 pi xi / period)` for both coefficients.
    Sinusoidal,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Layered => "layered",
            Profile::Sinusoidal => "sinusoidal",
        }
    }
}

fn default_period() -> f64 {
    1.0
}

fn default_fraction() -> f64 {
    0.5
}

/// Description of a periodic two-material medium.
///
/// Field names in configuration files follow the usual notation
/// (`K_A`, `rho_A`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub profile: Profile,
    /// Angle between the propagation direction and the layers, in degrees.
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_period")]
    pub period: f64,
    #[serde(rename = "K_A")]
    pub k_a: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
    #[serde(rename = "rho_A")]
    pub rho_a: f64,
    #[serde(rename = "rho_B")]
    pub rho_b: f64,
    /// Volume fraction of material A (layered profile only).
    #[serde(default = "default_fraction")]
    pub fraction: f64,
}

/// Exact sine and cosine of an angle in degrees at the two axis-aligned
/// orientations, library trigonometry elsewhere.
pub fn sin_cos_deg(theta: f64) -> (f64, f64) {
    if theta == 0.0 {
        (0.0, 1.0)
    } else if theta == 90.0 {
        (1.0, 0.0)
    } else {
        theta.to_radians().sin_cos()
    }
}

impl MediumSpec {
    pub fn layered(k_a: f64, rho_a: f64, k_b: f64, rho_b: f64) -> Self {
        Self {
            profile: Profile::Layered,
            theta: 90.0,
            period: 1.0,
            k_a,
            k_b,
            rho_a,
            rho_b,
            fraction: 0.5,
        }
    }

    pub fn sinusoidal(k_a: f64, rho_a: f64, k_b: f64, rho_b: f64) -> Self {
        Self {
            profile: Profile::Sinusoidal,
            ..Self::layered(k_a, rho_a, k_b, rho_b)
        }
    }

    /// A medium with identical A and B materials.
    pub fn homogeneous(k: f64, rho: f64) -> Self {
        Self::layered(k, rho, k, rho)
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = period;
        self
    }

    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.fraction = fraction;
        self
    }

    pub fn material_a(&self) -> Material {
        Material::new(self.k_a, self.rho_a)
    }

    pub fn material_b(&self) -> Material {
        Material::new(self.k_b, self.rho_b)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.k_a == self.k_b && self.rho_a == self.rho_b
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("K_A", self.k_a),
            ("K_B", self.k_b),
            ("rho_A", self.rho_a),
            ("rho_B", self.rho_b),
            ("period", self.period),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidMedium(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return Err(Error::InvalidMedium(format!(
                "fraction must lie in (0, 1), got {}",
                self.fraction
            )));
        }
        if !(0.0..=90.0).contains(&self.theta) {
            return Err(Error::InvalidMedium(format!(
                "theta must lie in [0, 90] degrees, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Coordinate along the direction of periodicity.
    pub fn xi(&self, x: f64, y: f64) -> f64 {
        let (s, c) = sin_cos_deg(self.theta);
        x * s + y * c
    }

    /// Position within the period, in `[0, 1)`.
    pub fn phase(&self, xi: f64) -> f64 {
        let p = xi.rem_euclid(self.period) / self.period;
        if p >= 1.0 {
            0.0
        } else {
            p
        }
    }

    /// Material at a phase in `[0, 1)` of the period.
    pub fn material_at_phase(&self, phase: f64) -> Material {
        match self.profile {
            Profile::Layered => {
                if phase < self.fraction {
                    self.material_a()
                } else {
                    self.material_b()
                }
            }
            Profile::Sinusoidal => {
                let s = (2.0 * std::f64::consts::PI * phase).sin();
                Material::new(
                    0.5 * (self.k_a + self.k_b) + 0.5 * (self.k_a - self.k_b).abs() * s,
                    0.5 * (self.rho_a + self.rho_b) + 0.5 * (self.rho_a - self.rho_b).abs() * s,
                )
            }
        }
    }

    /// Material at the point `(x, y)`.
    ///
    /// Material A occupies the first `fraction` of every period, starting at
    /// `xi = 0`.
    pub fn material_at(&self, x: f64, y: f64) -> Material {
        self.material_at_phase(self.phase(self.xi(x, y)))
    }

    /// Divides the coefficients by those of material A.
    pub fn normalize(&self) -> (MediumSpec, Scaling) {
        let scaled = MediumSpec {
            k_a: 1.0,
            rho_a: 1.0,
            k_b: self.k_b / self.k_a,
            rho_b: self.rho_b / self.rho_a,
            ..*self
        };
        (scaled, Scaling::new(self.k_a, self.rho_a))
    }
}

/// Scale factors relating a medium to its normalized form.
///
/// With `K~ = K / K_A`, `rho~ = rho / rho_A`:
/// - strain: `eps~ = K_A eps`,
/// - stress flux factor: `sigma~ = (K_A / rho_A) sigma` when time is left unscaled,
/// - equivalently, with time rescaled as `t~ = t sqrt(K_A / rho_A)` the stress
///   values are unchanged and every speed is divided by `sqrt(K_A / rho_A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub k_a: f64,
    pub rho_a: f64,
    pub strain_scale: f64,
    pub stress_scale: f64,
}

impl Scaling {
    pub fn new(k_a: f64, rho_a: f64) -> Self {
        Self {
            k_a,
            rho_a,
            strain_scale: k_a,
            stress_scale: k_a / rho_a,
        }
    }

    /// Factor converting normalized speeds back to physical ones.
    pub fn speed_scale(&self) -> f64 {
        (self.k_a / self.rho_a).sqrt()
    }

    /// Normalized time per unit physical time.
    pub fn time_scale(&self) -> f64 {
        self.speed_scale()
    }

    /// Normalized velocity per unit physical velocity.
    pub fn velocity_scale(&self) -> f64 {
        (self.k_a * self.rho_a).sqrt()
    }
}

/// Nonlinear stress law `sigma = f(K eps)` with `f(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConstitutiveLaw {
    /// `f(w) = exp(w) - 1`.
    Exponential,
    /// `f(w) = alpha w + beta w^2 + gamma w^3`.
    Cubic {
        alpha: f64,
        beta: f64,
        gamma: f64,
        /// Working interval of `w = K eps` when the cubic is not monotone on
        /// the whole line.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
}

const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 100;

impl ConstitutiveLaw {
    /// Cubic law that must be strictly increasing on the whole real line.
    pub fn cubic(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let law = ConstitutiveLaw::Cubic {
            alpha,
            beta,
            gamma,
            range: None,
        };
        law.validate()?;
        Ok(law)
    }

    /// Cubic law that only needs to be increasing for `K eps` in `[lo, hi]`.
    pub fn cubic_on_range(alpha: f64, beta: f64, gamma: f64, lo: f64, hi: f64) -> Result<Self> {
        let law = ConstitutiveLaw::Cubic {
            alpha,
            beta,
            gamma,
            range: Some([lo, hi]),
        };
        law.validate()?;
        Ok(law)
    }

    /// The cubic law with the coefficients used for the polynomial experiments.
    pub fn paper_cubic() -> Self {
        ConstitutiveLaw::Cubic {
            alpha: 0.1,
            beta: 0.0,
            gamma: 5.0,
            range: None,
        }
    }

    /// Linear law `sigma = K eps`.
    pub fn linear() -> Self {
        ConstitutiveLaw::Cubic {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            range: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstitutiveLaw::Exponential => "exponential",
            ConstitutiveLaw::Cubic { .. } => "cubic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstitutiveLaw::Exponential => Ok(()),
            ConstitutiveLaw::Cubic {
                alpha,
                beta,
                gamma,
                range,
            } => {
                if ![alpha, beta, gamma].iter().all(|c| c.is_finite()) {
                    return Err(Error::InvalidLaw("non-finite cubic coefficient".into()));
                }
                match range {
                    None => {
                        // f'(w) = alpha + 2 beta w + 3 gamma w^2 > 0 for all w
                        let ok = if gamma == 0.0 {
                            beta == 0.0 && alpha > 0.0
                        } else {
                            gamma > 0.0 && alpha > 0.0 && beta * beta < 3.0 * alpha * gamma
                        };
                        if ok {
                            Ok(())
                        } else {
                            Err(Error::InvalidLaw(format!(
                                "cubic ({alpha}, {beta}, {gamma}) is not strictly increasing on the real line"
                            )))
                        }
                    }
                    Some([lo, hi]) => {
                        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                            return Err(Error::InvalidLaw(format!(
                                "invalid working interval [{lo}, {hi}]"
                            )));
                        }
                        // minimum of a quadratic on an interval: endpoints or vertex
                        let mut min = self.stress_hat_prime(lo).min(self.stress_hat_prime(hi));
                        if gamma != 0.0 {
                            let vertex = -beta / (3.0 * gamma);
                            if vertex > lo && vertex < hi {
                                min = min.min(self.stress_hat_prime(vertex));
                            }
                        }
                        if min > 0.0 {
                            Ok(())
                        } else {
                            Err(Error::InvalidLaw(format!(
                                "cubic ({alpha}, {beta}, {gamma}) is not increasing on [{lo}, {hi}]"
                            )))
                        }
                    }
                }
            }
        }
    }

    /// `f(w)`.
    #[inline]
    pub fn stress_hat(&self, w: f64) -> f64 {
        match *self {
            ConstitutiveLaw::Exponential => w.exp_m1(),
            ConstitutiveLaw::Cubic {
                alpha, beta, gamma, ..
            } => w * (alpha + w * (beta + w * gamma)),
        }
    }

    /// `f'(w)`.
    #[inline]
    pub fn stress_hat_prime(&self, w: f64) -> f64 {
        match *self {
            ConstitutiveLaw::Exponential => w.exp(),
            ConstitutiveLaw::Cubic {
                alpha, beta, gamma, ..
            } => alpha + w * (2.0 * beta + 3.0 * gamma * w),
        }
    }

    /// `f(w)` and `f'(w)` together (one exponential for the exponential law).
    #[inline]
    pub fn stress_and_slope(&self, w: f64) -> (f64, f64) {
        match *self {
            ConstitutiveLaw::Exponential => {
                let s = w.exp_m1();
                (s, s + 1.0)
            }
            ConstitutiveLaw::Cubic { .. } => (self.stress_hat(w), self.stress_hat_prime(w)),
        }
    }

    /// `f^{-1}(sigma)`.
    pub fn stress_hat_inverse(&self, sigma: f64) -> Result<f64> {
        if !sigma.is_finite() {
            return Err(Error::StressOutOfRange { sigma });
        }
        if sigma == 0.0 {
            return Ok(0.0);
        }
        match *self {
            ConstitutiveLaw::Exponential => {
                if sigma <= -1.0 {
                    Err(Error::StressOutOfRange { sigma })
                } else {
                    Ok(sigma.ln_1p())
                }
            }
            ConstitutiveLaw::Cubic {
                alpha,
                beta,
                gamma,
                range,
            } => {
                if gamma == 0.0 && beta == 0.0 {
                    return Ok(sigma / alpha);
                }
                let residual = |w: f64| self.stress_hat(w) - sigma;
                let (mut lo, mut hi) = match range {
                    Some([lo, hi]) => {
                        if residual(lo) > 0.0 || residual(hi) < 0.0 {
                            return Err(Error::StressOutOfRange { sigma });
                        }
                        (lo, hi)
                    }
                    None => bracket_increasing(&residual, sigma)?,
                };
                let guess = if alpha > 0.0 {
                    sigma / alpha
                } else {
                    0.5 * (lo + hi)
                };
                let mut w = guess.clamp(lo, hi);
                for _ in 0..INVERSE_MAX_ITER {
                    let r = residual(w);
                    if r == 0.0 {
                        return Ok(w);
                    }
                    if r < 0.0 {
                        lo = w;
                    } else {
                        hi = w;
                    }
                    let slope = self.stress_hat_prime(w);
                    let newton = w - r / slope;
                    let next = if slope > 0.0 && newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                    let converged = (next - w).abs() <= INVERSE_TOL * 1e-3 * w.abs().max(1e-300)
                        || (hi - lo) <= f64::EPSILON * w.abs().max(f64::MIN_POSITIVE);
                    w = next;
                    if converged {
                        break;
                    }
                }
                let r = residual(w);
                if r.abs() <= INVERSE_TOL * sigma.abs() {
                    Ok(w)
                } else {
                    Err(Error::BracketFailure { sigma })
                }
            }
        }
    }

    /// Stress `f(K eps)`.
    #[inline]
    pub fn stress(&self, k: f64, eps: f64) -> f64 {
        self.stress_hat(k * eps)
    }

    /// Local characteristic speed `sqrt(K f'(K eps) / rho)`.
    pub fn sound_speed(&self, k: f64, rho: f64, eps: f64) -> Result<f64> {
        let w = k * eps;
        let slope = self.stress_hat_prime(w);
        if slope > 0.0 && slope.is_finite() {
            Ok((k * slope / rho).sqrt())
        } else {
            Err(Error::HyperbolicityLoss { arg: w, slope })
        }
    }

    /// Strain producing stress `sigma` in a material of stiffness `k`.
    pub fn inverse_stress(&self, k: f64, sigma: f64) -> Result<f64> {
        Ok(self.stress_hat_inverse(sigma)? / k)
    }

    /// `G(sigma) = f'(f^{-1}(sigma))`, so that `d sigma / d eps = G(sigma) K`.
    pub fn g_of_sigma(&self, sigma: f64) -> Result<f64> {
        Ok(self.stress_hat_prime(self.stress_hat_inverse(sigma)?))
    }

    /// Stored energy `int_0^eps f(K z) dz`.
    pub fn stress_potential(&self, k: f64, eps: f64) -> f64 {
        match *self {
            ConstitutiveLaw::Exponential => (k * eps).exp_m1() / k - eps,
            ConstitutiveLaw::Cubic {
                alpha, beta, gamma, ..
            } => {
                let w = k * eps;
                eps * w * (alpha / 2.0 + w * (beta / 3.0 + w * gamma / 4.0))
            }
        }
    }
}

/// Finds `[lo, hi]` with `r(lo) <= 0 <= r(hi)` for an increasing residual.
fn bracket_increasing(r: &impl Fn(f64) -> f64, sigma: f64) -> Result<(f64, f64)> {
    let mut width = 1.0_f64;
    for _ in 0..200 {
        let (lo, hi) = (-width, width);
        if r(lo) <= 0.0 && r(hi) >= 0.0 {
            return Ok((lo, hi));
        }
        width *= 2.0;
    }
    Err(Error::BracketFailure { sigma })
}
