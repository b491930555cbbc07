//! The one-dimensional Gaussian model space `(ℝ, γ_K)`.
//!
//! For curvature `K > 0` the model measure is
//! `γ_K = √(K/2π)·e^{-Kx²/2} dx`; its isoperimetric profile
//! `I(θ) = √(K/2π)·e^{-K a_θ²/2}` (with `a_θ` the θ-quantile) is the sharp
//! lower bound for every space of curvature at least `K`, in any dimension.
//! Everything here is closed-form on top of the error function.

use crate::error::{Error, Result};
use crate::quad;
use crate::special;

/// Probability arguments are rejected this close to 0 or 1: the profile
/// derivatives blow up at the ends.
pub const THETA_MARGIN: f64 = 1e-9;

/// The Gaussian model space with curvature parameter `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    k: f64,
}

impl Default for GaussianModel {
    fn default() -> Self {
        GaussianModel { k: 1.0 }
    }
}

impl GaussianModel {
    /// Model space with curvature `k > 0`. The density is checked to
    /// integrate to 1 over ℝ within 1e-10.
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::construction(format!(
                "curvature parameter must be a positive real, got {k}"
            )));
        }
        let m = GaussianModel { k };
        let half_width = 9.0 / k.sqrt();
        let mass = quad::integrate(|x| m.density_unchecked(x), -half_width, half_width, 0.25);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::construction(format!(
                "model density does not normalize: mass {mass}"
            )));
        }
        Ok(m)
    }

    /// The normalized model, `K = 1`.
    pub fn standard() -> Self {
        GaussianModel::default()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn density_unchecked(&self, x: f64) -> f64 {
        (self.k / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5 * self.k * x * x).exp()
    }

    /// Model density `√(K/2π)·e^{-Kx²/2}`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("density needs finite x, got {x}")));
        }
        Ok(self.density_unchecked(x))
    }

    /// Distribution function; `±∞` map to 0 and 1.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        special::normal_cdf(self.k.sqrt() * x)
    }

    /// Upper tail mass of `[x, ∞)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        special::normal_sf(self.k.sqrt() * x)
    }

    fn check_theta(theta: f64) -> Result<()> {
        if !(theta > THETA_MARGIN && theta < 1.0 - THETA_MARGIN) {
            return Err(Error::domain(format!(
                "theta must lie in ({THETA_MARGIN}, {}), got {theta}",
                1.0 - THETA_MARGIN
            )));
        }
        Ok(())
    }

    /// The θ-quantile `a_θ`, i.e. `cdf(a_θ) = θ`.
    pub fn quantile_a(&self, theta: f64) -> Result<f64> {
        Self::check_theta(theta)?;
        Ok(special::normal_quantile(theta) / self.k.sqrt())
    }

    /// Model isoperimetric profile `I(θ) = density(a_θ)`.
    pub fn profile_inf(&self, theta: f64) -> Result<f64> {
        let a = self.quantile_a(theta)?;
        self.density(a)
    }

    /// First and second derivatives of the profile:
    /// `I'(θ) = -K·a_θ` and `I''(θ) = -K / I(θ)`.
    pub fn profile_derivatives(&self, theta: f64) -> Result<(f64, f64)> {
        let a = self.quantile_a(theta)?;
        let profile = self.density(a)?;
        Ok((-self.k * a, -self.k / profile))
    }

    /// Explicit Gaussian tail lower bound
    /// `γ([T,∞)) ≥ (1/√2π)·e^{-T²/2}/(T+1)` for `T ≥ 0` (normalized `K = 1`).
    pub fn tail_lower_bound(&self, t: f64) -> Result<f64> {
        if self.k != 1.0 {
            return Err(Error::domain(
                "tail_lower_bound is stated for the normalized model K = 1".to_string(),
            ));
        }
        if !(t >= 0.0) {
            return Err(Error::domain(format!(
                "tail_lower_bound needs T >= 0, got {t}"
            )));
        }
        Ok((-0.5 * t * t).exp() / (special::SQRT_2PI * (t + 1.0)))
    }
}
