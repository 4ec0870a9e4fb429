//! Stationary-phase expansion of `u`:
//!
//! ```text
//! u(x)   = 2(2π)^{(n−1)/2} r^{−(n−1)/2} [U(x) + E1(x)],
//! U(x)   = f_R(θ) cos(r − r_0) + f_I(θ) sin(r − r_0),   r_0 = π(n − 1)/4,
//! ∂_r u  = 2(2π)^{(n−1)/2} r^{−(n−1)/2} [−f_R sin(r − r_0) + f_I cos(r − r_0) + E2],
//! r ∇̸u  = 2(2π)^{(n−1)/2} r^{−(n−1)/2} [∇_S f_R cos(r − r_0) + ∇_S f_I sin(r − r_0) + E3].
//! ```
//!
//! With `P(r) = r^{(n−1)/2} / (2(2π)^{(n−1)/2})` the error terms satisfy
//! `∇E1 = (E2 + (n − 1)/(2r) · P u) θ + E3 / r`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harmonics::SurfaceGradient;
use crate::randomwave::{CoefficientSet, DensityF};

use super::wave::{SpacePoint, WaveField};

/// Smallest radius at which the error terms are evaluated by default.
pub const DEFAULT_R_MIN: f64 = 1.0;

/// `r_0 = π(n − 1)/4`.
pub fn leading_phase_shift(n: usize) -> f64 {
    PI * (n as f64 - 1.0) / 4.0
}

/// `U(x) = f_R(θ) cos(r − r_0) + f_I(θ) sin(r − r_0)`.
pub fn eval_u_leading(coeffs: &CoefficientSet, p: &SpacePoint) -> Result<f64> {
    if !(p.r > 0.0) {
        return Err(Error::invalid("U is evaluated at r > 0"));
    }
    let f = DensityF::new(coeffs)?.eval(&p.dir)?;
    let (s, c) = (p.r - leading_phase_shift(coeffs.dim())).sin_cos();
    Ok(f.re * c + f.im * s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorTerms {
    pub e1: f64,
    pub e2: f64,
    pub e3: SurfaceGradient,
    /// `P(r) u(x)`, needed to relate `∇E1` to `E2` and `E3`.
    pub scaled_u: f64,
}

impl ErrorTerms {
    /// `|E1| + |E2| + |E3|`.
    pub fn total(&self) -> f64 {
        self.e1.abs() + self.e2.abs() + self.e3.norm_sq().sqrt()
    }
}

/// Error terms at `p`, with the default `r_min = 1`.
pub fn error_terms(field: &WaveField, p: &SpacePoint) -> Result<ErrorTerms> {
    error_terms_with(field, p, DEFAULT_R_MIN)
}

/// Error terms at `p`; radii below `r_min` are rejected. The exact series
/// is used whatever the field's evaluation mode.
pub fn error_terms_with(field: &WaveField, p: &SpacePoint, r_min: f64) -> Result<ErrorTerms> {
    if !(p.r >= r_min) || !(p.r > 0.0) {
        return Err(Error::invalid(format!(
            "error terms are evaluated for r >= {r_min}, got {}",
            p.r
        )));
    }
    let n = field.dim() as f64;
    let scale = p.r.powf((n - 1.0) / 2.0) / (2.0 * (2.0 * PI).powf((n - 1.0) / 2.0));
    let u = field.eval_series(p)?;
    let grad = field.eval_grad_u(p)?;
    let jet = field.density().eval_with_gradient(&p.dir)?;
    let (s, c) = (p.r - leading_phase_shift(field.dim())).sin_cos();
    let (fr, fi) = (jet.value.re, jet.value.im);
    let e1 = scale * u - (fr * c + fi * s);
    let e2 = scale * grad.radial - (-fr * s + fi * c);
    let e3 = SurfaceGradient {
        theta: p.r * scale * grad.angular.theta - (jet.grad_re.theta * c + jet.grad_im.theta * s),
        phi: p.r * scale * grad.angular.phi - (jet.grad_re.phi * c + jet.grad_im.phi * s),
    };
    Ok(ErrorTerms {
        e1,
        e2,
        e3,
        scaled_u: scale * u,
    })
}
