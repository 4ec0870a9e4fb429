//! Analytic covariance kernels of `f_R`, `f_I` and `u`.

use crate::error::{Error, Result};
use crate::harmonics::{multiplicity, sphere_area, Direction};
use crate::specfun::{legendre_p_sequence, scaled_bessel_sequence};

use super::schedule::{ScheduleKind, VarianceSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Even degrees, the real part `f_R`.
    Even,
    /// Odd degrees, the imaginary part `f_I`.
    Odd,
}

impl Parity {
    pub fn contains(self, l: usize) -> bool {
        (l % 2 == 0) == (self == Parity::Even)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    /// Sum over the sampled degrees `l ≤ L`.
    pub value: f64,
    /// Bound on `Σ_{l > L} σ_l² c_{ln}` (infinite for the unit schedule).
    pub tail_bound: f64,
}

/// `E f_a(θ) f_a(θ') = Σ_{l ∈ parity} σ_l² (d_l/|S^{n−1}|) P_{ln}(θ·θ')`.
pub fn covariance_f_analytic(
    schedule: &VarianceSchedule,
    parity: Parity,
    cosangle: f64,
) -> Result<KernelValue> {
    if !(cosangle.abs() <= 1.0) {
        return Err(Error::invalid(format!("cos angle {cosangle} outside [-1, 1]")));
    }
    let n = schedule.dim();
    let l_max = schedule.truncation_degree();
    let area = sphere_area(n);
    let mut p = Vec::new();
    legendre_p_sequence(n, l_max, cosangle, &mut p)?;
    let value = (0..=l_max)
        .filter(|&l| parity.contains(l))
        .map(|l| schedule.sigma(l).powi(2) * multiplicity(l, n) as f64 / area * p[l])
        .sum();
    let tail_bound = match schedule.kind() {
        ScheduleKind::Unit => f64::INFINITY,
        ScheduleKind::PowerLaw { beta } => {
            // d_l ≤ 2(1 + l)^{n−2}
            let q = n as f64 - 2.0 - 2.0 * beta;
            if q < -1.0 {
                2.0 * (1.0 + l_max as f64).powf(q + 1.0) / (-q - 1.0) / area
            } else {
                f64::INFINITY
            }
        }
        ScheduleKind::Custom { sigma } => sigma
            .iter()
            .enumerate()
            .skip(l_max + 1)
            .filter(|(l, _)| parity.contains(*l))
            .map(|(l, s)| s * s * multiplicity(l, n) as f64 / area)
            .sum(),
    };
    Ok(KernelValue { value, tail_bound })
}

/// Variance of each component of `∇_S f_a` in an orthonormal tangent frame:
/// `Σ_{l ∈ parity} σ_l² c_{ln} l(l + n − 2)/(n − 1)`.
pub fn gradient_variance_f(schedule: &VarianceSchedule, parity: Parity) -> f64 {
    let n = schedule.dim();
    let area = sphere_area(n);
    (0..=schedule.truncation_degree())
        .filter(|&l| parity.contains(l))
        .map(|l| {
            schedule.sigma(l).powi(2) * multiplicity(l, n) as f64 / area * (l * (l + n - 2)) as f64
                / (n - 1) as f64
        })
        .sum()
}

/// `E u(x) u(y) = (2π)^n Σ_l σ_l² c_{ln} P_{ln}(θ_x·θ_y) J_{l+Λ}(|x|) J_{l+Λ}(|y|) / (|x||y|)^Λ`
/// over the sampled degrees.
pub fn covariance_u_analytic(schedule: &VarianceSchedule, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = schedule.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::invalid(format!("points must have {n} coordinates")));
    }
    let l_max = schedule.truncation_degree();
    let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ry = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cosangle = if rx == 0.0 || ry == 0.0 {
        1.0
    } else {
        Direction::from_cartesian(x)?.dot(&Direction::from_cartesian(y)?)
    };
    let (mut gx, mut gy, mut p) = (Vec::new(), Vec::new(), Vec::new());
    scaled_bessel_sequence(n, l_max, rx, &mut gx)?;
    scaled_bessel_sequence(n, l_max, ry, &mut gy)?;
    legendre_p_sequence(n, l_max, cosangle, &mut p)?;
    let area = sphere_area(n);
    let sum: f64 = (0..=l_max)
        .rev()
        .map(|l| schedule.sigma(l).powi(2) * multiplicity(l, n) as f64 / area * p[l] * gx[l] * gy[l])
        .sum();
    Ok((2.0 * std::f64::consts::PI).powi(n as i32) * sum)
}

/// Shape `J_Λ(d)/d^Λ` of the covariance of `u` for `σ_l ≡ 1` without
/// truncation, as a function of `d = |x − y|`.
pub fn unit_kernel_profile(n: usize, d: f64) -> Result<f64> {
    crate::specfun::scaled_bessel(0, n, d)
}
