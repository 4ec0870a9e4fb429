//! Bessel functions of the first kind, `J_α(z)` for real `α ≥ 0`, `z ≥ 0`.
//!
//! Small arguments use the power series. Larger arguments use Miller's
//! backward recurrence over the orders `ν, ν+1, …` (ν the fractional part
//! of the order), normalised with the Neumann-type sum
//!
//! ```text
//! (z/2)^ν = Σ_k (ν + 2k) Γ(ν + k) / k! · J_{ν+2k}(z)
//! ```
//!
//! Half-integer sequences whose top order lies below `z` are produced by
//! forward recurrence from the closed forms of `J_{1/2}` and `J_{3/2}`,
//! which is stable in that regime and much cheaper.

use std::f64::consts::FRAC_2_PI;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

use super::lambda;

/// Largest supported order.
pub const MAX_ORDER: f64 = 256.0;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1.0e5;

const SERIES_MAX_ARGUMENT: f64 = 8.0;
const RESCALE_THRESHOLD: f64 = 1.0e250;

/// Order `α` of a Bessel function; for a degree `l` harmonic in `n`
/// dimensions the order is `l + n/2 − 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::invalid(format!("Bessel order must be >= 0, got {alpha}")));
        }
        if alpha > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: alpha,
                cap: MAX_ORDER,
            });
        }
        Ok(Self(alpha))
    }

    pub fn for_degree(l: usize, n: usize) -> Result<Self> {
        Self::new(l as f64 + lambda(n))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `J_α(z)`.
pub fn bessel_j(order: BesselOrder, z: f64) -> Result<f64> {
    let alpha = order.value();
    check_argument(z)?;
    if z <= SERIES_MAX_ARGUMENT {
        return Ok(series(alpha, z));
    }
    let base = alpha.floor();
    let frac = alpha - base;
    let mut seq = Vec::new();
    fill_sequence(frac, base as usize + 1, z, &mut seq);
    Ok(seq[base as usize])
}

/// Fills `out` with `J_{first + k}(z)` for `k = 0..count`.
pub fn bessel_j_sequence(first: f64, count: usize, z: f64, out: &mut Vec<f64>) -> Result<()> {
    if !(first >= 0.0) {
        return Err(Error::invalid(format!("Bessel order must be >= 0, got {first}")));
    }
    out.clear();
    if count == 0 {
        return Ok(());
    }
    let top = first + (count - 1) as f64;
    if top > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: top,
            cap: MAX_ORDER,
        });
    }
    check_argument(z)?;
    if z <= SERIES_MAX_ARGUMENT {
        out.extend((0..count).map(|k| series(first + k as f64, z)));
        return Ok(());
    }
    let base = first.floor() as usize;
    let frac = first - first.floor();
    let mut full = Vec::new();
    fill_sequence(frac, base + count, z, &mut full);
    out.extend_from_slice(&full[base..base + count]);
    Ok(())
}

/// `J_{l+Λ}(r) / r^Λ`, with its finite limit at `r = 0`.
pub fn scaled_bessel(l: usize, n: usize, r: f64) -> Result<f64> {
    let lam = lambda(n);
    if r == 0.0 {
        return Ok(scaled_at_origin(l, lam));
    }
    let j = bessel_j(BesselOrder::for_degree(l, n)?, r)?;
    Ok(j / r.powf(lam))
}

/// Fills `out[l] = J_{l+Λ}(r) / r^Λ` for `l = 0..=max_degree`.
pub fn scaled_bessel_sequence(n: usize, max_degree: usize, r: f64, out: &mut Vec<f64>) -> Result<()> {
    let lam = lambda(n);
    if r == 0.0 {
        out.clear();
        out.extend((0..=max_degree).map(|l| scaled_at_origin(l, lam)));
        return Ok(());
    }
    bessel_j_sequence(lam, max_degree + 1, r, out)?;
    if lam != 0.0 {
        let scale = r.powf(-lam);
        out.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(())
}

/// `d/dr [J_{l+Λ}(r) / r^Λ] = J_{l+Λ−1}(r)/r^Λ − (l + 2Λ) J_{l+Λ}(r)/r^{Λ+1}`.
///
/// For `l = 0` the order `Λ − 1` is negative; `J_{Λ−1}` is then taken from
/// the three-term recurrence `J_{Λ−1} = (2Λ/r) J_Λ − J_{Λ+1}`.
/// The origin is rejected.
pub fn scaled_bessel_radial_derivative(l: usize, n: usize, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!(
            "radial derivative needs r > 0, got {r}"
        )));
    }
    let lam = lambda(n);
    let mut seq = Vec::with_capacity(l + 2);
    let (j_lower, j) = if l == 0 {
        bessel_j_sequence(lam, 2, r, &mut seq)?;
        (2.0 * lam / r * seq[0] - seq[1], seq[0])
    } else {
        bessel_j_sequence(l as f64 - 1.0 + lam, 2, r, &mut seq)?;
        (seq[0], seq[1])
    };
    let rl = r.powf(lam);
    Ok(j_lower / rl - (l as f64 + 2.0 * lam) * j / (rl * r))
}

fn scaled_at_origin(l: usize, lam: f64) -> f64 {
    if l == 0 && lam == 0.0 {
        1.0
    } else if l == 0 {
        1.0 / (2f64.powf(lam) * gamma(lam + 1.0))
    } else {
        0.0
    }
}

fn check_argument(z: f64) -> Result<()> {
    if !(z >= 0.0) {
        return Err(Error::invalid(format!("Bessel argument must be >= 0, got {z}")));
    }
    if z > MAX_ARGUMENT {
        return Err(Error::invalid(format!(
            "Bessel argument {z} exceeds the supported maximum {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// Power series, used for `z <= 8`.
fn series(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if alpha == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * z;
    let lead = if alpha == 0.0 {
        1.0
    } else {
        (alpha * half.ln() - ln_gamma(alpha + 1.0)).exp()
    };
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (alpha + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Writes `J_{frac + k}(z)` for `k = 0..count` into `out`, `frac ∈ [0, 1)`,
/// `z > 0`.
fn fill_sequence(frac: f64, count: usize, z: f64, out: &mut Vec<f64>) {
    out.clear();
    let top = frac + (count - 1) as f64;
    if frac == 0.5 && top < z {
        half_integer_upward(count, z, out);
        return;
    }
    miller(frac, count, z, out);
}

fn half_integer_upward(count: usize, z: f64, out: &mut Vec<f64>) {
    let amp = (FRAC_2_PI / z).sqrt();
    let (s, c) = z.sin_cos();
    let j0 = amp * s;
    out.push(j0);
    if count == 1 {
        return;
    }
    let j1 = amp * (s / z - c);
    out.push(j1);
    let (mut prev, mut cur) = (j0, j1);
    for k in 1..count - 1 {
        let nu = 0.5 + k as f64;
        let next = 2.0 * nu / z * cur - prev;
        out.push(next);
        prev = cur;
        cur = next;
    }
}

fn miller(frac: f64, count: usize, z: f64, out: &mut Vec<f64>) {
    let top = frac + (count - 1) as f64;
    let start = z.max(top) + 10.0 * z.cbrt() + 24.0;
    let mut n_start = (start - frac).ceil() as usize;
    if n_start % 2 == 1 {
        n_start += 1;
    }
    let mut vals = vec![0.0; n_start + 2];
    vals[n_start] = 1e-30;
    for k in (1..=n_start).rev() {
        let nu = frac + k as f64;
        let next = 2.0 * nu / z * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > RESCALE_THRESHOLD {
            let inv = 1.0 / RESCALE_THRESHOLD;
            vals[k - 1..=n_start].iter_mut().for_each(|v| *v *= inv);
        }
    }

    // Normalisation: Σ_k (ν + 2k) Γ(ν + k)/k! J_{ν+2k}(z) = (z/2)^ν.
    let gamma_nu1 = gamma(frac + 1.0);
    let mut norm = gamma_nu1 * vals[0];
    let mut ratio = gamma_nu1; // Γ(ν + k) / k! at k = 1
    let mut k = 1usize;
    while 2 * k <= n_start {
        norm += (frac + 2.0 * k as f64) * ratio * vals[2 * k];
        ratio *= (frac + k as f64) / (k as f64 + 1.0);
        k += 1;
    }
    let target = if frac == 0.0 { 1.0 } else { (0.5 * z).powf(frac) };
    let scale = target / norm;
    out.extend(vals[..count].iter().map(|v| v * scale));
}
