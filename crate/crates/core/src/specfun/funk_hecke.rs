//! Direct evaluation of the Funk–Hecke integral
//!
//! ```text
//! c_l(r) = |S^{n−2}| ∫_{−1}^{1} e^{−i r t} P_{l,n}(t) (1 − t²)^{(n−3)/2} dt
//! ```
//!
//! by Gauss–Legendre quadrature in `t = cos ψ`, which removes the endpoint
//! singularity for `n = 2`. For `r ≤ l` the integrand cancels heavily and
//! the Rodrigues form is integrated instead:
//!
//! ```text
//! c_l(r) = |S^{n−2}| (−i)^l Π_{k<l} r/(n − 1 + 2k) ∫_{−1}^{1} e^{−i r t} (1 − t²)^{l+(n−3)/2} dt
//! ```
//!
//! Parity makes `c_l` real for even `l` and imaginary for odd `l`; only the
//! surviving half of the integrand is evaluated, over `ψ ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

use super::{check_generic_dim, legendre_p, quadrature::gauss_legendre};

/// Convergence controls for the node-doubling loop.
#[derive(Debug, Clone, Copy)]
pub struct FunkHeckeOptions {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub tolerance: f64,
}

impl Default for FunkHeckeOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 16,
            max_nodes: 4096,
            tolerance: 1e-10,
        }
    }
}

/// `c_l(r)` with default options.
pub fn funk_hecke_coefficient(l: usize, n: usize, r: f64) -> Result<Complex64> {
    funk_hecke_coefficient_with(l, n, r, FunkHeckeOptions::default())
}

/// `c_l(r)` with explicit quadrature options.
pub fn funk_hecke_coefficient_with(
    l: usize,
    n: usize,
    r: f64,
    opts: FunkHeckeOptions,
) -> Result<Complex64> {
    check_generic_dim(n)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("radius must be finite and >= 0, got {r}")));
    }
    let area = sphere_measure(n - 2);
    let sin_pow = (n - 2) as i32;
    let odd = l % 2 == 1;
    let phase = |ct: f64| if odd { (r * ct).sin() } else { (r * ct).cos() };

    if r <= l as f64 {
        let pow = 2 * l as i32 + sin_pow;
        let integral = converge(opts, |psi| {
            let (s, c) = psi.sin_cos();
            (r * c).cos() * s.powi(pow)
        })?;
        let coef: f64 = (0..l).map(|k| r / (n as f64 - 1.0 + 2.0 * k as f64)).product();
        let value = 2.0 * area * coef * integral;
        return Ok(match l % 4 {
            0 => Complex64::new(value, 0.0),
            1 => Complex64::new(0.0, -value),
            2 => Complex64::new(-value, 0.0),
            _ => Complex64::new(0.0, value),
        });
    }
    let integral = converge(opts, |psi| {
        let (s, c) = psi.sin_cos();
        let p = legendre_p(l, n, c).expect("dimension checked");
        phase(c) * p * s.powi(sin_pow)
    })?;
    let value = 2.0 * area * integral;
    let c = if odd {
        Complex64::new(0.0, -value)
    } else {
        Complex64::new(value, 0.0)
    };
    Ok(c)
}

/// Surface area of the unit sphere `S^d` in `R^{d+1}`.
pub(crate) fn sphere_measure(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

fn converge<F: Fn(f64) -> f64>(opts: FunkHeckeOptions, g: F) -> Result<f64> {
    let mut nodes = opts.initial_nodes.max(2);
    let mut prev = gauss_legendre(nodes).integrate(0.0, FRAC_PI_2, &g);
    let mut change = f64::INFINITY;
    while nodes * 2 <= opts.max_nodes {
        nodes *= 2;
        let cur = gauss_legendre(nodes).integrate(0.0, FRAC_PI_2, &g);
        change = (cur - prev).abs();
        if change < opts.tolerance * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        nodes,
        achieved: change,
    })
}
