//! Finite probe of the connectivity of the unbounded nodal component: the
//! zero set is extracted in an annulus and the components reaching both
//! boundary spheres are counted, at spacing `h` and again at `h/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::randomwave::{min_modulus_on_sphere, Vanishing};

use super::{extract_from_field, ScanSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeReport {
    pub inner: f64,
    pub outer: f64,
    pub h: f64,
    /// Components crossing the annulus at spacing `h`.
    pub count: usize,
    /// The same at spacing `h/2`.
    pub refined_count: usize,
    /// False when refinement changed the count.
    pub stable: bool,
    /// Classification of the zeros of `f`.
    pub density: Vanishing,
}

/// Components of `u^{−1}(0) ∩ {R_in ≤ |x| ≤ R_out}` with vertices at or
/// below `R_in` and at or beyond `R_out`.
pub fn crossing_count(field: &WaveField, inner: f64, outer: f64, h: f64) -> Result<usize> {
    let set = extract_from_field(field, &ScanSpec::annulus(field.dim(), inner, outer, h))?;
    Ok(set
        .components
        .iter()
        .filter(|c| c.r_min <= inner && c.r_max >= outer)
        .count())
}

/// Runs the probe at `h` and `h/2`; needs `R_out − R_in ≥ 4π`.
pub fn noncompact_connectivity_probe(field: &WaveField, inner: f64, outer: f64, h: f64) -> Result<ProbeReport> {
    if !(inner > 0.0) || !(outer - inner >= 4.0 * PI) {
        return Err(Error::invalid(format!(
            "probe annulus [{inner}, {outer}] must have positive inner radius and width at least 4π"
        )));
    }
    let density = min_modulus_on_sphere(field.coeffs(), 64)?.classification;
    let count = crossing_count(field, inner, outer, h)?;
    let refined_count = crossing_count(field, inner, outer, h / 2.0)?;
    Ok(ProbeReport {
        inner,
        outer,
        h,
        count,
        refined_count,
        stable: count == refined_count,
        density,
    })
}
