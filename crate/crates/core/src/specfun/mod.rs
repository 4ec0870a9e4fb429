//! Special functions: Bessel functions of the first kind of real order,
//! the n-dimensional Legendre polynomials, Gauss–Legendre rules and the
//! Funk–Hecke integral used to cross-check the Fourier transform of
//! spherical harmonics.

mod bessel;
pub(crate) mod funk_hecke;
mod legendre;
mod quadrature;

pub use bessel::{
    bessel_j, bessel_j_sequence, scaled_bessel, scaled_bessel_radial_derivative,
    scaled_bessel_sequence, BesselOrder, MAX_ARGUMENT, MAX_ORDER,
};
pub use funk_hecke::{funk_hecke_coefficient, funk_hecke_coefficient_with, FunkHeckeOptions};
pub use legendre::{legendre_p, legendre_p_derivs, legendre_p_sequence};
pub use quadrature::{gauss_legendre, GaussLegendre};

use crate::error::{Error, Result};

/// Λ = n/2 − 1.
#[inline]
pub fn lambda(n: usize) -> f64 {
    n as f64 / 2.0 - 1.0
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    match n {
        2 | 3 => Ok(()),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

pub(crate) fn check_generic_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}
