//! The wave `u(x) = (2π)^{n/2} Σ a_{lm} Y_{lm}(θ) J_{l+Λ}(r)/r^Λ`, its
//! gradient, the stationary-phase leading term and its error terms, the
//! Fourier transform of a single harmonic and the decay seminorms.

mod asymptotics;
mod seminorm;
mod wave;

pub use asymptotics::{
    error_terms, error_terms_with, eval_u_leading, leading_phase_shift, ErrorTerms, DEFAULT_R_MIN,
};
pub use seminorm::{
    agmon_hormander, angular_decay_check, AngularDecayRow, SeminormMethod, SeminormOptions,
    SeminormRow,
};
pub(crate) use wave::combine;
pub use wave::{
    ft_single_harmonic, isotropic_wave, EvalMode, EvalScratch, GradU, SpacePoint, WaveField,
};
