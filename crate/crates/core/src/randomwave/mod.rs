//! The Gaussian ensemble: variance schedules, coefficient sampling, the
//! spherical density `f` and its covariance structure.

mod coefficients;
mod covariance;
mod density;
mod schedule;

pub use coefficients::{sample_coefficients, CoefficientSet};
pub use covariance::{
    covariance_f_analytic, covariance_u_analytic, gradient_variance_f, unit_kernel_profile,
    KernelValue, Parity,
};
pub use density::{
    eval_f, hs_norm, min_modulus_on_sphere, phase_and_modulus, DensityF, DensityJet, MinModulus,
    Vanishing, NONVANISHING_RELATIVE_THRESHOLD, PHASE_MODULUS_FLOOR,
};
pub use schedule::{
    check_convergence, expected_hs_norm_sq, ConvergenceReport, ScheduleKind, Truncation,
    VarianceSchedule, AUTO_TRUNCATION_TOLERANCE,
};
