pub mod covariance;
pub mod kakutani;
pub mod report;
pub mod sample;
pub mod sweep;

use monowave::field::isotropic_wave;
use monowave::randomwave::{sample_coefficients, CoefficientSet};
use rayon::prelude::*;

use crate::config::{Ensemble, ExperimentConfig};
use crate::error::{CliError, CliResult};

/// Grid resolution of the search for zeros of `f`.
pub const SPHERE_RESOLUTION: usize = 64;

pub fn coefficients(config: &ExperimentConfig, seed: u64) -> CliResult<CoefficientSet> {
    Ok(match &config.ensemble {
        Ensemble::Gaussian(schedule) => sample_coefficients(schedule, seed)?,
        Ensemble::Isotropic => isotropic_wave(config.n)?,
    })
}

/// Runs `job` for every seed on a pool of `config.workers` threads and
/// returns the results in seed order.
pub fn for_each_seed<T, F>(config: &ExperimentConfig, job: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> CliResult<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Resource(format!("cannot start worker pool: {e}")))?;
    let seeds: Vec<u64> = config.seeds().collect();
    pool.install(|| seeds.par_iter().map(|&s| job(s)).collect())
}

/// Table cell with ten decimals.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:.10}");
        match s.strip_prefix('-') {
            Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
            _ => s,
        }
    } else {
        x.to_string()
    }
}
