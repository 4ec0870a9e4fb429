//! Experiment configuration: a TOML file with `[experiment]`, `[schedule]`,
//! `[nodal]` and `[covariance]` sections, overridden by command-line flags
//! and resolved into an [`ExperimentConfig`].
//!
//! Lengths are numbers or multiples of π written as `"60pi"`, `"pi/20"`,
//! `"2.5*pi"` or `"3pi/4"`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use monowave::nodal::{GeometryKind, DEFAULT_MEMORY_BUDGET};
use monowave::randomwave::{check_convergence, ScheduleKind, Truncation, VarianceSchedule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A length given as a number or a multiple of π.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Length {
    Value(f64),
    Text(String),
}

impl Length {
    pub fn resolve(&self) -> CliResult<f64> {
        match self {
            Length::Value(v) => Ok(*v),
            Length::Text(t) => parse_length(t),
        }
    }
}

pub fn parse_length(text: &str) -> CliResult<f64> {
    let bad = || CliError::config(format!("cannot read length {text:?}"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix("π")) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let v = value / den;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub nodal: NodalSection,
    #[serde(default)]
    pub covariance: CovarianceSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    /// `power_law`, `custom`, `unit` or `isotropic` (the constant density).
    pub kind: Option<String>,
    pub s: Option<f64>,
    pub beta: Option<f64>,
    pub max_degree: Option<usize>,
    /// `"auto"` or a degree.
    pub truncation: Option<TruncationSetting>,
    pub sigma: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TruncationSetting {
    Degree(usize),
    Word(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalSection {
    pub rmax: Option<Length>,
    pub radii: Option<Vec<Length>>,
    pub resolution: Option<Length>,
    /// `polar` or `cartesian`.
    pub geometry: Option<String>,
    pub memory_budget_mb: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSection {
    pub pairs: Option<usize>,
    /// Points of the `u` kernel are drawn in the ball of this radius.
    pub radius: Option<Length>,
    /// Largest distance of the unit-schedule profile.
    pub profile_max: Option<Length>,
    pub profile_points: Option<usize>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub dim: Option<usize>,
    pub rmax: Option<f64>,
    pub resolution: Option<f64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// The law the coefficients are drawn from.
#[derive(Clone, Debug, PartialEq)]
pub enum Ensemble {
    Gaussian(VarianceSchedule),
    /// `f ≡ 1/|S^{n−1}|`; every seed gives the same wave.
    Isotropic,
}

impl Ensemble {
    pub fn descriptor(&self) -> String {
        match self {
            Ensemble::Gaussian(s) => s.descriptor(),
            Ensemble::Isotropic => "isotropic".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub ensemble: Ensemble,
    pub base_seed: u64,
    pub seed_count: usize,
    pub radii: Vec<f64>,
    pub rmax: f64,
    pub resolution: f64,
    pub geometry: GeometryKind,
    pub memory_budget: u64,
    pub pairs: usize,
    pub kernel_radius: f64,
    pub profile_max: f64,
    pub profile_points: usize,
    pub out: PathBuf,
    /// `None`: all available cores.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> CliResult<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str(&text)?
            }
            None => FileConfig::default(),
        };
        Self::resolve(&file, overrides)
    }

    pub fn resolve(file: &FileConfig, o: &Overrides) -> CliResult<Self> {
        let n = o.dim.or(file.experiment.dim).unwrap_or(2);
        if n != 2 && n != 3 {
            return Err(CliError::config(format!("dimension must be 2 or 3, got {n}")));
        }
        let ensemble = resolve_schedule(n, &file.schedule)?;
        let rmax = match (o.rmax, &file.nodal.rmax) {
            (Some(r), _) => r,
            (None, Some(l)) => l.resolve()?,
            (None, None) => 20.0 * PI,
        };
        if !(rmax > 0.0) {
            return Err(CliError::config("rmax must be positive"));
        }
        let radii = match &file.nodal.radii {
            Some(list) => list.iter().map(Length::resolve).collect::<CliResult<Vec<f64>>>()?,
            None => (2..=10).map(|k| rmax * k as f64 / 10.0).collect(),
        };
        if radii.iter().any(|&r| !(r > 0.0 && r <= rmax)) {
            return Err(CliError::config("every radius must lie in (0, rmax]"));
        }
        let resolution = match (o.resolution, &file.nodal.resolution) {
            (Some(h), _) => h,
            (None, Some(l)) => l.resolve()?,
            (None, None) => monowave::nodal::DEFAULT_SPACING,
        };
        if !(resolution > 0.0) {
            return Err(CliError::config("resolution must be positive"));
        }
        let geometry = match file.nodal.geometry.as_deref() {
            None => GeometryKind::default_for(n),
            Some("polar") if n == 2 => GeometryKind::Polar,
            Some("polar") => return Err(CliError::config("polar grids are planar")),
            Some("cartesian") => GeometryKind::Cartesian,
            Some(other) => return Err(CliError::config(format!("unknown geometry {other:?}"))),
        };
        let seed_count = o.seeds.or(file.experiment.seeds).unwrap_or(1);
        if seed_count == 0 {
            return Err(CliError::config("need at least one seed"));
        }
        let workers = o.workers.or(file.experiment.workers).filter(|&w| w > 0);
        let cov = &file.covariance;
        Ok(Self {
            n,
            ensemble,
            base_seed: o.seed.or(file.experiment.seed).unwrap_or(0),
            seed_count,
            radii,
            rmax,
            resolution,
            geometry,
            memory_budget: file
                .nodal
                .memory_budget_mb
                .map(|mb| mb << 20)
                .unwrap_or(DEFAULT_MEMORY_BUDGET),
            pairs: cov.pairs.unwrap_or(20),
            kernel_radius: cov.radius.as_ref().map(Length::resolve).transpose()?.unwrap_or(5.0),
            profile_max: cov.profile_max.as_ref().map(Length::resolve).transpose()?.unwrap_or(10.0),
            profile_points: cov.profile_points.unwrap_or(25),
            out: o
                .out
                .clone()
                .or_else(|| file.experiment.out.clone())
                .unwrap_or_else(|| PathBuf::from("monowave-out")),
            workers,
        })
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.seed_count as u64).map(move |i| self.base_seed.wrapping_add(i))
    }

    /// Canonical text of everything that determines the results (the
    /// output directory and the worker count do not).
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let radii: Vec<String> = self.radii.iter().map(|r| format!("{r:?}")).collect();
        let _ = writeln!(s, "dim = {}", self.n);
        let _ = writeln!(s, "ensemble = {:?}", self.ensemble.descriptor());
        let _ = writeln!(s, "base_seed = {}", self.base_seed);
        let _ = writeln!(s, "seeds = {}", self.seed_count);
        let _ = writeln!(s, "radii = [{}]", radii.join(", "));
        let _ = writeln!(s, "rmax = {:?}", self.rmax);
        let _ = writeln!(s, "resolution = {:?}", self.resolution);
        let _ = writeln!(s, "geometry = {:?}", format!("{:?}", self.geometry).to_lowercase());
        let _ = writeln!(s, "memory_budget = {}", self.memory_budget);
        let _ = writeln!(s, "pairs = {}", self.pairs);
        let _ = writeln!(s, "kernel_radius = {:?}", self.kernel_radius);
        let _ = writeln!(s, "profile_max = {:?}", self.profile_max);
        let _ = writeln!(s, "profile_points = {}", self.profile_points);
        s
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn resolve_schedule(n: usize, sec: &ScheduleSection) -> CliResult<Ensemble> {
    let kind = sec.kind.as_deref().unwrap_or("power_law");
    if kind == "isotropic" {
        return Ok(Ensemble::Isotropic);
    }
    let default = VarianceSchedule::default_scattering(n)?;
    let max_degree = sec.max_degree.unwrap_or(default.max_degree());
    let schedule = match kind {
        "power_law" => {
            let (s, beta) = match (sec.s, sec.beta) {
                (None, None) => match default.kind() {
                    ScheduleKind::PowerLaw { beta } => (default.s(), *beta),
                    _ => unreachable!("default schedules are power laws"),
                },
                (Some(s), Some(beta)) => (s, beta),
                _ => return Err(CliError::config("power_law needs both s and beta (or neither)")),
            };
            VarianceSchedule::power_law(n, s, beta, max_degree)?
        }
        "custom" => {
            let sigma = sec
                .sigma
                .clone()
                .ok_or_else(|| CliError::config("custom schedules need a sigma table"))?;
            let s = sec.s.ok_or_else(|| CliError::config("custom schedules need s"))?;
            VarianceSchedule::custom(n, s, sigma, max_degree)?
        }
        "unit" => VarianceSchedule::unit(n, sec.max_degree.unwrap_or(40))?,
        other => return Err(CliError::config(format!("unknown schedule kind {other:?}"))),
    };
    let schedule = match &sec.truncation {
        None => schedule,
        Some(TruncationSetting::Degree(l)) => schedule.with_truncation(Truncation::Fixed(*l))?,
        Some(TruncationSetting::Word(w)) if w == "auto" => schedule.with_truncation(Truncation::Auto)?,
        Some(TruncationSetting::Word(w)) => {
            return Err(CliError::config(format!("truncation must be \"auto\" or a degree, got {w:?}")))
        }
    };
    if !schedule.is_unit() {
        let report = check_convergence(&schedule)?;
        if !report.converges {
            return Err(CliError::Config(
                monowave::Error::NonScattering(format!(
                    "terms decay like (1 + l)^{:.3}; the exponent must be below -1",
                    report.term_exponent
                ))
                .to_string(),
            ));
        }
    }
    Ok(Ensemble::Gaussian(schedule))
}
