//! Realised coefficient tables `a_{lm}` and their text dump.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::harmonics::{degree_offset, harmonic_count, multiplicity, HarmonicIndex};
use crate::specfun::check_dim;

use super::schedule::VarianceSchedule;

const DUMP_MAGIC: &str = "monowave-coefficients";
const DUMP_VERSION: u32 = 1;

/// Coefficients `a_{lm}` for `0 ≤ l ≤ L`, `1 ≤ m ≤ d_l`, stored in the flat
/// order of [`HarmonicIndex::flat`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    n: usize,
    max_degree: usize,
    values: Vec<f64>,
    seed: u64,
    schedule: Option<VarianceSchedule>,
}

impl CoefficientSet {
    /// All-zero table, for building samples by hand.
    pub fn zeros(n: usize, max_degree: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            max_degree,
            values: vec![0.0; harmonic_count(max_degree, n)],
            seed: 0,
            schedule: None,
        })
    }

    pub fn from_values(n: usize, max_degree: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        let expect = harmonic_count(max_degree, n);
        if values.len() != expect {
            return Err(Error::invalid(format!(
                "expected {expect} coefficients for L = {max_degree}, n = {n}, got {}",
                values.len()
            )));
        }
        Ok(Self {
            n,
            max_degree,
            values,
            seed: 0,
            schedule: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn schedule(&self) -> Option<&VarianceSchedule> {
        self.schedule.as_ref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients of degree `l`, `m = 1..=d_l`.
    pub fn degree(&self, l: usize) -> &[f64] {
        let a = degree_offset(l, self.n);
        &self.values[a..a + multiplicity(l, self.n)]
    }

    pub fn get(&self, l: usize, m: usize) -> Result<f64> {
        self.check(l, m)?;
        Ok(self.values[HarmonicIndex { l, m }.flat(self.n)])
    }

    pub fn set(&mut self, l: usize, m: usize, value: f64) -> Result<()> {
        self.check(l, m)?;
        let i = HarmonicIndex { l, m }.flat(self.n);
        self.values[i] = value;
        Ok(())
    }

    fn check(&self, l: usize, m: usize) -> Result<()> {
        if l > self.max_degree {
            return Err(Error::invalid(format!(
                "degree {l} beyond truncation {}",
                self.max_degree
            )));
        }
        HarmonicIndex::new(l, m, self.n).map(|_| ())
    }

    /// Same coefficients multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Versioned text dump; every coefficient is written in the shortest
    /// representation that parses back to the identical `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{DUMP_MAGIC} {DUMP_VERSION}");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "L {}", self.max_degree);
        let _ = writeln!(out, "seed {}", self.seed);
        match &self.schedule {
            Some(s) => {
                let _ = writeln!(out, "s {:?}", s.s());
                let _ = writeln!(out, "schedule {}", s.descriptor());
            }
            None => {
                let _ = writeln!(out, "s none");
                let _ = writeln!(out, "schedule none");
            }
        }
        for l in 0..=self.max_degree {
            for (k, v) in self.degree(l).iter().enumerate() {
                let _ = writeln!(out, "{l} {} {v:?}", k + 1);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Format(format!("coefficient dump ends before {what}")))
        };
        let header = next("header")?;
        let version = header
            .strip_prefix(DUMP_MAGIC)
            .map(str::trim)
            .ok_or_else(|| Error::Format("not a coefficient dump".into()))?;
        if version != DUMP_VERSION.to_string() {
            return Err(Error::Format(format!("unsupported dump version {version}")));
        }
        let field = |line: &str, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::Format(format!("expected field {key:?}, found {line:?}")))
        };
        let parse_err = |e: std::num::ParseIntError| Error::Format(e.to_string());
        let n: usize = field(next("n")?, "n")?.parse().map_err(parse_err)?;
        let max_degree: usize = field(next("L")?, "L")?.parse().map_err(parse_err)?;
        let seed: u64 = field(next("seed")?, "seed")?.parse().map_err(parse_err)?;
        let _s = field(next("s")?, "s")?;
        let sched_text = field(next("schedule")?, "schedule")?;
        let schedule = if sched_text == "none" {
            None
        } else {
            Some(VarianceSchedule::parse_descriptor(&sched_text)?)
        };
        let mut set = Self::zeros(n, max_degree)?;
        let mut seen = 0usize;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Format(format!("bad coefficient line {line:?}")));
            }
            let l: usize = parts[0].parse().map_err(parse_err)?;
            let m: usize = parts[1].parse().map_err(parse_err)?;
            let v: f64 = parts[2]
                .parse()
                .map_err(|e: std::num::ParseFloatError| Error::Format(e.to_string()))?;
            set.set(l, m, v)?;
            seen += 1;
        }
        if seen != set.values.len() {
            return Err(Error::Format(format!(
                "dump lists {seen} coefficients, expected {}",
                set.values.len()
            )));
        }
        set.seed = seed;
        set.schedule = schedule;
        Ok(set)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Draws `a_{lm} ~ N(0, σ_l²)` independently for `l ≤ L`, `L` the schedule's
/// truncation degree.
///
/// Each coefficient comes from its own ChaCha8 stream (stream number = flat
/// index) keyed by `seed`, so the table does not depend on evaluation order
/// and a prefix of a larger table is reproduced exactly.
pub fn sample_coefficients(schedule: &VarianceSchedule, seed: u64) -> Result<CoefficientSet> {
    let n = schedule.dim();
    let max_degree = schedule.truncation_degree();
    let mut values = Vec::with_capacity(harmonic_count(max_degree, n));
    for l in 0..=max_degree {
        let sigma = schedule.sigma(l);
        for m in 1..=multiplicity(l, n) {
            let stream = HarmonicIndex { l, m }.flat(n) as u64;
            values.push(sigma * draw(seed, stream));
        }
    }
    Ok(CoefficientSet {
        n,
        max_degree,
        values,
        seed,
        schedule: Some(schedule.clone()),
    })
}

fn draw(seed: u64, stream: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    StandardNormal.sample(&mut rng)
}
