//! Variance schedules `l ↦ σ_l` and the summability test
//! `Σ_l (1 + l)^{2s+n−2} σ_l² < ∞`.

use std::fmt;

use crate::error::{Error, Result};
use crate::harmonics::multiplicity;
use crate::specfun::{check_dim, MAX_ORDER};

/// Relative size of the `H^1`-weighted tail accepted by automatic truncation.
pub const AUTO_TRUNCATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind {
    /// `σ_l = (1 + l)^{−β}`.
    PowerLaw { beta: f64 },
    /// `σ_l` read from a table indexed by `l`.
    Custom { sigma: Vec<f64> },
    /// `σ_l ≡ 1`; not summable for any `s`.
    Unit,
}

/// How the truncation degree `L` of a sample is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    Fixed(usize),
    /// Smallest `L` whose `H^1`-weighted tail is below
    /// [`AUTO_TRUNCATION_TOLERANCE`] times the head, capped at `L_max`.
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceSchedule {
    kind: ScheduleKind,
    s: f64,
    n: usize,
    max_degree: usize,
    truncation: Truncation,
}

impl VarianceSchedule {
    pub fn power_law(n: usize, s: f64, beta: f64, max_degree: usize) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::invalid("power-law exponent must be finite"));
        }
        Self::build(ScheduleKind::PowerLaw { beta }, n, s, max_degree)
    }

    pub fn custom(n: usize, s: f64, sigma: Vec<f64>, max_degree: usize) -> Result<Self> {
        if sigma.len() < max_degree + 1 {
            return Err(Error::invalid(format!(
                "custom schedule has {} entries but L_max = {max_degree} needs {}",
                sigma.len(),
                max_degree + 1
            )));
        }
        if sigma.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("custom schedule entries must be finite and >= 0"));
        }
        Self::build(ScheduleKind::Custom { sigma }, n, s, max_degree)
    }

    pub fn unit(n: usize, max_degree: usize) -> Result<Self> {
        Self::build(ScheduleKind::Unit, n, 0.0, max_degree)
    }

    /// Default scattering schedules: `n = 2`: `s = 3.6, β = 4.5`;
    /// `n = 3`: `s = 4.1, β = 5.5`.
    pub fn default_scattering(n: usize) -> Result<Self> {
        match n {
            2 => Self::power_law(2, 3.6, 4.5, 80),
            3 => Self::power_law(3, 4.1, 5.5, 40),
            _ => Err(Error::UnsupportedDimension(n)),
        }
    }

    fn build(kind: ScheduleKind, n: usize, s: f64, max_degree: usize) -> Result<Self> {
        check_dim(n)?;
        if !s.is_finite() {
            return Err(Error::invalid("regularity exponent s must be finite"));
        }
        if max_degree as f64 + n as f64 / 2.0 > MAX_ORDER {
            return Err(Error::invalid(format!(
                "L_max = {max_degree} exceeds the Bessel order cap"
            )));
        }
        Ok(Self {
            kind,
            s,
            n,
            max_degree,
            truncation: Truncation::Auto,
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Result<Self> {
        if let Truncation::Fixed(l) = truncation {
            if l > self.max_degree {
                return Err(Error::invalid(format!(
                    "truncation {l} exceeds L_max = {}",
                    self.max_degree
                )));
            }
        }
        self.truncation = truncation;
        Ok(self)
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// `σ_l`. Custom tables are zero past their end.
    pub fn sigma(&self, l: usize) -> f64 {
        match &self.kind {
            ScheduleKind::PowerLaw { beta } => (1.0 + l as f64).powf(-beta),
            ScheduleKind::Custom { sigma } => sigma.get(l).copied().unwrap_or(0.0),
            ScheduleKind::Unit => 1.0,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.kind, ScheduleKind::Unit)
    }

    /// The degree `L` up to which coefficients are drawn.
    pub fn truncation_degree(&self) -> usize {
        match self.truncation {
            Truncation::Fixed(l) => l,
            Truncation::Auto => self.auto_degree(),
        }
    }

    fn auto_degree(&self) -> usize {
        if self.is_unit() {
            return self.max_degree;
        }
        let n = self.n;
        let terms: Vec<f64> = (0..=self.max_degree)
            .map(|l| {
                let sig = self.sigma(l);
                multiplicity(l, n) as f64 * sig * sig * (1.0 + l as f64).powi(2)
            })
            .collect();
        let beyond = self.h1_tail_beyond_max();
        if !beyond.is_finite() {
            return self.max_degree;
        }
        let total_head: f64 = terms.iter().sum();
        let mut head = 0.0;
        for (l, t) in terms.iter().enumerate() {
            head += t;
            let tail = total_head - head + beyond;
            if head > 0.0 && tail <= AUTO_TRUNCATION_TOLERANCE * head {
                return l;
            }
        }
        self.max_degree
    }

    /// Bound for `Σ_{l > L_max} d_l σ_l² (1 + l)²`, using `d_l ≤ 2(1 + l)^{n−2}`.
    fn h1_tail_beyond_max(&self) -> f64 {
        match &self.kind {
            ScheduleKind::PowerLaw { beta } => {
                let q = self.n as f64 - 2.0 * beta;
                if q < -1.0 {
                    2.0 * (1.0 + self.max_degree as f64).powf(q + 1.0) / (-q - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            ScheduleKind::Custom { sigma } => {
                let n = self.n;
                sigma
                    .iter()
                    .enumerate()
                    .skip(self.max_degree + 1)
                    .map(|(l, s)| multiplicity(l, n) as f64 * s * s * (1.0 + l as f64).powi(2))
                    .sum()
            }
            ScheduleKind::Unit => f64::INFINITY,
        }
    }

    /// `E|f(θ)|² = Σ_{l ≤ L} d_l σ_l² / |S^{n−1}|` for the truncated field.
    pub fn mean_square_density(&self) -> f64 {
        let n = self.n;
        let l_max = self.truncation_degree();
        (0..=l_max)
            .map(|l| multiplicity(l, n) as f64 * self.sigma(l).powi(2))
            .sum::<f64>()
            / crate::harmonics::sphere_area(n)
    }

    /// One-line textual form, parsed back by [`VarianceSchedule::parse_descriptor`].
    pub fn descriptor(&self) -> String {
        let trunc = match self.truncation {
            Truncation::Fixed(l) => l.to_string(),
            Truncation::Auto => "auto".to_string(),
        };
        let head = format!(
            "n={} s={:?} lmax={} truncation={}",
            self.n, self.s, self.max_degree, trunc
        );
        match &self.kind {
            ScheduleKind::PowerLaw { beta } => format!("power_law beta={beta:?} {head}"),
            ScheduleKind::Unit => format!("unit {head}"),
            ScheduleKind::Custom { sigma } => {
                let table: Vec<String> = sigma.iter().map(|v| format!("{v:?}")).collect();
                format!("custom {head} sigma={}", table.join(","))
            }
        }
    }

    pub fn parse_descriptor(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::Format("empty schedule descriptor".into()))?;
        let mut fields = std::collections::HashMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad schedule field {w:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Format(format!("schedule descriptor lacks {k}")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("{k}: {e}")))
        };
        let int = |k: &str| -> Result<usize> {
            get(k)?
                .parse::<usize>()
                .map_err(|e| Error::Format(format!("{k}: {e}")))
        };
        let n = int("n")?;
        let s = num("s")?;
        let lmax = int("lmax")?;
        let sched = match kind {
            "power_law" => Self::power_law(n, s, num("beta")?, lmax)?,
            "unit" => {
                let mut u = Self::unit(n, lmax)?;
                u.s = s;
                u
            }
            "custom" => {
                let sigma = get("sigma")?
                    .split(',')
                    .map(|v| v.parse::<f64>().map_err(|e| Error::Format(format!("sigma: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::custom(n, s, sigma, lmax)?
            }
            other => return Err(Error::Format(format!("unknown schedule kind {other:?}"))),
        };
        let trunc = match get("truncation")? {
            "auto" => Truncation::Auto,
            v => Truncation::Fixed(
                v.parse()
                    .map_err(|e| Error::Format(format!("truncation: {e}")))?,
            ),
        };
        sched.with_truncation(trunc)
    }
}

impl fmt::Display for VarianceSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Outcome of the summability test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub converges: bool,
    /// `Σ_{l ≤ L_max} (1 + l)^{2s+n−2} σ_l²`.
    pub partial_sum: f64,
    /// Bound (power law) or heuristic estimate (custom) for the remainder.
    pub tail_bound: f64,
    /// Power-law exponent of the terms: exact for power laws, fitted for
    /// custom tables.
    pub term_exponent: f64,
}

/// Tests `Σ_l (1 + l)^{2s+n−2} σ_l² < ∞`.
///
/// Power laws are decided analytically (`2s + n − 2 − 2β < −1`). Custom
/// tables are summed and their tail estimated from a power-law fit of the
/// terms over the upper half of the table; the verdict is that of the fit.
pub fn check_convergence(schedule: &VarianceSchedule) -> Result<ConvergenceReport> {
    let s = schedule.s;
    let n = schedule.n as f64;
    let l_max = schedule.max_degree;
    let weight = 2.0 * s + n - 2.0;
    let term = |l: usize| (1.0 + l as f64).powf(weight) * schedule.sigma(l).powi(2);
    let partial_sum: f64 = (0..=l_max).map(term).sum();
    match &schedule.kind {
        ScheduleKind::Unit => Ok(ConvergenceReport {
            converges: false,
            partial_sum,
            tail_bound: f64::INFINITY,
            term_exponent: weight,
        }),
        ScheduleKind::PowerLaw { beta } => {
            let e = weight - 2.0 * beta;
            let converges = e < -1.0;
            let tail_bound = if converges {
                (1.0 + l_max as f64).powf(e + 1.0) / (-e - 1.0)
            } else {
                f64::INFINITY
            };
            Ok(ConvergenceReport {
                converges,
                partial_sum,
                tail_bound,
                term_exponent: e,
            })
        }
        ScheduleKind::Custom { .. } => {
            let lo = (l_max / 2).max(1);
            let pts: Vec<(f64, f64)> = (lo..=l_max)
                .filter_map(|l| {
                    let t = term(l);
                    (t > 0.0).then(|| ((1.0 + l as f64).ln(), t.ln()))
                })
                .collect();
            if pts.len() < 3 {
                // A table that is eventually zero converges trivially.
                let all_zero = (lo..=l_max).all(|l| term(l) == 0.0);
                if all_zero {
                    return Ok(ConvergenceReport {
                        converges: true,
                        partial_sum,
                        tail_bound: 0.0,
                        term_exponent: f64::NEG_INFINITY,
                    });
                }
                return Err(Error::invalid(
                    "custom schedule too short to estimate its tail (need >= 3 nonzero terms in the upper half)",
                ));
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let fit = crate::stats::linear_fit(&xs, &ys)?;
            let q = fit.slope;
            let converges = q < -1.0;
            let tail_bound = if converges {
                let c = fit.intercept.exp();
                c * (1.0 + l_max as f64).powf(q + 1.0) / (-q - 1.0)
            } else {
                f64::INFINITY
            };
            Ok(ConvergenceReport {
                converges,
                partial_sum,
                tail_bound,
                term_exponent: q,
            })
        }
    }
}

/// `Σ_{l ≤ L} d_l (1 + l)^{2s} σ_l²`, the expected squared `H^s` norm of
/// the truncated density.
pub fn expected_hs_norm_sq(schedule: &VarianceSchedule, s: f64) -> f64 {
    let n = schedule.n;
    (0..=schedule.truncation_degree())
        .map(|l| multiplicity(l, n) as f64 * (1.0 + l as f64).powf(2.0 * s) * schedule.sigma(l).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_verdicts() {
        let a = VarianceSchedule::power_law(3, 4.1, 5.2, 40).unwrap();
        assert!(check_convergence(&a).unwrap().converges);
        let b = VarianceSchedule::power_law(2, 3.6, 3.0, 40).unwrap();
        assert!(!check_convergence(&b).unwrap().converges);
        for s in [0.0, 1.0, 4.5] {
            let mut u = VarianceSchedule::unit(3, 10).unwrap();
            u.s = s;
            let r = check_convergence(&u).unwrap();
            assert!(!r.converges && r.tail_bound.is_infinite());
        }
    }

    #[test]
    fn power_law_tail_bound_dominates_numeric_tail() {
        let sch = VarianceSchedule::power_law(3, 4.1, 5.5, 30).unwrap();
        let rep = check_convergence(&sch).unwrap();
        let e = 2.0 * 4.1 + 1.0 - 11.0;
        let numeric: f64 = (31..200_000).map(|l| (1.0 + l as f64).powf(e)).sum();
        assert!(numeric <= rep.tail_bound && rep.tail_bound < 1.5 * numeric);
    }

    #[test]
    fn custom_tables() {
        let sigma: Vec<f64> = (0..=60).map(|l| (1.0 + l as f64).powf(-5.5)).collect();
        let sch = VarianceSchedule::custom(3, 4.1, sigma.clone(), 60).unwrap();
        let rep = check_convergence(&sch).unwrap();
        assert!(rep.converges);
        assert!((rep.term_exponent - (8.2 + 1.0 - 11.0)).abs() < 1e-9);
        assert!(VarianceSchedule::custom(3, 4.1, sigma, 61).is_err());
        let flat = VarianceSchedule::custom(3, 4.1, vec![1.0; 41], 40).unwrap();
        assert!(!check_convergence(&flat).unwrap().converges);
    }

    #[test]
    fn defaults_scatter() {
        for n in [2, 3] {
            let sch = VarianceSchedule::default_scattering(n).unwrap();
            assert!(sch.s() > (n as f64 + 5.0) / 2.0);
            assert!(check_convergence(&sch).unwrap().converges);
            let l = sch.truncation_degree();
            assert!(l > 5 && l < sch.max_degree(), "n {n}: L = {l}");
        }
    }

    #[test]
    fn fixed_truncation_respected() {
        let sch = VarianceSchedule::unit(3, 40)
            .unwrap()
            .with_truncation(Truncation::Fixed(12))
            .unwrap();
        assert_eq!(sch.truncation_degree(), 12);
        assert!(VarianceSchedule::unit(3, 40)
            .unwrap()
            .with_truncation(Truncation::Fixed(41))
            .is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let cases = vec![
            VarianceSchedule::default_scattering(3).unwrap(),
            VarianceSchedule::unit(2, 17)
                .unwrap()
                .with_truncation(Truncation::Fixed(9))
                .unwrap(),
            VarianceSchedule::custom(2, 1.5, vec![1.0, 0.1, 1.0 / 3.0], 2).unwrap(),
        ];
        for c in cases {
            let back = VarianceSchedule::parse_descriptor(&c.descriptor()).unwrap();
            assert_eq!(back, c);
        }
        assert!(VarianceSchedule::parse_descriptor("bogus n=2").is_err());
    }
}
