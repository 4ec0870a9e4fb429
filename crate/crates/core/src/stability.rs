//! Equivalence of Gaussian coefficient laws through Kakutani's dichotomy.
//!
//! For independent `a_{lm} ~ N(M_{lm}, σ_{lm}²)` and a reference
//! `N(0, σ_l²)`, the product of the Hellinger affinities is positive iff
//!
//! ```text
//! C = Σ_{l ≥ l0} Σ_m [ M²/(4(σ_l² + σ²)) + ½ log((σ_l² + σ²)/(2σ_l σ)) ] < ∞,
//! ```
//!
//! which holds iff `Σ d_l [M²/(σ_l² + σ²) + (σ_l − σ)²/(σ_l σ)] < ∞`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harmonics::multiplicity;
use crate::randomwave::{check_convergence, ScheduleKind, VarianceSchedule};
use crate::specfun::check_dim;
use crate::stats::linear_fit;

/// `∫ sqrt(ρ₁ ρ₂)` for `ρ₁ = N(M, σ²)` and `ρ₂ = N(0, σ_ref²)`:
/// `(2σ'/(1 + σ'²))^{1/2} exp(−M'²/(4 + 4σ'²))` with `M' = M/σ_ref`,
/// `σ' = σ/σ_ref`.
pub fn hellinger_affinity_term(mean: f64, sigma: f64, sigma_ref: f64) -> Result<f64> {
    check_scales(sigma, sigma_ref)?;
    let (m, s) = (mean / sigma_ref, sigma / sigma_ref);
    Ok((2.0 * s / (1.0 + s * s)).sqrt() * (-m * m / (4.0 + 4.0 * s * s)).exp())
}

/// `−log` of the affinity, evaluated without cancellation.
pub fn kakutani_term(mean: f64, sigma: f64, sigma_ref: f64) -> Result<f64> {
    check_scales(sigma, sigma_ref)?;
    let (m, s) = (mean / sigma_ref, sigma / sigma_ref);
    // (1 + s²)/(2s) = 1 + (1 − s)²/(2s)
    Ok(m * m / (4.0 + 4.0 * s * s) + 0.5 * ((1.0 - s).powi(2) / (2.0 * s)).ln_1p())
}

fn check_scales(sigma: f64, sigma_ref: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite() && sigma_ref > 0.0 && sigma_ref.is_finite()) {
        return Err(Error::invalid(format!(
            "standard deviations must be positive, got σ = {sigma}, σ_ref = {sigma_ref}"
        )));
    }
    Ok(())
}

/// A degree-dependent law for means or standard deviations.
#[derive(Clone, Debug, PartialEq)]
pub enum DegreeLaw {
    Constant(f64),
    /// `c (1 + l)^{−β}`.
    PowerLaw { c: f64, beta: f64 },
    /// `1 + c (1 + l)^{−p}`.
    UnitPerturbation { c: f64, p: f64 },
    /// Values indexed by `l`; no closed form.
    Table(Vec<f64>),
}

impl DegreeLaw {
    pub fn value(&self, l: usize) -> Result<f64> {
        let x = 1.0 + l as f64;
        Ok(match self {
            DegreeLaw::Constant(v) => *v,
            DegreeLaw::PowerLaw { c, beta } => c * x.powf(-beta),
            DegreeLaw::UnitPerturbation { c, p } => 1.0 + c * x.powf(-p),
            DegreeLaw::Table(t) => *t
                .get(l)
                .ok_or_else(|| Error::invalid(format!("table has no entry for degree {l}")))?,
        })
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, DegreeLaw::Table(_))
    }

    /// `v − 1`, exact for unit perturbations.
    fn minus_one(&self, l: usize) -> Result<f64> {
        match self {
            DegreeLaw::UnitPerturbation { c, p } => Ok(c * (1.0 + l as f64).powf(-p)),
            other => Ok(other.value(l)? - 1.0),
        }
    }
}

/// Independent Gaussian coefficients `N(M_{lm}, σ_{lm}²)` for `l ≥ l0`;
/// degrees below `l0` may follow any absolutely continuous law and are
/// excluded from the series.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralGaussianSpec {
    pub n: usize,
    pub l0: usize,
    pub mean: DegreeLaw,
    pub sigma: DegreeLaw,
    /// Per-coefficient `(M, σ)` replacing the laws at `(l, m)`.
    pub overrides: BTreeMap<(usize, usize), (f64, f64)>,
}

impl GeneralGaussianSpec {
    /// Centred coefficients with the given standard deviations.
    pub fn centred(n: usize, sigma: DegreeLaw) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            l0: 0,
            mean: DegreeLaw::Constant(0.0),
            sigma,
            overrides: BTreeMap::new(),
        })
    }

    /// The law of a reference ensemble, as a spec.
    pub fn of_reference(reference: &ReferenceEnsemble) -> Result<Self> {
        let sigma = match reference {
            ReferenceEnsemble::Unit { .. } => DegreeLaw::Constant(1.0),
            ReferenceEnsemble::Scattering(s) => match s.kind() {
                ScheduleKind::PowerLaw { beta } => DegreeLaw::PowerLaw { c: 1.0, beta: *beta },
                ScheduleKind::Custom { sigma } => DegreeLaw::Table(sigma.clone()),
                ScheduleKind::Unit => DegreeLaw::Constant(1.0),
            },
        };
        Self::centred(reference.dim(), sigma)
    }

    pub fn with_l0(mut self, l0: usize) -> Self {
        self.l0 = l0;
        self
    }

    pub fn with_mean(mut self, mean: DegreeLaw) -> Self {
        self.mean = mean;
        self
    }

    /// `(M_{lm}, σ_{lm})`.
    pub fn params(&self, l: usize, m: usize) -> Result<(f64, f64)> {
        if let Some(&p) = self.overrides.get(&(l, m)) {
            return Ok(p);
        }
        Ok((self.mean.value(l)?, self.sigma.value(l)?))
    }

    fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        for (&(l, m), &(mean, s)) in &self.overrides {
            if m == 0 || m > multiplicity(l, self.n) {
                return Err(Error::invalid(format!("override index ({l}, {m}) out of range")));
            }
            if !(s > 0.0) || !mean.is_finite() {
                return Err(Error::invalid(format!("override ({l}, {m}) needs σ > 0")));
            }
        }
        Ok(())
    }
}

/// The two reference ensembles.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceEnsemble {
    /// `σ_l ≡ 1`.
    Unit { n: usize },
    /// A schedule satisfying the summability condition.
    Scattering(VarianceSchedule),
}

impl ReferenceEnsemble {
    pub fn unit(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ReferenceEnsemble::Unit { n })
    }

    /// Fails unless the schedule passes [`check_convergence`].
    pub fn scattering(schedule: VarianceSchedule) -> Result<Self> {
        let report = check_convergence(&schedule)?;
        if !report.converges {
            return Err(Error::NonScattering(format!(
                "term exponent {:.3} is not below −1",
                report.term_exponent
            )));
        }
        Ok(ReferenceEnsemble::Scattering(schedule))
    }

    pub fn dim(&self) -> usize {
        match self {
            ReferenceEnsemble::Unit { n } => *n,
            ReferenceEnsemble::Scattering(s) => s.dim(),
        }
    }

    pub fn sigma(&self, l: usize) -> Result<f64> {
        let s = match self {
            ReferenceEnsemble::Unit { .. } => 1.0,
            ReferenceEnsemble::Scattering(s) => s.sigma(l),
        };
        if !(s > 0.0) {
            return Err(Error::invalid(format!("reference σ vanishes at degree {l}")));
        }
        Ok(s)
    }

    fn law(&self) -> DegreeLaw {
        match self {
            ReferenceEnsemble::Unit { .. } => DegreeLaw::Constant(1.0),
            ReferenceEnsemble::Scattering(s) => match s.kind() {
                ScheduleKind::PowerLaw { beta } => DegreeLaw::PowerLaw { c: 1.0, beta: *beta },
                ScheduleKind::Custom { sigma } => DegreeLaw::Table(sigma.clone()),
                ScheduleKind::Unit => DegreeLaw::Constant(1.0),
            },
        }
    }

    fn label(&self) -> String {
        match self {
            ReferenceEnsemble::Unit { n } => format!("unit n={n}"),
            ReferenceEnsemble::Scattering(s) => format!("scattering {}", s.descriptor()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equivalent,
    Singular,
    Undetermined,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::Singular => "singular",
            Verdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KakutaniReport {
    pub l0: usize,
    /// `(L, C_L)` for `L = l0..=L_probe`.
    pub partial_sums: Vec<(usize, f64)>,
    /// Exponent `p` of the fit `C_L − C_{L−1} ≈ c L^{−p}` over the last
    /// decade; infinite when the increments vanish.
    pub fitted_exponent: f64,
    pub numeric: Verdict,
    /// Verdict from the comparison series when both laws have closed forms.
    pub analytic: Option<Verdict>,
    /// Log-slope of the comparison terms used by the analytic verdict.
    pub comparison_exponent: Option<f64>,
    /// The analytic verdict when available, otherwise the numeric one.
    pub verdict: Verdict,
    pub reference: String,
}

impl KakutaniReport {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().map(|p| p.1).unwrap_or(0.0)
    }

    /// Structured text: a summary line, then `L<TAB>C_L` rows.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let analytic = self.analytic.map(Verdict::label).unwrap_or("none");
        let _ = writeln!(
            s,
            "verdict={} numeric={} analytic={} fitted_exponent={} comparison_exponent={} l0={} L={} C_L={:e} reference={}",
            self.verdict.label(),
            self.numeric.label(),
            analytic,
            self.fitted_exponent,
            self.comparison_exponent.map(|q| q.to_string()).unwrap_or_else(|| "none".into()),
            self.l0,
            self.partial_sums.last().map(|p| p.0).unwrap_or(self.l0),
            self.total(),
            self.reference
        );
        s.push_str("L\tC_L\n");
        for (l, c) in &self.partial_sums {
            let _ = writeln!(s, "{l}\t{c:e}");
        }
        s
    }
}

/// Partial sums of `C` up to `L_probe` with numeric and (when available)
/// analytic verdicts.
///
/// Numeric rule: fit the degree increments to `c L^{−p}` over
/// `[L_probe/10, L_probe]`; `|p − 1| < 0.1` is undetermined, otherwise
/// `p > 1` is equivalent and `p < 1` singular. Analytic rule: the log-slope
/// `q` of the comparison terms `d_l [M²/(σ_l² + σ²) + (σ_l − σ)²/(σ_l σ)]`
/// between `l = 10⁴` and `10⁵`; the series converges iff `q < −1` (for
/// power-law terms `q = −1` diverges).
pub fn kakutani_series(spec: &GeneralGaussianSpec, reference: &ReferenceEnsemble, l_probe: usize) -> Result<KakutaniReport> {
    spec.validate()?;
    if spec.n != reference.dim() {
        return Err(Error::invalid(format!(
            "spec lives in dimension {} but the reference in {}",
            spec.n,
            reference.dim()
        )));
    }
    if l_probe < spec.l0 + 20 {
        return Err(Error::invalid("L_probe must exceed l0 by at least 20 degrees"));
    }
    let mut partial_sums = Vec::with_capacity(l_probe - spec.l0 + 1);
    let mut increments = Vec::with_capacity(l_probe - spec.l0 + 1);
    let mut total = 0.0;
    for l in spec.l0..=l_probe {
        let sref = reference.sigma(l)?;
        let mut inc = 0.0;
        for m in 1..=multiplicity(l, spec.n) {
            let (mean, s) = spec.params(l, m)?;
            inc += kakutani_term(mean, s, sref)?;
        }
        total += inc;
        increments.push((l, inc));
        partial_sums.push((l, total));
    }

    let start = (l_probe / 10).max(spec.l0 + 1);
    let tail: Vec<(f64, f64)> = increments
        .iter()
        .filter(|(l, inc)| *l >= start && *inc > 0.0)
        .map(|(l, inc)| ((*l as f64).ln(), inc.ln()))
        .collect();
    let fitted_exponent = if tail.len() < 3 {
        f64::INFINITY
    } else {
        let (x, y): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
        -linear_fit(&x, &y)?.slope
    };
    let numeric = if (fitted_exponent - 1.0).abs() < 0.1 {
        Verdict::Undetermined
    } else if fitted_exponent > 1.0 {
        Verdict::Equivalent
    } else {
        Verdict::Singular
    };

    let comparison_exponent = comparison_log_slope(spec, reference)?;
    let analytic = comparison_exponent.map(|q| if q < -1.0 - 1e-2 { Verdict::Equivalent } else { Verdict::Singular });
    Ok(KakutaniReport {
        l0: spec.l0,
        partial_sums,
        fitted_exponent,
        numeric,
        analytic,
        comparison_exponent,
        verdict: analytic.unwrap_or(numeric),
        reference: reference.label(),
    })
}

/// Per-degree comparison term, `None` without closed forms.
fn comparison_term(spec: &GeneralGaussianSpec, reference: &DegreeLaw, l: usize) -> Result<f64> {
    let m = spec.mean.value(l)?;
    let s = spec.sigma.value(l)?;
    let r = reference.value(l)?;
    check_scales(s, r)?;
    let gap = match (reference, &spec.sigma) {
        (DegreeLaw::Constant(c), law) if *c == 1.0 => law.minus_one(l)?,
        _ => s - r,
    };
    Ok(multiplicity(l, spec.n) as f64 * (m * m / (r * r + s * s) + gap * gap / (r * s)))
}

fn comparison_log_slope(spec: &GeneralGaussianSpec, reference: &ReferenceEnsemble) -> Result<Option<f64>> {
    let law = reference.law();
    if !(spec.mean.is_closed_form() && spec.sigma.is_closed_form() && law.is_closed_form()) {
        return Ok(None);
    }
    let (l1, l2) = (10_000usize, 100_000usize);
    let (g1, g2) = (comparison_term(spec, &law, l1)?, comparison_term(spec, &law, l2)?);
    if g1 == 0.0 && g2 == 0.0 {
        return Ok(Some(f64::NEG_INFINITY));
    }
    if g1 == 0.0 || g2 == 0.0 || !g1.is_finite() || !g2.is_finite() {
        return Ok(None);
    }
    Ok(Some((g2 / g1).ln() / (l2 as f64 / l1 as f64).ln()))
}

/// Which nodal law a spec inherits.
#[derive(Clone, Debug, PartialEq)]
pub enum Regime {
    /// Equivalent to `σ_l ≡ 1`.
    T1,
    /// Equivalent to the given scattering schedule.
    T2(VarianceSchedule),
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub unit: KakutaniReport,
    pub scattering: Option<KakutaniReport>,
    /// Why no scattering comparison was made, if none was.
    pub note: Option<String>,
}

/// Degrees summed by [`regime_verdict`].
pub const REGIME_PROBE_DEGREE: usize = 2000;

/// Compares `spec` with the unit reference and with a scattering schedule:
/// `candidate` if given, otherwise the power law `σ_l = (1 + l)^{−β}` read
/// off a centred power-law spec, with `s` halfway between `(n + 5)/2` and
/// `β − (n − 1)/2`. Only that candidate is tested; the absence of every
/// other summable schedule is not certified.
pub fn regime_verdict(spec: &GeneralGaussianSpec, candidate: Option<VarianceSchedule>) -> Result<RegimeVerdict> {
    let l_probe = REGIME_PROBE_DEGREE.max(spec.l0 + 200);
    let unit = kakutani_series(spec, &ReferenceEnsemble::unit(spec.n)?, l_probe)?;
    if unit.verdict == Verdict::Equivalent {
        return Ok(RegimeVerdict {
            regime: Regime::T1,
            unit,
            scattering: None,
            note: None,
        });
    }
    let n = spec.n as f64;
    let candidate = match candidate {
        Some(c) => Ok(c),
        None => match (&spec.mean, &spec.sigma) {
            (DegreeLaw::Constant(m), DegreeLaw::PowerLaw { beta, .. }) if *m == 0.0 => {
                let s_min = (n + 5.0) / 2.0;
                let s_max = beta - (n - 1.0) / 2.0;
                if s_max > s_min {
                    VarianceSchedule::power_law(spec.n, 0.5 * (s_min + s_max), *beta, 40).map_err(|e| e.to_string())
                } else {
                    Err(format!(
                        "β = {beta} admits no s > (n + 5)/2 with β > s + (n − 1)/2"
                    ))
                }
            }
            _ => Err("no candidate schedule supplied and none can be fitted".to_string()),
        },
    };
    let candidate = match candidate {
        Ok(c) => c,
        Err(note) => {
            return Ok(RegimeVerdict {
                regime: Regime::Neither,
                unit,
                scattering: None,
                note: Some(note),
            })
        }
    };
    let reference = match ReferenceEnsemble::scattering(candidate.clone()) {
        Ok(r) => r,
        Err(e) => {
            return Ok(RegimeVerdict {
                regime: Regime::Neither,
                unit,
                scattering: None,
                note: Some(e.to_string()),
            })
        }
    };
    let report = kakutani_series(spec, &reference, l_probe)?;
    let regime = if report.verdict == Verdict::Equivalent {
        Regime::T2(candidate)
    } else {
        Regime::Neither
    };
    Ok(RegimeVerdict {
        regime,
        unit,
        scattering: Some(report),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affinity_values() {
        assert_eq!(hellinger_affinity_term(0.0, 1.0, 1.0).unwrap(), 1.0);
        assert!((hellinger_affinity_term(2.0, 1.0, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((hellinger_affinity_term(0.0, 2.0, 1.0).unwrap() - 0.8f64.sqrt()).abs() < 1e-15);
        // scaling both standard deviations leaves the affinity unchanged
        let a = hellinger_affinity_term(0.3, 1.7, 1.0).unwrap();
        let b = hellinger_affinity_term(0.6, 3.4, 2.0).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(hellinger_affinity_term(0.0, 0.0, 1.0).is_err());
        assert!(hellinger_affinity_term(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn term_is_minus_log_affinity() {
        for (m, s, r) in [(0.0, 1.0, 1.0), (1.3, 0.4, 1.0), (-0.2, 2.5, 0.7), (0.0, 1.0 + 1e-9, 1.0)] {
            let t = kakutani_term(m, s, r).unwrap();
            let a = hellinger_affinity_term(m, s, r).unwrap();
            assert!((t + a.ln()).abs() <= 1e-15 + 1e-12 * t, "{m} {s} {r}");
        }
        // the tiny-gap term keeps full relative accuracy
        let t = kakutani_term(0.0, 1.0 + 1e-9, 1.0).unwrap();
        assert!((t / 0.25e-18 - 1.0).abs() < 1e-6, "{t}");
    }

    #[test]
    fn identical_laws_have_zero_series() {
        let spec = GeneralGaussianSpec::centred(3, DegreeLaw::Constant(1.0)).unwrap();
        let r = kakutani_series(&spec, &ReferenceEnsemble::unit(3).unwrap(), 200).unwrap();
        assert!(r.partial_sums.iter().all(|p| p.1 == 0.0));
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert_eq!(r.numeric, Verdict::Equivalent);
    }

    #[test]
    fn unit_perturbations() {
        let unit = ReferenceEnsemble::unit(3).unwrap();
        let slow = GeneralGaussianSpec::centred(3, DegreeLaw::UnitPerturbation { c: 1.0, p: 1.0 }).unwrap();
        let r = kakutani_series(&slow, &unit, 2000).unwrap();
        assert_eq!(r.analytic, Some(Verdict::Singular));
        assert_eq!(r.verdict, Verdict::Singular);
        assert!((r.fitted_exponent - 1.0).abs() < 0.1);
        let fast = GeneralGaussianSpec::centred(3, DegreeLaw::UnitPerturbation { c: 1.0, p: 2.0 }).unwrap();
        let r = kakutani_series(&fast, &unit, 2000).unwrap();
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert_eq!(r.numeric, Verdict::Equivalent);
    }

    #[test]
    fn regimes() {
        let unit = GeneralGaussianSpec::centred(3, DegreeLaw::Constant(1.0)).unwrap();
        assert_eq!(regime_verdict(&unit, None).unwrap().regime, Regime::T1);

        let decaying = GeneralGaussianSpec::centred(3, DegreeLaw::PowerLaw { c: 1.0, beta: 5.5 }).unwrap();
        match regime_verdict(&decaying, None).unwrap().regime {
            Regime::T2(s) => assert_eq!(s.kind(), &ScheduleKind::PowerLaw { beta: 5.5 }),
            other => panic!("expected T2, got {other:?}"),
        }

        let slow = GeneralGaussianSpec::centred(3, DegreeLaw::PowerLaw { c: 1.0, beta: 0.25 }).unwrap();
        let v = regime_verdict(&slow, None).unwrap();
        assert_eq!(v.regime, Regime::Neither);
        assert_eq!(v.unit.verdict, Verdict::Singular);
        assert!(v.note.is_some());
    }

    #[test]
    fn l0_excludes_low_degrees() {
        let mut spec = GeneralGaussianSpec::centred(2, DegreeLaw::Constant(1.0)).unwrap().with_l0(3);
        spec.overrides.insert((1, 1), (100.0, 9.0));
        let r = kakutani_series(&spec, &ReferenceEnsemble::unit(2).unwrap(), 100).unwrap();
        assert_eq!(r.total(), 0.0);
        assert_eq!(r.partial_sums[0].0, 3);
        spec.overrides.insert((5, 2), (1.0, 1.0));
        let r = kakutani_series(&spec, &ReferenceEnsemble::unit(2).unwrap(), 100).unwrap();
        assert!((r.total() - 1.0 / 8.0).abs() < 1e-15);
        spec.overrides.insert((5, 9), (1.0, 1.0));
        assert!(kakutani_series(&spec, &ReferenceEnsemble::unit(2).unwrap(), 100).is_err());
    }

    #[test]
    fn non_scattering_reference_rejected() {
        let s = VarianceSchedule::power_law(3, 4.1, 1.0, 40).unwrap();
        assert!(ReferenceEnsemble::scattering(s).is_err());
    }

    #[test]
    fn report_text_has_summary_line() {
        let spec = GeneralGaussianSpec::centred(3, DegreeLaw::UnitPerturbation { c: 1.0, p: 2.0 }).unwrap();
        let r = kakutani_series(&spec, &ReferenceEnsemble::unit(3).unwrap(), 100).unwrap();
        let text = r.to_text();
        assert!(text.starts_with("verdict=equivalent"));
        assert_eq!(text.lines().count(), 2 + 101);
    }
}
