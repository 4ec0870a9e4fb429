//! `kakutani`: equivalence of a Gaussian coefficient law to a reference
//! ensemble, read from a TOML description:
//!
//! ```toml
//! [spec]
//! dim = 3
//! l0 = 0
//! l_probe = 2000
//! mean = { law = "constant", value = 0.0 }
//! sigma = { law = "unit_perturbation", c = 1.0, p = 2.0 }
//!
//! [[spec.override]]
//! l = 1
//! m = 1
//! mean = 0.5
//! sigma = 2.0
//!
//! [reference]
//! kind = "unit"            # or "power_law" / "custom" with s, beta, sigma, max_degree
//!
//! [candidate]              # optional scattering schedule for the regime verdict
//! kind = "power_law"
//! s = 4.5
//! beta = 8.0
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use monowave::randomwave::VarianceSchedule;
use monowave::stability::{
    kakutani_series, regime_verdict, DegreeLaw, GeneralGaussianSpec, ReferenceEnsemble, Regime,
};
use serde::Deserialize;

use super::fmt;
use crate::config::sha256_hex;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KakutaniFile {
    spec: SpecSection,
    #[serde(default)]
    reference: Option<ScheduleSpec>,
    #[serde(default)]
    candidate: Option<ScheduleSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecSection {
    dim: usize,
    #[serde(default)]
    l0: usize,
    #[serde(default = "default_probe")]
    l_probe: usize,
    #[serde(default)]
    mean: Option<LawSpec>,
    sigma: LawSpec,
    #[serde(default, rename = "override")]
    overrides: Vec<OverrideSpec>,
}

fn default_probe() -> usize {
    2000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
enum LawSpec {
    Constant { value: f64 },
    PowerLaw {
        #[serde(default = "one")]
        c: f64,
        beta: f64,
    },
    UnitPerturbation { c: f64, p: f64 },
    Table { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl LawSpec {
    fn law(&self) -> DegreeLaw {
        match self.clone() {
            LawSpec::Constant { value } => DegreeLaw::Constant(value),
            LawSpec::PowerLaw { c, beta } => DegreeLaw::PowerLaw { c, beta },
            LawSpec::UnitPerturbation { c, p } => DegreeLaw::UnitPerturbation { c, p },
            LawSpec::Table { values } => DegreeLaw::Table(values),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideSpec {
    l: usize,
    m: usize,
    #[serde(default)]
    mean: f64,
    sigma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSpec {
    kind: String,
    s: Option<f64>,
    beta: Option<f64>,
    sigma: Option<Vec<f64>>,
    max_degree: Option<usize>,
}

impl ScheduleSpec {
    fn schedule(&self, n: usize) -> CliResult<VarianceSchedule> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::config(format!("{} schedules need {name}", self.kind)));
        let max_degree = self.max_degree.unwrap_or(40);
        Ok(match self.kind.as_str() {
            "power_law" => VarianceSchedule::power_law(n, need(self.s, "s")?, need(self.beta, "beta")?, max_degree)?,
            "custom" => {
                let sigma = self
                    .sigma
                    .clone()
                    .ok_or_else(|| CliError::config("custom schedules need a sigma table"))?;
                let max_degree = self.max_degree.unwrap_or(sigma.len().saturating_sub(1));
                VarianceSchedule::custom(n, need(self.s, "s")?, sigma, max_degree)?
            }
            other => return Err(CliError::config(format!("unknown scattering schedule kind {other:?}"))),
        })
    }

    fn reference(&self, n: usize) -> CliResult<ReferenceEnsemble> {
        if self.kind == "unit" {
            return Ok(ReferenceEnsemble::unit(n)?);
        }
        Ok(ReferenceEnsemble::scattering(self.schedule(n)?)?)
    }
}

pub struct KakutaniJob {
    spec: GeneralGaussianSpec,
    reference: ReferenceEnsemble,
    candidate: Option<VarianceSchedule>,
    l_probe: usize,
}

impl KakutaniJob {
    pub fn load(path: &Path, dim: Option<usize>) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, dim)
    }

    pub fn parse(text: &str, dim: Option<usize>) -> CliResult<Self> {
        let file: KakutaniFile = toml::from_str(text)?;
        let n = dim.unwrap_or(file.spec.dim);
        let mut spec = GeneralGaussianSpec::centred(n, file.spec.sigma.law())?.with_l0(file.spec.l0);
        if let Some(mean) = &file.spec.mean {
            spec = spec.with_mean(mean.law());
        }
        let mut overrides = BTreeMap::new();
        for o in &file.spec.overrides {
            overrides.insert((o.l, o.m), (o.mean, o.sigma));
        }
        spec.overrides = overrides;
        let reference = match &file.reference {
            Some(r) => r.reference(n)?,
            None => ReferenceEnsemble::unit(n)?,
        };
        let candidate = file.candidate.as_ref().map(|c| c.schedule(n)).transpose()?;
        Ok(Self {
            spec,
            reference,
            candidate,
            l_probe: file.spec.l_probe,
        })
    }

    fn hash(&self) -> String {
        let canonical = format!(
            "{:?}\n{:?}\n{:?}\n{}\n",
            self.spec, self.reference, self.candidate, self.l_probe
        );
        sha256_hex(canonical.as_bytes())
    }
}

pub fn run(job: &KakutaniJob, out_dir: &Path) -> CliResult<()> {
    let report = kakutani_series(&job.spec, &job.reference, job.l_probe)?;
    let regime = regime_verdict(&job.spec, job.candidate.clone())?;
    let mut text = format!(
        "regime\t{}\nunit_verdict\t{}\nunit_total\t{}\n",
        match &regime.regime {
            Regime::T1 => "T1".to_string(),
            Regime::T2(s) => format!("T2 ({})", s.descriptor()),
            Regime::Neither => "neither".to_string(),
        },
        regime.unit.verdict.label(),
        fmt(regime.unit.total())
    );
    if let Some(s) = &regime.scattering {
        text.push_str(&format!(
            "scattering_verdict\t{}\nscattering_total\t{}\nscattering_reference\t{}\n",
            s.verdict.label(),
            fmt(s.total()),
            s.reference
        ));
    }
    if let Some(note) = &regime.note {
        text.push_str(&format!("note\t{note}\n"));
    }
    let mut out = OutputDir::create(out_dir)?;
    out.write("kakutani.txt", &report.to_text())?;
    out.write("regime.txt", &text)?;
    out.finish("kakutani", &job.hash())?;
    Ok(())
}
