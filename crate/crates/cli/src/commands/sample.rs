//! `sample`: coefficient dumps and the classification of the zeros of `f`.

use monowave::randomwave::{min_modulus_on_sphere, Vanishing};
use monowave::stats::wilson_interval;

use super::{coefficients, fmt, for_each_seed, SPHERE_RESOLUTION};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::OutputDir;

struct SeedRow {
    seed: u64,
    text: String,
    class: Vanishing,
    min_value: f64,
    threshold: f64,
}

pub fn run(config: &ExperimentConfig) -> CliResult<()> {
    let rows = for_each_seed(config, |seed| {
        let c = coefficients(config, seed)?;
        let m = min_modulus_on_sphere(&c, SPHERE_RESOLUTION)?;
        Ok(SeedRow {
            seed,
            text: c.to_text(),
            class: m.classification,
            min_value: m.min_value,
            threshold: m.threshold,
        })
    })?;
    let mut out = OutputDir::create(&config.out)?;
    let mut table = String::from("seed\tclass\tmin_modulus\tthreshold\n");
    for r in &rows {
        out.write(&format!("coefficients/seed_{}.txt", r.seed), &r.text)?;
        table.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.seed,
            r.class.label(),
            fmt(r.min_value),
            fmt(r.threshold)
        ));
    }
    out.write("classification.tsv", &table)?;
    out.write("summary.txt", &summary(config, &rows)?)?;
    out.finish("sample", &config.hash())?;
    Ok(())
}

fn summary(config: &ExperimentConfig, rows: &[SeedRow]) -> CliResult<String> {
    let count = |v: Vanishing| rows.iter().filter(|r| r.class == v).count();
    let nonvanishing = count(Vanishing::Nonvanishing);
    let p = wilson_interval(nonvanishing, rows.len(), 1.96)?;
    Ok(format!(
        "dim\t{}\nensemble\t{}\nseeds\t{}\nnonvanishing\t{}\nvanishing\t{}\nundetermined\t{}\n\
         p_n\t{}\nwilson95_lower\t{}\nwilson95_upper\t{}\n",
        config.n,
        config.ensemble.descriptor(),
        rows.len(),
        nonvanishing,
        count(Vanishing::Vanishing),
        count(Vanishing::Undetermined),
        fmt(p.estimate),
        fmt(p.lower),
        fmt(p.upper),
    ))
}
