//! `nodal-sweep`: nodal counts `N_u(R)` per seed and their growth rate.

use std::f64::consts::PI;

use monowave::field::WaveField;
use monowave::nodal::{count_in_ball, extract_from_field, match_shells, slope_estimate, BallCount, ScanSpec, SlopeEstimate};
use monowave::randomwave::{min_modulus_on_sphere, Vanishing};
use monowave::stats::wilson_interval;

use super::{coefficients, fmt, for_each_seed, SPHERE_RESOLUTION};
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::OutputDir;

struct SeedSweep {
    seed: u64,
    class: Vanishing,
    counts: Vec<BallCount>,
    slope: Option<SlopeEstimate>,
    /// `(k₀, annulus constant)` for nonvanishing seeds.
    shells: Option<(Option<i64>, f64)>,
    components: String,
}

impl SeedSweep {
    fn other_is_constant(&self) -> bool {
        self.counts.windows(2).all(|w| w[0].other == w[1].other)
    }
}

pub fn run(config: &ExperimentConfig) -> CliResult<()> {
    let spec = ScanSpec::ball(config.n, config.rmax, config.resolution)
        .with_geometry(config.geometry)
        .with_budget(config.memory_budget);
    let rows = for_each_seed(config, |seed| {
        let c = coefficients(config, seed)?;
        let class = min_modulus_on_sphere(&c, SPHERE_RESOLUTION)?.classification;
        let field = WaveField::exact(c.clone())?;
        let set = extract_from_field(&field, &spec)?;
        let counts = config
            .radii
            .iter()
            .map(|&r| count_in_ball(&set, r))
            .collect::<Result<Vec<_>, _>>()?;
        let table: Vec<(f64, f64)> = config.radii.iter().zip(&counts).map(|(&r, c)| (r, c.total as f64)).collect();
        let slope = slope_estimate(&table).ok();
        let shells = if class == Vanishing::Nonvanishing {
            match_shells(&set, &c).ok().map(|s| (s.k0, s.annulus_constant))
        } else {
            None
        };
        Ok(SeedSweep {
            seed,
            class,
            counts,
            slope,
            shells,
            components: set.to_tsv(),
        })
    })?;

    let mut out = OutputDir::create(&config.out)?;
    let mut counts = String::from("seed\tclass\tR\ttotal\tsphere\tother\tnoncompact\n");
    let mut slopes = String::from("seed\tclass\tslope\tci_lower\tci_upper\tother_constant\tk0\tannulus_constant\n");
    for row in &rows {
        for (r, c) in config.radii.iter().zip(&row.counts) {
            counts.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.seed,
                row.class.label(),
                fmt(*r),
                c.total,
                c.sphere,
                c.other,
                c.noncompact
            ));
        }
        let (slope, lo, hi) = match &row.slope {
            Some(s) => (fmt(s.slope), fmt(s.confidence_interval.0), fmt(s.confidence_interval.1)),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let (k0, annulus) = match row.shells {
            Some((k0, c)) => (k0.map_or("-".into(), |k| k.to_string()), fmt(c)),
            None => ("-".into(), "-".into()),
        };
        slopes.push_str(&format!(
            "{}\t{}\t{slope}\t{lo}\t{hi}\t{}\t{k0}\t{annulus}\n",
            row.seed,
            row.class.label(),
            row.other_is_constant()
        ));
        out.write(&format!("components_seed_{}.tsv", row.seed), &row.components)?;
    }
    out.write("counts.tsv", &counts)?;
    out.write("slopes.tsv", &slopes)?;
    out.write("summary.txt", &summary(config, &rows)?)?;
    out.finish("nodal-sweep", &config.hash())?;
    Ok(())
}

fn summary(config: &ExperimentConfig, rows: &[SeedSweep]) -> CliResult<String> {
    let nonvanishing: Vec<&SeedSweep> = rows.iter().filter(|r| r.class == Vanishing::Nonvanishing).collect();
    let p = wilson_interval(nonvanishing.len(), rows.len(), 1.96)?;
    let slopes: Vec<f64> = nonvanishing.iter().filter_map(|r| r.slope.map(|s| s.slope)).collect();
    let mean_slope = if slopes.is_empty() {
        "-".to_string()
    } else {
        fmt(slopes.iter().sum::<f64>() / slopes.len() as f64)
    };
    let constant = nonvanishing.iter().filter(|r| r.other_is_constant()).count();
    Ok(format!(
        "dim\t{}\nensemble\t{}\nseeds\t{}\nrmax\t{}\nresolution\t{}\n\
         nonvanishing\t{}\np_n\t{}\nwilson95_lower\t{}\nwilson95_upper\t{}\n\
         mean_slope_nonvanishing\t{mean_slope}\nslopes_fitted\t{}\nreference_slope\t{}\n\
         other_constant_nonvanishing\t{constant}/{}\n",
        config.n,
        config.ensemble.descriptor(),
        rows.len(),
        fmt(config.rmax),
        fmt(config.resolution),
        nonvanishing.len(),
        fmt(p.estimate),
        fmt(p.lower),
        fmt(p.upper),
        slopes.len(),
        fmt(1.0 / PI),
        nonvanishing.len(),
    ))
}
