//! `report`: plot data and a slope summary from the `counts.tsv` of a
//! nodal sweep. The outputs depend on that file alone.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use monowave::stats::linear_fit;

use super::fmt;
use crate::config::sha256_hex;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// `(seed, R, N_total)` rows of a counts table.
pub fn parse_counts(text: &str) -> CliResult<Vec<(u64, f64, f64)>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::config("empty counts table"))?
        .split('\t')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| CliError::config(format!("counts table lacks a {name} column")))
    };
    let (cs, cr, ct) = (col("seed")?, col("R")?, col("total")?);
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let bad = || CliError::config(format!("malformed counts row {}", i + 2));
        let get = |k: usize| f.get(k).copied().ok_or_else(bad);
        rows.push((
            get(cs)?.parse().map_err(|_| bad())?,
            get(cr)?.parse().map_err(|_| bad())?,
            get(ct)?.parse().map_err(|_| bad())?,
        ));
    }
    if rows.is_empty() {
        return Err(CliError::config("counts table has no rows"));
    }
    Ok(rows)
}

pub fn run(sweep_dir: &Path, out_dir: &Path) -> CliResult<()> {
    if !sweep_dir.is_dir() {
        return Err(CliError::config(format!("sweep directory {} not found", sweep_dir.display())));
    }
    let path = sweep_dir.join("counts.tsv");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let rows = parse_counts(&text)?;

    // radii are grouped by exact value
    let mut by_radius: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    let mut by_seed: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for &(seed, r, total) in &rows {
        by_radius.entry(r.to_bits()).or_insert((r, Vec::new())).1.push(total);
        by_seed.entry(seed).or_default().push((r, total));
    }
    let mut means: Vec<(f64, f64)> = by_radius
        .values()
        .map(|(r, v)| (*r, v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    means.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = OutputDir::create(out_dir)?;
    out.write("plot_data.tsv", &plot_table(&means))?;
    for (seed, points) in &by_seed {
        out.write(&format!("plot_seed_{seed}.tsv"), &plot_table(points))?;
    }
    let mut summary = format!("seeds\t{}\nradii\t{}\nreference_slope\t{}\n", by_seed.len(), means.len(), fmt(1.0 / PI));
    if means.len() >= 3 {
        let x: Vec<f64> = means.iter().map(|p| p.0).collect();
        let y: Vec<f64> = means.iter().map(|p| p.1).collect();
        let fit = linear_fit(&x, &y)?;
        summary.push_str(&format!(
            "slope\t{}\nslope_ci_lower\t{}\nslope_ci_upper\t{}\nintercept\t{}\nrelative_deviation\t{}\n",
            fmt(fit.slope),
            fmt(fit.slope_ci.0),
            fmt(fit.slope_ci.1),
            fmt(fit.intercept),
            fmt(fit.slope * PI - 1.0)
        ));
    } else {
        summary.push_str("slope\t-\n");
    }
    out.write("summary.txt", &summary)?;
    out.finish("report", &sha256_hex(text.as_bytes()))?;
    Ok(())
}

fn plot_table(points: &[(f64, f64)]) -> String {
    let mut s = String::from("R\tN_total\tN_total_over_R\treference_slope\n");
    for &(r, n) in points {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", fmt(r), fmt(n), fmt(n / r), fmt(1.0 / PI)));
    }
    s
}
