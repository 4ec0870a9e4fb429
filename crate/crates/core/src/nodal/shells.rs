//! Predicted nodal shells `r = Θ(θ) + (k + (n + 1)/4)π` for densities
//! without zeros, where `f = |f| e^{iΘ}`, and their comparison with
//! extracted components.

use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonics::Direction;
use crate::randomwave::{min_modulus_on_sphere, CoefficientSet, DensityF, Vanishing};

use super::{graph_over_sphere_check, NodalComponents};

const CIRCLE_NODES: usize = 1024;
const SPHERE_ROWS: usize = 129;
const SPHERE_COLS: usize = 256;

/// Grid resolution of the nonvanishing certificate.
const CERTIFICATE_RESOLUTION: usize = 64;

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// A continuous lift of the phase of `f` on an angular grid.
///
/// `n = 2`: `1024` equally spaced angles, unwrapped around the circle.
/// `n = 3`: colatitudes `iπ/128` (poles included) times `256` longitudes,
/// unwrapped along each meridian from the north pole.
#[derive(Clone, Debug)]
pub struct PhaseMap {
    density: DensityF,
    n: usize,
    phase: Vec<f64>,
    winding: i64,
}

impl PhaseMap {
    pub fn new(coeffs: &CoefficientSet) -> Result<Self> {
        let density = DensityF::new(coeffs)?;
        let n = coeffs.dim();
        let raw = |d: &Direction| -> Result<f64> {
            let f = density.eval(d)?;
            Ok(f.im.atan2(f.re))
        };
        let (phase, winding) = if n == 2 {
            let mut phase = Vec::with_capacity(CIRCLE_NODES);
            let mut last = raw(&Direction::planar(0.0))?;
            phase.push(last);
            for j in 1..CIRCLE_NODES {
                let p = raw(&Direction::planar(2.0 * PI * j as f64 / CIRCLE_NODES as f64))?;
                last += wrap(p - last);
                phase.push(last);
            }
            let closing = last + wrap(phase[0] - last);
            let winding = ((closing - phase[0]) / (2.0 * PI)).round() as i64;
            (phase, winding)
        } else {
            let mut phase = vec![0.0; SPHERE_ROWS * SPHERE_COLS];
            let pole = raw(&Direction::spatial(0.0, 0.0))?;
            for j in 0..SPHERE_COLS {
                let phi = 2.0 * PI * j as f64 / SPHERE_COLS as f64;
                let mut last = pole;
                phase[j] = pole;
                for i in 1..SPHERE_ROWS {
                    let theta = PI * i as f64 / (SPHERE_ROWS - 1) as f64;
                    let p = raw(&Direction::spatial(theta, phi))?;
                    last += wrap(p - last);
                    phase[i * SPHERE_COLS + j] = last;
                }
            }
            let mut winding = 0i64;
            for i in 1..SPHERE_ROWS - 1 {
                let row = &phase[i * SPHERE_COLS..(i + 1) * SPHERE_COLS];
                let total: f64 = (0..SPHERE_COLS)
                    .map(|j| wrap(row[(j + 1) % SPHERE_COLS] - row[j]))
                    .sum();
                let w = (total / (2.0 * PI)).round() as i64;
                if w.abs() > winding.abs() {
                    winding = w;
                }
            }
            (phase, winding)
        };
        Ok(Self {
            density,
            n,
            phase,
            winding,
        })
    }

    /// Winding of the lift: around the circle (`n = 2`), or the largest
    /// winding around a circle of latitude (`n = 3`). Zero when the lift is
    /// single valued.
    pub fn winding(&self) -> i64 {
        self.winding
    }

    /// `Θ(dir)`, the branch closest to the lift at the nearest grid node.
    pub fn phase_at(&self, dir: &Direction) -> Result<f64> {
        let f = self.density.eval(dir)?;
        let raw = f.im.atan2(f.re);
        let reference = match *dir {
            Direction::Planar { phi } => {
                let j = (phi.rem_euclid(2.0 * PI) / (2.0 * PI) * CIRCLE_NODES as f64).round() as usize;
                self.phase[j % CIRCLE_NODES]
            }
            Direction::Spatial { theta, phi } => {
                let i = (theta / PI * (SPHERE_ROWS - 1) as f64).round() as usize;
                let j = (phi.rem_euclid(2.0 * PI) / (2.0 * PI) * SPHERE_COLS as f64).round() as usize;
                self.phase[i.min(SPHERE_ROWS - 1) * SPHERE_COLS + j % SPHERE_COLS]
            }
        };
        Ok(raw + 2.0 * PI * ((reference - raw) / (2.0 * PI)).round())
    }

    /// `(n + 1)π/4`, the shift of shell `k = 0`.
    pub fn base_offset(&self) -> f64 {
        (self.n as f64 + 1.0) * PI / 4.0
    }
}

/// The predicted shell `r = Θ(θ) + (k + (n + 1)/4)π`.
#[derive(Clone, Debug)]
pub struct ShellPrediction {
    pub k: i64,
    map: Arc<PhaseMap>,
}

impl ShellPrediction {
    pub fn radius(&self, dir: &Direction) -> Result<f64> {
        Ok(self.map.phase_at(dir)? + self.k as f64 * PI + self.map.base_offset())
    }

    pub fn phase_map(&self) -> &PhaseMap {
        &self.map
    }
}

fn certified_map(coeffs: &CoefficientSet) -> Result<PhaseMap> {
    let mm = min_modulus_on_sphere(coeffs, CERTIFICATE_RESOLUTION)?;
    if mm.classification != Vanishing::Nonvanishing {
        return Err(Error::Degenerate(format!(
            "f is {} on the sphere (min |f| = {:.3e}); its phase has no global lift",
            mm.classification.label(),
            mm.min_value
        )));
    }
    PhaseMap::new(coeffs)
}

/// Shells for `k` in `ks`; fails unless `f` is certified nonvanishing.
pub fn predicted_shells(coeffs: &CoefficientSet, ks: RangeInclusive<i64>) -> Result<Vec<ShellPrediction>> {
    let map = Arc::new(certified_map(coeffs)?);
    Ok(ks
        .map(|k| ShellPrediction {
            k,
            map: Arc::clone(&map),
        })
        .collect())
}

/// A compact component paired with its nearest predicted shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellMatch {
    pub component_id: usize,
    pub k: i64,
    pub mean_radius: f64,
    /// Largest radial distance from the sampled vertices to the shell.
    pub max_deviation: f64,
    pub graph: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellReport {
    pub matches: Vec<ShellMatch>,
    /// Smallest `c` with every matched component inside
    /// `|(|x| − (k + (n + 1)/4)π)| < c`.
    pub annulus_constant: f64,
    /// Smallest `k₀` such that all matched components with `k ≥ k₀` are
    /// graphs over the sphere.
    pub k0: Option<i64>,
    pub winding: i64,
}

/// Matches every compact component to a predicted shell.
pub fn match_shells(set: &NodalComponents, coeffs: &CoefficientSet) -> Result<ShellReport> {
    if set.dim != coeffs.dim() {
        return Err(Error::invalid("scan and coefficients live in different dimensions"));
    }
    let map = certified_map(coeffs)?;
    let mut matches = Vec::new();
    for c in set.compact() {
        let mut offsets = Vec::with_capacity(c.samples.len());
        for p in &c.samples {
            let x = &p[..set.dim];
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dir = Direction::from_cartesian(x)?;
            offsets.push(r - map.phase_at(&dir)? - map.base_offset());
        }
        let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
        let k = (mean / PI).round() as i64;
        let max_deviation = offsets
            .iter()
            .map(|o| (o - k as f64 * PI).abs())
            .fold(0.0, f64::max);
        matches.push(ShellMatch {
            component_id: c.id,
            k,
            mean_radius: c.mean_radius,
            max_deviation,
            graph: graph_over_sphere_check(c),
        });
    }
    let annulus_constant = set
        .compact()
        .zip(&matches)
        .map(|(c, m)| {
            let centre = m.k as f64 * PI + map.base_offset();
            (c.r_min - centre).abs().max((c.r_max - centre).abs())
        })
        .fold(0.0, f64::max);
    let mut k0 = None;
    let mut sorted: Vec<&ShellMatch> = matches.iter().collect();
    sorted.sort_by_key(|m| m.k);
    for m in sorted.iter().rev() {
        if !m.graph {
            break;
        }
        k0 = Some(m.k);
    }
    if let Some(k) = k0 {
        if sorted.iter().any(|m| m.k >= k && !m.graph) {
            k0 = None;
        }
    }
    Ok(ShellReport {
        matches,
        annulus_constant,
        k0,
        winding: map.winding(),
    })
}
