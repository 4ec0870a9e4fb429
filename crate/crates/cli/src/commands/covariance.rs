//! `covariance`: empirical covariances of `f` and `u` over the seeds against
//! the analytic kernels.

use std::f64::consts::PI;

use monowave::harmonics::{degree_offset, multiplicity, Direction, HarmonicBasis};
use monowave::randomwave::{
    covariance_f_analytic, covariance_u_analytic, unit_kernel_profile, DensityF, Parity,
};
use monowave::specfun::scaled_bessel_sequence;
use monowave::stats::MeanEstimate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{coefficients, fmt, for_each_seed};
use crate::config::{Ensemble, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// Point pairs per distance of the unit-schedule profile.
const PROFILE_PAIRS: usize = 8;
/// Stream of the evaluation geometry, apart from the coefficient streams.
const GEOMETRY_STREAM: u64 = 0x636f_7661;

type Point = [f64; 3];

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Direction {
    let phi = rng.random_range(0.0..2.0 * PI);
    if n == 2 {
        Direction::planar(phi)
    } else {
        Direction::spatial((1.0 - 2.0 * rng.random::<f64>()).acos(), phi)
    }
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r_min: f64, r_max: f64) -> Point {
    let r = rng.random_range(r_min..r_max);
    let d = random_direction(rng, n).to_cartesian();
    [r * d[0], r * d[1], r * d[2]]
}

/// A uniformly random rotation, as a matrix acting on the first `n` axes.
fn random_rotation(rng: &mut ChaCha8Rng, n: usize) -> [[f64; 3]; 3] {
    if n == 2 {
        let (s, c) = rng.random_range(0.0..2.0 * PI).sin_cos();
        return [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    }
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
        b * (2.0 * PI * u3).cos(),
    );
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn rotate(m: &[[f64; 3]; 3], p: &Point) -> Point {
    let mut out = [0.0; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(p).map(|(a, b)| a * b).sum();
    }
    out
}

/// `w` with `u(x) = Σ a_{lm} w_{lm}(x)`.
fn point_weights(basis: &HarmonicBasis, n: usize, x: &Point) -> CliResult<Vec<f64>> {
    let l_max = basis.max_degree();
    let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut y = Vec::new();
    if r > 0.0 {
        basis.values(&Direction::from_cartesian(&x[..n])?, &mut y)?;
    } else {
        y = vec![0.0; basis.len()];
        y[0] = 1.0;
    }
    let mut g = Vec::new();
    scaled_bessel_sequence(n, l_max, r, &mut g)?;
    let scale = (2.0 * PI).powf(n as f64 / 2.0);
    let mut w = Vec::with_capacity(y.len());
    for l in 0..=l_max {
        let o = degree_offset(l, n);
        w.extend((0..multiplicity(l, n)).map(|m| scale * y[o + m] * g[l]));
    }
    Ok(w)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / k, b.iter().sum::<f64>() / k);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

struct Geometry {
    directions: Vec<(Direction, Direction)>,
    points: Vec<(Point, Point)>,
    rotated: Vec<(Point, Point)>,
    /// Distances of the unit-schedule profile.
    distances: Vec<f64>,
    profile: Vec<(Point, Point)>,
}

impl Geometry {
    fn new(config: &ExperimentConfig, unit: bool) -> Self {
        let n = config.n;
        let mut rng = ChaCha8Rng::seed_from_u64(config.base_seed);
        rng.set_stream(GEOMETRY_STREAM);
        let directions = (0..config.pairs)
            .map(|_| (random_direction(&mut rng, n), random_direction(&mut rng, n)))
            .collect();
        let points: Vec<(Point, Point)> = (0..config.pairs)
            .map(|_| {
                let x = random_point(&mut rng, n, 0.0, config.kernel_radius);
                (x, random_point(&mut rng, n, 0.0, config.kernel_radius))
            })
            .collect();
        let rotated = points
            .iter()
            .map(|(x, y)| {
                let m = random_rotation(&mut rng, n);
                (rotate(&m, x), rotate(&m, y))
            })
            .collect();
        let (mut distances, mut profile) = (Vec::new(), Vec::new());
        if unit {
            for k in 1..=config.profile_points {
                let d = config.profile_max * k as f64 / config.profile_points as f64;
                distances.push(d);
                for _ in 0..PROFILE_PAIRS {
                    let x = random_point(&mut rng, n, 0.5, config.kernel_radius.max(1.0));
                    let e = random_direction(&mut rng, n).to_cartesian();
                    profile.push((x, [x[0] + d * e[0], x[1] + d * e[1], x[2] + d * e[2]]));
                }
            }
        }
        Self {
            directions,
            points,
            rotated,
            distances,
            profile,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> CliResult<()> {
    let schedule = match &config.ensemble {
        Ensemble::Gaussian(s) => s.clone(),
        Ensemble::Isotropic => return Err(CliError::config("the isotropic wave is deterministic; nothing to estimate")),
    };
    if config.seed_count < 2 || config.pairs == 0 {
        return Err(CliError::config("covariance estimates need at least two seeds and one pair"));
    }
    let n = config.n;
    let geometry = Geometry::new(config, schedule.is_unit());
    let basis = HarmonicBasis::new(n, schedule.truncation_degree())?;
    let weights = |pairs: &[(Point, Point)]| -> CliResult<Vec<(Vec<f64>, Vec<f64>)>> {
        pairs
            .iter()
            .map(|(x, y)| Ok((point_weights(&basis, n, x)?, point_weights(&basis, n, y)?)))
            .collect()
    };
    let u_weights = weights(&geometry.points)?;
    let rot_weights = weights(&geometry.rotated)?;
    let profile_weights = weights(&geometry.profile)?;

    // per seed: f_R f_R, f_I f_I, u u, rotated u u, profile u u
    let products = for_each_seed(config, |seed| {
        let c = coefficients(config, seed)?;
        let f = DensityF::new(&c)?;
        let a = c.values();
        let mut row = Vec::new();
        for (p, q) in &geometry.directions {
            let (fp, fq) = (f.eval(p)?, f.eval(q)?);
            row.push(fp.re * fq.re);
            row.push(fp.im * fq.im);
        }
        for (wx, wy) in u_weights.iter().chain(&rot_weights).chain(&profile_weights) {
            row.push(dot(a, wx) * dot(a, wy));
        }
        Ok(row)
    })?;
    let column = |k: usize| -> CliResult<MeanEstimate> {
        let xs: Vec<f64> = products.iter().map(|r| r[k]).collect();
        Ok(MeanEstimate::from_samples(&xs)?)
    };

    let mut out = OutputDir::create(&config.out)?;
    let mut worst_f = 0.0f64;
    let mut table = String::from("pair\tparity\tcos_angle\tempirical\tstd_err\tanalytic\ttail_bound\tz\n");
    for (k, (p, q)) in geometry.directions.iter().enumerate() {
        let cos = p.dot(q).clamp(-1.0, 1.0);
        for (j, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
            let est = column(2 * k + j)?;
            let kernel = covariance_f_analytic(&schedule, parity, cos)?;
            let z = (est.mean - kernel.value) / est.std_err;
            worst_f = worst_f.max(z.abs());
            table.push_str(&format!(
                "{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                if parity == Parity::Even { "even" } else { "odd" },
                fmt(cos),
                fmt(est.mean),
                fmt(est.std_err),
                fmt(kernel.value),
                fmt(kernel.tail_bound),
                fmt(z)
            ));
        }
    }
    out.write("covariance_f.tsv", &table)?;

    let base = 2 * geometry.directions.len();
    let pairs = geometry.points.len();
    let (mut worst_u, mut worst_rot) = (0.0f64, 0.0f64);
    let mut table = String::from(
        "pair\tx\ty\t|x-y|\tempirical\tstd_err\tanalytic\tz\trotated_empirical\trotated_std_err\tz_rotation\n",
    );
    let coords = |p: &Point| p[..n].iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",");
    for (k, (x, y)) in geometry.points.iter().enumerate() {
        let est = column(base + k)?;
        let rot = column(base + pairs + k)?;
        let analytic = covariance_u_analytic(&schedule, &x[..n], &y[..n])?;
        let z = (est.mean - analytic) / est.std_err;
        let z_rot = (est.mean - rot.mean) / est.std_err.hypot(rot.std_err);
        worst_u = worst_u.max(z.abs());
        worst_rot = worst_rot.max(z_rot.abs());
        let dist = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        table.push_str(&format!(
            "{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            coords(x),
            coords(y),
            fmt(dist),
            fmt(est.mean),
            fmt(est.std_err),
            fmt(analytic),
            fmt(z),
            fmt(rot.mean),
            fmt(rot.std_err),
            fmt(z_rot)
        ));
    }
    out.write("covariance_u.tsv", &table)?;

    let mut summary = format!(
        "dim\t{n}\nschedule\t{}\nseeds\t{}\npairs\t{pairs}\nmax_abs_z_f\t{}\nmax_abs_z_u\t{}\nmax_abs_z_rotation\t{}\n",
        schedule.descriptor(),
        config.seed_count,
        fmt(worst_f),
        fmt(worst_u),
        fmt(worst_rot)
    );
    if !geometry.distances.is_empty() {
        let first = base + 2 * pairs;
        let empirical = (0..geometry.distances.len())
            .map(|i| {
                let sum: f64 = (0..PROFILE_PAIRS)
                    .map(|j| column(first + i * PROFILE_PAIRS + j).map(|e| e.mean))
                    .sum::<CliResult<f64>>()?;
                Ok(sum / PROFILE_PAIRS as f64)
            })
            .collect::<CliResult<Vec<f64>>>()?;
        let shape = geometry
            .distances
            .iter()
            .map(|&d| unit_kernel_profile(n, d))
            .collect::<Result<Vec<f64>, _>>()?;
        let constant = dot(&empirical, &shape) / dot(&shape, &shape);
        let corr = pearson(&empirical, &shape);
        let mut table = String::from("distance\tempirical\tshape\tfitted\n");
        for ((d, e), s) in geometry.distances.iter().zip(&empirical).zip(&shape) {
            table.push_str(&format!("{}\t{}\t{}\t{}\n", fmt(*d), fmt(*e), fmt(*s), fmt(constant * s)));
        }
        out.write("profile.tsv", &table)?;
        summary.push_str(&format!(
            "profile_constant\t{}\nprofile_correlation\t{}\n",
            fmt(constant),
            fmt(corr)
        ));
    }
    out.write("summary.txt", &summary)?;
    out.finish("covariance", &config.hash())?;
    Ok(())
}
