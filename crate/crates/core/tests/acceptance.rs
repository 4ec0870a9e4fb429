//! Acceptance suite: one pass/fail line per criterion, nonzero exit status
//! if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use monowave::field::{
    agmon_hormander, error_terms, ft_single_harmonic, isotropic_wave, SeminormOptions, SpacePoint,
    WaveField,
};
use monowave::harmonics::{eval_y, grad_y, multiplicity, sphere_area, Direction, HarmonicIndex};
use monowave::nodal::{
    count_in_ball, extract_from_field, noncompact_connectivity_probe, slope_estimate, ScanSpec,
    Topology,
};
use monowave::randomwave::{
    covariance_f_analytic, hs_norm, min_modulus_on_sphere, sample_coefficients, CoefficientSet,
    DensityF, Parity, VarianceSchedule, Vanishing,
};
use monowave::specfun::{bessel_j, funk_hecke_coefficient, scaled_bessel_sequence, BesselOrder};
use monowave::stability::{
    hellinger_affinity_term, kakutani_series, DegreeLaw, GeneralGaussianSpec, ReferenceEnsemble,
    Verdict,
};
use monowave::stats::{linear_fit, wilson_interval, MeanEstimate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Direction {
    if n == 2 {
        Direction::planar(rng.random_range(0.0..2.0 * PI))
    } else {
        let z: f64 = rng.random_range(-1.0..1.0);
        Direction::spatial(z.acos(), rng.random_range(0.0..2.0 * PI))
    }
}

fn fibonacci_directions(n: usize, count: usize) -> Vec<Direction> {
    (0..count)
        .map(|i| {
            if n == 2 {
                Direction::planar(2.0 * PI * (i as f64 + 0.5) / count as f64)
            } else {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let golden = PI * (3.0 - 5f64.sqrt());
                Direction::spatial(z.acos(), (golden * i as f64).rem_euclid(2.0 * PI))
            }
        })
        .collect()
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in [2usize, 3] {
        for l in 0..=8usize {
            for _ in 0..30 {
                let m = rng.random_range(1..=multiplicity(l, n));
                let r = rng.random_range(0.5..30.0);
                let dir = random_direction(&mut rng, n);
                let idx = HarmonicIndex::new(l, m, n).map_err(|e| e.to_string())?;
                let p = SpacePoint::new(r, dir).map_err(|e| e.to_string())?;
                let closed = ft_single_harmonic(idx, n, &p).map_err(|e| e.to_string())?;
                let quad = funk_hecke_coefficient(l, n, r).map_err(|e| e.to_string())?
                    * eval_y(idx, n, &dir).map_err(|e| e.to_string())?;
                worst = worst.max((closed - quad).norm() / quad.norm());
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{checked} points, max relative error {worst:.2e}, {elapsed:.1?}");
    if worst <= 1e-6 && elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit2() -> Outcome {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for j in 0..200 {
        let alpha = 20.0 * j as f64 / 199.0;
        let order = BesselOrder::new(alpha).map_err(|e| e.to_string())?;
        for i in 1..=200 {
            let z = 100.0 * i as f64 / 200.0;
            let j = bessel_j(order, z).map_err(|e| e.to_string())?;
            let lead = (2.0 / (PI * z)).sqrt() * (z - alpha * PI / 2.0 - PI / 4.0).cos();
            let bound = (alpha * alpha - 0.25).abs() * z.powf(-1.5);
            let gap = (j - lead).abs();
            if gap > bound {
                violations += 1;
            }
            if bound > 0.0 {
                worst_ratio = worst_ratio.max(gap / bound);
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{violations} violations on 200x200, max |gap|/bound {worst_ratio:.3}, {elapsed:.1?}");
    if violations == 0 && elapsed < Duration::from_secs(10) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_value, mut worst_grad) = (0.0f64, 0.0f64);
    for n in [2usize, 3] {
        let area = sphere_area(n);
        for _ in 0..100 {
            let dir = random_direction(&mut rng, n);
            for l in 0..=10usize {
                let d = multiplicity(l, n) as f64;
                let (mut s, mut g) = (0.0, 0.0);
                for m in 1..=multiplicity(l, n) {
                    let idx = HarmonicIndex::new(l, m, n).map_err(|e| e.to_string())?;
                    s += eval_y(idx, n, &dir).map_err(|e| e.to_string())?.powi(2);
                    g += grad_y(idx, n, &dir).map_err(|e| e.to_string())?.norm_sq();
                }
                worst_value = worst_value.max((s - d / area).abs());
                worst_grad = worst_grad.max((g - (l * (l + n - 2)) as f64 * d / area).abs());
            }
        }
    }
    let detail = format!("max errors {worst_value:.2e} (values), {worst_grad:.2e} (gradients)");
    if worst_value <= 1e-8 && worst_grad <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit4() -> Outcome {
    let start = Instant::now();
    let h = PI / 20.0;
    let w = WaveField::exact(isotropic_wave(3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let set = extract_from_field(&w, &ScanSpec::ball(3, 10.2 * PI, h)).map_err(|e| e.to_string())?;
    let compact: Vec<_> = set.compact().collect();
    let spheres = compact.iter().filter(|c| c.topology == Topology::Sphere).count();
    let on_shell = compact.iter().all(|c| {
        let k = (c.mean_radius / PI).round();
        (c.r_min - k * PI).abs() <= h && (c.r_max - k * PI).abs() <= h
    });
    let table: Vec<(f64, f64)> = (4..=10)
        .map(|k| {
            let r = k as f64 * PI;
            count_in_ball(&set, r).map(|c| (r, c.total as f64))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    // 4π..10π spans less than the factor slope_estimate asks for; fit directly
    let (x, y): (Vec<f64>, Vec<f64>) = table.into_iter().unzip();
    let slope = linear_fit(&x, &y).map_err(|e| e.to_string())?.slope;
    let rel = (slope * PI - 1.0).abs();
    let detail = format!(
        "{} compact, {spheres} spheres, on shells {on_shell}, slope·π = {:.4}, {:.1?}",
        compact.len(),
        slope * PI,
        start.elapsed()
    );
    if compact.len() == 10 && spheres == 10 && on_shell && rel <= 0.02 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit5() -> Outcome {
    let start = Instant::now();
    let sch = VarianceSchedule::default_scattering(2).map_err(|e| e.to_string())?;
    let mut slopes = Vec::new();
    let mut failures = Vec::new();
    let mut seed = 0u64;
    while slopes.len() < 20 {
        seed += 1;
        let c = sample_coefficients(&sch, seed).map_err(|e| e.to_string())?;
        if min_modulus_on_sphere(&c, 64).map_err(|e| e.to_string())?.classification != Vanishing::Nonvanishing {
            continue;
        }
        let w = WaveField::exact(c).map_err(|e| e.to_string())?;
        let set = extract_from_field(&w, &ScanSpec::ball(2, 60.0 * PI, PI / 20.0)).map_err(|e| e.to_string())?;
        let counts: Vec<_> = (2..=12)
            .map(|k| count_in_ball(&set, 5.0 * k as f64 * PI).map(|c| (5.0 * k as f64 * PI, c)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let table: Vec<(f64, f64)> = counts.iter().map(|(r, c)| (*r, c.total as f64)).collect();
        let slope = slope_estimate(&table).map_err(|e| e.to_string())?.slope;
        let others_constant = counts.windows(2).all(|w| w[0].1.other == w[1].1.other);
        if (slope * PI - 1.0).abs() > 0.1 || !others_constant {
            failures.push(seed);
        }
        slopes.push(slope * PI);
    }
    let (lo, hi) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, &s| (a.0.min(s), a.1.max(s)));
    let detail = format!(
        "20 seeds (last {seed}), slope·π in [{lo:.4}, {hi:.4}], failing seeds {failures:?}, {:.1?}",
        start.elapsed()
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit6() -> Outcome {
    let radii: Vec<f64> = (0..30).map(|i| 10.0 * 20f64.powf(i as f64 / 29.0)).collect();
    let mut worst_slope = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut outside = Vec::new();
    for n in [2usize, 3] {
        let sch = VarianceSchedule::default_scattering(n).map_err(|e| e.to_string())?;
        let dirs = fibonacci_directions(n, 32);
        // per term: normalised level of each seed
        let mut levels: [Vec<f64>; 3] = Default::default();
        for seed in 1..=20u64 {
            let c = sample_coefficients(&sch, seed).map_err(|e| e.to_string())?;
            let norm = hs_norm(&c, sch.s());
            let w = WaveField::exact(c).map_err(|e| e.to_string())?;
            let mut logs: [Vec<f64>; 3] = Default::default();
            for &r in &radii {
                let mut sq = [0.0f64; 3];
                // r and r + π/2 together remove the leading oscillation
                for d in &dirs {
                    for rr in [r, r + PI / 2.0] {
                        let e = error_terms(&w, &SpacePoint::new(rr, *d).map_err(|e| e.to_string())?)
                            .map_err(|e| e.to_string())?;
                        sq[0] += e.e1 * e.e1;
                        sq[1] += e.e2 * e.e2;
                        sq[2] += e.e3.norm_sq();
                    }
                }
                for i in 0..3 {
                    logs[i].push((r * (sq[i] / dirs.len() as f64).sqrt()).ln());
                }
            }
            let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
            for i in 0..3 {
                let slope = linear_fit(&x, &logs[i]).map_err(|e| e.to_string())?.slope;
                if slope.abs() > 0.1 {
                    outside.push(format!("n={n} seed={seed} E{} {slope:.3}", i + 1));
                }
                worst_slope = worst_slope.max(slope.abs());
                let mean_log = logs[i].iter().sum::<f64>() / logs[i].len() as f64;
                levels[i].push(mean_log.exp() / norm);
            }
        }
        for l in &mut levels {
            l.sort_by(f64::total_cmp);
            worst_ratio = worst_ratio.max(l[l.len() - 1] / (0.5 * (l[9] + l[10])));
        }
    }
    let detail = format!(
        "max |slope| {worst_slope:.4}, max max/median {worst_ratio:.3}, slopes outside [-0.1, 0.1]: {outside:?}"
    );
    if worst_slope <= 0.1 && worst_ratio <= 5.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_z = 0.0f64;
    for n in [2usize, 3] {
        let sch = VarianceSchedule::default_scattering(n).map_err(|e| e.to_string())?;
        let pairs: Vec<(Direction, Direction)> = (0..20)
            .map(|_| (random_direction(&mut rng, n), random_direction(&mut rng, n)))
            .collect();
        let mut products = vec![Vec::with_capacity(5000); 20];
        for seed in 0..5000u64 {
            let c = sample_coefficients(&sch, seed).map_err(|e| e.to_string())?;
            let f = DensityF::new(&c).map_err(|e| e.to_string())?;
            for (k, (a, b)) in pairs.iter().enumerate() {
                let fa = f.eval(a).map_err(|e| e.to_string())?.re;
                let fb = f.eval(b).map_err(|e| e.to_string())?.re;
                products[k].push(fa * fb);
            }
        }
        for (k, (a, b)) in pairs.iter().enumerate() {
            let est = MeanEstimate::from_samples(&products[k]).map_err(|e| e.to_string())?;
            let kernel = covariance_f_analytic(&sch, Parity::Even, a.dot(b)).map_err(|e| e.to_string())?;
            worst_z = worst_z.max((est.mean - kernel.value).abs() / est.std_err);
        }
    }

    // σ_l ≡ 1, L = 40, n = 3: E u(x)u(y) against J_{1/2}(d)/d^{1/2}
    let n = 3;
    let l_max = 40;
    let sch = VarianceSchedule::unit(n, l_max).map_err(|e| e.to_string())?;
    let distances: Vec<f64> = (1..=24).map(|i| 0.4 * i as f64).collect();
    let per_distance = 8;
    let mut weights: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let basis = monowave::harmonics::HarmonicBasis::new(n, l_max).map_err(|e| e.to_string())?;
    let point_weights = |x: [f64; 3]| -> Result<Vec<f64>, String> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let dir = Direction::from_cartesian(&x).map_err(|e| e.to_string())?;
        let (mut y, mut g) = (Vec::new(), Vec::new());
        basis.values(&dir, &mut y).map_err(|e| e.to_string())?;
        scaled_bessel_sequence(n, l_max, r, &mut g).map_err(|e| e.to_string())?;
        let scale = (2.0 * PI).powf(1.5);
        let mut out = Vec::with_capacity(y.len());
        for l in 0..=l_max {
            for m in 0..multiplicity(l, n) {
                out.push(scale * y[monowave::harmonics::degree_offset(l, n) + m] * g[l]);
            }
        }
        Ok(out)
    };
    for &d in &distances {
        for _ in 0..per_distance {
            let u = random_direction(&mut rng, 3).to_cartesian();
            let e = random_direction(&mut rng, 3).to_cartesian();
            let rad = rng.random_range(0.5..5.0);
            let x = [rad * u[0], rad * u[1], rad * u[2]];
            let y = [x[0] + d * e[0], x[1] + d * e[1], x[2] + d * e[2]];
            weights.push((point_weights(x)?, point_weights(y)?));
        }
    }
    let seeds = 2000u64;
    let mut sums = vec![0.0; weights.len()];
    for seed in 0..seeds {
        let c = sample_coefficients(&sch, seed).map_err(|e| e.to_string())?;
        let a = c.values();
        for (k, (wx, wy)) in weights.iter().enumerate() {
            let ux: f64 = a.iter().zip(wx).map(|(p, q)| p * q).sum();
            let uy: f64 = a.iter().zip(wy).map(|(p, q)| p * q).sum();
            sums[k] += ux * uy;
        }
    }
    let empirical: Vec<f64> = sums
        .chunks(per_distance)
        .map(|c| c.iter().sum::<f64>() / (per_distance as f64 * seeds as f64))
        .collect();
    let profile: Vec<f64> = distances
        .iter()
        .map(|&d| monowave::specfun::bessel_j(BesselOrder::new(0.5).unwrap(), d).unwrap() / d.sqrt())
        .collect();
    let corr = pearson(&empirical, &profile);
    let constant = empirical.iter().zip(&profile).map(|(e, p)| e * p).sum::<f64>()
        / profile.iter().map(|p| p * p).sum::<f64>();
    let detail = format!(
        "f_R kernel max |z| {worst_z:.2} over 40 pairs; unit profile correlation {corr:.5} (fitted constant {constant:.3})"
    );
    if worst_z <= 4.0 && corr >= 0.99 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn crit8() -> Outcome {
    let mut counts = Vec::new();
    for n in [2usize, 3] {
        let sch = VarianceSchedule::default_scattering(n).map_err(|e| e.to_string())?;
        let mut nonvanishing = 0;
        for seed in 0..200u64 {
            let c = sample_coefficients(&sch, seed).map_err(|e| e.to_string())?;
            if min_modulus_on_sphere(&c, 64).map_err(|e| e.to_string())?.classification == Vanishing::Nonvanishing {
                nonvanishing += 1;
            }
        }
        counts.push(nonvanishing);
    }
    let p3 = wilson_interval(counts[1], 200, 1.96).map_err(|e| e.to_string())?;
    let frac2 = counts[0] as f64 / 200.0;
    let detail = format!(
        "n=2 nonvanishing {}/200; n=3 nonvanishing {}/200, estimate {:.3}, 95% CI [{:.3}, {:.3}]",
        counts[0], counts[1], p3.estimate, p3.lower, p3.upper
    );
    if frac2 >= 0.99 && p3.lower > 0.0 && p3.upper < 1.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit9() -> Outcome {
    let start = Instant::now();
    let samples: [&[(usize, usize, f64)]; 5] = [
        &[(1, 1, 1.0), (2, 4, 1.0)],
        &[(1, 2, 1.0), (2, 1, 1.0), (0, 1, 0.2)],
        &[(1, 1, 0.7), (2, 4, 1.0), (3, 7, 0.5)],
        &[(1, 1, 1.0), (1, 2, 0.5), (2, 3, 1.0), (2, 1, 0.4)],
        &[(3, 4, 1.0), (2, 2, 1.0), (0, 1, 0.3)],
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for entries in samples {
        let mut c = CoefficientSet::zeros(3, 3).map_err(|e| e.to_string())?;
        for &(l, m, v) in entries {
            c.set(l, m, v).map_err(|e| e.to_string())?;
        }
        // regular zero: f vanishes at the certified minimum with independent
        // gradients of f_R and f_I
        let mm = min_modulus_on_sphere(&c, 64).map_err(|e| e.to_string())?;
        let jet = DensityF::new(&c)
            .map_err(|e| e.to_string())?
            .eval_with_gradient(&mm.argmin)
            .map_err(|e| e.to_string())?;
        let cross = jet.grad_re.theta * jet.grad_im.phi - jet.grad_re.phi * jet.grad_im.theta;
        let regular = mm.classification == Vanishing::Vanishing && cross.abs() > 1e-6;
        let w = WaveField::exact(c).map_err(|e| e.to_string())?;
        let report =
            noncompact_connectivity_probe(&w, 10.0 * PI, 14.0 * PI, PI / 8.0).map_err(|e| e.to_string())?;
        ok &= regular && report.count == 1 && report.stable;
        lines.push(format!("{}/{}", report.count, report.refined_count));
    }
    let detail = format!("crossing counts (h, h/2): {}, {:.1?}", lines.join(" "), start.elapsed());
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `∫ sqrt(ρ₁ ρ₂)` by composite Simpson on a wide interval.
fn affinity_by_quadrature(mean: f64, sigma: f64, sigma_ref: f64) -> f64 {
    let wide = 40.0 * sigma.max(sigma_ref);
    let (a, b) = (mean.min(0.0) - wide, mean.max(0.0) + wide);
    let steps = 200_000;
    let h = (b - a) / steps as f64;
    let density = |x: f64, m: f64, s: f64| (-(x - m).powi(2) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
    let g = |x: f64| (density(x, mean, sigma) * density(x, 0.0, sigma_ref)).sqrt();
    let mut sum = g(a) + g(b);
    for i in 1..steps {
        sum += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

fn crit10() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) identical laws
    let unit = ReferenceEnsemble::unit(3).map_err(|e| e.to_string())?;
    let same = GeneralGaussianSpec::centred(3, DegreeLaw::Constant(1.0)).map_err(|e| e.to_string())?;
    let ra = kakutani_series(&same, &unit, 500).map_err(|e| e.to_string())?;
    let sch = VarianceSchedule::default_scattering(3).map_err(|e| e.to_string())?;
    let same_scattering = GeneralGaussianSpec::of_reference(&ReferenceEnsemble::Scattering(sch.clone()))
        .map_err(|e| e.to_string())?;
    let rs = kakutani_series(&same_scattering, &ReferenceEnsemble::scattering(sch).map_err(|e| e.to_string())?, 500)
        .map_err(|e| e.to_string())?;
    let a_ok = ra.partial_sums.iter().chain(&rs.partial_sums).all(|p| p.1 == 0.0);
    ok &= a_ok;
    notes.push(format!("(a) C ≡ 0: {a_ok}"));

    // (b) σ = 1 + (1 + l)^{−1}: per-degree increments ≈ 1/(2l), so C_L grows like ½ log L
    let spec_b = GeneralGaussianSpec::centred(3, DegreeLaw::UnitPerturbation { c: 1.0, p: 1.0 })
        .map_err(|e| e.to_string())?;
    let rb = kakutani_series(&spec_b, &unit, 4000).map_err(|e| e.to_string())?;
    let tail: Vec<&(usize, f64)> = rb.partial_sums.iter().filter(|p| p.0 >= 400).collect();
    let x: Vec<f64> = tail.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = tail.iter().map(|p| p.1).collect();
    let growth = linear_fit(&x, &y).map_err(|e| e.to_string())?.slope;
    let b_ok = rb.verdict == Verdict::Singular && (growth - 0.5).abs() < 0.01;
    ok &= b_ok;
    notes.push(format!(
        "(b) {} (numeric {}, p = {:.3}), dC/dlog L = {growth:.4}",
        rb.verdict.label(),
        rb.numeric.label(),
        rb.fitted_exponent
    ));

    // (c) σ = 1 + (1 + l)^{−2}: increments ≈ 1/(2l³)
    let spec_c = GeneralGaussianSpec::centred(3, DegreeLaw::UnitPerturbation { c: 1.0, p: 2.0 })
        .map_err(|e| e.to_string())?;
    let rc = kakutani_series(&spec_c, &unit, 4000).map_err(|e| e.to_string())?;
    let at = |l: usize| rc.partial_sums.iter().find(|p| p.0 == l).map(|p| p.1).unwrap_or(f64::NAN);
    let late = at(4000) - at(2000);
    let bound = 0.25 / (2000f64 * 2000.0);
    let c_ok = rc.verdict == Verdict::Equivalent && rc.numeric == Verdict::Equivalent && late <= bound;
    ok &= c_ok;
    notes.push(format!(
        "(c) {} (p = {:.3}), C_4000 − C_2000 = {late:.2e}",
        rc.verdict.label(),
        rc.fitted_exponent
    ));

    // (d) closed form against quadrature
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mean = rng.random_range(-3.0..3.0);
        let sigma = rng.random_range(0.2..5.0);
        let sigma_ref = rng.random_range(0.2..5.0);
        let closed = hellinger_affinity_term(mean, sigma, sigma_ref).map_err(|e| e.to_string())?;
        worst = worst.max((closed - affinity_by_quadrature(mean, sigma, sigma_ref)).abs());
    }
    ok &= worst <= 1e-8;
    notes.push(format!("(d) max |closed − quadrature| {worst:.2e}"));
    let detail = notes.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn crit11() -> Outcome {
    let sinc = WaveField::exact(isotropic_wave(3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let rows = agmon_hormander(&sinc, &[100.0 * PI], SeminormOptions::default()).map_err(|e| e.to_string())?;
    let rel = (rows[0].mean_square / (2.0 * PI) - 1.0).abs();
    let mut ok = rel <= 0.02;
    let mut ratios = Vec::new();
    for n in [2usize, 3] {
        let sch = VarianceSchedule::default_scattering(n).map_err(|e| e.to_string())?;
        for seed in 1..=3u64 {
            let w = WaveField::exact(sample_coefficients(&sch, seed).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let rows = agmon_hormander(&w, &[200.0, 400.0], SeminormOptions::default()).map_err(|e| e.to_string())?;
            let ratio = rows[1].mean_square / rows[0].mean_square;
            ok &= (0.9..=1.1).contains(&ratio);
            ratios.push(format!("{ratio:.4}"));
        }
    }
    let detail = format!(
        "sinc mean square / 2π − 1 = {:.2e}; plateau ratios {}",
        rows[0].mean_square / (2.0 * PI) - 1.0,
        ratios.join(" ")
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Fourier transform of a harmonic", crit1),
        ("uniform Bessel bound", crit2),
        ("addition identities", crit3),
        ("radial wave nodal spheres", crit4),
        ("random wave nodal slope", crit5),
        ("error term decay", crit6),
        ("covariance kernels", crit7),
        ("nonvanishing probability", crit8),
        ("noncompact probe", crit9),
        ("Kakutani checker", crit10),
        ("Agmon–Hörmander seminorm", crit11),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
