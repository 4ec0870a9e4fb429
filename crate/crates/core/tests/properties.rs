use std::f64::consts::PI;

use monowave::field::{isotropic_wave, SpacePoint, WaveField};
use monowave::harmonics::{eval_y, multiplicity, sphere_area, Direction, HarmonicIndex};
use monowave::nodal::{extract_from_field, ScanSpec};
use monowave::randomwave::{sample_coefficients, Truncation, VarianceSchedule};
use monowave::specfun::{bessel_j, legendre_p, BesselOrder};
use monowave::stability::{
    hellinger_affinity_term, kakutani_series, kakutani_term, DegreeLaw, GeneralGaussianSpec,
    ReferenceEnsemble, Verdict,
};
use proptest::prelude::*;

fn direction(n: usize, a: f64, b: f64) -> Direction {
    if n == 2 {
        Direction::planar(a * 2.0 * PI)
    } else {
        Direction::spatial((1.0 - 2.0 * b).acos(), a * 2.0 * PI)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affinity_lies_in_unit_interval(m in -5.0..5.0f64, s in 0.05..20.0f64, r in 0.05..20.0f64) {
        let a = hellinger_affinity_term(m, s, r).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        let t = kakutani_term(m, s, r).unwrap();
        prop_assert!(t >= 0.0);
        prop_assert!((t + a.ln()).abs() <= 1e-12 * (1.0 + t));
    }

    #[test]
    fn affinity_is_symmetric_for_centred_laws(s in 0.05..20.0f64, r in 0.05..20.0f64) {
        let a = hellinger_affinity_term(0.0, s, r).unwrap();
        let b = hellinger_affinity_term(0.0, r, s).unwrap();
        prop_assert!((a - b).abs() <= 1e-14);
    }

    #[test]
    fn kakutani_series_symmetric_under_swap(b1 in 0.0..6.0f64, b2 in 0.0..6.0f64) {
        // two power laws, each used once as spec and once as reference
        let n = 3;
        let schedule = |beta: f64| VarianceSchedule::power_law(n, 0.0, beta, 40).unwrap();
        let as_ref = |beta: f64| ReferenceEnsemble::Scattering(schedule(beta));
        let as_spec = |beta: f64| GeneralGaussianSpec::centred(n, DegreeLaw::PowerLaw { c: 1.0, beta }).unwrap();
        let x = kakutani_series(&as_spec(b1), &as_ref(b2), 200).unwrap();
        let y = kakutani_series(&as_spec(b2), &as_ref(b1), 200).unwrap();
        for (p, q) in x.partial_sums.iter().zip(&y.partial_sums) {
            prop_assert!((p.1 - q.1).abs() <= 1e-9 * (1.0 + p.1.abs()));
        }
        prop_assert_eq!(x.verdict, y.verdict);
    }

    #[test]
    fn log_and_quadratic_series_converge_together(p in 0.1..3.0f64, c in 0.2..2.0f64) {
        // Σ d_l log((1 + σ²)/(2σ)) and Σ d_l (σ − 1)²/σ with σ = 1 + c(1 + l)^{−p}
        // both converge iff p > (n − 1)/2
        let n = 3usize;
        prop_assume!((p - 1.0).abs() > 0.15);
        let spec = GeneralGaussianSpec::centred(n, DegreeLaw::UnitPerturbation { c, p }).unwrap();
        let report = kakutani_series(&spec, &ReferenceEnsemble::unit(n).unwrap(), 2000).unwrap();
        let expected = if p > 1.0 { Verdict::Equivalent } else { Verdict::Singular };
        prop_assert_eq!(report.analytic, Some(expected));
        prop_assert_eq!(report.numeric, expected);
        prop_assert!(report.partial_sums.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn addition_theorem(n in 2usize..=3, l in 0usize..=12, a in 0.0..1.0f64, b in 0.0..1.0f64,
                        c in 0.0..1.0f64, d in 0.0..1.0f64) {
        let (x, y) = (direction(n, a, b), direction(n, c, d));
        let sum: f64 = (1..=multiplicity(l, n))
            .map(|m| {
                let idx = HarmonicIndex::new(l, m, n).unwrap();
                eval_y(idx, n, &x).unwrap() * eval_y(idx, n, &y).unwrap()
            })
            .sum();
        let expected = multiplicity(l, n) as f64 / sphere_area(n) * legendre_p(l, n, x.dot(&y)).unwrap();
        prop_assert!((sum - expected).abs() <= 1e-10);
    }

    #[test]
    fn bessel_recurrence(alpha in 0.0..40.0f64, z in 0.01..200.0f64) {
        let j = |a: f64| bessel_j(BesselOrder::new(a).unwrap(), z).unwrap();
        let (j0, j1, j2) = (j(alpha), j(alpha + 1.0), j(alpha + 2.0));
        let scale = j0.abs().max(j1.abs()).max(j2.abs()).max(1e-300);
        let residual = j0 + j2 - 2.0 * (alpha + 1.0) / z * j1;
        prop_assert!(residual.abs() <= 1e-10 * scale * (1.0 + 2.0 * (alpha + 1.0) / z));
    }

    #[test]
    fn sampling_is_deterministic_and_prefix_stable(seed in any::<u64>(), l in 0usize..10) {
        let sch = VarianceSchedule::default_scattering(3).unwrap();
        let a = sample_coefficients(&sch, seed).unwrap();
        prop_assert_eq!(&a, &sample_coefficients(&sch, seed).unwrap());
        let short = sample_coefficients(&sch.clone().with_truncation(Truncation::Fixed(l)).unwrap(), seed).unwrap();
        prop_assert_eq!(short.values(), &a.values()[..short.values().len()]);
    }

    #[test]
    fn wave_is_linear_in_coefficients(seed in 0u64..1000, k in -3.0..3.0f64, r in 0.0..40.0f64,
                                      a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let sch = VarianceSchedule::default_scattering(3).unwrap();
        let c = sample_coefficients(&sch, seed).unwrap();
        let p = SpacePoint::new(r, direction(3, a, b)).unwrap();
        let u = WaveField::exact(c.clone()).unwrap().eval_u(&p).unwrap();
        let v = WaveField::exact(c.scaled(k)).unwrap().eval_u(&p).unwrap();
        prop_assert!((v - k * u).abs() <= 1e-12 * (1.0 + u.abs() * k.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn nodal_set_invariant_under_scaling_and_sign(seed in 0u64..500, k in 0.1..10.0f64) {
        let sch = VarianceSchedule::default_scattering(2).unwrap();
        let c = sample_coefficients(&sch, seed).unwrap();
        let spec = ScanSpec::ball(2, 8.0 * PI, PI / 16.0);
        let base = extract_from_field(&WaveField::exact(c.clone()).unwrap(), &spec).unwrap();
        for factor in [k, -k] {
            let other = extract_from_field(&WaveField::exact(c.scaled(factor)).unwrap(), &spec).unwrap();
            prop_assert_eq!(base.components.len(), other.components.len());
            for (x, y) in base.components.iter().zip(&other.components) {
                prop_assert_eq!(x.vertex_count, y.vertex_count);
                prop_assert_eq!(x.compact, y.compact);
                prop_assert_eq!(x.topology, y.topology);
            }
        }
    }

    #[test]
    fn compact_surfaces_have_even_euler_characteristic(seed in 0u64..500) {
        let sch = VarianceSchedule::default_scattering(3).unwrap();
        let w = WaveField::exact(sample_coefficients(&sch, seed).unwrap()).unwrap();
        let set = extract_from_field(&w, &ScanSpec::ball(3, 3.0 * PI, PI / 8.0)).unwrap();
        for comp in set.compact() {
            let chi = comp.euler_char.expect("closed surfaces have an even face count");
            prop_assert!(chi % 2 == 0 && chi <= 2);
        }
    }
}

#[test]
fn radial_wave_counts_are_monotone_in_radius() {
    let w = WaveField::exact(isotropic_wave(2).unwrap()).unwrap();
    let set = extract_from_field(&w, &ScanSpec::ball(2, 20.0, PI / 20.0)).unwrap();
    let mut last = 0;
    for r in [2.0, 5.0, 9.0, 12.0, 17.0, 20.0] {
        let c = monowave::nodal::count_in_ball(&set, r).unwrap().total;
        assert!(c >= last);
        last = c;
    }
}
