//! Legendre polynomials of dimension `n`: `P_{l,n}(1) = 1` and
//!
//! ```text
//! P_{l+1,n}(t) = [(2l + n − 2) t P_{l,n}(t) − l P_{l−1,n}(t)] / (l + n − 2)
//! ```

use crate::error::{Error, Result};

use super::check_generic_dim;

/// `P_{l,n}(t)`.
pub fn legendre_p(l: usize, n: usize, t: f64) -> Result<f64> {
    Ok(legendre_p_derivs(l, n, t)?.0)
}

fn check_t(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0 + 1e-12) {
        return Err(Error::invalid(format!("Legendre argument must lie in [-1, 1], got {t}")));
    }
    Ok(())
}

/// `(P, P', P'')` at `t`, obtained by differentiating the recurrence.
pub fn legendre_p_derivs(l: usize, n: usize, t: f64) -> Result<(f64, f64, f64)> {
    check_generic_dim(n)?;
    check_t(t)?;
    let nf = n as f64;
    let (mut p0, mut d0, mut s0) = (1.0, 0.0, 0.0);
    if l == 0 {
        return Ok((p0, d0, s0));
    }
    let (mut p1, mut d1, mut s1) = (t, 1.0, 0.0);
    for k in 1..l {
        let kf = k as f64;
        let a = 2.0 * kf + nf - 2.0;
        let c = kf + nf - 2.0;
        let p2 = (a * t * p1 - kf * p0) / c;
        let d2 = (a * (p1 + t * d1) - kf * d0) / c;
        let s2 = (a * (2.0 * d1 + t * s1) - kf * s0) / c;
        (p0, d0, s0) = (p1, d1, s1);
        (p1, d1, s1) = (p2, d2, s2);
    }
    Ok((p1, d1, s1))
}

/// Fills `out[l] = P_{l,n}(t)` for `l = 0..=max_degree`.
pub fn legendre_p_sequence(n: usize, max_degree: usize, t: f64, out: &mut Vec<f64>) -> Result<()> {
    check_generic_dim(n)?;
    check_t(t)?;
    out.clear();
    out.push(1.0);
    if max_degree == 0 {
        return Ok(());
    }
    out.push(t);
    let nf = n as f64;
    for k in 1..max_degree {
        let kf = k as f64;
        let next = ((2.0 * kf + nf - 2.0) * t * out[k] - kf * out[k - 1]) / (kf + nf - 2.0);
        out.push(next);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_legendre_for_n3() {
        let t: f64 = 0.3;
        let p2 = 0.5 * (3.0 * t * t - 1.0);
        let p3 = 0.5 * (5.0 * t.powi(3) - 3.0 * t);
        assert!((legendre_p(2, 3, t).unwrap() - p2).abs() < 1e-15);
        assert!((legendre_p(3, 3, t).unwrap() - p3).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_for_n2() {
        for l in 0..12 {
            for &psi in &[0.1f64, 0.7, 1.9, 3.0] {
                let got = legendre_p(l, 2, psi.cos()).unwrap();
                assert!((got - (l as f64 * psi).cos()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn slope_at_one_for_cubic() {
        let (_, d, _) = legendre_p_derivs(3, 3, 1.0).unwrap();
        assert!((d - 6.0).abs() < 1e-13);
    }

    #[test]
    fn normalised_at_one_with_known_slope() {
        for n in 2..6 {
            for l in 0..20 {
                let (p, d, _) = legendre_p_derivs(l, n, 1.0).unwrap();
                assert!((p - 1.0).abs() < 1e-12);
                let slope = (l * (l + n - 2)) as f64 / (n - 1) as f64;
                assert!((d - slope).abs() < 1e-9 * slope.max(1.0), "n {n} l {l}");
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-5;
        for n in [2, 3, 5] {
            for l in [1, 4, 9] {
                let t = 0.37;
                let (_, d, s) = legendre_p_derivs(l, n, t).unwrap();
                let fp = legendre_p(l, n, t + h).unwrap();
                let fm = legendre_p(l, n, t - h).unwrap();
                let f0 = legendre_p(l, n, t).unwrap();
                assert!((d - (fp - fm) / (2.0 * h)).abs() < 1e-6);
                assert!((s - (fp - 2.0 * f0 + fm) / (h * h)).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn legendre_differential_equation() {
        // (1 − t²) P'' − (n − 1) t P' + l(l + n − 2) P = 0
        for n in [2, 3, 4] {
            for l in 0..15 {
                let t = -0.42;
                let (p, d, s) = legendre_p_derivs(l, n, t).unwrap();
                let res = (1.0 - t * t) * s - (n - 1) as f64 * t * d + (l * (l + n - 2)) as f64 * p;
                assert!(res.abs() < 1e-9, "n {n} l {l}: {res}");
            }
        }
    }

    #[test]
    fn sequence_agrees() {
        let mut seq = Vec::new();
        legendre_p_sequence(3, 10, -0.8, &mut seq).unwrap();
        for (l, v) in seq.iter().enumerate() {
            assert!((v - legendre_p(l, 3, -0.8).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(legendre_p(2, 1, 0.5).is_err());
        assert!(legendre_p(2, 3, 1.5).is_err());
    }
}
