//! Ball averages `(R^{−1} ∫_{B_R} u²)^{1/2}` and
//! `(R^{−1} ∫_{B_R} ⟨x⟩² |∇̸u|²)^{1/2}`.
//!
//! The radial integral is composite Simpson with at least
//! `nodes_per_period` nodes per length `2π`. The angular integral is either
//! a tensor grid (uniform in `φ`, Gauss–Legendre in `cos θ`) that is exact
//! for the band-limited integrand, or the orthonormality identity
//! `∫_S u(rθ)² dθ = (2π)^n Σ_l (J_{l+Λ}(r)/r^Λ)² Σ_m a_{lm}²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harmonics::{Direction, SurfaceGradient};
use crate::specfun::gauss_legendre;

use super::wave::{combine, WaveField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeminormMethod {
    TensorGrid,
    Orthonormal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormOptions {
    pub nodes_per_period: usize,
    pub method: SeminormMethod,
}

impl Default for SeminormOptions {
    fn default() -> Self {
        Self {
            nodes_per_period: 40,
            method: SeminormMethod::TensorGrid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeminormRow {
    pub radius: f64,
    /// `R^{−1} ∫_{B_R} u²`.
    pub mean_square: f64,
    /// Its square root.
    pub seminorm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularDecayRow {
    pub radius: f64,
    /// `(R^{−1} ∫_{B_R} (1 + |x|²) |∇̸u|²)^{1/2}`.
    pub weighted: f64,
    /// `(R^{−1} ∫_{B_R} |∇̸u|²)^{1/2}`.
    pub unweighted: f64,
}

/// Agmon–Hörmander averages at each radius of `radii` (increasing).
pub fn agmon_hormander(field: &WaveField, radii: &[f64], opts: SeminormOptions) -> Result<Vec<SeminormRow>> {
    let shell = ShellIntegrator::new(field, opts.method)?;
    let totals = integrate_radially(radii, opts, |r| {
        let (u2, _) = shell.integrals(r, false)?;
        Ok([r.powi(field.dim() as i32 - 1) * u2, 0.0])
    })?;
    Ok(radii
        .iter()
        .zip(totals)
        .map(|(&radius, t)| {
            let mean_square = t[0] / radius;
            SeminormRow {
                radius,
                mean_square,
                seminorm: mean_square.sqrt(),
            }
        })
        .collect())
}

/// Weighted and unweighted angular-gradient averages at each radius.
pub fn angular_decay_check(
    field: &WaveField,
    radii: &[f64],
    opts: SeminormOptions,
) -> Result<Vec<AngularDecayRow>> {
    let shell = ShellIntegrator::new(field, opts.method)?;
    let totals = integrate_radially(radii, opts, |r| {
        if r == 0.0 {
            return Ok([0.0, 0.0]);
        }
        let (_, g2) = shell.integrals(r, true)?;
        let w = r.powi(field.dim() as i32 - 1) * g2;
        Ok([(1.0 + r * r) * w, w])
    })?;
    Ok(radii
        .iter()
        .zip(totals)
        .map(|(&radius, t)| AngularDecayRow {
            radius,
            weighted: (t[0] / radius).sqrt(),
            unweighted: (t[1] / radius).sqrt(),
        })
        .collect())
}

fn integrate_radially<F>(radii: &[f64], opts: SeminormOptions, mut g: F) -> Result<Vec<[f64; 2]>>
where
    F: FnMut(f64) -> Result<[f64; 2]>,
{
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be positive and strictly increasing"));
    }
    if opts.nodes_per_period < 4 {
        return Err(Error::invalid("need at least 4 radial nodes per period"));
    }
    let h_max = 2.0 * PI / opts.nodes_per_period as f64;
    let mut out = Vec::with_capacity(radii.len());
    let mut acc = [0.0, 0.0];
    let mut a = 0.0;
    let mut ga = g(a)?;
    for &b in radii {
        let mut m = ((b - a) / h_max).ceil() as usize;
        m = m.max(2);
        if m % 2 == 1 {
            m += 1;
        }
        let h = (b - a) / m as f64;
        let mut s = [ga[0], ga[1]];
        let mut last = ga;
        for i in 1..=m {
            let x = if i == m { b } else { a + i as f64 * h };
            let v = g(x)?;
            let w = if i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s[0] += w * v[0];
            s[1] += w * v[1];
            last = v;
        }
        acc[0] += s[0] * h / 3.0;
        acc[1] += s[1] * h / 3.0;
        out.push(acc);
        a = b;
        ga = last;
    }
    Ok(out)
}

/// Integrals over the sphere of radius `r` of `u²` and `|∇̸u|²`.
struct ShellIntegrator<'a> {
    field: &'a WaveField,
    method: SeminormMethod,
    /// Tensor grid: weights and `(A_l, ∇_S A_l)` at each node.
    nodes: Vec<(f64, Vec<f64>, Vec<SurfaceGradient>)>,
    /// Orthonormal route: `Σ_m a_{lm}²` per degree.
    energy: Vec<f64>,
}

impl<'a> ShellIntegrator<'a> {
    fn new(field: &'a WaveField, method: SeminormMethod) -> Result<Self> {
        let n = field.dim();
        let l_max = field.max_degree();
        let energy = (0..=l_max)
            .map(|l| field.coeffs().degree(l).iter().map(|a| a * a).sum())
            .collect();
        let mut nodes = Vec::new();
        if method == SeminormMethod::TensorGrid {
            let nphi = 2 * l_max + 2;
            let hphi = 2.0 * PI / nphi as f64;
            let mut dirs = Vec::new();
            if n == 2 {
                dirs.extend((0..nphi).map(|j| (hphi, Direction::planar(j as f64 * hphi))));
            } else {
                let rule = gauss_legendre(l_max + 1);
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    for j in 0..nphi {
                        dirs.push((w * hphi, Direction::spatial(x.acos(), j as f64 * hphi)));
                    }
                }
            }
            for (w, d) in dirs {
                let (mut a, mut g) = (Vec::new(), Vec::new());
                field.angular_parts_with_gradient(&d, &mut a, &mut g)?;
                nodes.push((w, a, g));
            }
        }
        Ok(Self {
            field,
            method,
            nodes,
            energy,
        })
    }

    fn integrals(&self, r: f64, with_gradient: bool) -> Result<(f64, f64)> {
        let mut g = Vec::new();
        self.field.radial_parts(r, &mut g)?;
        match self.method {
            SeminormMethod::Orthonormal => {
                let n = self.field.dim();
                let u2 = g.iter().zip(&self.energy).map(|(x, e)| x * x * e).sum();
                let g2 = if with_gradient && r > 0.0 {
                    g.iter()
                        .zip(&self.energy)
                        .enumerate()
                        .map(|(l, (x, e))| x * x * e * (l * (l + n - 2)) as f64)
                        .sum::<f64>()
                        / (r * r)
                } else {
                    0.0
                };
                Ok((u2, g2))
            }
            SeminormMethod::TensorGrid => {
                let (mut u2, mut g2) = (0.0, 0.0);
                for (w, a, ga) in &self.nodes {
                    let u = combine(a, &g);
                    u2 += w * u * u;
                    if with_gradient && r > 0.0 {
                        let mut grad = SurfaceGradient::default();
                        for l in 0..a.len() {
                            grad.axpy(g[l] / r, &ga[l]);
                        }
                        g2 += w * grad.norm_sq();
                    }
                }
                Ok((u2, g2))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::wave::isotropic_wave;
    use crate::randomwave::{sample_coefficients, VarianceSchedule};

    #[test]
    fn sinc_mean_square_approaches_two_pi() {
        let w = WaveField::exact(isotropic_wave(3).unwrap()).unwrap();
        let rows = agmon_hormander(&w, &[10.0 * PI, 50.0 * PI], SeminormOptions::default()).unwrap();
        for row in rows {
            // (4π/R) ∫_0^R sin² = 2π − π sin(2R)/R
            let exact = 2.0 * PI - PI * (2.0 * row.radius).sin() / row.radius;
            assert!((row.mean_square - exact).abs() < 1e-6, "{row:?}");
        }
    }

    #[test]
    fn methods_agree_and_scale() {
        let sch = VarianceSchedule::default_scattering(3).unwrap();
        let c = sample_coefficients(&sch, 9).unwrap();
        let w = WaveField::exact(c.clone()).unwrap();
        let radii = [5.0, 20.0];
        let a = agmon_hormander(&w, &radii, SeminormOptions::default()).unwrap();
        let b = agmon_hormander(
            &w,
            &radii,
            SeminormOptions {
                method: SeminormMethod::Orthonormal,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.mean_square - y.mean_square).abs() < 1e-10 * x.mean_square);
        }
        let w3 = WaveField::exact(c.scaled(-3.0)).unwrap();
        let s3 = agmon_hormander(&w3, &radii, SeminormOptions::default()).unwrap();
        assert!((s3[1].seminorm - 3.0 * a[1].seminorm).abs() < 1e-10 * a[1].seminorm);

        let ga = angular_decay_check(&w, &radii, SeminormOptions::default()).unwrap();
        let gb = angular_decay_check(
            &w,
            &radii,
            SeminormOptions {
                method: SeminormMethod::Orthonormal,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x.weighted - y.weighted).abs() < 1e-9 * x.weighted);
            assert!(x.unweighted < x.weighted);
        }
    }

    #[test]
    fn radial_field_has_no_angular_gradient() {
        let w = WaveField::exact(isotropic_wave(2).unwrap()).unwrap();
        let rows = angular_decay_check(&w, &[10.0, 30.0], SeminormOptions::default()).unwrap();
        assert!(rows.iter().all(|r| r.weighted == 0.0 && r.unweighted == 0.0));
    }

    #[test]
    fn bad_radii_rejected() {
        let w = WaveField::exact(isotropic_wave(2).unwrap()).unwrap();
        assert!(agmon_hormander(&w, &[3.0, 2.0], SeminormOptions::default()).is_err());
        assert!(agmon_hormander(&w, &[], SeminormOptions::default()).is_err());
    }
}
