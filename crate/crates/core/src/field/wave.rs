//! Exact (truncated series) and leading-order evaluation of `u`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::{
    degree_offset, eval_y, sphere_area, Direction, HarmonicBasis, HarmonicIndex, SurfaceGradient,
};
use crate::randomwave::{CoefficientSet, DensityF};
use crate::specfun::{bessel_j_sequence, check_dim, lambda, scaled_bessel_sequence};

/// A point `x = r θ` of `R^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacePoint {
    pub r: f64,
    pub dir: Direction,
}

impl SpacePoint {
    pub fn new(r: f64, dir: Direction) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("radius must be finite and >= 0, got {r}")));
        }
        Ok(Self { r, dir })
    }

    /// From Cartesian coordinates; the origin gets the direction `φ = 0`
    /// (resp. `θ = 0`).
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dir = if r == 0.0 {
            match x.len() {
                2 => Direction::planar(0.0),
                3 => Direction::spatial(0.0, 0.0),
                k => return Err(Error::UnsupportedDimension(k)),
            }
        } else {
            Direction::from_cartesian(x)?
        };
        Self::new(r, dir)
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    /// Cartesian coordinates (third entry zero in the plane).
    pub fn to_cartesian(&self) -> [f64; 3] {
        let d = self.dir.to_cartesian();
        [self.r * d[0], self.r * d[1], self.r * d[2]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// The series truncated at the coefficient degree `L`.
    ExactSeries,
    /// `2(2π)^{(n−1)/2} r^{−(n−1)/2} U(x)`.
    LeadingOrder,
}

/// Radial derivative and angular gradient `∇̸u = r^{−1} ∇_S u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradU {
    pub radial: f64,
    pub angular: SurfaceGradient,
}

impl GradU {
    pub fn to_cartesian(&self, dir: &Direction) -> [f64; 3] {
        let x = dir.to_cartesian();
        let a = self.angular.to_cartesian(dir);
        [
            self.radial * x[0] + a[0],
            self.radial * x[1] + a[1],
            self.radial * x[2] + a[2],
        ]
    }
}

/// Buffers for repeated evaluation of one field.
#[derive(Clone, Debug, Default)]
pub struct EvalScratch {
    basis: Vec<f64>,
    angular: Vec<f64>,
    radial: Vec<f64>,
}

/// A sampled wave ready for evaluation.
#[derive(Clone, Debug)]
pub struct WaveField {
    coeffs: CoefficientSet,
    mode: EvalMode,
    basis: HarmonicBasis,
    density: DensityF,
    norm: f64,
}

impl WaveField {
    pub fn new(coeffs: CoefficientSet, mode: EvalMode) -> Result<Self> {
        let n = coeffs.dim();
        check_dim(n)?;
        let basis = HarmonicBasis::new(n, coeffs.max_degree())?;
        let density = DensityF::new(&coeffs)?;
        Ok(Self {
            coeffs,
            mode,
            basis,
            density,
            norm: (2.0 * PI).powf(n as f64 / 2.0),
        })
    }

    pub fn exact(coeffs: CoefficientSet) -> Result<Self> {
        Self::new(coeffs, EvalMode::ExactSeries)
    }

    pub fn coeffs(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn density(&self) -> &DensityF {
        &self.density
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.max_degree()
    }

    /// `A_l(θ) = Σ_m a_{lm} Y_{lm}(θ)` for `l = 0..=L`.
    pub fn angular_parts(&self, dir: &Direction, scratch: &mut Vec<f64>, out: &mut Vec<f64>) -> Result<()> {
        self.basis.values(dir, scratch)?;
        let n = self.dim();
        out.clear();
        for l in 0..=self.max_degree() {
            let a = self.coeffs.degree(l);
            let off = degree_offset(l, n);
            out.push(a.iter().zip(&scratch[off..off + a.len()]).map(|(c, y)| c * y).sum());
        }
        Ok(())
    }

    /// `A_l(θ)` and `∇_S A_l(θ)`.
    pub fn angular_parts_with_gradient(
        &self,
        dir: &Direction,
        parts: &mut Vec<f64>,
        grads: &mut Vec<SurfaceGradient>,
    ) -> Result<()> {
        let (mut vals, mut g) = (Vec::new(), Vec::new());
        self.basis.values_and_gradients(dir, &mut vals, &mut g)?;
        let n = self.dim();
        parts.clear();
        grads.clear();
        for l in 0..=self.max_degree() {
            let off = degree_offset(l, n);
            let mut p = 0.0;
            let mut gl = SurfaceGradient::default();
            for (k, c) in self.coeffs.degree(l).iter().enumerate() {
                p += c * vals[off + k];
                gl.axpy(*c, &g[off + k]);
            }
            parts.push(p);
            grads.push(gl);
        }
        Ok(())
    }

    /// `(2π)^{n/2} J_{l+Λ}(r)/r^Λ` for `l = 0..=L`.
    pub fn radial_parts(&self, r: f64, out: &mut Vec<f64>) -> Result<()> {
        scaled_bessel_sequence(self.dim(), self.max_degree(), r, out)?;
        let c = self.norm;
        out.iter_mut().for_each(|v| *v *= c);
        Ok(())
    }

    /// `(2π)^{n/2} d/dr[J_{l+Λ}(r)/r^Λ]` for `l = 0..=L`, `r > 0`.
    pub fn radial_derivative_parts(&self, r: f64, out: &mut Vec<f64>) -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::invalid("radial derivative needs r > 0"));
        }
        let lam = lambda(self.dim());
        let l_max = self.max_degree();
        let mut j = Vec::new();
        bessel_j_sequence(lam, l_max + 2, r, &mut j)?;
        let rl = r.powf(lam);
        out.clear();
        for l in 0..=l_max {
            let lower = if l == 0 {
                2.0 * lam / r * j[0] - j[1]
            } else {
                j[l - 1]
            };
            let d = lower / rl - (l as f64 + 2.0 * lam) * j[l] / (rl * r);
            out.push(self.norm * d);
        }
        Ok(())
    }

    /// `u(p)` in the configured mode.
    pub fn eval_u(&self, p: &SpacePoint) -> Result<f64> {
        self.check_point(p)?;
        match self.mode {
            EvalMode::ExactSeries => self.eval_series(p),
            EvalMode::LeadingOrder => {
                if !(p.r > 0.0) {
                    return Err(Error::invalid("the leading-order term is undefined at r = 0"));
                }
                let n = self.dim() as f64;
                let u = self.leading_u(p)?;
                Ok(2.0 * (2.0 * PI).powf((n - 1.0) / 2.0) * p.r.powf(-(n - 1.0) / 2.0) * u)
            }
        }
    }

    /// `u` at Cartesian coordinates.
    pub fn eval_u_cartesian(&self, x: &[f64]) -> Result<f64> {
        self.eval_u(&SpacePoint::from_cartesian(x)?)
    }

    /// Exact series at `r·dir` reusing the buffers in `scratch`.
    pub fn eval_series_with(&self, r: f64, dir: &Direction, scratch: &mut EvalScratch) -> Result<f64> {
        self.angular_parts(dir, &mut scratch.basis, &mut scratch.angular)?;
        self.radial_parts(r, &mut scratch.radial)?;
        Ok(combine(&scratch.angular, &scratch.radial))
    }

    /// Exact series, regardless of the configured mode.
    pub fn eval_series(&self, p: &SpacePoint) -> Result<f64> {
        self.check_point(p)?;
        let (mut scratch, mut a, mut g) = (Vec::new(), Vec::new(), Vec::new());
        self.angular_parts(&p.dir, &mut scratch, &mut a)?;
        self.radial_parts(p.r, &mut g)?;
        Ok(combine(&a, &g))
    }

    /// `U = f_R cos(r − r_0) + f_I sin(r − r_0)`.
    pub fn leading_u(&self, p: &SpacePoint) -> Result<f64> {
        let f = self.density.eval(&p.dir)?;
        let (s, c) = (p.r - super::asymptotics::leading_phase_shift(self.dim())).sin_cos();
        Ok(f.re * c + f.im * s)
    }

    /// Gradient of the exact series.
    pub fn eval_grad_u(&self, p: &SpacePoint) -> Result<GradU> {
        self.check_point(p)?;
        if !(p.r > 0.0) {
            return Err(Error::invalid("gradient evaluation needs r > 0"));
        }
        let (mut a, mut ga) = (Vec::new(), Vec::new());
        self.angular_parts_with_gradient(&p.dir, &mut a, &mut ga)?;
        let (mut g, mut dg) = (Vec::new(), Vec::new());
        self.radial_parts(p.r, &mut g)?;
        self.radial_derivative_parts(p.r, &mut dg)?;
        let radial = combine(&a, &dg);
        let mut angular = SurfaceGradient::default();
        for l in (0..a.len()).rev() {
            angular.axpy(g[l] / p.r, &ga[l]);
        }
        Ok(GradU { radial, angular })
    }

    fn check_point(&self, p: &SpacePoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::invalid(format!(
                "point lives in dimension {} but the field in {}",
                p.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `Σ_l a_l g_l`, highest degree first with Neumaier compensation.
pub(crate) fn combine(a: &[f64], g: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in (0..a.len()).rev() {
        let term = a[l] * g[l];
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Coefficients of the constant density `f ≡ 1/|S^{n−1}|`, whose wave is
/// `sin(r)/r` for `n = 3` and `J_0(r)` for `n = 2`.
pub fn isotropic_wave(n: usize) -> Result<CoefficientSet> {
    check_dim(n)?;
    let mut c = CoefficientSet::zeros(n, 0)?;
    c.set(0, 1, 1.0 / sphere_area(n).sqrt())?;
    Ok(c)
}

/// `(2π)^{n/2} (−i)^l Y_{lm}(θ) J_{l+Λ}(r)/r^Λ`, the Fourier transform of
/// `Y_{lm} dS` at `x = rθ`.
pub fn ft_single_harmonic(idx: HarmonicIndex, n: usize, p: &SpacePoint) -> Result<Complex64> {
    let y = eval_y(idx, n, &p.dir)?;
    let mut g = Vec::new();
    scaled_bessel_sequence(n, idx.l, p.r, &mut g)?;
    let value = (2.0 * PI).powf(n as f64 / 2.0) * y * g[idx.l];
    Ok(Complex64::new(0.0, -1.0).powu(idx.l as u32) * value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomwave::{sample_coefficients, VarianceSchedule};

    fn sinc() -> WaveField {
        WaveField::exact(isotropic_wave(3).unwrap()).unwrap()
    }

    #[test]
    fn sinc_values() {
        let w = sinc();
        let at = |r: f64| w.eval_u(&SpacePoint::new(r, Direction::spatial(0.7, 0.2)).unwrap()).unwrap();
        assert!(at(PI).abs() < 1e-14);
        assert!((at(PI / 2.0) - 2.0 / PI).abs() < 1e-14);
        assert!((at(0.0) - 1.0).abs() < 1e-14);
        assert!((at(123.4) - 123.4f64.sin() / 123.4).abs() < 1e-14);
    }

    #[test]
    fn j0_wave() {
        let w = WaveField::exact(isotropic_wave(2).unwrap()).unwrap();
        let u = w.eval_u(&SpacePoint::new(2.404825557695773, Direction::planar(1.0)).unwrap()).unwrap();
        assert!(u.abs() < 1e-14);
    }

    #[test]
    fn sinc_gradient() {
        let g = sinc().eval_grad_u(&SpacePoint::new(PI, Direction::spatial(1.0, 1.0)).unwrap()).unwrap();
        assert!((g.radial + 1.0 / PI).abs() < 1e-14);
        assert!(g.angular.norm_sq() == 0.0);
        assert!(sinc().eval_grad_u(&SpacePoint::new(0.0, Direction::spatial(0.0, 0.0)).unwrap()).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        for n in [2usize, 3] {
            let sch = VarianceSchedule::default_scattering(n).unwrap();
            let w = WaveField::exact(sample_coefficients(&sch, 3).unwrap()).unwrap();
            let pts: Vec<[f64; 3]> = vec![[3.0, -1.5, 2.0], [10.0, 4.0, -7.0], [0.5, 0.2, 0.9]];
            for x in pts {
                let x = &x[..n];
                let p = SpacePoint::from_cartesian(x).unwrap();
                let g = w.eval_grad_u(&p).unwrap().to_cartesian(&p.dir);
                let h = 1e-5;
                for k in 0..n {
                    let (mut a, mut b) = (x.to_vec(), x.to_vec());
                    a[k] += h;
                    b[k] -= h;
                    let fd = (w.eval_u_cartesian(&a).unwrap() - w.eval_u_cartesian(&b).unwrap()) / (2.0 * h);
                    assert!((fd - g[k]).abs() < 1e-6, "n {n} k {k}: {fd} vs {}", g[k]);
                }
            }
        }
    }

    #[test]
    fn helmholtz_residual_is_second_order() {
        let sch = VarianceSchedule::default_scattering(3).unwrap();
        let w = WaveField::exact(sample_coefficients(&sch, 11).unwrap()).unwrap();
        let x = [2.0, -3.0, 1.5];
        let u0 = w.eval_u_cartesian(&x).unwrap();
        let residual = |h: f64| {
            let mut lap = -6.0 * u0;
            for k in 0..3 {
                for s in [h, -h] {
                    let mut y = x;
                    y[k] += s;
                    lap += w.eval_u_cartesian(&y).unwrap();
                }
            }
            (lap / (h * h) + u0).abs()
        };
        let (r1, r2) = (residual(0.02), residual(0.01));
        assert!(r1 < 1e-3);
        assert!(r2 < 0.35 * r1, "{r1} {r2}");
    }

    #[test]
    fn leading_mode_exact_for_sinc() {
        let w = WaveField::new(isotropic_wave(3).unwrap(), EvalMode::LeadingOrder).unwrap();
        for r in [0.3, 2.0, 40.0] {
            let u = w.eval_u(&SpacePoint::new(r, Direction::spatial(0.1, 0.0)).unwrap()).unwrap();
            assert!((u - r.sin() / r).abs() < 1e-14);
        }
    }

    #[test]
    fn single_harmonic_transform_closed_form() {
        let p = SpacePoint::new(2.5, Direction::spatial(0.3, 0.4)).unwrap();
        let v = ft_single_harmonic(HarmonicIndex { l: 0, m: 1 }, 3, &p).unwrap();
        let expect = (2.0 * PI).powf(1.5) / (4.0 * PI).sqrt() * (2.0 / PI).sqrt() * 2.5f64.sin() / 2.5;
        assert!((v.re - expect).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let w = sinc();
        assert!(w.eval_u(&SpacePoint::new(1.0, Direction::planar(0.0)).unwrap()).is_err());
    }
}
