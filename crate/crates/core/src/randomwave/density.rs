//! The spherical density `f = Σ i^l a_{lm} Y_{lm}`, split into
//! `f_R = Σ_{l even} (−1)^{l/2} a_{lm} Y_{lm}` and
//! `f_I = Σ_{l odd} (−1)^{(l−1)/2} a_{lm} Y_{lm}`, together with its
//! `H^s` norm, phase and the nonvanishing classification.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::{degree_offset, sphere_area, Direction, HarmonicBasis, SurfaceGradient};

use super::coefficients::CoefficientSet;

/// Below this modulus the phase of `f` is reported as undefined.
pub const PHASE_MODULUS_FLOOR: f64 = 1e-10;

/// `f` together with a reusable harmonic basis.
#[derive(Clone, Debug)]
pub struct DensityF {
    n: usize,
    max_degree: usize,
    basis: HarmonicBasis,
    /// `(−1)^{⌊l/2⌋} a_{lm}` in flat order.
    signed: Vec<f64>,
    real_is_zero: bool,
    imag_is_zero: bool,
}

/// Value and surface gradients of `f_R` and `f_I` at one direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityJet {
    pub value: Complex64,
    pub grad_re: SurfaceGradient,
    pub grad_im: SurfaceGradient,
}

impl DensityF {
    pub fn new(coeffs: &CoefficientSet) -> Result<Self> {
        let n = coeffs.dim();
        let max_degree = coeffs.max_degree();
        let basis = HarmonicBasis::new(n, max_degree)?;
        let mut signed = Vec::with_capacity(coeffs.values().len());
        let (mut real_is_zero, mut imag_is_zero) = (true, true);
        for l in 0..=max_degree {
            let sign = if (l / 2) % 2 == 0 { 1.0 } else { -1.0 };
            for &a in coeffs.degree(l) {
                if a != 0.0 {
                    if l % 2 == 0 {
                        real_is_zero = false;
                    } else {
                        imag_is_zero = false;
                    }
                }
                signed.push(sign * a);
            }
        }
        Ok(Self {
            n,
            max_degree,
            basis,
            signed,
            real_is_zero,
            imag_is_zero,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Whether every even-degree (resp. odd-degree) coefficient is zero.
    pub fn parts_identically_zero(&self) -> (bool, bool) {
        (self.real_is_zero, self.imag_is_zero)
    }

    pub fn eval(&self, dir: &Direction) -> Result<Complex64> {
        let mut scratch = Vec::new();
        self.eval_with(dir, &mut scratch)
    }

    pub fn eval_with(&self, dir: &Direction, scratch: &mut Vec<f64>) -> Result<Complex64> {
        self.basis.values(dir, scratch)?;
        let (mut re, mut im) = (0.0, 0.0);
        for l in (0..=self.max_degree).rev() {
            let range = degree_offset(l, self.n)..degree_offset(l + 1, self.n);
            let part: f64 = scratch[range.clone()]
                .iter()
                .zip(&self.signed[range])
                .map(|(y, b)| y * b)
                .sum();
            if l % 2 == 0 {
                re += part;
            } else {
                im += part;
            }
        }
        Ok(Complex64::new(re, im))
    }

    pub fn eval_with_gradient(&self, dir: &Direction) -> Result<DensityJet> {
        let (mut vals, mut grads) = (Vec::new(), Vec::new());
        self.basis.values_and_gradients(dir, &mut vals, &mut grads)?;
        let mut jet = DensityJet {
            value: Complex64::new(0.0, 0.0),
            grad_re: SurfaceGradient::default(),
            grad_im: SurfaceGradient::default(),
        };
        for l in (0..=self.max_degree).rev() {
            for i in degree_offset(l, self.n)..degree_offset(l + 1, self.n) {
                let b = self.signed[i];
                if l % 2 == 0 {
                    jet.value.re += b * vals[i];
                    jet.grad_re.axpy(b, &grads[i]);
                } else {
                    jet.value.im += b * vals[i];
                    jet.grad_im.axpy(b, &grads[i]);
                }
            }
        }
        Ok(jet)
    }

    /// `(|f|, Θ)` with `Θ ∈ (−π, π]`.
    pub fn phase_and_modulus(&self, dir: &Direction) -> Result<(f64, f64)> {
        let f = self.eval(dir)?;
        let modulus = f.norm();
        if modulus < PHASE_MODULUS_FLOOR {
            return Err(Error::Degenerate(format!(
                "|f| = {modulus:e} below {PHASE_MODULUS_FLOOR:e}; phase undefined"
            )));
        }
        Ok((modulus, f.arg()))
    }

    /// Continuous phase along a path of directions, starting in `(−π, π]`.
    pub fn unwrap_phase(&self, path: &[Direction]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(path.len());
        let mut prev: Option<f64> = None;
        for dir in path {
            let (_, raw) = self.phase_and_modulus(dir)?;
            let value = match prev {
                None => raw,
                Some(p) => p + wrap(raw - p),
            };
            out.push(value);
            prev = Some(value);
        }
        Ok(out)
    }
}

/// Wraps an angle to `(−π, π]`.
pub(crate) fn wrap(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// `f(dir) = f_R + i f_I`.
pub fn eval_f(coeffs: &CoefficientSet, dir: &Direction) -> Result<Complex64> {
    DensityF::new(coeffs)?.eval(dir)
}

/// `sqrt(Σ (1 + l)^{2s} a_{lm}²)`.
pub fn hs_norm(coeffs: &CoefficientSet, s: f64) -> f64 {
    (0..=coeffs.max_degree())
        .map(|l| {
            let w = (1.0 + l as f64).powf(2.0 * s);
            w * coeffs.degree(l).iter().map(|a| a * a).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// `(|f(dir)|, Θ(dir))`; fails where `|f| < 1e−10`.
pub fn phase_and_modulus(coeffs: &CoefficientSet, dir: &Direction) -> Result<(f64, f64)> {
    DensityF::new(coeffs)?.phase_and_modulus(dir)
}

/// Outcome of the search for zeros of `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vanishing {
    /// The refined minimum of `|f|` exceeds the threshold δ.
    Nonvanishing,
    /// A zero is certified: nonzero winding of `f` around a grid loop, an
    /// exact zero, or a sign change of `f` while the other part vanishes
    /// identically.
    Vanishing,
    /// Small modulus without a certificate.
    Undetermined,
}

impl Vanishing {
    pub fn label(self) -> &'static str {
        match self {
            Vanishing::Nonvanishing => "nonvanishing",
            Vanishing::Vanishing => "vanishing",
            Vanishing::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinModulus {
    pub min_value: f64,
    pub argmin: Direction,
    pub threshold: f64,
    pub classification: Vanishing,
}

/// Relative threshold: δ = 1e−3 · sqrt(E|f|²).
pub const NONVANISHING_RELATIVE_THRESHOLD: f64 = 1e-3;

/// Grid minimum of `|f|` with local refinement, and classification.
///
/// `n = 2`: `2·resolution` equally spaced angles. `n = 3`: colatitudes
/// `(i + ½)π/resolution` times `2·resolution` longitudes. The best grid
/// minima are refined by coordinate descent. The scale `E|f|²` comes from
/// the schedule when the coefficients were sampled, otherwise from
/// Parseval (`Σ a²/|S^{n−1}|`).
pub fn min_modulus_on_sphere(coeffs: &CoefficientSet, resolution: usize) -> Result<MinModulus> {
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    let n = coeffs.dim();
    let density = DensityF::new(coeffs)?;
    let mean_sq = match coeffs.schedule() {
        Some(s) => s.mean_square_density(),
        None => coeffs.values().iter().map(|a| a * a).sum::<f64>() / sphere_area(n),
    };
    let scale = mean_sq.sqrt();
    let threshold = NONVANISHING_RELATIVE_THRESHOLD * scale;

    let grid = SphereGrid::new(n, resolution);
    let values: Vec<Complex64> = grid
        .directions()
        .par_iter()
        .map_init(Vec::new, |scratch, d| density.eval_with(d, scratch))
        .collect::<Result<_>>()?;

    // Refine from the best few grid local minima.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].norm().total_cmp(&values[b].norm()));
    let starts: Vec<usize> = order.into_iter().take(8).collect();
    let mut best = (f64::INFINITY, grid.direction(starts[0]));
    for &i in &starts {
        let (v, d) = refine(&density, &grid, grid.coords(i))?;
        if v < best.0 {
            best = (v, d);
        }
    }
    let min_value = best.0.min(values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min));

    let certified = scale == 0.0
        || values.iter().any(|v| v.norm() == 0.0)
        || sign_change_certificate(&density, &values)
        || (n == 3 && grid.winding_certificate(&values))
        || (n == 2 && min_value < 1e-12 * scale);
    let classification = if certified {
        Vanishing::Vanishing
    } else if min_value > threshold {
        Vanishing::Nonvanishing
    } else {
        Vanishing::Undetermined
    };
    Ok(MinModulus {
        min_value,
        argmin: best.1,
        threshold,
        classification,
    })
}

fn sign_change_certificate(density: &DensityF, values: &[Complex64]) -> bool {
    let (re_zero, im_zero) = density.parts_identically_zero();
    let changes = |part: &dyn Fn(&Complex64) -> f64| {
        values.iter().any(|v| part(v) > 0.0) && values.iter().any(|v| part(v) < 0.0)
    };
    (im_zero && changes(&|v| v.re)) || (re_zero && changes(&|v| v.im))
}

fn refine(density: &DensityF, grid: &SphereGrid, start: (f64, f64)) -> Result<(f64, Direction)> {
    let mut scratch = Vec::new();
    let mut x = start;
    let mut fx = density.eval_with(&grid.make(x), &mut scratch)?.norm();
    let mut step = grid.spacing();
    let mut iters = 0;
    while step > 1e-10 && iters < 4000 {
        iters += 1;
        let mut improved = false;
        for axis in 0..grid.axes() {
            for sign in [1.0, -1.0] {
                let mut y = x;
                if axis == 0 {
                    y.0 += sign * step;
                } else {
                    y.1 += sign * step;
                }
                let fy = density.eval_with(&grid.make(y), &mut scratch)?.norm();
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((fx, grid.make(x)))
}

/// Sampling grid on `S^1` or `S^2`.
struct SphereGrid {
    n: usize,
    rows: usize,
    cols: usize,
}

impl SphereGrid {
    fn new(n: usize, resolution: usize) -> Self {
        if n == 2 {
            Self {
                n,
                rows: 1,
                cols: 2 * resolution,
            }
        } else {
            Self {
                n,
                rows: resolution,
                cols: 2 * resolution,
            }
        }
    }

    fn axes(&self) -> usize {
        self.n - 1
    }

    fn spacing(&self) -> f64 {
        2.0 * PI / self.cols as f64
    }

    /// `(φ, unused)` for `n = 2`, `(φ, θ)` for `n = 3`.
    fn coords(&self, i: usize) -> (f64, f64) {
        let (r, c) = (i / self.cols, i % self.cols);
        let phi = c as f64 * self.spacing();
        if self.n == 2 {
            (phi, 0.0)
        } else {
            (phi, (r as f64 + 0.5) * PI / self.rows as f64)
        }
    }

    fn make(&self, (phi, theta): (f64, f64)) -> Direction {
        if self.n == 2 {
            Direction::planar(phi)
        } else {
            Direction::spatial(theta, phi)
        }
    }

    fn direction(&self, i: usize) -> Direction {
        self.make(self.coords(i))
    }

    fn directions(&self) -> Vec<Direction> {
        (0..self.rows * self.cols).map(|i| self.direction(i)).collect()
    }

    /// Nonzero winding of `f` around the boundary of some block of 2×2 or
    /// 4×4 grid cells (or a polar cap), with every edge phase increment
    /// below π/2.
    fn winding_certificate(&self, values: &[Complex64]) -> bool {
        let at = |r: usize, c: usize| values[r * self.cols + (c % self.cols)];
        let winding = |loop_pts: &[Complex64]| -> Option<f64> {
            let mut total = 0.0;
            for k in 0..loop_pts.len() {
                let a = loop_pts[k];
                let b = loop_pts[(k + 1) % loop_pts.len()];
                let step = wrap(b.arg() - a.arg());
                if step.abs() >= FRAC_PI_2 {
                    return None;
                }
                total += step;
            }
            Some(total)
        };
        for block in [2usize, 4] {
            if block >= self.rows {
                break;
            }
            for r in 0..self.rows - block {
                for c in 0..self.cols {
                    let mut ring = Vec::with_capacity(4 * block);
                    ring.extend((0..block).map(|k| at(r, c + k)));
                    ring.extend((0..block).map(|k| at(r + k, c + block)));
                    ring.extend((0..block).map(|k| at(r + block, c + block - k)));
                    ring.extend((0..block).map(|k| at(r + block - k, c)));
                    if let Some(w) = winding(&ring) {
                        if w.abs() > PI {
                            return true;
                        }
                    }
                }
            }
        }
        for r in [0, self.rows - 1] {
            let ring: Vec<Complex64> = (0..self.cols).map(|c| at(r, c)).collect();
            if let Some(w) = winding(&ring) {
                if w.abs() > PI {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{eval_y, multiplicity, HarmonicIndex};

    fn constant(n: usize, c: f64) -> CoefficientSet {
        let mut k = CoefficientSet::zeros(n, 0).unwrap();
        k.set(0, 1, c).unwrap();
        k
    }

    #[test]
    fn single_terms() {
        let c = constant(3, 2.0);
        let f = eval_f(&c, &Direction::spatial(0.3, 0.1)).unwrap();
        assert!((f.re - 2.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && f.im == 0.0);

        let mut odd = CoefficientSet::zeros(3, 1).unwrap();
        odd.set(1, 2, 1.0).unwrap();
        odd.set(1, 3, -0.5).unwrap();
        let f = eval_f(&odd, &Direction::spatial(1.0, 2.0)).unwrap();
        assert_eq!(f.re, 0.0);
        assert!(f.im != 0.0);
    }

    #[test]
    fn matches_complex_sum() {
        let mut c = CoefficientSet::zeros(3, 5).unwrap();
        for (i, v) in (0..36).map(|i| ((i * 7919) % 23) as f64 / 10.0 - 1.1).enumerate() {
            let l = (i as f64).sqrt() as usize;
            let m = i - l * l + 1;
            c.set(l, m, v).unwrap();
        }
        let d = DensityF::new(&c).unwrap();
        for k in 0..100 {
            let dir = Direction::spatial(0.031 * k as f64, 0.17 * k as f64);
            let mut direct = Complex64::new(0.0, 0.0);
            for l in 0..=5 {
                for m in 1..=multiplicity(l, 3) {
                    let y = eval_y(HarmonicIndex { l, m }, 3, &dir).unwrap();
                    direct += Complex64::i().powu(l as u32) * c.get(l, m).unwrap() * y;
                }
            }
            assert!((d.eval(&dir).unwrap() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn hs_norm_examples() {
        assert_eq!(hs_norm(&constant(2, 3.0), 7.5), 3.0);
        let mut c = CoefficientSet::zeros(3, 2).unwrap();
        c.set(2, 1, 1.0).unwrap();
        assert!((hs_norm(&c, 1.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        let (m, t) = phase_and_modulus(&constant(2, (2.0 * PI).sqrt()), &Direction::planar(0.4)).unwrap();
        assert!((m - 1.0).abs() < 1e-15 && t == 0.0);
        let mut c = CoefficientSet::zeros(2, 1).unwrap();
        c.set(1, 1, 2.0).unwrap();
        let (m, t) = phase_and_modulus(&c, &Direction::planar(0.0)).unwrap();
        assert!((m - 2.0 / PI.sqrt()).abs() < 1e-15 && (t - FRAC_PI_2).abs() < 1e-15);
        assert!(phase_and_modulus(&c, &Direction::planar(FRAC_PI_2)).is_err());
    }

    #[test]
    fn unwrapping_follows_winding() {
        // f = Y_{0,1} + i Y_{1,1}: the phase oscillates without winding.
        let mut c = CoefficientSet::zeros(2, 1).unwrap();
        c.set(0, 1, 1.0).unwrap();
        c.set(1, 1, 1.0).unwrap();
        let d = DensityF::new(&c).unwrap();
        let path: Vec<Direction> = (0..=400).map(|k| Direction::planar(k as f64 * 2.0 * PI / 400.0)).collect();
        let ph = d.unwrap_phase(&path).unwrap();
        assert!((ph[0] - ph[400]).abs() < 1e-12);
    }

    #[test]
    fn classification_of_simple_densities() {
        let r = min_modulus_on_sphere(&constant(3, 1.0), 16).unwrap();
        assert_eq!(r.classification, Vanishing::Nonvanishing);
        assert!((r.min_value - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-14);

        // f_R = c Y_{2,1}: real, changes sign on two cones.
        let mut c = CoefficientSet::zeros(3, 2).unwrap();
        c.set(2, 1, 0.7).unwrap();
        let r = min_modulus_on_sphere(&c, 16).unwrap();
        assert_eq!(r.classification, Vanishing::Vanishing);

        // f_R vanishes on two cones, f_I on the plane x = 0; they cross
        // transversally at four points.
        let mut c = CoefficientSet::zeros(3, 2).unwrap();
        c.set(1, 2, 1.0).unwrap();
        c.set(2, 1, -1.0).unwrap();
        c.set(0, 1, 0.3).unwrap();
        let r = min_modulus_on_sphere(&c, 24).unwrap();
        assert_eq!(r.classification, Vanishing::Vanishing);
        assert!(r.min_value < 1e-8);
    }

    #[test]
    fn planar_classification() {
        let mut c = CoefficientSet::zeros(2, 2).unwrap();
        c.set(0, 1, 1.0).unwrap();
        c.set(1, 2, 0.5).unwrap();
        c.set(2, 1, 0.2).unwrap();
        let r = min_modulus_on_sphere(&c, 64).unwrap();
        assert_eq!(r.classification, Vanishing::Nonvanishing);
    }
}
