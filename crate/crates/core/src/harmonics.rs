//! Real orthonormal spherical harmonics on the circle and the 2-sphere.
//!
//! Index convention, with `m` running from 1 to the multiplicity `d_l`:
//!
//! | n | m         | `Y_{lm}`                                  |
//! |---|-----------|-------------------------------------------|
//! | 2 | 1 (l = 0) | `1/√(2π)`                                 |
//! | 2 | 1         | `cos(lφ)/√π`                              |
//! | 2 | 2         | `sin(lφ)/√π`                              |
//! | 3 | 1         | `P̄_l^0(cos θ)`                           |
//! | 3 | 2k        | `√2 P̄_l^k(cos θ) cos(kφ)`, `1 ≤ k ≤ l`   |
//! | 3 | 2k + 1    | `√2 P̄_l^k(cos θ) sin(kφ)`, `1 ≤ k ≤ l`   |
//!
//! `P̄_l^k` are the associated Legendre functions scaled so that
//! `2π ∫_0^π |P̄_l^k(cos θ)|² sin θ dθ = 1`, without the Condon–Shortley
//! phase.
//!
//! Surface gradients are reported in the frame `(e_θ, e_φ)`. For `k ≥ 1`
//! they are computed from `Q_l^k = P̄_l^k / sin θ`, which obeys the same
//! recurrence as `P̄_l^k` and is finite at the poles, so no special
//! handling near `θ = 0, π` is needed.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::check_dim;

/// Degree `l` and intra-degree index `m ∈ [1, d_l]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub l: usize,
    pub m: usize,
}

impl HarmonicIndex {
    pub fn new(l: usize, m: usize, n: usize) -> Result<Self> {
        check_dim(n)?;
        let d = multiplicity(l, n);
        if m == 0 || m > d {
            return Err(Error::invalid(format!(
                "index m = {m} out of range 1..={d} for degree {l} in dimension {n}"
            )));
        }
        Ok(Self { l, m })
    }

    /// Position in the flat ordering used by coefficient tables: degrees in
    /// increasing order, `m` increasing within a degree.
    pub fn flat(self, n: usize) -> usize {
        degree_offset(self.l, n) + self.m - 1
    }
}

/// Number of harmonics of degree below `l`.
pub fn degree_offset(l: usize, n: usize) -> usize {
    match n {
        2 => {
            if l == 0 {
                0
            } else {
                2 * l - 1
            }
        }
        3 => l * l,
        _ => (0..l).map(|k| multiplicity(k, n)).sum(),
    }
}

/// Number of harmonics of degree at most `max_degree`.
pub fn harmonic_count(max_degree: usize, n: usize) -> usize {
    degree_offset(max_degree + 1, n)
}

/// A point of the unit sphere `S^{n−1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direction {
    /// `(cos φ, sin φ)`.
    Planar { phi: f64 },
    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    Spatial { theta: f64, phi: f64 },
}

impl Direction {
    pub fn planar(phi: f64) -> Self {
        Direction::Planar { phi }
    }

    pub fn spatial(theta: f64, phi: f64) -> Self {
        Direction::Spatial { theta, phi }
    }

    /// Normalises a nonzero Cartesian vector of length 2 or 3.
    pub fn from_cartesian(x: &[f64]) -> Result<Self> {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("direction needs a finite nonzero vector"));
        }
        match x.len() {
            2 => Ok(Direction::Planar {
                phi: x[1].atan2(x[0]),
            }),
            3 => Ok(Direction::Spatial {
                theta: (x[2] / norm).clamp(-1.0, 1.0).acos(),
                phi: x[1].atan2(x[0]),
            }),
            k => Err(Error::UnsupportedDimension(k)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Direction::Planar { .. } => 2,
            Direction::Spatial { .. } => 3,
        }
    }

    /// Unit vector, padded with a zero third component in the plane.
    pub fn to_cartesian(&self) -> [f64; 3] {
        match *self {
            Direction::Planar { phi } => [phi.cos(), phi.sin(), 0.0],
            Direction::Spatial { theta, phi } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                [st * cp, st * sp, ct]
            }
        }
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        let a = self.to_cartesian();
        let b = other.to_cartesian();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }

    fn expect_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "direction lives in dimension {} but n = {n}",
                self.dim()
            )))
        }
    }
}

/// Tangent vector in the frame `(e_θ, e_φ)`. In the plane only `phi` is
/// used (the frame is the single vector `e_φ`).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurfaceGradient {
    pub theta: f64,
    pub phi: f64,
}

impl SurfaceGradient {
    pub fn norm_sq(&self) -> f64 {
        self.theta * self.theta + self.phi * self.phi
    }

    /// The same vector in Cartesian coordinates.
    pub fn to_cartesian(&self, dir: &Direction) -> [f64; 3] {
        match *dir {
            Direction::Planar { phi } => {
                let (s, c) = phi.sin_cos();
                [-s * self.phi, c * self.phi, 0.0]
            }
            Direction::Spatial { theta, phi } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                [
                    ct * cp * self.theta - sp * self.phi,
                    ct * sp * self.theta + cp * self.phi,
                    -st * self.theta,
                ]
            }
        }
    }

    pub(crate) fn axpy(&mut self, a: f64, g: &SurfaceGradient) {
        self.theta += a * g.theta;
        self.phi += a * g.phi;
    }
}

/// `d_l`, the dimension of degree-`l` harmonics on `S^{n−1}`.
pub fn multiplicity(l: usize, n: usize) -> usize {
    if l == 0 {
        return 1;
    }
    // (2l + n − 2)/(l + n − 2) · binom(l + n − 2, l)
    let mut binom: u128 = 1;
    for i in 1..=(n - 2) as u128 {
        binom = binom * (l as u128 + i) / i;
    }
    ((2 * l + n - 2) as u128 * binom / (l + n - 2) as u128) as usize
}

/// `|S^{n−1}|`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => crate::specfun::funk_hecke::sphere_measure(n - 1),
    }
}

/// `Y_{lm}(dir)`.
pub fn eval_y(idx: HarmonicIndex, n: usize, dir: &Direction) -> Result<f64> {
    HarmonicIndex::new(idx.l, idx.m, n)?;
    dir.expect_dim(n)?;
    Ok(single(idx, dir).0)
}

/// `∇_S Y_{lm}(dir)`.
pub fn grad_y(idx: HarmonicIndex, n: usize, dir: &Direction) -> Result<SurfaceGradient> {
    HarmonicIndex::new(idx.l, idx.m, n)?;
    dir.expect_dim(n)?;
    Ok(single(idx, dir).1)
}

fn single(idx: HarmonicIndex, dir: &Direction) -> (f64, SurfaceGradient) {
    match *dir {
        Direction::Planar { phi } => planar(idx, phi),
        Direction::Spatial { theta, phi } => {
            let l = idx.l;
            let k = if idx.m == 1 { 0 } else { idx.m / 2 };
            let x = theta.cos();
            let s = theta.sin();
            let cols = AssociatedColumns::new(l, x, s, k, k);
            let (p, dtheta, q) = cols.at(l, k);
            let (sp, cp) = (k as f64 * phi).sin_cos();
            if k == 0 {
                (p, SurfaceGradient { theta: dtheta, phi: 0.0 })
            } else if idx.m % 2 == 0 {
                let r2 = std::f64::consts::SQRT_2;
                (
                    r2 * p * cp,
                    SurfaceGradient {
                        theta: r2 * dtheta * cp,
                        phi: -r2 * k as f64 * q * sp,
                    },
                )
            } else {
                let r2 = std::f64::consts::SQRT_2;
                (
                    r2 * p * sp,
                    SurfaceGradient {
                        theta: r2 * dtheta * sp,
                        phi: r2 * k as f64 * q * cp,
                    },
                )
            }
        }
    }
}

fn planar(idx: HarmonicIndex, phi: f64) -> (f64, SurfaceGradient) {
    if idx.l == 0 {
        return ((2.0 * PI).sqrt().recip(), SurfaceGradient::default());
    }
    let lf = idx.l as f64;
    let norm = PI.sqrt().recip();
    let (s, c) = (lf * phi).sin_cos();
    if idx.m == 1 {
        (norm * c, SurfaceGradient { theta: 0.0, phi: -lf * norm * s })
    } else {
        (norm * s, SurfaceGradient { theta: 0.0, phi: lf * norm * c })
    }
}

/// Normalised associated Legendre values `P̄_l^k`, the pole-free quotients
/// `Q_l^k = P̄_l^k / sin θ` (k ≥ 1) and `∂_θ P̄_l^k`, for a band of orders.
struct AssociatedColumns {
    max_degree: usize,
    k_lo: usize,
    /// `cols[k - k_lo][l - k]` holds `P̄` for `k = 0`, `Q` for `k ≥ 1`.
    cols: Vec<Vec<f64>>,
    x: f64,
    s: f64,
}

impl AssociatedColumns {
    /// Columns for orders `k_lo..=k_hi` (plus order 1 when `k_lo = 0`,
    /// needed for the derivative of the zonal column).
    fn new(max_degree: usize, x: f64, s: f64, k_hi: usize, k_lo: usize) -> Self {
        let k_hi = k_hi.max(if k_lo == 0 { 1 } else { k_lo });
        let mut cols = Vec::with_capacity(k_hi - k_lo + 1);
        // Diagonal P̄_k^k and Q_k^k, built upward from P̄_0^0.
        let mut diag_p = 1.0 / (4.0 * PI).sqrt();
        let mut diag_q = 0.0;
        for k in 0..=k_hi {
            if k >= 1 {
                let f = ((2 * k + 1) as f64 / (2 * k) as f64).sqrt();
                diag_q = f * diag_p;
                diag_p = f * s * diag_p;
            }
            if k >= k_lo {
                let seed = if k == 0 { diag_p } else { diag_q };
                cols.push(column(k, max_degree.max(k), x, seed));
            }
        }
        Self {
            max_degree,
            k_lo,
            cols,
            x,
            s,
        }
    }

    fn raw(&self, l: usize, k: usize) -> f64 {
        if l < k {
            return 0.0;
        }
        self.cols[k - self.k_lo][l - k]
    }

    /// `(P̄_l^k, ∂_θ P̄_l^k, Q_l^k)`; `Q` is reported as 0 for `k = 0`.
    fn at(&self, l: usize, k: usize) -> (f64, f64, f64) {
        debug_assert!(l <= self.max_degree.max(k));
        if k == 0 {
            let p = self.raw(l, 0);
            let p1 = if l >= 1 { self.s * self.raw(l, 1) } else { 0.0 };
            let d = -((l * (l + 1)) as f64).sqrt() * p1;
            return (p, d, 0.0);
        }
        let q = self.raw(l, k);
        let q_prev = if l > k { self.raw(l - 1, k) } else { 0.0 };
        let lf = l as f64;
        let kf = k as f64;
        let c = ((2.0 * lf + 1.0) * (lf - kf) * (lf + kf) / (2.0 * lf - 1.0)).sqrt();
        let d = lf * self.x * q - c * q_prev;
        (self.s * q, d, q)
    }
}

/// `v[l − k]` for `l = k..=max_degree` from the normalised three-term
/// recurrence in `l`, seeded with the diagonal value.
fn column(k: usize, max_degree: usize, x: f64, seed: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(max_degree - k + 1);
    v.push(seed);
    if max_degree == k {
        return v;
    }
    v.push(((2 * k + 3) as f64).sqrt() * x * seed);
    let kf = k as f64;
    for l in k + 2..=max_degree {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - kf * kf)).sqrt();
        let lm = lf - 1.0;
        let b = ((lm * lm - kf * kf) / (4.0 * lm * lm - 1.0)).sqrt();
        let i = l - k;
        v.push(a * (x * v[i - 1] - b * v[i - 2]));
    }
    v
}

/// Evaluates every harmonic of degree at most `max_degree` at once, in the
/// flat order of [`HarmonicIndex::flat`].
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    n: usize,
    max_degree: usize,
}

impl HarmonicBasis {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, max_degree })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        harmonic_count(self.max_degree, self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values only.
    pub fn values(&self, dir: &Direction, out: &mut Vec<f64>) -> Result<()> {
        dir.expect_dim(self.n)?;
        out.clear();
        match *dir {
            Direction::Planar { phi } => {
                out.push((2.0 * PI).sqrt().recip());
                let norm = PI.sqrt().recip();
                for l in 1..=self.max_degree {
                    let (s, c) = (l as f64 * phi).sin_cos();
                    out.push(norm * c);
                    out.push(norm * s);
                }
            }
            Direction::Spatial { theta, phi } => {
                let (s, x) = theta.sin_cos();
                let cols = AssociatedColumns::new(self.max_degree, x, s, self.max_degree, 0);
                let trig = trig_table(self.max_degree, phi);
                let r2 = std::f64::consts::SQRT_2;
                for l in 0..=self.max_degree {
                    out.push(cols.raw(l, 0));
                    for (k, &(sk, ck)) in trig.iter().enumerate().take(l + 1).skip(1) {
                        let p = s * cols.raw(l, k);
                        out.push(r2 * p * ck);
                        out.push(r2 * p * sk);
                    }
                }
            }
        }
        Ok(())
    }

    /// Values and surface gradients.
    pub fn values_and_gradients(
        &self,
        dir: &Direction,
        vals: &mut Vec<f64>,
        grads: &mut Vec<SurfaceGradient>,
    ) -> Result<()> {
        dir.expect_dim(self.n)?;
        vals.clear();
        grads.clear();
        match *dir {
            Direction::Planar { phi } => {
                for l in 0..=self.max_degree {
                    for m in 1..=multiplicity(l, 2) {
                        let (v, g) = planar(HarmonicIndex { l, m }, phi);
                        vals.push(v);
                        grads.push(g);
                    }
                }
            }
            Direction::Spatial { theta, phi } => {
                let (s, x) = theta.sin_cos();
                let cols = AssociatedColumns::new(self.max_degree, x, s, self.max_degree, 0);
                let trig = trig_table(self.max_degree, phi);
                let r2 = std::f64::consts::SQRT_2;
                for l in 0..=self.max_degree {
                    let (p, d, _) = cols.at(l, 0);
                    vals.push(p);
                    grads.push(SurfaceGradient { theta: d, phi: 0.0 });
                    for (k, &(sk, ck)) in trig.iter().enumerate().take(l + 1).skip(1) {
                        let (p, d, q) = cols.at(l, k);
                        let kq = k as f64 * q;
                        vals.push(r2 * p * ck);
                        grads.push(SurfaceGradient {
                            theta: r2 * d * ck,
                            phi: -r2 * kq * sk,
                        });
                        vals.push(r2 * p * sk);
                        grads.push(SurfaceGradient {
                            theta: r2 * d * sk,
                            phi: r2 * kq * ck,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn trig_table(max_degree: usize, phi: f64) -> Vec<(f64, f64)> {
    (0..=max_degree).map(|k| (k as f64 * phi).sin_cos()).collect()
}
