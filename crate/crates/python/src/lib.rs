//! Python bindings: schedules, sampling, wave evaluation, nodal extraction
//! and Kakutani reports.

use monowave::field::{isotropic_wave, SpacePoint, WaveField};
use monowave::harmonics::{self, Direction, HarmonicIndex};
use monowave::nodal::{self, count_in_ball, extract_from_field, NodalComponents, ScanSpec};
use monowave::randomwave::{self, CoefficientSet, VarianceSchedule};
use monowave::specfun::{self, BesselOrder};
use monowave::stability::{self, DegreeLaw, GeneralGaussianSpec, ReferenceEnsemble};
use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: monowave::Error) -> PyErr {
    use monowave::Error as E;
    let msg = e.to_string();
    match e {
        E::MemoryBudget { .. } => PyMemoryError::new_err(msg),
        E::OrderTooLarge { .. } | E::QuadratureNotConverged { .. } | E::Degenerate(_) => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn direction(x: &[f64]) -> PyResult<Direction> {
    Direction::from_cartesian(x).map_err(err)
}

/// Degree-wise variances `σ_l` of a Gaussian coefficient ensemble.
#[pyclass(name = "VarianceSchedule", module = "monowave_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule(VarianceSchedule);

#[pymethods]
impl PySchedule {
    /// `σ_l = (1 + l)^{-β}` with Sobolev index `s`.
    #[staticmethod]
    #[pyo3(signature = (n, s, beta, max_degree=80))]
    fn power_law(n: usize, s: f64, beta: f64, max_degree: usize) -> PyResult<Self> {
        VarianceSchedule::power_law(n, s, beta, max_degree).map(Self).map_err(err)
    }

    #[staticmethod]
    fn custom(n: usize, s: f64, sigma: Vec<f64>) -> PyResult<Self> {
        let max_degree = sigma.len().saturating_sub(1);
        VarianceSchedule::custom(n, s, sigma, max_degree).map(Self).map_err(err)
    }

    /// `σ_l ≡ 1` up to `max_degree`.
    #[staticmethod]
    fn unit(n: usize, max_degree: usize) -> PyResult<Self> {
        VarianceSchedule::unit(n, max_degree).map(Self).map_err(err)
    }

    #[staticmethod]
    fn default_scattering(n: usize) -> PyResult<Self> {
        VarianceSchedule::default_scattering(n).map(Self).map_err(err)
    }

    /// The same schedule cut at degree `l`.
    fn truncated(&self, l: usize) -> PyResult<Self> {
        self.0
            .clone()
            .with_truncation(randomwave::Truncation::Fixed(l))
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.0.s()
    }

    #[getter]
    fn truncation_degree(&self) -> usize {
        self.0.truncation_degree()
    }

    fn sigma(&self, l: usize) -> f64 {
        self.0.sigma(l)
    }

    /// `(converges, partial_sum, tail_bound, term_exponent)`.
    fn check_convergence(&self) -> PyResult<(bool, f64, f64, f64)> {
        let r = randomwave::check_convergence(&self.0).map_err(err)?;
        Ok((r.converges, r.partial_sum, r.tail_bound, r.term_exponent))
    }

    fn sample(&self, seed: u64) -> PyResult<PyCoefficients> {
        randomwave::sample_coefficients(&self.0, seed)
            .map(PyCoefficients)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("VarianceSchedule({})", self.0.descriptor())
    }
}

/// Real coefficients `a_{lm}` in degree-major order.
#[pyclass(name = "CoefficientSet", module = "monowave_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCoefficients(CoefficientSet);

#[pymethods]
impl PyCoefficients {
    #[new]
    fn new(n: usize, max_degree: usize, values: Vec<f64>) -> PyResult<Self> {
        CoefficientSet::from_values(n, max_degree, values).map(Self).map_err(err)
    }

    /// The radial wave: `f` constant on the sphere.
    #[staticmethod]
    fn isotropic(n: usize) -> PyResult<Self> {
        isotropic_wave(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        CoefficientSet::from_text(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.0.max_degree()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    /// `a_{lm}`, with `m` counted from 1.
    fn get(&self, l: usize, m: usize) -> PyResult<f64> {
        self.0.get(l, m).map_err(err)
    }

    /// `(f_R, f_I)` at the direction of `x`.
    fn density(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        let f = randomwave::eval_f(&self.0, &direction(&x)?).map_err(err)?;
        Ok((f.re, f.im))
    }

    /// `(classification, min |f|, threshold)` from a sphere grid search.
    #[pyo3(signature = (resolution=64))]
    fn classify(&self, resolution: usize) -> PyResult<(String, f64, f64)> {
        let m = randomwave::min_modulus_on_sphere(&self.0, resolution).map_err(err)?;
        Ok((m.classification.label().to_string(), m.min_value, m.threshold))
    }

    fn hs_norm(&self, s: f64) -> f64 {
        randomwave::hs_norm(&self.0, s)
    }
}

/// The wave `u` built from a coefficient set.
#[pyclass(name = "WaveField", module = "monowave_py", frozen)]
struct PyWave(WaveField);

#[pymethods]
impl PyWave {
    #[new]
    fn new(coeffs: &PyCoefficients) -> PyResult<Self> {
        WaveField::exact(coeffs.0.clone()).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.eval_u_cartesian(&x).map_err(err)
    }

    /// Cartesian gradient of `u` at `x ≠ 0`.
    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let p = SpacePoint::from_cartesian(&x).map_err(err)?;
        let g = self.0.eval_grad_u(&p).map_err(err)?;
        Ok(g.to_cartesian(&p.dir)[..x.len()].to_vec())
    }

    /// Leading large-`r` term of `u`.
    fn leading(&self, x: Vec<f64>) -> PyResult<f64> {
        let p = SpacePoint::from_cartesian(&x).map_err(err)?;
        self.0.leading_u(&p).map_err(err)
    }

    /// Nodal components in the ball of radius `radius` at spacing `h`.
    #[pyo3(signature = (radius, h=nodal::DEFAULT_SPACING))]
    fn nodal_set(&self, radius: f64, h: f64) -> PyResult<PyNodalSet> {
        extract_from_field(&self.0, &ScanSpec::ball(self.0.dim(), radius, h))
            .map(PyNodalSet)
            .map_err(err)
    }
}

/// Extracted nodal components of one scan.
#[pyclass(name = "NodalSet", module = "monowave_py", frozen)]
struct PyNodalSet(NodalComponents);

#[pymethods]
impl PyNodalSet {
    fn __len__(&self) -> usize {
        self.0.components.len()
    }

    /// `(total, sphere, other, noncompact)` for the ball of radius `radius`.
    fn count(&self, radius: f64) -> PyResult<(usize, usize, usize, usize)> {
        let c = count_in_ball(&self.0, radius).map_err(err)?;
        Ok((c.total, c.sphere, c.other, c.noncompact))
    }

    /// One `(topology, compact, r_min, r_max, euler_char)` per component.
    fn components(&self) -> Vec<(String, bool, f64, f64, Option<i64>)> {
        self.0
            .components
            .iter()
            .map(|c| (c.topology.label(), c.compact, c.r_min, c.r_max, c.euler_char))
            .collect()
    }

    fn to_tsv(&self) -> String {
        self.0.to_tsv()
    }
}

fn law(kind: &str, a: f64, b: f64) -> PyResult<DegreeLaw> {
    Ok(match kind {
        "constant" => DegreeLaw::Constant(a),
        "power_law" => DegreeLaw::PowerLaw { c: a, beta: b },
        "unit_perturbation" => DegreeLaw::UnitPerturbation { c: a, p: b },
        other => return Err(PyValueError::new_err(format!("unknown law {other:?}"))),
    })
}

/// Kakutani series of centred Gaussian coefficients with `σ_l` given by
/// `law` (`"constant"`: a; `"power_law"`: a(1+l)^{-b};
/// `"unit_perturbation"`: 1 + a(1+l)^{-b}) against `σ_l ≡ 1`, or against
/// `reference` when given.
///
/// Returns `(verdict, partial_sums, report_text)`.
#[pyfunction]
#[pyo3(signature = (n, law_kind, a, b=0.0, l_probe=2000, reference=None, mean=0.0))]
#[allow(clippy::too_many_arguments)]
fn kakutani(
    n: usize,
    law_kind: &str,
    a: f64,
    b: f64,
    l_probe: usize,
    reference: Option<&PySchedule>,
    mean: f64,
) -> PyResult<(String, Vec<(usize, f64)>, String)> {
    let spec = GeneralGaussianSpec::centred(n, law(law_kind, a, b)?)
        .map_err(err)?
        .with_mean(DegreeLaw::Constant(mean));
    let reference = match reference {
        Some(s) => ReferenceEnsemble::scattering(s.0.clone()),
        None => ReferenceEnsemble::unit(n),
    }
    .map_err(err)?;
    let report = stability::kakutani_series(&spec, &reference, l_probe).map_err(err)?;
    Ok((report.verdict.label().to_string(), report.partial_sums.clone(), report.to_text()))
}

/// `J_α(z)`.
#[pyfunction]
fn bessel_j(alpha: f64, z: f64) -> PyResult<f64> {
    specfun::bessel_j(BesselOrder::new(alpha).map_err(err)?, z).map_err(err)
}

/// Normalized Gegenbauer polynomial `P_{ln}(t)`, `P_{ln}(1) = 1`.
#[pyfunction]
fn legendre_p(l: usize, n: usize, t: f64) -> PyResult<f64> {
    specfun::legendre_p(l, n, t).map_err(err)
}

/// Real spherical harmonic `Y_{lm}` (`m` from 1) at the direction of `x`.
#[pyfunction]
fn eval_y(l: usize, m: usize, x: Vec<f64>) -> PyResult<f64> {
    let n = x.len();
    let idx = HarmonicIndex::new(l, m, n).map_err(err)?;
    harmonics::eval_y(idx, n, &direction(&x)?).map_err(err)
}

/// Number of harmonics of degree `l` on `S^{n-1}`.
#[pyfunction]
fn multiplicity(l: usize, n: usize) -> usize {
    harmonics::multiplicity(l, n)
}

#[pymodule]
fn monowave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyCoefficients>()?;
    m.add_class::<PyWave>()?;
    m.add_class::<PyNodalSet>()?;
    m.add_function(wrap_pyfunction!(kakutani, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_p, m)?)?;
    m.add_function(wrap_pyfunction!(eval_y, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicity, m)?)?;
    Ok(())
}
