//! Python bindings. Compound results (scan tables, eigensystems, fits) come back as
//! plain dicts and lists; series, solutions and profiles are wrapped classes.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use dnls_core::homoclinic::{self as hc, NewtonOptions, ScanOptions, MAX_ITERATIONS};
use dnls_core::lattice::{LatticeMap, Map2, Map4, SymmetryId};
use dnls_core::manifold::{self as mf, EvalBox, ScalingPolicy};
use dnls_core::soliton;
use dnls_core::spectral::{self, FixedPointKind};
use dnls_core::{ModelParams, State2, State4};

create_exception!(dnls, NumericalError, PyRuntimeError);

fn err(e: dnls_core::Error) -> PyErr {
    use dnls_core::Error::*;
    match e {
        InvalidParams(_) | NotAllReal(_) | ParamsMismatch | DimensionMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => NumericalError::new_err(e.to_string()),
    }
}

fn params(epsilon: f64, a: f64) -> PyResult<ModelParams> {
    ModelParams::new(epsilon, a).map_err(err)
}

/// Serializes through JSON into native Python containers.
fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn newton(threshold: f64, half_width: f64) -> NewtonOptions {
    NewtonOptions {
        threshold,
        bx: EvalBox { half_width },
        max_iterations: MAX_ITERATIONS,
    }
}

fn symmetry(name: &str) -> PyResult<SymmetryId> {
    SymmetryId::ALL
        .into_iter()
        .find(|s| format!("{s:?}").eq_ignore_ascii_case(name))
        .ok_or_else(|| PyValueError::new_err(format!("unknown symmetry {name:?}")))
}

#[pyclass(name = "Map4", frozen)]
struct PyMap4(Map4);

#[pymethods]
impl PyMap4 {
    #[new]
    fn new(epsilon: f64, a: f64) -> PyResult<Self> {
        Ok(Self(Map4::new(params(epsilon, a)?).map_err(err)?))
    }

    fn apply(&self, s: [f64; 4]) -> [f64; 4] {
        self.0.apply(State4::from(s)).to_array()
    }

    fn inverse(&self, s: [f64; 4]) -> [f64; 4] {
        self.0.inverse(State4::from(s)).to_array()
    }

    /// Row-major Jacobian.
    fn jacobian(&self, s: [f64; 4]) -> [[f64; 4]; 4] {
        let j = self.0.jacobian(State4::from(s));
        std::array::from_fn(|i| std::array::from_fn(|k| j[(i, k)]))
    }

    fn fixed_points(&self) -> Vec<[f64; 4]> {
        self.0.fixed_points().into_iter().map(State4::to_array).collect()
    }

    fn nonwandering_bound(&self) -> f64 {
        self.0.nonwandering_bound()
    }
}

#[pyclass(name = "Map2", frozen)]
struct PyMap2(Map2);

#[pymethods]
impl PyMap2 {
    #[new]
    fn new(epsilon: f64) -> PyResult<Self> {
        Ok(Self(Map2::new(params(epsilon, 0.0)?).map_err(err)?))
    }

    fn apply(&self, s: [f64; 2]) -> [f64; 2] {
        self.0.apply(State2::from(s)).to_array()
    }

    fn inverse(&self, s: [f64; 2]) -> [f64; 2] {
        self.0.inverse(State2::from(s)).to_array()
    }

    fn nonwandering_bound(&self) -> f64 {
        self.0.nonwandering_bound()
    }
}

/// Applies `sigma1`..`sigma6` to a 2- or 4-component state.
#[pyfunction]
fn apply_symmetry(name: &str, state: Vec<f64>) -> PyResult<Vec<f64>> {
    let id = symmetry(name)?;
    match state.len() {
        2 => Ok(id.apply2(State2::new(state[0], state[1])).map_err(err)?.to_array().to_vec()),
        4 => {
            let s = State4::new(state[0], state[1], state[2], state[3]);
            Ok(id.apply4(s).map_err(err)?.to_array().to_vec())
        }
        n => Err(PyValueError::new_err(format!("state must have 2 or 4 components, got {n}"))),
    }
}

/// Characteristic polynomials, discriminants, classifications and eigenvalues
/// (as `[re, im]` pairs) at the origin and the nontrivial fixed points.
#[pyfunction]
fn eigen<'py>(py: Python<'py>, epsilon: f64, a: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = params(epsilon, a)?;
    let mut out = serde_json::Map::new();
    for (key, at) in [("origin", FixedPointKind::Origin), ("nontrivial", FixedPointKind::Nontrivial)] {
        let entry = match spectral::characteristic_poly(p, at) {
            Ok(q) => serde_json::json!({
                "exists": true,
                "coefficients": q.coefficients(),
                "discriminant": spectral::discriminant(p, at).map_err(err)?,
                "classification": spectral::classify_eigenvalues(a, at).map_err(err)?,
                "eigensystem": spectral::solve_reciprocal_quartic(q),
            }),
            // nontrivial fixed points exist only for eps*A < 0
            Err(e) if at == FixedPointKind::Nontrivial => serde_json::json!({ "exists": false, "reason": e.to_string() }),
            Err(e) => return Err(err(e)),
        };
        out.insert(key.into(), entry);
    }
    to_py(py, &out)
}

#[pyclass(name = "ManifoldSeries", frozen)]
struct PySeries(mf::ManifoldSeries);

#[pymethods]
impl PySeries {
    #[getter]
    fn branch(&self) -> &'static str {
        match self.0.branch {
            mf::Branch::Stable => "stable",
            mf::Branch::Unstable => "unstable",
        }
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order
    }

    #[getter]
    fn rates(&self) -> [f64; 2] {
        self.0.rates
    }

    #[getter]
    fn scale(&self) -> [f64; 2] {
        self.0.scale
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.params.epsilon
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.params.a
    }

    fn coefficient(&self, n: usize, m: usize) -> [f64; 4] {
        self.0.coeff(n, m)
    }

    fn evaluate(&self, u: f64, v: f64) -> [f64; 4] {
        self.0.evaluate(u, v).to_array()
    }

    /// 4x2 Jacobian, row-major.
    fn jacobian(&self, u: f64, v: f64) -> [[f64; 2]; 4] {
        let j = self.0.jacobian(u, v);
        std::array::from_fn(|i| [j[(i, 0)], j[(i, 1)]])
    }

    #[pyo3(signature = (half_width = 1.0, points = 41))]
    fn conjugacy_residual(&self, half_width: f64, points: usize) -> PyResult<f64> {
        self.0.conjugacy_residual(EvalBox { half_width }, points).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(mf::ManifoldSeries::from_json(text).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "ManifoldSeries(branch={}, order={}, epsilon={}, A={})",
            self.branch(),
            self.0.order,
            self.0.params.epsilon,
            self.0.params.a
        )
    }
}

/// `(unstable, stable)` series in a shared gauge. `gamma` fixes the eigenvector scales
/// explicitly; otherwise the default reach gauge is used.
#[pyfunction]
#[pyo3(signature = (epsilon, a, order = 80, gamma = None))]
fn compute_pair(epsilon: f64, a: f64, order: usize, gamma: Option<[f64; 2]>) -> PyResult<(PySeries, PySeries)> {
    let policy = gamma.map_or(ScalingPolicy::default(), |gamma| ScalingPolicy::Fixed { gamma });
    let (pu, ps) = mf::compute_pair(params(epsilon, a)?, order, policy).map_err(err)?;
    Ok((PySeries(pu), PySeries(ps)))
}

#[pyclass(name = "HomoclinicSolution", frozen)]
struct PySolution(hc::HomoclinicSolution);

#[pymethods]
impl PySolution {
    /// `(u1, v1, u2, v2)`.
    #[getter]
    fn parameters(&self) -> [f64; 4] {
        self.0.parameters()
    }

    #[getter]
    fn point(&self) -> [f64; 4] {
        self.0.point.to_array()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn det(&self) -> f64 {
        self.0.det
    }

    #[getter]
    fn series_order(&self) -> usize {
        self.0.series_order
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_symmetric(&self, tol: f64) -> bool {
        self.0.is_symmetric(tol)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        let p = self.0.point;
        format!(
            "HomoclinicSolution(point=({:e}, {:e}, {:e}, {:e}), residual={:e})",
            p.x, p.y, p.z, p.w, self.0.residual
        )
    }
}

fn wrap(v: Vec<hc::HomoclinicSolution>) -> Vec<PySolution> {
    v.into_iter().map(PySolution).collect()
}

#[pyfunction]
#[pyo3(signature = (pu, ps, guess, threshold = 1e-10, half_width = 1.0))]
fn newton_match(pu: &PySeries, ps: &PySeries, guess: [f64; 4], threshold: f64, half_width: f64) -> PyResult<PySolution> {
    hc::newton_match(&pu.0, &ps.0, guess, &newton(threshold, half_width))
        .map(PySolution)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (pu, ps, threshold = 1e-10, half_width = 1.0, seeds = 21))]
fn symmetric_search(pu: &PySeries, ps: &PySeries, threshold: f64, half_width: f64, seeds: usize) -> PyResult<Vec<PySolution>> {
    hc::symmetric_search(&pu.0, &ps.0, &newton(threshold, half_width), seeds)
        .map(wrap)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (pu, ps, threshold = 1e-10, half_width = 1.0, seeds = 21))]
fn multistart_search(pu: &PySeries, ps: &PySeries, threshold: f64, half_width: f64, seeds: usize) -> PyResult<Vec<PySolution>> {
    hc::multistart_search(&pu.0, &ps.0, &newton(threshold, half_width), seeds)
        .map(wrap)
        .map_err(err)
}

#[pyfunction]
fn transversality_det(pu: &PySeries, ps: &PySeries, q: [f64; 4]) -> f64 {
    hc::transversality_det(&pu.0, &ps.0, q)
}

fn scan_opts(order: usize, threshold: f64, half_width: f64, seeds: usize, workers: Option<usize>) -> ScanOptions {
    ScanOptions {
        order,
        policy: ScalingPolicy::default(),
        newton: newton(threshold, half_width),
        seeds,
        workers,
    }
}

/// Homoclinic search on every `(epsilon, A)` cell; returns the scan table as a dict.
#[pyfunction]
#[pyo3(signature = (epsilon, a, order = 80, threshold = 1e-10, half_width = 1.0, seeds = 21, workers = None))]
#[allow(clippy::too_many_arguments)]
fn scan<'py>(
    py: Python<'py>,
    epsilon: Vec<f64>,
    a: Vec<f64>,
    order: usize,
    threshold: f64,
    half_width: f64,
    seeds: usize,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = scan_opts(order, threshold, half_width, seeds, workers);
    let table = py.detach(|| hc::scan_parameters(&epsilon, &a, &opts)).map_err(err)?;
    to_py(py, &table)
}

#[pyfunction]
#[pyo3(signature = (epsilon, a, order = 80, threshold = 1e-10, half_width = 1.0, seeds = 21))]
fn transversality_curve<'py>(
    py: Python<'py>,
    epsilon: f64,
    a: Vec<f64>,
    order: usize,
    threshold: f64,
    half_width: f64,
    seeds: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = scan_opts(order, threshold, half_width, seeds, Some(1));
    let curve = py.detach(|| hc::transversality_curve(epsilon, &a, &opts)).map_err(err)?;
    to_py(py, &curve)
}

#[pyfunction]
fn det_curve_fit<'py>(py: Python<'py>, a: Vec<f64>, det: Vec<f64>, degree: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &hc::det_curve_fit(&a, &det, degree).map_err(err)?)
}

#[pyclass(name = "SolitonProfile", frozen)]
struct PyProfile(soliton::SolitonProfile);

#[pymethods]
impl PyProfile {
    #[getter]
    fn sites(&self) -> Vec<i64> {
        self.0.samples.iter().map(|s| s.n).collect()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values()
    }

    #[getter]
    fn residual_max(&self) -> f64 {
        self.0.residual_max
    }

    /// `(forward, backward)` contraction factors per site.
    #[getter]
    fn tail_decay(&self) -> (Option<f64>, Option<f64>) {
        (self.0.tail_decay.forward, self.0.tail_decay.backward)
    }

    #[getter]
    fn terminated_by_floor(&self) -> bool {
        self.0.terminated_by_floor
    }

    fn at(&self, n: i64) -> f64 {
        self.0.at(n)
    }

    fn mirror_defect(&self) -> f64 {
        self.0.mirror_defect()
    }

    fn peak(&self) -> f64 {
        self.0.peak()
    }

    fn write_csv(&self, path: std::path::PathBuf) -> PyResult<()> {
        let f = std::fs::File::create(path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.0.write_csv(f).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.samples.len()
    }
}

#[pyfunction]
#[pyo3(signature = (sol, pu, ps, floor = 1e-14, max_steps = 500))]
fn build_profile(sol: &PySolution, pu: &PySeries, ps: &PySeries, floor: f64, max_steps: usize) -> PyResult<PyProfile> {
    soliton::build_profile(&sol.0, &pu.0, &ps.0, floor, max_steps)
        .map(PyProfile)
        .map_err(err)
}

/// Largest defect of the stationary lattice equation over a window (zero-padded).
#[pyfunction]
fn stationary_residual(u: Vec<f64>, epsilon: f64, a: f64) -> PyResult<f64> {
    Ok(soliton::stationary_residual(&u, params(epsilon, a)?))
}

/// Planar-map orbits from the fixed seed set: a list of dicts with `seed`, `points`,
/// `escaped` and `escape_step`.
#[pyfunction]
#[pyo3(signature = (epsilon, steps = 1000))]
fn portrait<'py>(py: Python<'py>, epsilon: f64, steps: usize) -> PyResult<Bound<'py, PyAny>> {
    let orbits = soliton::portrait_2d(params(epsilon, 0.0)?, &soliton::default_portrait_seeds(), steps)
        .map_err(err)?;
    to_py(py, &orbits)
}

#[pymodule]
pub fn dnls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyMap4>()?;
    m.add_class::<PyMap2>()?;
    m.add_class::<PySeries>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(apply_symmetry, m)?)?;
    m.add_function(wrap_pyfunction!(eigen, m)?)?;
    m.add_function(wrap_pyfunction!(compute_pair, m)?)?;
    m.add_function(wrap_pyfunction!(newton_match, m)?)?;
    m.add_function(wrap_pyfunction!(symmetric_search, m)?)?;
    m.add_function(wrap_pyfunction!(multistart_search, m)?)?;
    m.add_function(wrap_pyfunction!(transversality_det, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(transversality_curve, m)?)?;
    m.add_function(wrap_pyfunction!(det_curve_fit, m)?)?;
    m.add_function(wrap_pyfunction!(build_profile, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_residual, m)?)?;
    m.add_function(wrap_pyfunction!(portrait, m)?)?;
    Ok(())
}
