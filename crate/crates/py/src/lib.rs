//! Python bindings. Structured results (estimates, reports, traces) are
//! returned as plain dicts built from their JSON form.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use l2tors::abelian::{self, LaurentPoly, QuadratureConfig};
use l2tors::chain::{self, MappingTorusSpec};
use l2tors::combine::DecompositionSpec;
use l2tors::engine::{self, CutoffPolicy, EngineConfig};
use l2tors::group::{self, GroupPresentation, QuotientTower, RingElement};
use l2tors::growth::{self, IntMatrix};

fn err(e: l2tors::Error) -> PyErr {
    if e.is_numeric() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn engine_config(cutoff: Option<f64>, seed: u64) -> EngineConfig {
    EngineConfig {
        cutoff: cutoff.map_or(CutoffPolicy::Scaled, CutoffPolicy::Fixed),
        seed,
        ..EngineConfig::default()
    }
}

/// A finitely presented group `gens a b; rels a b A B;`.
#[pyclass(name = "Presentation", module = "l2tors", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPresentation(GroupPresentation);

#[pymethods]
impl PyPresentation {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        GroupPresentation::parse(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn free_abelian(n: usize) -> Self {
        Self(GroupPresentation::free_abelian(n))
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.0.generators().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?})", self.0.to_string())
    }
}

/// A tower of finite quotients, each acting regularly on itself.
#[pyclass(name = "Tower", module = "l2tors", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTower(QuotientTower);

#[pymethods]
impl PyTower {
    /// Parses the JSON tower format against a presentation.
    #[staticmethod]
    fn from_json(text: &str, presentation: &PyPresentation) -> PyResult<Self> {
        QuotientTower::from_json(text, &presentation.0).map(Self).map_err(err)
    }

    /// `ℤ/k` quotients of `ℤ`.
    #[staticmethod]
    fn cyclic(ks: Vec<usize>) -> PyResult<Self> {
        QuotientTower::cyclic(&ks).map(Self).map_err(err)
    }

    /// `(ℤ/k)ⁿ` quotients of `ℤⁿ`.
    #[staticmethod]
    fn grid(n: usize, ks: Vec<usize>) -> PyResult<Self> {
        QuotientTower::grid(n, &ks).map(Self).map_err(err)
    }

    #[getter]
    fn indices(&self) -> Vec<usize> {
        self.0.levels().iter().map(|l| l.degree()).collect()
    }

    /// Tower report against `presentation` (relators, regularity, maps).
    fn validate(&self, py: Python<'_>, presentation: &PyPresentation) -> PyResult<Py<PyAny>> {
        to_py(py, &group::validate_tower(&presentation.0, &self.0))
    }

    fn to_json(&self, presentation: &PyPresentation) -> String {
        self.0.to_json(&presentation.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// A free chain complex over a group ring.
#[pyclass(name = "ChainComplex", module = "l2tors", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChainComplex(chain::ChainComplex);

#[pymethods]
impl PyChainComplex {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        chain::ChainComplex::from_json(text).map(Self).map_err(err)
    }

    /// `ℤG → ℤG` with `∂₁` the given group-ring element, e.g. `"a - 2"`.
    #[staticmethod]
    fn one_cell(presentation: &PyPresentation, element: &str) -> PyResult<Self> {
        let g = presentation.0.clone();
        let p = RingElement::parse(element, g.generators()).map_err(err)?;
        chain::ChainComplex::one_cell(g, p).map(Self).map_err(err)
    }

    #[staticmethod]
    fn circle() -> Self {
        Self(chain::ChainComplex::circle())
    }

    #[staticmethod]
    fn torus() -> Self {
        Self(chain::ChainComplex::torus())
    }

    #[getter]
    fn ranks(&self) -> Vec<usize> {
        self.0.ranks().to_vec()
    }

    #[getter]
    fn presentation(&self) -> PyPresentation {
        PyPresentation(self.0.group().clone())
    }

    fn direct_sum(&self, other: &PyChainComplex) -> PyResult<Self> {
        self.0.direct_sum(&other.0).map(Self).map_err(err)
    }

    /// `∂∂ = 0` check on every level.
    fn validate(&self, py: Python<'_>, tower: &PyTower) -> PyResult<Py<PyAny>> {
        to_py(py, &chain::validate_complex(&self.0, &tower.0).map_err(err)?)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }
}

#[pyfunction]
#[pyo3(signature = (complex, tower, degree, cutoff=None))]
fn betti(
    py: Python<'_>,
    complex: &PyChainComplex,
    tower: &PyTower,
    degree: usize,
    cutoff: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let cfg = engine_config(cutoff, 0x5eed);
    let r = py.detach(|| engine::betti(&complex.0, &tower.0, degree, &cfg)).map_err(err)?;
    to_py(py, &r)
}

/// Log-determinant of the Laplacian `Δ_degree`.
#[pyfunction]
#[pyo3(signature = (complex, tower, degree, cutoff=None, seed=0x5eed))]
fn fk_log_det(
    py: Python<'_>,
    complex: &PyChainComplex,
    tower: &PyTower,
    degree: usize,
    cutoff: Option<f64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let cfg = engine_config(cutoff, seed);
    let lap = complex.0.laplacian(degree).map_err(err)?;
    let r = py.detach(|| engine::fk_log_det(&lap, &tower.0, &cfg)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (complex, tower, cutoff=None, seed=0x5eed))]
fn l2_torsion(
    py: Python<'_>,
    complex: &PyChainComplex,
    tower: &PyTower,
    cutoff: Option<f64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let cfg = engine_config(cutoff, seed);
    let r = py.detach(|| engine::l2_torsion(&complex.0, &tower.0, &cfg)).map_err(err)?;
    to_py(py, &r)
}

/// Exact route over `ℤⁿ` through Mahler measures.
#[pyfunction]
#[pyo3(signature = (complex, max_points=1 << 24, tolerance=1e-9))]
fn l2_torsion_abelian(
    py: Python<'_>,
    complex: &PyChainComplex,
    max_points: usize,
    tolerance: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = QuadratureConfig {
        max_points,
        tolerance,
        ..QuadratureConfig::default()
    };
    let r = py.detach(|| abelian::l2_torsion_abelian(&complex.0, &cfg)).map_err(err)?;
    to_py(py, &r)
}

/// ρ of a twisted chain self-map, from the mapping-torus JSON format.
#[pyfunction]
#[pyo3(signature = (mapping_torus, tower, t_order=4, cutoff=None))]
fn automorphism_torsion(
    py: Python<'_>,
    mapping_torus: &str,
    tower: &PyTower,
    t_order: usize,
    cutoff: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let spec = MappingTorusSpec::from_json(mapping_torus).map_err(err)?;
    let cfg = engine_config(cutoff, 0x5eed);
    let r = py
        .detach(|| engine::rho_of_automorphism(&spec, &tower.0, t_order, &cfg))
        .map_err(err)?;
    to_py(py, &r)
}

/// Logarithmic Mahler measure of a Laurent polynomial such as `"2 + x + y"`.
#[pyfunction]
#[pyo3(signature = (poly, variables=vec!["x".to_string(), "y".to_string(), "z".to_string(), "w".to_string()], samples=None, seed=0x5eed))]
fn mahler(
    py: Python<'_>,
    poly: &str,
    variables: Vec<String>,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let x = RingElement::parse(poly, &variables).map_err(err)?;
    let nvars = x.max_generator().map_or(1, |g| g + 1);
    let p = LaurentPoly::from_ring_element(&x, nvars);
    let r = py
        .detach(|| match samples {
            Some(n) => abelian::mahler_monte_carlo(&p, n, seed),
            None => abelian::mahler_log(&p, &QuadratureConfig::default()),
        })
        .map_err(err)?;
    to_py(py, &r)
}

/// Evaluates a decomposition tree; returns the value and its trace.
#[pyfunction]
fn combine(py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
    let e = DecompositionSpec::from_json(spec)
        .and_then(|s| s.evaluate())
        .map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (e.to_json(),))?.unbind())
}

/// Homology torsion growth `ln|tors H_n| / index` along a tower.
#[pyfunction]
#[pyo3(signature = (complex, tower, with_engine=false))]
fn growth_series(
    py: Python<'_>,
    complex: &PyChainComplex,
    tower: &PyTower,
    with_engine: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = EngineConfig::default();
    let r = py
        .detach(|| growth::growth_series(&complex.0, &tower.0, with_engine.then_some(&cfg)))
        .map_err(err)?;
    to_py(py, &r)
}

/// Invariant factors and rank of an integer matrix.
#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<num_bigint::BigInt>>) -> PyResult<(Vec<num_bigint::BigInt>, usize)> {
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(PyValueError::new_err("rows must have equal length"));
    }
    let s = growth::smith_normal_form(&IntMatrix::from_rows(&rows));
    Ok((s.factors, s.rank))
}

#[pymodule]
#[pyo3(name = "l2tors")]
fn l2tors_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", l2tors::VERSION)?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyTower>()?;
    m.add_class::<PyChainComplex>()?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(fk_log_det, m)?)?;
    m.add_function(wrap_pyfunction!(l2_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(l2_torsion_abelian, m)?)?;
    m.add_function(wrap_pyfunction!(automorphism_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(mahler, m)?)?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(growth_series, m)?)?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    Ok(())
}
