//! Python bindings: groupoids, cochains, measures, the random-walk
//! diagnostics and the verification suites.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use outerkit::cochain;
use outerkit::corpus;
use outerkit::io::{self, Row};
use outerkit::suites::{self, Instance, RunConfig, Suite};
use outerkit::walk::{self, Exact, MeasureFamily};

fn err(e: outerkit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(frozen, name = "Groupoid")]
struct PyGroupoid {
    inner: outerkit::Groupoid,
}

#[pymethods]
impl PyGroupoid {
    /// A built-in groupoid: `pair:M`, `cyclic:K`, `bundle:X:K`, `transformation:K:M` or `swap`.
    #[staticmethod]
    fn generate(kind: &str) -> PyResult<Self> {
        Ok(Self {
            inner: corpus::generate(kind).map_err(err)?.groupoid,
        })
    }

    /// Parses the JSON table format; axiom violations are reported by `validate`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::parse_groupoid(text, "<python>").map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        io::to_json(&self.inner.to_data()).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Groupoid({} arrows, {} units)",
            self.inner.len(),
            self.inner.units().len()
        )
    }

    fn units(&self) -> Vec<usize> {
        self.inner.units().to_vec()
    }

    fn source(&self, a: usize) -> PyResult<usize> {
        self.arrow(a).map(|a| self.inner.source(a))
    }

    fn range(&self, a: usize) -> PyResult<usize> {
        self.arrow(a).map(|a| self.inner.range(a))
    }

    fn inverse(&self, a: usize) -> PyResult<usize> {
        self.arrow(a).map(|a| self.inner.inv(a))
    }

    /// `a·b`, or `None` when `s(a) ≠ r(b)`.
    fn compose(&self, a: usize, b: usize) -> PyResult<Option<usize>> {
        Ok(self.inner.compose(self.arrow(a)?, self.arrow(b)?))
    }

    fn is_transitive(&self) -> bool {
        self.inner.is_transitive()
    }

    fn count_composable(&self, n: usize) -> usize {
        self.inner.count_composable(n, None, None)
    }

    /// Axiom violations as messages; empty for a valid groupoid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| v.to_string()).collect()
    }
}

impl PyGroupoid {
    fn arrow(&self, a: usize) -> PyResult<usize> {
        if a < self.inner.len() {
            Ok(a)
        } else {
            Err(PyValueError::new_err(format!("arrow {a} out of range")))
        }
    }

    fn valid(&self) -> PyResult<&outerkit::Groupoid> {
        self.inner.ensure_valid().map_err(err)?;
        Ok(&self.inner)
    }
}

/// A normalized circle-valued cochain with exact rational angles.
#[pyclass(frozen, name = "Cochain")]
struct PyCochain {
    inner: cochain::Cochain,
}

#[pymethods]
impl PyCochain {
    #[staticmethod]
    fn trivial(g: &PyGroupoid, arity: usize) -> PyResult<Self> {
        Ok(Self {
            inner: cochain::Cochain::trivial(g.valid()?, arity),
        })
    }

    /// The inflated cyclic generator of a built-in example.
    #[staticmethod]
    fn generator(kind: &str) -> PyResult<Self> {
        Ok(Self {
            inner: corpus::generate(kind).map_err(err)?.generator_cocycle(),
        })
    }

    /// Rows `[t₁, …, t_n, num, den]`; omitted tuples are trivial.
    #[staticmethod]
    fn from_rows(g: &PyGroupoid, arity: usize, rows: Vec<Row>) -> PyResult<Self> {
        Ok(Self {
            inner: io::cochain_from_rows(g.valid()?, arity, &rows, "<python>").map_err(err)?,
        })
    }

    fn rows(&self, g: &PyGroupoid) -> PyResult<Vec<Row>> {
        Ok(io::cochain_to_rows(g.valid()?, &self.inner))
    }

    /// The angle at `t` as `(num, den)` with `0 ≤ num/den < 1`.
    fn angle(&self, t: Vec<usize>) -> PyResult<(i64, i64)> {
        if t.len() != self.inner.arity() {
            return Err(PyValueError::new_err(format!(
                "expected {} arguments",
                self.inner.arity()
            )));
        }
        let a = self.inner.get(&t).angle();
        Ok((*a.numer(), *a.denom()))
    }

    fn coboundary(&self, g: &PyGroupoid) -> PyResult<Self> {
        Ok(Self {
            inner: cochain::coboundary(g.valid()?, &self.inner).map_err(err)?,
        })
    }

    /// Exhaustive 3-cocycle check: `{tuples_checked, violations, first_violation}`.
    fn check_cocycle<'py>(&self, py: Python<'py>, g: &PyGroupoid) -> PyResult<Bound<'py, PyAny>> {
        let verdict = cochain::check_cocycle3(g.valid()?, &self.inner).map_err(err)?;
        to_py_json(py, &verdict)
    }
}

/// An exact family of probability measures, one per range fiber.
#[pyclass(frozen, name = "Measure")]
struct PyMeasure {
    inner: MeasureFamily<Exact>,
}

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn uniform(g: &PyGroupoid) -> PyResult<Self> {
        Ok(Self {
            inner: MeasureFamily::uniform(g.valid()?),
        })
    }

    /// Uniform with a deterministic tilt of size `1/den` on each fiber.
    #[staticmethod]
    #[pyo3(signature = (g, den = corpus::PERTURBATION_DENOMINATOR))]
    fn perturbed(g: &PyGroupoid, den: i64) -> PyResult<Self> {
        Ok(Self {
            inner: MeasureFamily::perturbed(g.valid()?, den),
        })
    }

    /// Rows `[arrow, num, den]`; omitted arrows have weight zero.
    #[staticmethod]
    fn from_rows(g: &PyGroupoid, rows: Vec<Row>) -> PyResult<Self> {
        Ok(Self {
            inner: io::measure_from_rows(g.valid()?, &rows, "<python>").map_err(err)?,
        })
    }

    fn rows(&self) -> Vec<Row> {
        io::measure_to_rows(&self.inner)
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.to_f64().weights().to_vec()
    }

    fn full_support(&self) -> bool {
        self.inner.full_support()
    }

    /// `‖g·μ^{*n,s(g)} − μ^{*n,r(g)}‖₁` for `n = 1..=depth`.
    fn reiter_profile(&self, g: &PyGroupoid, arrow: usize, depth: usize) -> PyResult<Vec<f64>> {
        let gr = g.valid()?;
        g.arrow(arrow)?;
        Ok(walk::reiter_profile(gr, &self.inner.to_f64(), arrow, depth))
    }

    /// Dimension of the eigenvalue-one space of `P_μ` on the fiber over `unit`.
    #[pyo3(signature = (g, unit, tol = suites::FIXED_SPACE_TOL))]
    fn fixed_space_dimension(&self, g: &PyGroupoid, unit: usize, tol: f64) -> PyResult<usize> {
        let gr = g.valid()?;
        if !gr.units().contains(&unit) {
            return Err(PyValueError::new_err(format!("{unit} is not a unit")));
        }
        Ok(walk::harmonic_fixed_space(&walk::markov(gr, &self.inner.to_f64(), unit), tol).dimension)
    }
}

/// Runs the named suites and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (g, cocycle, measure, suites = "all", level = 2, tol = 1e-9, depth = 12, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    g: &PyGroupoid,
    cocycle: &PyCochain,
    measure: &PyMeasure,
    suites: &str,
    level: usize,
    tol: f64,
    depth: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let gr = g.valid()?;
    if cocycle.inner.arity() != 3 || cocycle.inner.domain_len() != gr.len() {
        return Err(PyValueError::new_err(
            "the cocycle must be a 3-cochain on this groupoid",
        ));
    }
    if measure.inner.weights().len() != gr.len() {
        return Err(PyValueError::new_err("the measure belongs to a different groupoid"));
    }
    let list = Suite::parse_list(suites).map_err(err)?;
    let config = RunConfig {
        level,
        tol,
        depth,
        seed,
        ..RunConfig::default()
    };
    let instance = Instance {
        name: "python".into(),
        groupoid: g.inner.clone(),
        cocycle: cocycle.inner.clone(),
        measure: measure.inner.clone(),
        hom: None,
    };
    let reports = py
        .detach(|| suites::run_suites(&instance, &list, &config))
        .map_err(err)?;
    let config_json = serde_json::to_value(&config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py_json(py, &outerkit::report::Report::new(config_json, reports))
}

/// Generator strings of the bundled example corpus.
#[pyfunction]
fn corpus_kinds() -> Vec<&'static str> {
    corpus::CORPUS.to_vec()
}

#[pymodule]
fn outerkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupoid>()?;
    m.add_class::<PyCochain>()?;
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_kinds, m)?)?;
    m.add("REPORT_VERSION", outerkit::report::REPORT_VERSION)?;
    Ok(())
}
