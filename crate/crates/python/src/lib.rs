//! Python bindings. Reports come back as plain dicts built from the same JSON
//! the command-line tool prints.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use pushsplit_core::adjunction::{self, AdjunctionError};
use pushsplit_core::endomorphism::{EndoError, Endomorphism as CoreEndo};
use pushsplit_core::exactla::{IntegerMatrix, RankMode};
use pushsplit_core::pullback::{self, PullbackError};
use pushsplit_core::splitting::{self, SplitError};
use pushsplit_core::varieties::{ModelVariety, VarietyError};

create_exception!(pushsplit, PushsplitError, PyValueError);
create_exception!(pushsplit, RangeError, PushsplitError);
create_exception!(pushsplit, IntegrityError, PushsplitError);

fn input(e: impl std::fmt::Display) -> PyErr {
    PushsplitError::new_err(e.to_string())
}

fn variety_err(e: VarietyError) -> PyErr {
    match e {
        VarietyError::Range { .. } => RangeError::new_err(e.to_string()),
        other => input(other),
    }
}

fn pullback_err(e: PullbackError) -> PyErr {
    match e {
        PullbackError::Table(v) => variety_err(v),
        PullbackError::Integrity(m) => IntegrityError::new_err(m),
        other => input(other),
    }
}

fn adjunction_err(e: AdjunctionError) -> PyErr {
    match e {
        AdjunctionError::Pullback(p) => pullback_err(p),
        AdjunctionError::Integrity(m) => IntegrityError::new_err(m),
        other => input(other),
    }
}

fn split_err(e: SplitError) -> PyErr {
    match e {
        SplitError::Integrity { .. } => IntegrityError::new_err(e.to_string()),
        other => input(other),
    }
}

fn endo_err(e: EndoError) -> PyErr {
    input(e)
}

fn rank_mode(exact: bool) -> PyResult<RankMode> {
    if exact {
        Ok(RankMode::Exact)
    } else {
        RankMode::from_env().map_err(input)
    }
}

/// Serialize through JSON into Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(input)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// `delta(n, k, l)`: the largest twist in the splitting of `pi_* O(l)`.
#[pyfunction]
fn delta(n: usize, k: u32, l: i64) -> i64 {
    splitting::delta(n, k, l)
}

/// Closed-form multiplicities `{d: m_{l,d}}`.
#[pyfunction]
fn splitting_universal(n: usize, k: u32, l: i64) -> PyResult<BTreeMap<i64, u64>> {
    if n == 0 || k == 0 {
        return Err(input("n and k must be at least 1"));
    }
    Ok(splitting::splitting_universal(n, k, l).multiplicities().clone())
}

#[pyfunction]
fn graded_dim(num_vars: usize, degree: i64) -> u64 {
    pushsplit_core::graded_dim(num_vars, degree)
}

/// Rank of an integer matrix given as a list of rows.
#[pyfunction]
#[pyo3(signature = (rows, exact = false))]
fn rank(rows: Vec<Vec<i64>>, exact: bool) -> PyResult<usize> {
    let m = IntegerMatrix::from_rows(&rows).map_err(input)?;
    rank_mode(exact)?.rank(&m).map_err(input)
}

#[pyclass(name = "Endomorphism", module = "pushsplit", frozen)]
struct PyEndomorphism {
    inner: CoreEndo,
}

#[pymethods]
impl PyEndomorphism {
    /// Build from forms written in `y0 .. yn`.
    #[new]
    fn new(n: usize, k: u32, forms: Vec<String>) -> PyResult<Self> {
        let forms = forms
            .iter()
            .map(|f| pushsplit_core::parse_form(f, n + 1).map_err(input))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyEndomorphism {
            inner: CoreEndo::new(n, k, forms).map_err(endo_err)?,
        })
    }

    #[staticmethod]
    fn power_map(n: usize, k: u32) -> PyResult<Self> {
        if n == 0 || k == 0 {
            return Err(input("n and k must be at least 1"));
        }
        Ok(PyEndomorphism {
            inner: CoreEndo::power_map(n, k),
        })
    }

    /// Read the `key = value` file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyEndomorphism {
            inner: CoreEndo::parse(text).map_err(endo_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, k, seed, coeff_bound = 3, attempts = 50, exact = false))]
    fn random(n: usize, k: u32, seed: u64, coeff_bound: i64, attempts: usize, exact: bool) -> PyResult<Self> {
        let mode = rank_mode(exact)?;
        Ok(PyEndomorphism {
            inner: CoreEndo::random(n, k, seed, coeff_bound, attempts, &mode).map_err(endo_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k()
    }

    #[getter]
    fn forms(&self) -> Vec<String> {
        self.inner.forms().iter().map(|f| f.to_string()).collect()
    }

    #[pyo3(signature = (exact = false))]
    fn validate_finite<'py>(&self, py: Python<'py>, exact: bool) -> PyResult<Bound<'py, PyAny>> {
        let v = self.inner.validate_finite(&rank_mode(exact)?).map_err(endo_err)?;
        to_py(py, &v)
    }

    /// Multiplicities from the multiplication maps; raises `IntegrityError`
    /// when they differ from the closed form.
    #[pyo3(signature = (l, exact = false))]
    fn splitting(&self, l: i64, exact: bool) -> PyResult<BTreeMap<i64, u64>> {
        let mode = rank_mode(exact)?;
        let (e, verdict) = self.inner.clone().certify(&mode).map_err(endo_err)?;
        if !verdict.finite {
            return Err(input("endomorphism is not finite"));
        }
        let st = splitting::splitting_from_endo(&e, l, &mode).map_err(split_err)?;
        Ok(st.multiplicities().clone())
    }

    fn to_file_text(&self) -> String {
        self.inner.to_file_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Endomorphism(n={}, k={}, forms={:?})",
            self.inner.n(),
            self.inner.k(),
            self.forms()
        )
    }
}

#[pyclass(name = "Model", module = "pushsplit", frozen)]
struct PyModel {
    inner: ModelVariety,
}

#[pymethods]
impl PyModel {
    /// `p<n>`, `ci:d1,..@n`, `plane@4` or `table:<path>`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: ModelVariety::from_spec(spec).map_err(variety_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree()
    }

    #[getter]
    fn omega_twist(&self) -> Option<i64> {
        self.inner.omega_twist()
    }

    fn h(&self, i: usize, t: i64) -> PyResult<u64> {
        self.inner.table().h(i, t).map_err(variety_err)
    }

    fn h_ideal(&self, i: usize, t: i64) -> PyResult<u64> {
        self.inner.table().h_ideal(i, t).map_err(variety_err)
    }

    fn h_omega(&self, i: usize, t: i64) -> PyResult<u64> {
        self.inner.table().h_omega(i, t).map_err(variety_err)
    }

    fn pullback_degree(&self, k: u32) -> u64 {
        pullback::pullback_degree(&self.inner, k)
    }

    fn pushforward_cohomology(&self, k: u32, l: i64, i: usize) -> PyResult<u64> {
        pullback::pushforward_cohomology(&self.inner, k, l, i).map_err(pullback_err)
    }

    fn ideal_pushforward_cohomology(&self, k: u32, l: i64, i: usize) -> PyResult<u64> {
        pullback::ideal_pushforward_cohomology(&self.inner, k, l, i).map_err(pullback_err)
    }

    fn dualizing_cohomology(&self, k: u32, l: i64, i: usize) -> PyResult<u64> {
        pullback::dualizing_cohomology(&self.inner, k, l, i).map_err(pullback_err)
    }

    fn euler_characteristic(&self, k: u32, l: i64) -> PyResult<i64> {
        pullback::euler_characteristic(&self.inner, k, l).map_err(pullback_err)
    }

    fn completeness<'py>(&self, py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &pullback::completeness_verdict(&self.inner, k).map_err(pullback_err)?,
        )
    }

    fn hyperplane_section<'py>(&self, py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &pullback::hyperplane_section_verdict(&self.inner, k).map_err(pullback_err)?,
        )
    }

    fn injectivity<'py>(&self, py: Python<'py>, k: u32, j: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &pullback::injectivity_hypothesis_check(&self.inner, k, j).map_err(pullback_err)?,
        )
    }

    /// Full report over `lmin..=lmax` (default `-k..=3k`).
    #[pyo3(signature = (k, lmin = None, lmax = None))]
    fn pullback_report<'py>(
        &self,
        py: Python<'py>,
        k: u32,
        lmin: Option<i64>,
        lmax: Option<i64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let default = pullback::default_lrange(k);
        let range = lmin.unwrap_or(*default.start())..=lmax.unwrap_or(*default.end());
        to_py(
            py,
            &pullback::pullback_report(&self.inner, k, range).map_err(pullback_err)?,
        )
    }

    fn surface_adjunction<'py>(&self, py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &adjunction::surface_adjunction(&self.inner, k).map_err(adjunction_err)?,
        )
    }

    fn adjunction_report<'py>(&self, py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &adjunction::adjunction_report(&self.inner, k).map_err(adjunction_err)?,
        )
    }

    fn __repr__(&self) -> String {
        format!("Model('{}')", self.inner.name())
    }
}

#[pyfunction]
fn delta_l_bound_check<'py>(py: Python<'py>, n: usize, k: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &adjunction::delta_l_bound_check(n, k).map_err(adjunction_err)?)
}

#[pymodule]
fn pushsplit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("PushsplitError", py.get_type::<PushsplitError>())?;
    m.add("RangeError", py.get_type::<RangeError>())?;
    m.add("IntegrityError", py.get_type::<IntegrityError>())?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_universal, m)?)?;
    m.add_function(wrap_pyfunction!(graded_dim, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(delta_l_bound_check, m)?)?;
    m.add_class::<PyEndomorphism>()?;
    m.add_class::<PyModel>()?;
    Ok(())
}
