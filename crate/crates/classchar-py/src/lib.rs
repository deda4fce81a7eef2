//! Python bindings: `classchar_py.Group`, `classchar_py.CharTable` and the
//! claim verifiers, with reports returned as plain dicts.

use std::sync::{Arc, OnceLock};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use classchar::chars::{dixon_table, CharTable};
use classchar::forms::GroupSpec;
use classchar::grp::{EnumeratedGroup, SampleMode};
use classchar::products::{class_square, power_word_check, thompson_search};
use classchar::verify::{run_claim_with, ClaimOptions};
use classchar::walks::{exact_walk, mckay_graph, mckay_walk, TvConvention};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// An enumerated classical group; the character table is computed on first use.
#[pyclass(name = "Group", module = "classchar_py", frozen)]
pub struct PyGroup {
    group: Arc<EnumeratedGroup>,
    table: OnceLock<Arc<CharTable>>,
}

impl PyGroup {
    fn table_arc(&self, py: Python<'_>) -> PyResult<Arc<CharTable>> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let g = self.group.clone();
        let t = py.detach(move || dixon_table(&g)).map_err(err)?;
        Ok(self.table.get_or_init(|| Arc::new(t)).clone())
    }

    fn check_class(&self, class: usize) -> PyResult<()> {
        if class >= self.group.num_classes() {
            return Err(err(format!("class {class} out of range (0..{})", self.group.num_classes())));
        }
        Ok(())
    }
}

#[pymethods]
impl PyGroup {
    /// Parses a spec such as `"SL(3,2)"` or `"O-(4,3)"` and enumerates the group.
    #[new]
    fn new(py: Python<'_>, spec: &str) -> PyResult<Self> {
        let spec = GroupSpec::parse(spec).map_err(err)?;
        let group = py.detach(|| EnumeratedGroup::enumerate(&spec)).map_err(err)?;
        Ok(PyGroup { group: Arc::new(group), table: OnceLock::new() })
    }

    #[getter]
    fn name(&self) -> String {
        self.group.spec.to_string()
    }

    #[getter]
    fn order(&self) -> u64 {
        self.group.order()
    }

    #[getter]
    fn n(&self) -> usize {
        self.group.spec.n
    }

    #[getter]
    fn q(&self) -> u32 {
        self.group.field().q()
    }

    fn num_classes(&self) -> usize {
        self.group.num_classes()
    }

    /// One dict per class: id, size, centralizer order, support, order, reality.
    fn classes<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rows: Vec<_> = self
            .group
            .classes()
            .iter()
            .map(|c| {
                serde_json::json!({
                    "id": c.id,
                    "size": c.size,
                    "centralizer_order": c.centralizer_order,
                    "support": c.support,
                    "order": c.order_of_rep,
                    "real": c.is_real,
                })
            })
            .collect();
        to_py(py, &rows)
    }

    /// The class representative as rows of field-element indices.
    fn representative(&self, class: usize) -> PyResult<Vec<Vec<u16>>> {
        self.check_class(class)?;
        let m = self.group.element(self.group.class(class).representative);
        Ok((0..m.n()).map(|i| (0..m.n()).map(|j| m.get(i, j).0).collect()).collect())
    }

    fn chartable(&self, py: Python<'_>) -> PyResult<PyCharTable> {
        Ok(PyCharTable { table: self.table_arc(py)? })
    }

    fn __repr__(&self) -> String {
        format!("Group('{}', order={})", self.group.spec, self.group.order())
    }

    fn __len__(&self) -> usize {
        self.group.order() as usize
    }
}

/// Exact character table; values are cyclotomic numbers.
#[pyclass(name = "CharTable", module = "classchar_py", frozen)]
pub struct PyCharTable {
    table: Arc<CharTable>,
}

#[pymethods]
impl PyCharTable {
    #[getter]
    fn degrees(&self) -> Vec<u64> {
        self.table.degrees.clone()
    }

    #[getter]
    fn class_sizes(&self) -> Vec<u64> {
        self.table.class_sizes.clone()
    }

    fn num_chars(&self) -> usize {
        self.table.num_chars()
    }

    /// Values embedded in the complex numbers.
    fn values(&self) -> Vec<Vec<(f64, f64)>> {
        self.table.values.iter().map(|row| row.iter().map(|v| v.to_complex()).collect()).collect()
    }

    /// Exact value as a sum of roots of unity.
    fn value_str(&self, chi: usize, class: usize) -> PyResult<String> {
        if chi >= self.table.num_chars() || class >= self.table.num_classes() {
            return Err(err("index out of range"));
        }
        Ok(self.table.value(chi, class).to_string())
    }

    fn is_faithful(&self, chi: usize) -> bool {
        chi < self.table.num_chars() && self.table.is_faithful(chi)
    }

    fn is_quasisimple(&self) -> bool {
        self.table.is_quasisimple()
    }

    fn check_orthogonality(&self) -> PyResult<()> {
        self.table.check_orthogonality().map_err(err)
    }
}

/// Runs a claim verifier; Monte Carlo claims use `seed` and `trials`.
#[pyfunction]
#[pyo3(signature = (claim, group, seed = 0, trials = 10_000, uniform = true))]
fn verify<'py>(py: Python<'py>, claim: &str, group: &PyGroup, seed: u64, trials: usize, uniform: bool) -> PyResult<Bound<'py, PyAny>> {
    let t = group.table_arc(py)?;
    let mode = Some(if uniform { SampleMode::UniformExact } else { SampleMode::ProductReplacement });
    let opts = ClaimOptions { seed, trials, mode, ..Default::default() };
    let g = group.group.clone();
    let r = py.detach(|| run_claim_with(claim, &g, &t, &opts)).map_err(err)?;
    to_py(py, &r)
}

/// Exact walk driven by a class, with TV in the L1 or half convention.
#[pyfunction]
#[pyo3(signature = (group, class, steps = 12, half = false))]
fn walk<'py>(py: Python<'py>, group: &PyGroup, class: usize, steps: usize, half: bool) -> PyResult<Bound<'py, PyAny>> {
    group.check_class(class)?;
    let t = group.table_arc(py)?;
    let mut w = exact_walk(&group.group, &t, class, steps);
    w.convention = if half { TvConvention::Half } else { TvConvention::L1 };
    let mut v = serde_json::to_value(&w).map_err(err)?;
    let tv: Vec<f64> = w.to_csv().lines().skip(1).filter_map(|l| l.split(',').nth(1)?.parse().ok()).collect();
    v["tv"] = serde_json::json!(tv);
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (group, chi, start = 0, steps = 20))]
fn mckay<'py>(py: Python<'py>, group: &PyGroup, chi: usize, start: usize, steps: usize) -> PyResult<Bound<'py, PyAny>> {
    let t = group.table_arc(py)?;
    let graph = mckay_graph(&t, chi).map_err(err)?;
    let walk = mckay_walk(&t, chi, start, steps).map_err(err)?;
    to_py(py, &serde_json::json!({"graph": graph.to_bound_report(&t), "walk": walk.to_bound_report()}))
}

#[pyfunction]
fn cover<'py>(py: Python<'py>, group: &PyGroup, class: usize) -> PyResult<Bound<'py, PyAny>> {
    group.check_class(class)?;
    let t = group.table_arc(py)?;
    to_py(py, &class_square(&group.group, &t, class).map_err(err)?)
}

#[pyfunction]
fn thompson<'py>(py: Python<'py>, group: &PyGroup) -> PyResult<Bound<'py, PyAny>> {
    let t = group.table_arc(py)?;
    to_py(py, &thompson_search(&group.group, &t).map_err(err)?)
}

#[pyfunction]
fn powerword<'py>(py: Python<'py>, group: &PyGroup, n: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &power_word_check(&group.group, n))
}

#[pymodule]
fn classchar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyCharTable>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(walk, m)?)?;
    m.add_function(wrap_pyfunction!(mckay, m)?)?;
    m.add_function(wrap_pyfunction!(cover, m)?)?;
    m.add_function(wrap_pyfunction!(thompson, m)?)?;
    m.add_function(wrap_pyfunction!(powerword, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
