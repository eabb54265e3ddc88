//! Python bindings: systems, vector fields and the main analysis steps.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use liesym::closure::complete_table;
use liesym::detgen::{determining_equations, PdeSystem};
use liesym::liealg;
use liesym::parser::{format_system, parse_system, parse_vector_field};
use liesym::prolong;
use liesym::solver;

fn runtime<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// `u_2 = F1 u1 + F2 u1^2 + F3 u1^3`, `u_111 = G`.
#[pyclass(name = "System", frozen)]
struct PySystem(PdeSystem);

#[pymethods]
impl PySystem {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_system(text)
            .map(PySystem)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn model() -> Self {
        PySystem(PdeSystem::model())
    }

    #[staticmethod]
    fn generic() -> Self {
        PySystem(PdeSystem::generic())
    }

    #[getter]
    fn is_generic(&self) -> bool {
        self.0.is_generic()
    }

    /// Independent determining equations as `(origins, expr)` pairs.
    fn determining_equations(&self) -> PyResult<Vec<(Vec<String>, String)>> {
        let det = determining_equations(&self.0).map_err(runtime)?;
        Ok(det
            .independent()
            .map(|e| {
                (
                    e.origins.iter().map(ToString::to_string).collect(),
                    e.expr.to_string(),
                )
            })
            .collect())
    }

    #[pyo3(signature = (degree=4))]
    fn symmetry_basis(&self, degree: u32) -> PyResult<Vec<PyVectorField>> {
        let b = solver::symmetry_basis(&self.0, degree).map_err(runtime)?;
        Ok(b.fields.into_iter().map(PyVectorField).collect())
    }

    /// `([(degree, dimension)], stacked_rank)`.
    fn sweep(&self, dmin: u32, dmax: u32) -> PyResult<(Vec<(u32, usize)>, usize)> {
        let r = solver::sweep(&self.0, dmin, dmax).map_err(runtime)?;
        Ok((r.dimensions(), r.stacked_rank))
    }

    /// Returns `(holds, violated equations)`.
    fn is_symmetry(&self, v: &PyVectorField) -> PyResult<(bool, Vec<String>)> {
        let verdict = liealg::is_symmetry(&self.0, &v.0).map_err(runtime)?;
        Ok((
            verdict.holds,
            verdict.violated.iter().map(|(e, _)| e.to_string()).collect(),
        ))
    }

    /// Reduction table up to `max_order`: `symbol -> form` entries plus
    /// pivot obligations and constraints on the initial coefficients.
    #[pyo3(signature = (max_order=3))]
    fn closure_table(&self, max_order: u32) -> PyResult<PyClosureTable> {
        let t = complete_table(&self.0, max_order).map_err(runtime)?;
        Ok(PyClosureTable {
            entries: t
                .entries()
                .into_iter()
                .map(|(a, f)| (a.to_string(), f.to_string()))
                .collect(),
            pivots: t.pivots().iter().map(ToString::to_string).collect(),
            constraints: t.constraints().iter().map(ToString::to_string).collect(),
            table: t,
        })
    }

    fn __repr__(&self) -> String {
        format_system(&self.0)
    }
}

#[pyclass(name = "ClosureTable", frozen)]
struct PyClosureTable {
    #[pyo3(get)]
    entries: Vec<(String, String)>,
    #[pyo3(get)]
    pivots: Vec<String>,
    #[pyo3(get)]
    constraints: Vec<String>,
    table: liesym::closure::ReductionTable,
}

#[pymethods]
impl PyClosureTable {
    /// Symbols whose entry is not an identity for `v`.
    fn violations(&self, v: &PyVectorField) -> Vec<String> {
        self.table.violations(&v.0).iter().map(ToString::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.entries.len()
    }
}

/// `xi d/dx + tau d/dy + phi d/du`.
#[pyclass(name = "VectorField", frozen, eq)]
#[derive(PartialEq)]
struct PyVectorField(prolong::VectorField);

#[pymethods]
impl PyVectorField {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_vector_field(text)
            .map(PyVectorField)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn xi(&self) -> String {
        self.0.xi().to_string()
    }

    #[getter]
    fn tau(&self) -> String {
        self.0.tau().to_string()
    }

    #[getter]
    fn phi(&self) -> String {
        self.0.phi().to_string()
    }

    fn bracket(&self, other: &PyVectorField) -> PyResult<PyVectorField> {
        liealg::bracket(&self.0, &other.0)
            .map(PyVectorField)
            .map_err(runtime)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// Nonzero `(i, j, k, c)` with `i < j`, 0-based, `c` as an exact rational string.
#[pyfunction]
fn structure_constants(basis: Vec<PyRef<'_, PyVectorField>>) -> PyResult<Vec<(usize, usize, usize, String)>> {
    let fields: Vec<_> = basis.iter().map(|v| v.0.clone()).collect();
    let sc = liealg::structure_constants(&fields).map_err(runtime)?;
    Ok(sc
        .entries()
        .map(|((i, j, k), c)| (i, j, k, c.to_string()))
        .collect())
}

#[pyfunction]
fn jacobi_holds(basis: Vec<PyRef<'_, PyVectorField>>) -> PyResult<bool> {
    let fields: Vec<_> = basis.iter().map(|v| v.0.clone()).collect();
    let sc = liealg::structure_constants(&fields).map_err(runtime)?;
    Ok(sc.is_antisymmetric() && liealg::jacobi_check(&sc))
}

#[pymodule]
pub fn liesym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyVectorField>()?;
    m.add_class::<PyClosureTable>()?;
    m.add_function(wrap_pyfunction!(structure_constants, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_holds, m)?)?;
    Ok(())
}
