//! Python bindings. Rationals cross the boundary as `fractions.Fraction`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use torsion_core::characters::verify_nonvanishing as core_nonvanishing;
use torsion_core::distribution::{self, distribution_of};
use torsion_core::lattice::LatticeBasis;
use torsion_core::relations::{check_all, quadratic_lhs};
use torsion_core::solver::{enumerate, verify_group_closure, EnumerationQuery};
use torsion_core::{fmt_q, ComponentAssignment, Error, Q};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, x: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_q(x),))
}

fn fractions<'py>(py: Python<'py>, xs: &[Q]) -> PyResult<Bound<'py, PyList>> {
    let items = xs.iter().map(|x| fraction(py, x)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

#[pyclass(name = "FiberConfiguration", frozen)]
struct FiberConfiguration {
    inner: torsion_core::FiberConfiguration,
}

impl FiberConfiguration {
    fn section(&self, components: Vec<i64>, order: Option<u64>) -> PyResult<ComponentAssignment> {
        match order {
            Some(n) => self.inner.assignment(&components, n),
            None => self.inner.assignment_exact(&components),
        }
        .map_err(err)
    }
}

#[pymethods]
impl FiberConfiguration {
    #[new]
    #[pyo3(signature = (fibers, chi, strict = true))]
    fn new(fibers: Vec<i64>, chi: i64, strict: bool) -> PyResult<Self> {
        let inner = torsion_core::FiberConfiguration::new(&fibers, chi, strict).map_err(err)?;
        Ok(FiberConfiguration { inner })
    }

    #[getter]
    fn fibers(&self) -> Vec<u64> {
        self.inner.fiber_lengths().to_vec()
    }

    #[getter]
    fn chi(&self) -> u64 {
        self.inner.chi()
    }

    #[getter]
    fn strict(&self) -> bool {
        self.inner.is_strict()
    }

    #[getter]
    fn euler_number(&self) -> u64 {
        self.inner.euler_number()
    }

    /// `sum_j k_j (1 - k_j/m_j)`.
    #[pyo3(signature = (components, order = None))]
    fn quadratic<'py>(&self, py: Python<'py>, components: Vec<i64>, order: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let a = self.section(components, order)?;
        fraction(py, &quadratic_lhs(&self.inner, &a).map_err(err)?)
    }

    /// Every applicable relation as a list of dicts `{relation, lhs, rhs, holds}`.
    #[pyo3(signature = (components, order = None))]
    fn check<'py>(&self, py: Python<'py>, components: Vec<i64>, order: Option<u64>) -> PyResult<Bound<'py, PyList>> {
        let a = self.section(components, order)?;
        let out = PyList::empty(py);
        for r in check_all(&self.inner, &a).map_err(err)? {
            let d = PyDict::new(py);
            d.set_item("relation", r.relation.name())?;
            d.set_item("lhs", fraction(py, &r.lhs)?)?;
            d.set_item("rhs", fraction(py, &r.rhs)?)?;
            d.set_item("holds", r.holds)?;
            out.append(d)?;
        }
        Ok(out)
    }

    /// Unoriented distribution numbers `[M_0, M_1, ...]`.
    #[pyo3(signature = (components, order = None))]
    fn distribution<'py>(&self, py: Python<'py>, components: Vec<i64>, order: Option<u64>) -> PyResult<Bound<'py, PyList>> {
        let a = self.section(components, order)?;
        fractions(py, &distribution_of(&self.inner, &a).map_err(err)?.unoriented)
    }

    /// `V . V` for the section class in the intersection lattice.
    fn self_intersection<'py>(&self, py: Python<'py>, components: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
        let a = self.section(components, None)?;
        let basis = LatticeBasis::new(&self.inner);
        let v = basis.section_class(&a).map_err(err)?;
        fraction(py, &basis.intersect(&v, &v).map_err(err)?)
    }

    /// Solutions of order `order`: `{raw_count, orbit_count, solutions}`.
    #[pyo3(signature = (order, up_to_symmetry = false))]
    fn enumerate<'py>(&self, py: Python<'py>, order: u64, up_to_symmetry: bool) -> PyResult<Bound<'py, PyDict>> {
        let query = EnumerationQuery::new(self.inner.clone(), order).up_to_symmetry(up_to_symmetry);
        let set = enumerate(&query).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("raw_count", set.raw_count)?;
        d.set_item("orbit_count", set.orbit_count)?;
        let solutions: Vec<Vec<u64>> = set.assignments.iter().map(|a| a.components().to_vec()).collect();
        d.set_item("solutions", solutions)?;
        Ok(d)
    }

    /// Closure of the generated subgroup: `{order, invariant_factors, elements, all_valid}`.
    fn group<'py>(&self, py: Python<'py>, generators: Vec<Vec<i64>>) -> PyResult<Bound<'py, PyDict>> {
        let gens = generators.into_iter().map(|g| self.section(g, None)).collect::<PyResult<Vec<_>>>()?;
        let r = verify_group_closure(&self.inner, &gens).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("order", r.order())?;
        d.set_item("invariant_factors", r.invariant_factors.clone())?;
        let elements: Vec<Vec<u64>> = r.elements.iter().map(|e| e.components().to_vec()).collect();
        d.set_item("elements", elements)?;
        d.set_item("all_valid", r.all_valid)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("FiberConfiguration(fibers={:?}, chi={}, strict={})", self.fibers(), self.chi(), self.strict())
    }
}

/// Solution of `P_n M = (1/6) 1`: `{unique, M, M_0}` with `M = [M_1, ..]`.
#[pyfunction]
fn solve_distribution<'py>(py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyDict>> {
    let sol = distribution::solve_distribution(n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("unique", sol.is_unique())?;
    d.set_item("M", fractions(py, &sol.system.particular)?)?;
    d.set_item("M_0", fraction(py, &sol.m0)?)?;
    Ok(d)
}

#[pyfunction]
fn p_matrix<'py>(py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyList>> {
    let m = distribution::build_p_matrix(n).map_err(err)?;
    let rows = m.entries.to_rows().iter().map(|r| fractions(py, r)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, rows)
}

#[pyfunction]
fn p_matrix_determinant<'py>(py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &distribution::p_matrix_determinant(p).map_err(err)?)
}

/// True when every even character mod `p` has `s_chi != 0`.
#[pyfunction]
fn verify_nonvanishing(p: u64) -> PyResult<bool> {
    Ok(core_nonvanishing(p).map_err(err)?.passed())
}

#[pymodule]
fn semistable_torsion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<FiberConfiguration>()?;
    m.add_function(wrap_pyfunction!(solve_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(p_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(p_matrix_determinant, m)?)?;
    m.add_function(wrap_pyfunction!(verify_nonvanishing, m)?)?;
    Ok(())
}
