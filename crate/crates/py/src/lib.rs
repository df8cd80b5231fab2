//! Python module `udcr`: compile formulas, realize assignments, verify and
//! search placements, and read the gadget library.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use udcr::caterpillar::EmbeddedCaterpillar;
use udcr::cli::{render, render_unchecked, RenderStyle};
use udcr::formula::{compute_comb_layout, parse_cnf, parse_side_hint, CnfFormula, LayoutError};
use udcr::gadgets::{library, GadgetTemplate};
use udcr::hexlattice::LatticePoint;
use udcr::oracle::{brute_force, count_setups, search as run_search, SearchConstraints};
use udcr::reduction::{compile as run_compile, realize as run_realize, RealizeError, ReductionOutput};
use udcr::verifier::{self, Mode, VerificationReport};

create_exception!(udcr, InputError, PyValueError);
create_exception!(udcr, DomainError, PyRuntimeError);

fn input(e: impl ToString) -> PyErr {
    InputError::new_err(e.to_string())
}

fn domain(e: impl ToString) -> PyErr {
    DomainError::new_err(e.to_string())
}

#[pyclass(name = "Formula", module = "udcr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFormula {
    inner: CnfFormula,
}

#[pymethods]
impl PyFormula {
    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        parse_cnf(text).map(|inner| Self { inner }).map_err(input)
    }

    /// Clauses as signed 1-based literals.
    #[staticmethod]
    fn from_clauses(num_vars: usize, clauses: Vec<[i64; 3]>) -> PyResult<Self> {
        CnfFormula::from_triples(num_vars, &clauses)
            .map(|inner| Self { inner })
            .map_err(input)
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.inner.num_clauses()
    }

    fn is_satisfied(&self, assignment: Vec<bool>) -> PyResult<bool> {
        check_len(&self.inner, &assignment)?;
        Ok(self.inner.is_satisfied(&assignment))
    }

    /// 0-based index of the first unsatisfied clause, or None.
    fn first_unsatisfied(&self, assignment: Vec<bool>) -> PyResult<Option<usize>> {
        check_len(&self.inner, &assignment)?;
        Ok(self.inner.first_unsatisfied(&assignment))
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs()
    }

    fn __repr__(&self) -> String {
        format!("Formula(num_vars={}, num_clauses={})", self.inner.num_vars, self.inner.num_clauses())
    }
}

fn check_len(f: &CnfFormula, a: &[bool]) -> PyResult<()> {
    if a.len() != f.num_vars {
        return Err(input(format!("expected {} values, got {}", f.num_vars, a.len())));
    }
    Ok(())
}

#[pyclass(name = "Placement", module = "udcr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPlacement {
    inner: verifier::Placement,
}

#[pymethods]
impl PyPlacement {
    #[new]
    fn new(positions: BTreeMap<String, (i64, i64)>) -> PyResult<Self> {
        let mut inner = verifier::Placement::new();
        for (id, (u, v)) in positions {
            if (u + v).rem_euclid(2) != 0 {
                return Err(input(format!("{id}: ({u}, {v}) is not a lattice point")));
            }
            inner.insert(id, LatticePoint::new(u, v));
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(|inner| Self { inner }).map_err(input)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).unwrap()
    }

    fn positions(&self) -> BTreeMap<String, (i64, i64)> {
        self.inner.positions.iter().map(|(k, p)| (k.clone(), (p.u, p.v))).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, id: &str) -> PyResult<(i64, i64)> {
        let p = self
            .inner
            .get(id)
            .ok_or_else(|| pyo3::exceptions::PyKeyError::new_err(id.to_string()))?;
        Ok((p.u, p.v))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Placement({} disks)", self.inner.len())
    }
}

#[pyclass(name = "Report", module = "udcr", frozen)]
struct PyReport {
    inner: VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// `(kind, nodes, measured)` per violation.
    #[getter]
    fn violations(&self) -> Vec<(String, Vec<String>, f64)> {
        self.inner
            .violations
            .iter()
            .map(|v| (format!("{:?}", v.kind), v.nodes.clone(), v.measured))
            .collect()
    }

    #[getter]
    fn weak_contacts(&self) -> Vec<(String, String)> {
        self.inner.weak_contacts.clone()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).unwrap()
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(passed={}, violations={}, weak_contacts={})",
            self.inner.passed(),
            self.inner.violations.len(),
            self.inner.weak_contacts.len()
        )
    }
}

#[pyclass(name = "Reduction", module = "udcr", frozen)]
struct PyReduction {
    inner: ReductionOutput,
}

#[pymethods]
impl PyReduction {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ReductionOutput::from_json(text).map(|inner| Self { inner }).map_err(input)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn formula(&self) -> PyFormula {
        PyFormula { inner: self.inner.formula.clone() }
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.stats.node_count
    }

    #[getter]
    fn backbone_length(&self) -> usize {
        self.inner.stats.backbone_length
    }

    #[getter]
    fn gadget_counts(&self) -> BTreeMap<String, usize> {
        self.inner.stats.gadget_counts.clone()
    }

    fn caterpillar_json(&self) -> String {
        self.inner.caterpillar().to_json()
    }

    /// Raises DomainError naming the clause if the assignment fails.
    fn realize(&self, assignment: Vec<bool>) -> PyResult<PyPlacement> {
        run_realize(&self.inner, &assignment)
            .map(|inner| PyPlacement { inner })
            .map_err(|e| match e {
                RealizeError::Assignment { .. } => input(e),
                e => domain(e),
            })
    }

    #[pyo3(signature = (placement, mode = "exact", eps = verifier::DEFAULT_EPS))]
    fn verify(&self, placement: &PyPlacement, mode: &str, eps: f64) -> PyResult<PyReport> {
        verify_cat(&self.inner.caterpillar(), placement, mode, eps)
    }

    #[pyo3(signature = (placement, force = false))]
    fn render(&self, placement: &PyPlacement, force: bool) -> PyResult<String> {
        draw(&self.inner.caterpillar(), placement, &self.inner.program.roles(), force)
    }

    fn __repr__(&self) -> String {
        format!(
            "Reduction(num_vars={}, num_clauses={}, nodes={})",
            self.inner.formula.num_vars,
            self.inner.formula.num_clauses(),
            self.inner.stats.node_count
        )
    }
}

/// Compiles a formula. `sides` is an optional side hint,
/// `{"sides": {"c1": "above", ...}}`.
#[pyfunction]
#[pyo3(signature = (formula, sides = None))]
fn compile(formula: &PyFormula, sides: Option<&str>) -> PyResult<PyReduction> {
    let f = &formula.inner;
    let hint = sides.map(|s| parse_side_hint(s, f.num_clauses())).transpose().map_err(input)?;
    let layout = compute_comb_layout(f, hint.as_deref()).map_err(|e| match e {
        LayoutError::NotLayoutable(_) => domain(e),
        e => input(e),
    })?;
    run_compile(f, &layout).map(|inner| PyReduction { inner }).map_err(domain)
}

fn parse_mode(mode: &str, eps: f64) -> PyResult<Mode> {
    match mode {
        "exact" => Ok(Mode::Exact),
        "tolerant" if eps >= 0.0 && eps.is_finite() => Ok(Mode::Tolerant(eps)),
        "tolerant" => Err(input(format!("eps must be finite and non-negative, got {eps}"))),
        other => Err(input(format!("mode must be exact or tolerant, got {other:?}"))),
    }
}

fn caterpillar(json: &str) -> PyResult<EmbeddedCaterpillar> {
    EmbeddedCaterpillar::from_json(json).map_err(input)
}

fn verify_cat(c: &EmbeddedCaterpillar, p: &PyPlacement, mode: &str, eps: f64) -> PyResult<PyReport> {
    let inner = verifier::verify(c, &p.inner, parse_mode(mode, eps)?);
    Ok(PyReport { inner })
}

fn draw(c: &EmbeddedCaterpillar, p: &PyPlacement, roles: &BTreeMap<String, String>, force: bool) -> PyResult<String> {
    let style = RenderStyle::default();
    let out = if force {
        render_unchecked(c, &p.inner, &style, roles)
    } else {
        render(c, &p.inner, &style, roles)
    };
    out.map_err(domain)
}

#[pyfunction]
#[pyo3(signature = (caterpillar_json, placement, mode = "exact", eps = verifier::DEFAULT_EPS))]
fn verify(caterpillar_json: &str, placement: &PyPlacement, mode: &str, eps: f64) -> PyResult<PyReport> {
    verify_cat(&caterpillar(caterpillar_json)?, placement, mode, eps)
}

#[pyfunction]
#[pyo3(signature = (caterpillar_json, placement, force = false))]
fn render_svg(caterpillar_json: &str, placement: &PyPlacement, force: bool) -> PyResult<String> {
    draw(&caterpillar(caterpillar_json)?, placement, &BTreeMap::new(), force)
}

/// All realizations allowed by a search spec (same JSON as the CLI).
/// Returns `(placements, truncated)`.
#[pyfunction]
#[pyo3(signature = (caterpillar_json, spec_json, limit = None, exhaustive = false))]
fn search(
    caterpillar_json: &str,
    spec_json: &str,
    limit: Option<usize>,
    exhaustive: bool,
) -> PyResult<(Vec<PyPlacement>, bool)> {
    let mut constraints: SearchConstraints = serde_json::from_str(spec_json).map_err(input)?;
    if let Some(l) = limit {
        constraints.limit = l;
    }
    let spec = constraints.into_spec(caterpillar(caterpillar_json)?);
    let (placements, truncated) = if exhaustive {
        (brute_force(&spec).map_err(input)?, false)
    } else {
        let r = run_search(&spec).map_err(input)?;
        (r.placements, r.truncated)
    };
    Ok((placements.into_iter().map(|inner| PyPlacement { inner }).collect(), truncated))
}

#[pyclass(name = "Gadget", module = "udcr", frozen)]
struct PyGadget {
    inner: GadgetTemplate,
}

#[pymethods]
impl PyGadget {
    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn disk_count(&self) -> usize {
        self.inner.disk_count()
    }

    fn states(&self) -> Vec<String> {
        self.inner.states.keys().cloned().collect()
    }

    fn placement(&self, state: &str) -> PyResult<PyPlacement> {
        let s = self.inner.state(state).ok_or_else(|| input(format!("unknown state {state:?}")))?;
        Ok(PyPlacement { inner: s.placement.clone() })
    }

    /// Frozen realization count per oracle setup.
    fn expected_counts(&self) -> BTreeMap<String, usize> {
        self.inner.setups.iter().map(|(k, s)| (k.clone(), s.expected)).collect()
    }

    /// Runs the search oracle on every setup.
    fn count(&self) -> PyResult<BTreeMap<String, usize>> {
        count_setups(&self.inner).map_err(domain)
    }

    fn caterpillar_json(&self) -> String {
        let cats = self.inner.caterpillars();
        serde_json::to_string_pretty(&cats).unwrap()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Gadget({:?}, {} disks)", self.inner.id, self.inner.disk_count())
    }
}

#[pyfunction]
fn gadgets() -> Vec<PyGadget> {
    library().into_iter().map(|inner| PyGadget { inner }).collect()
}

#[pymodule(name = "udcr")]
fn udcr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add_class::<PyPlacement>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyReduction>()?;
    m.add_class::<PyGadget>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(gadgets, m)?)?;
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    Ok(())
}
