use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use logcirc::annihilate::{self, BatteryOptions};
use logcirc::classgrp::{self, FiniteLModule, LogClassOptions};
use logcirc::report::{self, Settings, Suite};
use logcirc::{cyclo, ladic, units, AbelianField, CycloElement, Error, FieldSpec, Limits};

create_exception!(logcirc, LogcircError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::NonMinimalConductor { .. } | Error::NotReal => {
            PyValueError::new_err(e.to_string())
        }
        _ => LogcircError::new_err(e.to_string()),
    }
}

/// A real abelian number field, given by a conductor and a subgroup of `(Z/fZ)^×`.
#[pyclass(name = "Field", module = "logcirc", frozen)]
#[derive(Clone)]
struct PyField(AbelianField);

#[pymethods]
impl PyField {
    /// `Field("f=40;H=39,11")` or `Field("d=5")`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let s: FieldSpec = spec.parse().map_err(to_py)?;
        Ok(PyField(s.build(Limits::default()).map_err(to_py)?))
    }

    #[staticmethod]
    fn quadratic(d: u64) -> PyResult<Self> {
        Ok(PyField(AbelianField::quadratic(d).map_err(to_py)?))
    }

    #[staticmethod]
    #[pyo3(signature = (f, max_degree = 8))]
    fn of_conductor(f: u64, max_degree: usize) -> Vec<PyField> {
        AbelianField::real_fields_of_conductor(f, max_degree).into_iter().map(PyField).collect()
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.0.conductor()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    /// Residues representing the elements of the Galois group.
    fn galois_group(&self) -> Vec<u64> {
        self.0.galois_group().iter().map(|g| g.residue).collect()
    }

    fn subfields(&self) -> Vec<PyField> {
        self.0.subfield_lattice().into_iter().map(PyField).collect()
    }

    fn is_subfield_of(&self, other: &PyField) -> bool {
        self.0.is_subfield_of(&other.0)
    }

    /// Places, ramification index and residue degree above `p`, and the decomposition field.
    fn decomposition<'py>(&self, py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyDict>> {
        let dec = self.0.decomposition_data(p);
        let d = PyDict::new_bound(py);
        d.set_item("places", dec.places_above)?;
        d.set_item("e", dec.ramification_index)?;
        d.set_item("f", dec.residue_degree)?;
        d.set_item("fixed_field", Py::new(py, PyField(dec.fixed_field.clone()))?)?;
        Ok(d)
    }

    fn __str__(&self) -> String {
        self.0.label()
    }

    fn __repr__(&self) -> String {
        format!("Field({:?})", self.0.label())
    }

    fn __eq__(&self, other: &PyField) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }
}

/// An element of `Q(ζ_f)` in the power basis, with a common denominator.
#[pyclass(name = "Element", module = "logcirc", frozen)]
#[derive(Clone)]
struct PyElement(CycloElement);

#[pymethods]
impl PyElement {
    #[new]
    #[pyo3(signature = (f, num, den = None))]
    fn new(f: u64, num: Vec<BigInt>, den: Option<BigInt>) -> PyResult<Self> {
        Ok(PyElement(CycloElement::new(f, num, den.unwrap_or_else(|| 1.into())).map_err(to_py)?))
    }

    /// Parses `f=5; num=[2,-1,0,-1]; den=1`.
    #[staticmethod]
    fn from_record(record: &str) -> PyResult<Self> {
        Ok(PyElement(record.parse().map_err(to_py)?))
    }

    #[staticmethod]
    fn integer(f: u64, n: i64) -> Self {
        PyElement(CycloElement::from_int(f, n))
    }

    #[staticmethod]
    fn zeta(f: u64, k: i64) -> Self {
        PyElement(CycloElement::zeta_power(f, k))
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.0.conductor()
    }

    #[getter]
    fn numerator(&self) -> Vec<BigInt> {
        self.0.numerator().to_vec()
    }

    #[getter]
    fn denominator(&self) -> BigInt {
        self.0.denominator().clone()
    }

    fn record(&self) -> String {
        self.0.to_record()
    }

    /// Image under `ζ ↦ ζ^a`.
    fn galois(&self, a: u64) -> Self {
        PyElement(self.0.galois(a))
    }

    fn is_in(&self, field: &PyField) -> bool {
        self.0.is_fixed_by(&field.0)
    }

    fn norm(&self, source: &PyField, target: &PyField) -> PyResult<Self> {
        Ok(PyElement(self.0.relative_norm(&source.0, &target.0).map_err(to_py)?))
    }

    fn __add__(&self, o: &PyElement) -> PyResult<Self> {
        same_conductor(self, o)?;
        Ok(PyElement(&self.0 + &o.0))
    }

    fn __sub__(&self, o: &PyElement) -> PyResult<Self> {
        same_conductor(self, o)?;
        Ok(PyElement(&self.0 - &o.0))
    }

    fn __mul__(&self, o: &PyElement) -> PyResult<Self> {
        same_conductor(self, o)?;
        Ok(PyElement(&self.0 * &o.0))
    }

    fn __neg__(&self) -> Self {
        PyElement(-&self.0)
    }

    fn __eq__(&self, o: &PyElement) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Element.from_record({:?})", self.0.to_record())
    }
}

fn same_conductor(a: &PyElement, b: &PyElement) -> PyResult<()> {
    if a.0.conductor() != b.0.conductor() {
        return Err(PyValueError::new_err("elements live in different cyclotomic fields"));
    }
    Ok(())
}

/// `η_F = N_{Q(ζ_f)/F}(1 - ζ_f)`.
#[pyfunction]
fn eta(field: &PyField) -> PyResult<PyElement> {
    Ok(PyElement(cyclo::eta(&field.0).map_err(to_py)?))
}

/// `η_F` when `ℓ | f`, the twisted `η̃_F` otherwise.
#[pyfunction]
fn predicted_log_unit(field: &PyField, ell: u64) -> PyResult<PyElement> {
    let x = units::predicted_log_unit(&field.0, ell).and_then(|p| p.evaluate(&field.0)).map_err(to_py)?;
    Ok(PyElement(x))
}

/// Iwasawa logarithm of a rational `num / den` modulo `ℓ^m`, as a residue.
#[pyfunction]
#[pyo3(signature = (num, ell, m, den = None))]
fn iwasawa_log(num: BigInt, ell: u64, m: u32, den: Option<BigInt>) -> PyResult<BigInt> {
    let v = ladic::iwasawa_log_rational(&num, &den.unwrap_or_else(|| 1.into()), ell, m).map_err(to_py)?;
    Ok(v.value().clone())
}

/// Logarithmic divisor as `{place: coefficient}` and its degree.
#[pyfunction]
fn log_divisor<'py>(py: Python<'py>, field: &PyField, x: &PyElement, ell: u64, m: u32) -> PyResult<Bound<'py, PyDict>> {
    let d = ladic::log_divisor(&field.0, &x.0, ell, m).map_err(to_py)?;
    let coeffs = PyDict::new_bound(py);
    for (pl, c) in &d.finite {
        coeffs.set_item(pl.label(), BigInt::from(*c))?;
    }
    for (pl, c) in &d.at_ell {
        coeffs.set_item(pl.label(), c.symmetric())?;
    }
    let out = PyDict::new_bound(py);
    out.set_item("coefficients", coeffs)?;
    out.set_item("degree", d.degree(&field.0).map_err(to_py)?.symmetric())?;
    out.set_item("precision", d.prec)?;
    Ok(out)
}

/// `(holds, witness)`; `holds` is a statement modulo `ℓ^m`.
#[pyfunction]
fn is_log_unit(field: &PyField, x: &PyElement, ell: u64, m: u32) -> PyResult<(bool, Option<(String, String)>)> {
    let v = units::is_log_unit(&field.0, &x.0, ell, m).map_err(to_py)?;
    Ok((v.holds, v.witness))
}

fn module_dict<'py>(py: Python<'py>, g: &FiniteLModule) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("invariants", g.invariants())?;
    d.set_item("precision", g.prec)?;
    d.set_item("text", g.to_string())?;
    Ok(d)
}

/// ℓ-parts of `Cl_F` and `Cl⁰_F`.
#[pyfunction]
fn class_group<'py>(py: Python<'py>, field: &PyField, ell: u64, m: u32) -> PyResult<Bound<'py, PyDict>> {
    let g = classgrp::class_group(&field.0, ell, m).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("cl", module_dict(py, &g.cl)?)?;
    d.set_item("cl0", module_dict(py, &g.cl0)?)?;
    d.set_item("class_number", g.class_number)?;
    Ok(d)
}

/// `C̃l_F` modulo `ℓ^m`.
#[pyfunction]
fn log_class_group<'py>(py: Python<'py>, field: &PyField, ell: u64, m: u32) -> PyResult<Bound<'py, PyDict>> {
    let g = classgrp::log_class_group(&field.0, ell, m, LogClassOptions::default()).map_err(to_py)?;
    module_dict(py, &g.cl)
}

/// Predicted and computed rank of the logarithmic circular units.
#[pyfunction]
fn circular_rank<'py>(py: Python<'py>, field: &PyField, ell: u64, m: u32) -> PyResult<Bound<'py, PyDict>> {
    let r = units::car_rank_check(&field.0, ell, m).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("case", r.case.to_string())?;
    d.set_item("expected", r.expected)?;
    d.set_item("computed", r.computed)?;
    d.set_item("stable", r.stable)?;
    d.set_item("pass", r.pass)?;
    Ok(d)
}

fn check_dict<'py>(py: Python<'py>, c: &annihilate::CheckRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("status", c.status.to_string())?;
    d.set_item("detail", &c.detail)?;
    d.set_item("witness", &c.witness)?;
    d.set_item("m", c.m)?;
    Ok(d)
}

/// Annihilation of `C̃l_F` by the images of the logarithmic circular units.
#[pyfunction]
#[pyo3(signature = (field, ell, m, seed = 0x5eed))]
fn tpc_check<'py>(py: Python<'py>, field: &PyField, ell: u64, m: u32, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let opts = BatteryOptions { seed, ..BatteryOptions::default() };
    let c = py.allow_threads(|| annihilate::tpc_check(&field.0, ell, m, opts)).map_err(to_py)?;
    check_dict(py, &c)
}

/// Integrality and annihilation for the λ-adic Solomon maps.
#[pyfunction]
#[pyo3(signature = (field, ell, m, seed = 7))]
fn solomon_check<'py>(py: Python<'py>, field: &PyField, ell: u64, m: u32, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let (c, _) = py.allow_threads(|| annihilate::solomon_check(&field.0, ell, m, seed)).map_err(to_py)?;
    check_dict(py, &c)
}

/// Runs verification suites from `key = value` config text; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suites, config = "", timing = false))]
fn verify(py: Python<'_>, suites: &str, config: &str, timing: bool) -> PyResult<(i32, String)> {
    let suites = Suite::parse_selection(suites).map_err(to_py)?;
    let cfg = Settings::from_config_text(config).and_then(|s| s.resolve()).map_err(to_py)?;
    let rep = py.allow_threads(|| report::run(&cfg, &suites)).map_err(to_py)?;
    Ok((rep.exit_code(), rep.to_json(timing)))
}

#[pymodule]
#[pyo3(name = "logcirc")]
fn logcirc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LogcircError", m.py().get_type_bound::<LogcircError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyField>()?;
    m.add_class::<PyElement>()?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_log_unit, m)?)?;
    m.add_function(wrap_pyfunction!(iwasawa_log, m)?)?;
    m.add_function(wrap_pyfunction!(log_divisor, m)?)?;
    m.add_function(wrap_pyfunction!(is_log_unit, m)?)?;
    m.add_function(wrap_pyfunction!(class_group, m)?)?;
    m.add_function(wrap_pyfunction!(log_class_group, m)?)?;
    m.add_function(wrap_pyfunction!(circular_rank, m)?)?;
    m.add_function(wrap_pyfunction!(tpc_check, m)?)?;
    m.add_function(wrap_pyfunction!(solomon_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
