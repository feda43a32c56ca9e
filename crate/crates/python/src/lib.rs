//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be ints, Fractions or strings such as `"3/4"`.

use std::collections::BTreeMap;
use std::str::FromStr;

use alqe::odag::{self, Axiom, CheckConfig};
use alqe::rational::{self, Q};
use alqe::riesz::{self, DEFAULT_EXPANSION_CAP};
use alqe::semantics::{self, io, Assignment, FiniteStructure};
use alqe::syntax::{self, Formula as CoreFormula, Signature as CoreSignature};
use alqe::typespace::{self, Fragment};
use alqe::qe;
use alqe::ultramean as um;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, q: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((rational::show(q),))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Q> {
    rational::parse(&obj.str()?.to_cow()?).map_err(err)
}

fn vector<'py>(py: Python<'py>, values: &[Q]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    values.iter().map(|q| to_py(py, q)).collect()
}

/// A signature: function and relation symbols with Lipschitz bounds.
#[pyclass(name = "Signature", frozen, from_py_object)]
#[derive(Clone)]
struct PySignature(CoreSignature);

#[pymethods]
impl PySignature {
    #[staticmethod]
    fn empty() -> Self {
        PySignature(CoreSignature::empty())
    }

    #[staticmethod]
    fn vector_space() -> Self {
        PySignature(CoreSignature::vector_space())
    }

    #[staticmethod]
    fn ring() -> Self {
        PySignature(CoreSignature::ring())
    }

    #[staticmethod]
    fn boolean_algebra() -> Self {
        PySignature(CoreSignature::boolean_algebra())
    }

    #[staticmethod]
    fn odag() -> Self {
        PySignature(CoreSignature::odag())
    }

    fn parse(&self, text: &str) -> PyResult<PyFormula> {
        syntax::parse(text, &self.0).map(PyFormula).map_err(err)
    }
}

#[pyclass(name = "Formula", frozen, from_py_object)]
#[derive(Clone)]
struct PyFormula(CoreFormula);

#[pymethods]
impl PyFormula {
    fn free_vars(&self) -> Vec<String> {
        self.0.free_vars()
    }

    fn __str__(&self) -> String {
        syntax::print(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", syntax::print(&self.0))
    }
}

/// A finite metric structure with rational distances and relation values.
#[pyclass(name = "Structure", frozen, from_py_object)]
#[derive(Clone)]
struct PyStructure(FiniteStructure);

#[pymethods]
impl PyStructure {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::from_json(text).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        io::load(&path).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn vector_space(q: u64) -> PyResult<Self> {
        semantics::prime_field_vector_space(q).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn ring(p: u64) -> PyResult<Self> {
        semantics::prime_field_ring(p).map(PyStructure).map_err(err)
    }

    #[staticmethod]
    fn boolean_algebra(weights: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let weights = weights.iter().map(from_py).collect::<PyResult<Vec<_>>>()?;
        semantics::boolean_algebra(&weights).map(PyStructure).map_err(err)
    }

    fn to_json(&self) -> String {
        io::to_json(&self.0)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::save(&self.0, &path).map_err(err)
    }

    #[getter]
    fn universe(&self) -> Vec<String> {
        self.0.universe().to_vec()
    }

    #[getter]
    fn signature(&self) -> PySignature {
        PySignature(self.0.signature().clone())
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn parse(&self, text: &str) -> PyResult<PyFormula> {
        syntax::parse(text, self.0.signature()).map(PyFormula).map_err(err)
    }

    /// Value of a formula; `assignment` maps variables to element names.
    #[pyo3(signature = (formula, assignment = None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        formula: &str,
        assignment: Option<BTreeMap<String, String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let f = syntax::parse(formula, self.0.signature()).map_err(err)?;
        let mut asg = Assignment::new();
        for (var, name) in assignment.unwrap_or_default() {
            let e = self.0.element(&name).ok_or_else(|| err(format!("no element named {name}")))?;
            asg.insert(var, e);
        }
        to_py(py, &semantics::evaluate(&self.0, &f, &asg).map_err(err)?)
    }

    /// Violated structure axioms, one message each; empty when valid.
    fn validate(&self) -> Vec<String> {
        semantics::validate(&self.0).iter().map(ToString::to_string).collect()
    }

    fn scaled(&self, factor: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyStructure(self.0.with_scaled_metric(&from_py(factor)?)))
    }

    fn __repr__(&self) -> String {
        format!("Structure(size={})", self.0.size())
    }
}

fn family(members: Vec<(Bound<'_, PyAny>, PyStructure)>) -> PyResult<um::WeightedFamily> {
    let members = members.into_iter().map(|(w, m)| Ok((from_py(&w)?, m.0))).collect::<PyResult<Vec<_>>>()?;
    um::WeightedFamily::new(members).map_err(err)
}

/// Ultramean of `[(weight, structure), ...]`.
#[pyfunction]
fn ultramean(members: Vec<(Bound<'_, PyAny>, PyStructure)>) -> PyResult<PyStructure> {
    um::ultramean(&family(members)?).map(PyStructure).map_err(err)
}

/// `λM₁ ⊕ (1−λ)M₂`.
#[pyfunction]
fn mixture(m1: &PyStructure, m2: &PyStructure, weight: &Bound<'_, PyAny>) -> PyResult<PyStructure> {
    um::mixture(&m1.0, &m2.0, &from_py(weight)?).map(PyStructure).map_err(err)
}

/// `(value in the mean, weighted sum of member values)` for a sentence.
#[pyfunction]
fn verify_los<'py>(
    py: Python<'py>,
    members: Vec<(Bound<'py, PyAny>, PyStructure)>,
    sentence: &str,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let fam = family(members)?;
    let sig = fam.members()[0].1.signature().clone();
    let f = syntax::parse(sentence, &sig).map_err(err)?;
    let report = um::verify_los(&fam, &f).map_err(err)?;
    Ok((to_py(py, &report.mean_value)?, to_py(py, &report.weighted_value)?))
}

/// Quantifier-free normal form over a finite vector space.
#[pyclass(name = "QFNormalForm", frozen)]
struct PyNormalForm {
    source: CoreFormula,
    nf: qe::QFNormalForm,
}

#[pymethods]
impl PyNormalForm {
    #[getter]
    fn vars(&self) -> Vec<String> {
        self.nf.vars().to_vec()
    }

    fn evaluate<'py>(&self, py: Python<'py>, point: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
        if point.len() != self.nf.vars().len() {
            return Err(err(format!("expected {} coordinates", self.nf.vars().len())));
        }
        to_py(py, &self.nf.evaluate(&point))
    }

    /// Points where the normal form and the original formula disagree.
    fn mismatches(&self) -> PyResult<Vec<Vec<u64>>> {
        let table = qe::verify(&self.source, &self.nf).map_err(err)?;
        Ok(table.into_iter().map(|m| m.point).collect())
    }

    fn __str__(&self) -> String {
        self.nf.to_string()
    }
}

#[pyfunction]
fn eliminate(formula: &str, q: u64, vars: Vec<String>) -> PyResult<PyNormalForm> {
    let source = syntax::parse(formula, &CoreSignature::vector_space()).map_err(err)?;
    let nf = qe::eliminate_all(&source, q, &vars).map_err(err)?;
    Ok(PyNormalForm { source, nf })
}

/// Randomized check of one ordered-group axiom; returns a dict with the
/// evaluation count and the counterexample, if any.
#[pyfunction]
#[pyo3(signature = (axiom, trials = 1000, seed = 0, bound = 10))]
fn check_axiom<'py>(py: Python<'py>, axiom: &str, trials: usize, seed: u64, bound: i64) -> PyResult<Bound<'py, PyDict>> {
    let ax = Axiom::from_str(axiom).map_err(err)?;
    let report = odag::check_axiom(ax, &CheckConfig { trials, seed, bound }).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("passed", report.passed())?;
    out.set_item("evaluations", report.evaluations)?;
    match &report.counterexample {
        None => out.set_item("counterexample", py.None())?,
        Some(cx) => {
            let d = PyDict::new(py);
            d.set_item("instance", &cx.instance)?;
            let asg = PyDict::new(py);
            for (v, q) in &cx.assignment {
                asg.set_item(v, to_py(py, q)?)?;
            }
            d.set_item("assignment", asg)?;
            d.set_item("lhs", to_py(py, &cx.lhs)?)?;
            d.set_item("rhs", to_py(py, &cx.rhs)?)?;
            out.set_item("counterexample", d)?;
        }
    }
    Ok(out)
}

/// Lattice normal form of an ordered-group term.
#[pyfunction]
fn term_normal_form(term: &str) -> PyResult<String> {
    let t = syntax::parse_term(term, &CoreSignature::odag()).map_err(err)?;
    odag::term_normal_form(&t).map(|nf| nf.to_string()).map_err(err)
}

fn cloud(m: &PyStructure, fragment: &str, n: usize) -> PyResult<typespace::TypeCloud> {
    let frag = Fragment::parse(fragment, m.0.signature(), typespace::standard_vars(n)).map_err(err)?;
    typespace::realized_types(&m.0, &frag, "M").map_err(err)
}

/// Distinct type vectors of `n`-tuples, one fragment formula per line.
#[pyfunction]
fn realized_types<'py>(py: Python<'py>, m: &PyStructure, fragment: &str, n: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    cloud(m, fragment, n)?.vectors().iter().map(|v| vector(py, &v.values)).collect()
}

#[pyfunction]
fn extreme_points<'py>(py: Python<'py>, m: &PyStructure, fragment: &str, n: usize) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let extremes = typespace::extreme_points(&cloud(m, fragment, n)?);
    extremes.vectors().iter().map(|v| vector(py, &v.values)).collect()
}

/// Inclusion-exclusion expansion of the join (or meet) of formulas.
#[pyfunction]
#[pyo3(signature = (formulas, signature, op = "join"))]
fn expand(formulas: Vec<String>, signature: &PySignature, op: &str) -> PyResult<String> {
    let fs = formulas.iter().map(|f| syntax::parse(f, &signature.0)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let comb = match op {
        "join" => riesz::inclusion_exclusion_join(&fs, DEFAULT_EXPANSION_CAP),
        "meet" => riesz::inclusion_exclusion_meet(&fs, DEFAULT_EXPANSION_CAP),
        _ => return Err(err(format!("op must be join or meet, not {op}"))),
    }
    .map_err(err)?;
    Ok(syntax::print(&comb.to_formula()))
}

#[pymodule(name = "alqe")]
fn alqe_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignature>()?;
    m.add_class::<PyFormula>()?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyNormalForm>()?;
    m.add_function(wrap_pyfunction!(ultramean, m)?)?;
    m.add_function(wrap_pyfunction!(mixture, m)?)?;
    m.add_function(wrap_pyfunction!(verify_los, m)?)?;
    m.add_function(wrap_pyfunction!(eliminate, m)?)?;
    m.add_function(wrap_pyfunction!(check_axiom, m)?)?;
    m.add_function(wrap_pyfunction!(term_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(realized_types, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_points, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    Ok(())
}
