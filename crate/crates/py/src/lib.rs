//! Python bindings for `feyncat-core`.

use std::str::FromStr;
use std::sync::Arc;

use feyncat_core::canon::canonical_key as graph_key;
use feyncat_core::expr::parse_input;
use feyncat_core::instances::{instance_by_name, INSTANCE_NAMES};
use feyncat_core::render::{elem_to_json, render_elem, render_tensor, tensor_to_json, Format};
use feyncat_core::verify::{verify_axioms, VerifyOptions, VerifyReport};
use feyncat_core::{Coeff, Elem, Error, Graph, HopfAlgebra, Ring, Tensor2};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, c: &Coeff) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((c.to_string(),))
}

fn scalar(x: &Bound<'_, PyAny>) -> PyResult<Option<Coeff>> {
    let fractions = x.py().import("fractions")?.getattr("Fraction")?;
    if x.is_instance_of::<pyo3::types::PyInt>() || x.is_instance(&fractions)? {
        let s = x.str()?.to_string();
        return Coeff::from_str(&s).map(Some).map_err(err);
    }
    Ok(None)
}

/// A connected graded Hopf algebra attached to one of the shipped instances.
#[pyclass(frozen, module = "feyncat")]
struct Algebra {
    h: Arc<HopfAlgebra>,
}

#[pymethods]
impl Algebra {
    #[new]
    #[pyo3(signature = (instance, ring = "rational"))]
    fn new(instance: &str, ring: &str) -> PyResult<Self> {
        let ring = match ring {
            "integer" => Ring::Integer,
            "rational" => Ring::Rational,
            other => return Err(PyValueError::new_err(format!("unknown ring {other}"))),
        };
        let inst = instance_by_name(instance).map_err(err)?;
        Ok(Algebra { h: Arc::new(HopfAlgebra::new(inst, ring)) })
    }

    #[getter]
    fn name(&self) -> String {
        self.h.instance().name()
    }

    /// Parse an expression such as `pi(3) - 2 pi(1) pi(2)` or its JSON form.
    fn parse(&self, text: &str) -> PyResult<Element> {
        let x = parse_input(&**self.h.instance(), text).map_err(err)?;
        self.h.check(&x).map_err(err)?;
        Ok(self.wrap(x))
    }

    fn one(&self) -> Element {
        self.wrap(Elem::one())
    }

    /// Generator keys up to the given degree.
    fn generators(&self, max_degree: usize) -> Vec<String> {
        self.h.instance().generators(max_degree).iter().map(|k| k.to_string()).collect()
    }

    fn coproduct(&self, x: &Element) -> PyResult<Tensor> {
        self.same(x)?;
        Ok(self.wrap_tensor(self.h.coproduct(&x.x).map_err(err)?))
    }

    fn reduced_coproduct(&self, x: &Element) -> PyResult<Tensor> {
        self.same(x)?;
        Ok(self.wrap_tensor(self.h.reduced_coproduct(&x.x).map_err(err)?))
    }

    fn antipode(&self, x: &Element) -> PyResult<Element> {
        self.same(x)?;
        Ok(self.wrap(self.h.antipode(&x.x).map_err(err)?))
    }

    fn counit<'py>(&self, py: Python<'py>, x: &Element) -> PyResult<Bound<'py, PyAny>> {
        self.same(x)?;
        fraction(py, &self.h.hopf_counit(&x.x))
    }

    fn product(&self, a: &Element, b: &Element) -> PyResult<Element> {
        self.same(a)?;
        self.same(b)?;
        Ok(self.wrap(self.h.product(&a.x, &b.x)))
    }

    #[pyo3(signature = (max_degree = 3, seed = 0, pairs = 200))]
    fn verify(&self, py: Python<'_>, max_degree: usize, seed: u64, pairs: usize) -> PyResult<Report> {
        let mut opts = VerifyOptions::new(max_degree);
        opts.seed = seed;
        opts.random_pairs = pairs;
        let h = self.h.clone();
        let report = py.detach(move || verify_axioms(&h, &opts)).map_err(err)?;
        Ok(Report { r: report })
    }

    fn __repr__(&self) -> String {
        format!("Algebra({:?})", self.h.instance().name())
    }
}

impl Algebra {
    fn wrap(&self, x: Elem) -> Element {
        Element { h: self.h.clone(), x }
    }

    fn wrap_tensor(&self, t: Tensor2) -> Tensor {
        Tensor { h: self.h.clone(), t }
    }

    fn same(&self, x: &Element) -> PyResult<()> {
        check_same(&self.h, &x.h)
    }
}

fn check_same(a: &HopfAlgebra, b: &HopfAlgebra) -> PyResult<()> {
    if a.instance().name() != b.instance().name() {
        return Err(PyValueError::new_err(format!(
            "elements of {} and {} do not mix",
            a.instance().name(),
            b.instance().name()
        )));
    }
    Ok(())
}

/// An element of the algebra with exact rational coefficients.
#[pyclass(frozen, module = "feyncat")]
struct Element {
    h: Arc<HopfAlgebra>,
    x: Elem,
}

#[pymethods]
impl Element {
    /// List of `(keys, Fraction)` pairs.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Vec<String>, Bound<'py, PyAny>)>> {
        self.x
            .iter()
            .map(|(w, c)| Ok((w.keys().iter().map(|k| k.to_string()).collect(), fraction(py, c)?)))
            .collect()
    }

    fn latex(&self) -> String {
        render_elem(&**self.h.instance(), &self.x, Format::Latex)
    }

    fn json(&self) -> String {
        elem_to_json(&self.x)
    }

    fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    fn __len__(&self) -> usize {
        self.x.len()
    }

    fn __str__(&self) -> String {
        render_elem(&**self.h.instance(), &self.x, Format::Text)
    }

    fn __repr__(&self) -> String {
        format!("Element({:?})", self.__str__())
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.cast::<Element>() {
            Ok(o) => o.get().h.instance().name() == self.h.instance().name() && o.get().x == self.x,
            Err(_) => false,
        }
    }

    fn __add__(&self, other: &Element) -> PyResult<Element> {
        check_same(&self.h, &other.h)?;
        Ok(self.with(self.x.plus(&other.x)))
    }

    fn __sub__(&self, other: &Element) -> PyResult<Element> {
        check_same(&self.h, &other.h)?;
        Ok(self.with(self.x.minus(&other.x)))
    }

    fn __neg__(&self) -> Element {
        self.with(self.x.neg())
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Element> {
        if let Some(c) = scalar(other)? {
            return self.scaled(&c);
        }
        let o = other.cast::<Element>().map_err(|_| PyTypeError::new_err("expected an Element, int or Fraction"))?;
        check_same(&self.h, &o.get().h)?;
        Ok(self.with(self.h.product(&self.x, &o.get().x)))
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Element> {
        match scalar(other)? {
            Some(c) => self.scaled(&c),
            None => Err(PyTypeError::new_err("expected an int or Fraction")),
        }
    }
}

impl Element {
    fn with(&self, x: Elem) -> Element {
        Element { h: self.h.clone(), x }
    }

    fn scaled(&self, c: &Coeff) -> PyResult<Element> {
        if !self.h.ring().admits(c) {
            return Err(PyValueError::new_err(format!("{c} is not in the coefficient ring")));
        }
        Ok(self.with(self.x.scale(c)))
    }
}

/// An element of the tensor square.
#[pyclass(frozen, module = "feyncat")]
struct Tensor {
    h: Arc<HopfAlgebra>,
    t: Tensor2,
}

#[pymethods]
impl Tensor {
    /// List of `(left keys, right keys, Fraction)` triples.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Vec<String>, Vec<String>, Bound<'py, PyAny>)>> {
        let keys = |w: &feyncat_core::Word| w.keys().iter().map(|k| k.to_string()).collect::<Vec<_>>();
        self.t.iter().map(|((l, r), c)| Ok((keys(l), keys(r), fraction(py, c)?))).collect()
    }

    fn latex(&self) -> String {
        render_tensor(&**self.h.instance(), &self.t, Format::Latex)
    }

    fn json(&self) -> String {
        tensor_to_json(&self.t)
    }

    fn __len__(&self) -> usize {
        self.t.len()
    }

    fn __str__(&self) -> String {
        render_tensor(&**self.h.instance(), &self.t, Format::Text)
    }

    fn __repr__(&self) -> String {
        format!("Tensor({:?})", self.__str__())
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.cast::<Tensor>() {
            Ok(o) => o.get().h.instance().name() == self.h.instance().name() && o.get().t == self.t,
            Err(_) => false,
        }
    }
}

/// Outcome of an axiom check run.
#[pyclass(frozen, module = "feyncat")]
struct Report {
    r: VerifyReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn passed(&self) -> bool {
        self.r.all_passed()
    }

    /// List of `(name, passed, cases, counterexample)` tuples.
    #[getter]
    fn checks(&self) -> Vec<(String, bool, usize, Option<String>)> {
        self.r
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.passed, c.cases, c.counterexample.clone()))
            .collect()
    }

    fn __str__(&self) -> String {
        self.r.to_string()
    }
}

/// Names accepted by `Algebra`. Parametrised families such as `seq:ab` or
/// `nerve:path.json` are accepted too.
#[pyfunction]
fn instances() -> Vec<&'static str> {
    INSTANCE_NAMES.to_vec()
}

/// Canonical key of a graph given in JSON.
#[pyfunction]
fn canonical_key(graph_json: &str) -> PyResult<String> {
    Ok(graph_key(&Graph::from_json(graph_json).map_err(err)?))
}

#[pymodule]
fn feyncat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Element>()?;
    m.add_class::<Tensor>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(instances, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_key, m)?)?;
    Ok(())
}
