//! Python bindings. Words are strings in the alphabet's own notation
//! (`"aab"`, or `"a1.a2"` for multi-character letter names); rationals come
//! back as `fractions.Fraction`; reports come back as plain dicts.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sadic_core::io::{format_rational, parse_rational, sequence_from_json, weight_table_to_json};
use sadic_core::{
    Alphabet, DiagonalFamilySpec, DirectiveSequence, Morphism, VectorTower, WeightTable,
};
use serde::Serialize;

create_exception!(
    sadic,
    SadicError,
    PyValueError,
    "A violated precondition of an analysis."
);
create_exception!(
    sadic,
    ExhaustionError,
    SadicError,
    "The requested depth or length cannot be materialized."
);

fn err(e: sadic_core::Error) -> PyErr {
    if e.is_exhaustion() {
        ExhaustionError::new_err(e.to_string())
    } else {
        SadicError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for sadic_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn fraction<'py>(py: Python<'py>, x: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format_rational(x),))
}

/// Accepts `int`, `Fraction` or `"p/q"` strings.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    parse_rational(&obj.str()?.to_cow()?).py_err()
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| SadicError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

#[pyclass(name = "Morphism", module = "sadic", frozen, from_py_object)]
#[derive(Clone)]
struct PyMorphism {
    inner: Morphism,
}

#[pymethods]
impl PyMorphism {
    /// `Morphism(["a", "b"], ["a", "b"], {"a": "ab", "b": "a"})`.
    #[new]
    fn new(
        source: Vec<String>,
        target: Vec<String>,
        images: BTreeMap<String, String>,
    ) -> PyResult<Self> {
        let spec = sadic_core::io::MorphismSpec {
            source,
            target,
            images,
        };
        Ok(Self {
            inner: spec.build().py_err()?,
        })
    }

    #[getter]
    fn source(&self) -> Vec<String> {
        self.inner.source().names().to_vec()
    }

    #[getter]
    fn target(&self) -> Vec<String> {
        self.inner.target().names().to_vec()
    }

    fn apply(&self, word: &str) -> PyResult<String> {
        let w = self.inner.source().parse_word(word).py_err()?;
        Ok(self
            .inner
            .target()
            .format_word(&self.inner.apply(&w).py_err()?))
    }

    /// Rows indexed by target letters, columns by source letters.
    fn incidence_matrix(&self) -> Vec<Vec<u64>> {
        self.inner.incidence_matrix().to_rows()
    }

    fn min_image_len(&self) -> usize {
        self.inner.min_image_len()
    }

    fn max_image_len(&self) -> usize {
        self.inner.max_image_len()
    }

    /// `outer ∘ inner`.
    #[staticmethod]
    fn compose(outer: &PyMorphism, inner: &PyMorphism) -> PyResult<PyMorphism> {
        Ok(PyMorphism {
            inner: Morphism::compose(&outer.inner, &inner.inner).py_err()?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Morphism({})", self.inner.format())
    }
}

#[pyclass(name = "DirectiveSequence", module = "sadic", frozen)]
struct PySequence {
    inner: DirectiveSequence,
}

#[pymethods]
impl PySequence {
    #[staticmethod]
    fn stationary(sigma: &PyMorphism, depth: usize) -> PyResult<Self> {
        Ok(Self {
            inner: DirectiveSequence::stationary(sigma.inner.clone(), depth).py_err()?,
        })
    }

    #[staticmethod]
    fn prefix_stationary(
        prefix: Vec<PyMorphism>,
        tail: &PyMorphism,
        depth: usize,
    ) -> PyResult<Self> {
        let prefix = prefix.into_iter().map(|m| m.inner).collect();
        Ok(Self {
            inner: DirectiveSequence::prefix_stationary(prefix, tail.inner.clone(), depth)
                .py_err()?,
        })
    }

    /// Builds a sequence from a JSON descriptor, optionally capping its depth.
    #[staticmethod]
    #[pyo3(signature = (text, max_depth=None))]
    fn from_json(text: &str, max_depth: Option<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: sequence_from_json(text, max_depth).py_err()?,
        })
    }

    /// The alternating diagonal family with one block per entry of `ell`.
    #[staticmethod]
    fn diagonal(ell: Vec<u64>) -> PyResult<Self> {
        let spec = DiagonalFamilySpec::new(ell);
        Ok(Self {
            inner: sadic_core::build_diagonal_sequence(&spec).py_err()?,
        })
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn level(&self, n: usize) -> PyResult<PyMorphism> {
        Ok(PyMorphism {
            inner: (*self.inner.level(n).py_err()?).clone(),
        })
    }

    fn alphabet(&self, n: usize) -> PyResult<Vec<String>> {
        Ok(self.inner.alphabet(n).py_err()?.names().to_vec())
    }

    /// `σ_[n,m) = σ_n ∘ ... ∘ σ_{m-1}`.
    fn telescope(&self, n: usize, m: usize) -> PyResult<PyMorphism> {
        Ok(PyMorphism {
            inner: (*self.inner.telescope(n, m).py_err()?).clone(),
        })
    }

    fn telescoped_matrix(&self, n: usize, m: usize) -> PyResult<Vec<Vec<u64>>> {
        Ok(self.inner.telescoped_matrix(n, m).py_err()?.to_rows())
    }

    fn beta_minus(&self, n: usize) -> PyResult<u64> {
        self.inner.beta_minus(n).py_err()
    }

    /// `{length: [words]}` for the level-`level` language.
    fn language(
        &self,
        level: usize,
        max_len: usize,
        depth: usize,
    ) -> PyResult<BTreeMap<usize, Vec<String>>> {
        let table = sadic_core::generate_language(&self.inner, level, max_len, depth).py_err()?;
        Ok((1..=max_len)
            .map(|n| {
                (
                    n,
                    table
                        .words_of_len(n)
                        .iter()
                        .map(|w| table.alphabet().format_word(w))
                        .collect(),
                )
            })
            .collect())
    }

    fn entropy_bound<'py>(&self, py: Python<'py>, depth: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &sadic_core::entropy_upper_bound(&self.inner, depth).py_err()?,
        )
    }

    fn cone<'py>(&self, py: Python<'py>, n: usize, m: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &sadic_core::cone_at_level(&self.inner, n, m).py_err()?)
    }

    fn critical_level<'py>(
        &self,
        py: Python<'py>,
        depth: usize,
        probe: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &sadic_core::critical_level_estimate(&self.inner, depth, probe).py_err()?,
        )
    }

    /// Scan of `σ_level` over its generated source language.
    #[pyo3(signature = (level, radius, aperiodic_only=false, depth=None))]
    fn recognizability<'py>(
        &self,
        py: Python<'py>,
        level: usize,
        radius: usize,
        aperiodic_only: bool,
        depth: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sigma = self.inner.level(level).py_err()?;
        let len = sadic_core::scan_source_len(&sigma, radius);
        let depth = depth.unwrap_or((level + 11).min(self.inner.depth()));
        let table = sadic_core::generate_language(&self.inner, level + 1, len, depth).py_err()?;
        to_py(
            py,
            &sadic_core::recognizability_scan(&sigma, &table, radius, aperiodic_only).py_err()?,
        )
    }

    /// `[(S_n(w), bound_n)]` for `n = 0..=depth`, tower pushed down from `top`.
    fn evaluate_tower<'py>(
        &self,
        py: Python<'py>,
        top: Vec<Bound<'py, PyAny>>,
        depth: usize,
        word: &str,
    ) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
        let top = top.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        let tower = VectorTower::from_top(&self.inner, depth, top).py_err()?;
        let w = self.inner.alphabet(0).py_err()?.parse_word(word).py_err()?;
        (0..=depth)
            .map(|n| {
                let e = sadic_core::evaluate_tower(&self.inner, &tower, &w, n).py_err()?;
                Ok((fraction(py, &e.value)?, fraction(py, &e.error_bound)?))
            })
            .collect()
    }

    /// Level-0 weight table of the tower pushed down from `top`.
    fn tower_measure(
        &self,
        top: Vec<Bound<'_, PyAny>>,
        depth: usize,
        max_len: usize,
    ) -> PyResult<PyWeightTable> {
        let top = top.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        let tower = VectorTower::from_top(&self.inner, depth, top).py_err()?;
        let mt = sadic_core::levelwise_measures(&self.inner, &tower, max_len).py_err()?;
        Ok(PyWeightTable {
            inner: mt.table(0).py_err()?.truncated(max_len),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "DirectiveSequence(kind={:?}, depth={})",
            self.inner.kind(),
            self.inner.depth()
        )
    }
}

#[pyclass(name = "WeightTable", module = "sadic", frozen)]
struct PyWeightTable {
    inner: WeightTable,
}

#[pymethods]
impl PyWeightTable {
    /// `μ_w` on cylinders of length `<= max_len`.
    #[staticmethod]
    fn characteristic(alphabet: Vec<String>, word: &str, max_len: usize) -> PyResult<Self> {
        let a = Arc::new(Alphabet::new(&alphabet).py_err()?);
        let w = a.parse_word(word).py_err()?;
        Ok(Self {
            inner: sadic_core::characteristic_measure(a, &w, max_len).py_err()?,
        })
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.inner.max_len()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner.alphabet().names().to_vec()
    }

    fn mass<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.mass())
    }

    fn get<'py>(&self, py: Python<'py>, word: &str) -> PyResult<Bound<'py, PyAny>> {
        let w = self.inner.alphabet().parse_word(word).py_err()?;
        fraction(py, &self.inner.get(&w))
    }

    /// Nonzero weights keyed by word.
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for (w, x) in self.inner.support() {
            out.set_item(self.inner.alphabet().format_word(w), fraction(py, x)?)?;
        }
        Ok(out)
    }

    fn letter_frequency<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        sadic_core::letter_frequency(&self.inner)
            .iter()
            .map(|x| fraction(py, x))
            .collect()
    }

    fn kirchhoff_consistent(&self) -> bool {
        sadic_core::check_kirchhoff(&self.inner).is_consistent()
    }

    /// The pushforward table through `sigma` on cylinders up to `target_len`.
    fn transfer(&self, sigma: &PyMorphism, target_len: usize) -> PyResult<PyWeightTable> {
        Ok(PyWeightTable {
            inner: sadic_core::transfer_measure(&sigma.inner, &self.inner, target_len).py_err()?,
        })
    }

    fn to_json(&self) -> String {
        weight_table_to_json(&self.inner).to_string()
    }

    fn __eq__(&self, other: &PyWeightTable) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "WeightTable(L={}, mass={}, support={})",
            self.inner.max_len(),
            format_rational(self.inner.mass()),
            self.inner.support_len()
        )
    }
}

#[pyfunction]
fn critical_level_example_report(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &sadic_core::critical_level_example_report().py_err()?)
}

#[pyfunction]
#[pyo3(signature = (d, ell, blocks=None, max_base_len=64))]
fn diagonal_report(
    py: Python<'_>,
    d: usize,
    ell: Vec<u64>,
    blocks: Option<usize>,
    max_base_len: usize,
) -> PyResult<Bound<'_, PyAny>> {
    let blocks = blocks.unwrap_or(ell.len());
    let spec = DiagonalFamilySpec { ell, blocks };
    to_py(
        py,
        &sadic_core::diagonal_report(&spec, d, max_base_len).py_err()?,
    )
}

#[pymodule]
fn sadic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMorphism>()?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyWeightTable>()?;
    m.add_function(wrap_pyfunction!(critical_level_example_report, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_report, m)?)?;
    m.add("SadicError", m.py().get_type::<SadicError>())?;
    m.add("ExhaustionError", m.py().get_type::<ExhaustionError>())?;
    Ok(())
}
