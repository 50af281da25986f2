//! Python bindings for the lndlab engine.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lndlab::coeff::Field;
use lndlab::gb::{membership, GbError};
use lndlab::lab::{self, LabConfig, Scenario};
use lndlab::lnd::{self, LndError};
use lndlab::poly::{Ambient, Polynomial};
use lndlab::ring::{PresentedRing, RingFile};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finitely presented, localized ℚ-algebra.
#[pyclass(name = "Ring", module = "lndlab_py")]
pub struct PyRing {
    inner: PresentedRing,
}

#[pymethods]
impl PyRing {
    #[new]
    #[pyo3(signature = (vars, relations = Vec::new(), invert = Vec::new()))]
    fn new(vars: Vec<String>, relations: Vec<String>, invert: Vec<(String, String)>) -> PyResult<Self> {
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        let rels: Vec<&str> = relations.iter().map(String::as_str).collect();
        let inv: Vec<(&str, &str)> = invert.iter().map(|(p, n)| (p.as_str(), n.as_str())).collect();
        let inner = PresentedRing::from_strings(&vars, &rels, &inv, Field::Rational).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        let file: RingFile = serde_json::from_str(src).map_err(err)?;
        Ok(Self { inner: file.to_ring().map_err(err)? })
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars().to_vec()
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }

    /// Normal form of `p`.
    fn reduce(&self, p: &str) -> PyResult<String> {
        let p = self.inner.parse(p).map_err(err)?;
        Ok(self.inner.reduce(&p).map_err(err)?.to_string())
    }

    fn is_zero(&self, p: &str) -> PyResult<bool> {
        let p = self.inner.parse(p).map_err(err)?;
        self.inner.is_zero(&p).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Ring({})", self.inner.describe())
    }
}

/// A derivation given by the images of the generators.
#[pyclass(name = "Derivation", module = "lndlab_py")]
pub struct PyDerivation {
    inner: lnd::Derivation,
}

#[pymethods]
impl PyDerivation {
    #[new]
    #[pyo3(signature = (ring, images, name = "D"))]
    fn new(ring: &PyRing, images: BTreeMap<String, String>, name: &str) -> PyResult<Self> {
        let imgs: Vec<(&str, &str)> = images.iter().map(|(v, p)| (v.as_str(), p.as_str())).collect();
        Ok(Self { inner: lnd::Derivation::from_strings(&ring.inner, &imgs, name).map_err(err)? })
    }

    fn apply(&self, p: &str) -> PyResult<String> {
        let p = self.inner.ring().parse(p).map_err(err)?;
        Ok(self.inner.apply(&p).map_err(err)?.to_string())
    }

    /// Chains `g, D(g), D²(g), …, 0` for each generator, or `None` past the bound.
    #[pyo3(signature = (bound = None))]
    fn nilpotency_chains(&self, bound: Option<u32>) -> PyResult<Option<BTreeMap<String, Vec<String>>>> {
        match lnd::check_locally_nilpotent(&self.inner, bound) {
            Ok(c) => Ok(Some(
                c.chains.iter().map(|(g, ch)| (g.clone(), ch.iter().map(|p| p.to_string()).collect())).collect(),
            )),
            Err(LndError::BoundExceeded { .. }) => Ok(None),
            Err(e) => Err(err(e)),
        }
    }
}

/// A scenario report with its certificates.
#[pyclass(name = "Report", module = "lndlab_py")]
pub struct PyReport {
    inner: lab::Report,
}

fn status_name(s: lab::Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

#[pymethods]
impl PyReport {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        Ok(Self { inner: lab::Report::from_json(src).map_err(err)? })
    }

    #[getter]
    fn scenario(&self) -> String {
        self.inner.scenario.clone()
    }

    #[getter]
    fn status(&self) -> String {
        status_name(self.inner.status())
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.exit_code()
    }

    /// `(name, status, detail)` per claim.
    fn claims(&self) -> Vec<(String, String, Option<String>)> {
        self.inner.claims.iter().map(|c| (c.name.clone(), status_name(c.status), c.detail.clone())).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// `(name, ok, detail)` per claim, from the embedded certificates alone.
    fn recheck(&self) -> Vec<(String, bool, String)> {
        lab::recheck(&self.inner).into_iter().map(|r| (r.name, r.ok, r.detail)).collect()
    }
}

#[pyfunction]
#[pyo3(signature = (scenario, d = None, dprime = None, l = None, k = None, max_degree = 16, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn verify(
    scenario: &str,
    d: Option<u32>,
    dprime: Option<u32>,
    l: Option<u32>,
    k: Option<u32>,
    max_degree: u32,
    jobs: usize,
) -> PyResult<PyReport> {
    let l = l.unwrap_or(2);
    let s = match scenario {
        "foundations" => Scenario::Foundations { d: d.unwrap_or(1), l },
        "phi" => Scenario::Phi { d: d.unwrap_or(1), l },
        "danielewski" => Scenario::Danielewski,
        "theorem1" => Scenario::Theorem1 { d: d.unwrap_or(1), dprime: dprime.unwrap_or(2), l },
        "corollary3" => Scenario::Corollary3 { d: d.unwrap_or(2), k: k.unwrap_or(3), l },
        "remark3" => Scenario::Remark3 { d: d.unwrap_or(1), l },
        other => return Err(PyValueError::new_err(format!("unknown scenario {other}"))),
    };
    let cfg = LabConfig { max_degree, jobs, ..LabConfig::default() };
    let inner = s.run(&cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyReport { inner })
}

/// Cofactors expressing `target` in the ideal of `generators`, or `None`.
#[pyfunction]
fn ideal_membership(target: &str, generators: Vec<String>, vars: Vec<String>) -> PyResult<Option<Vec<String>>> {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let a = Ambient::grevlex(&names);
    let parse = |s: &str| Polynomial::parse(s, &a, Field::Rational).map_err(err);
    let p = parse(target)?;
    let gens = generators.iter().map(|g| parse(g)).collect::<PyResult<Vec<_>>>()?;
    match membership(&p, &gens, None, 0) {
        Ok(c) => Ok(Some(c.combiners.iter().map(|q| q.to_string()).collect())),
        Err(GbError::NotMember(_)) => Ok(None),
        Err(e) => Err(err(e)),
    }
}

#[pymodule]
fn lndlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRing>()?;
    m.add_class::<PyDerivation>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_membership, m)?)?;
    m.add("__version__", lab::TOOL_VERSION)?;
    Ok(())
}
