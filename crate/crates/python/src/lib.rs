//! Python bindings for `diffalg`.
//!
//! Algebra elements cross the boundary as lists of Python `complex`, series
//! and polynomials as lists of `(exponents, coefficient)` pairs, and reports
//! as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use diffalg::algebra::{self, Algebra, Character};
use diffalg::diffcalc::{check_stabilization, z_tower};
use diffalg::envelope::{envelope_verdict, EnvelopeOptions, Sample};
use diffalg::expr::Expr;
use diffalg::geometry::check_duality;
use diffalg::jets::space_for;
use diffalg::linalg::{Tolerances, Vector, C64};
use diffalg::multiindex::{IndexTable, MultiIndex};
use diffalg::poly::Poly;
use diffalg::selftest;
use diffalg::series::{Mode, SeriesSpace};
use diffalg::spectra::{central_subalgebras, dauns_hofmann_check, fourier_check, FiniteAbelianGroup};

create_exception!(diffalg_py, DiffalgError, PyException);

fn err(e: diffalg::Error) -> PyErr {
    DiffalgError::new_err(e.to_string())
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(xs) => {
            let items = xs.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| DiffalgError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

fn vector(xs: Vec<C64>, dim: usize) -> PyResult<Vector> {
    if xs.len() != dim {
        return Err(DiffalgError::new_err(format!("expected {dim} coordinates, got {}", xs.len())));
    }
    Ok(Vector::from_vec(xs))
}

/// A finite-dimensional algebra given by structure constants.
#[pyclass(name = "Algebra", frozen)]
struct PyAlgebra {
    inner: Algebra,
}

#[pymethods]
impl PyAlgebra {
    /// Build from a constructor name such as `matrix:2`, `cusp:6` or `func:2+matrix:2`.
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        Ok(PyAlgebra {
            inner: algebra::from_name(name).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn unit(&self) -> Vec<C64> {
        self.inner.unit().iter().copied().collect()
    }

    fn mul(&self, x: Vec<C64>, y: Vec<C64>) -> PyResult<Vec<C64>> {
        let d = self.inner.dim();
        Ok(self.inner.mul(&vector(x, d)?, &vector(y, d)?).iter().copied().collect())
    }

    fn involve(&self, x: Vec<C64>) -> PyResult<Vec<C64>> {
        let v = self.inner.involve(&vector(x, self.inner.dim())?).map_err(err)?;
        Ok(v.iter().copied().collect())
    }

    fn check_axioms<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.check_axioms())
    }

    fn center_dim(&self) -> usize {
        algebra::center(&self.inner, &tol()).dim()
    }

    /// Characters of a commutative algebra, as functionals on the basis.
    fn characters(&self) -> PyResult<Vec<Vec<C64>>> {
        let chars = algebra::characters(&self.inner, &tol()).map_err(err)?;
        Ok(chars.iter().map(|c| c.functional.iter().copied().collect()).collect())
    }

    /// Tangent and cotangent dimensions at a character, and whether the
    /// pairing between them is perfect.
    fn duality<'py>(&self, py: Python<'py>, character: Vec<C64>) -> PyResult<Bound<'py, PyAny>> {
        let s = Character::new(vector(character, self.inner.dim())?);
        to_py(py, &check_duality(&self.inner, &s, &tol()).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Algebra({:?}, dim={})", self.inner.name(), self.inner.dim())
    }
}

type Terms<T> = Vec<(Vec<u32>, T)>;

/// Product of two truncated power series with coefficients in `coeff`.
#[pyfunction]
fn series_mul(coeff: &PyAlgebra, m: usize, order: u32, x: Terms<Vec<C64>>, y: Terms<Vec<C64>>) -> PyResult<Terms<Vec<C64>>> {
    let space = SeriesSpace::new(coeff.inner.clone(), m, order, Mode::Series).map_err(err)?;
    let d = coeff.inner.dim();
    let build = |ts: Terms<Vec<C64>>| -> PyResult<_> {
        let pairs = ts
            .into_iter()
            .map(|(k, c)| Ok((MultiIndex::new(k), vector(c, d)?)))
            .collect::<PyResult<Vec<_>>>()?;
        space.from_coeffs(pairs).map_err(err)
    };
    let p = build(x)?.mul(&build(y)?).map_err(err)?;
    Ok(p.coeffs()
        .into_iter()
        .map(|(k, c)| (k.entries().to_vec(), c.iter().copied().collect()))
        .collect())
}

/// Order-`n` jet of a polynomial at `point`: Taylor coefficients, quotient
/// coordinates and the quotient seminorm.
#[pyfunction]
fn jet<'py>(py: Python<'py>, point: Vec<f64>, order: u32, poly: Terms<f64>) -> PyResult<Bound<'py, PyAny>> {
    let m = point.len();
    let f = Poly::from_terms(m, poly.into_iter().map(|(k, c)| (MultiIndex::new(k), c))).map_err(err)?;
    let js = space_for(&f, &point, order, &tol()).map_err(err)?;
    let d = PyDict::new(py);
    let indices: Vec<Vec<u32>> = IndexTable::new(m, order).iter().map(|k| k.entries().to_vec()).collect();
    d.set_item("indices", indices)?;
    d.set_item("taylor", js.jet_taylor(&f).coords)?;
    d.set_item("quotient", js.jet_linear(&f).map_err(err)?.coords)?;
    d.set_item("seminorm", js.seminorm(&f).map_err(err)?)?;
    d.set_item("dim", js.dim())?;
    Ok(d.into_any())
}

/// Dimensions of `Z^0 ⊆ ... ⊆ Z^depth` for the inclusion of the span of
/// `basis` into `ambient`.
#[pyfunction]
#[pyo3(signature = (ambient, basis, depth = 2))]
fn ztower<'py>(py: Python<'py>, ambient: &PyAlgebra, basis: Vec<Vec<C64>>, depth: usize) -> PyResult<Bound<'py, PyAny>> {
    let d = ambient.inner.dim();
    let vs = basis.into_iter().map(|b| vector(b, d)).collect::<PyResult<Vec<_>>>()?;
    let (_, inc) = algebra::subalgebra(&ambient.inner, &vs, &tol()).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("dims", z_tower(&inc, depth, &tol()).dims())?;
    out.set_item("report", to_py(py, &check_stabilization(&inc, false, &tol()).map_err(err)?)?)?;
    Ok(out.into_any())
}

/// Envelope verdict for generator expressions on a sampled box.
#[pyfunction]
#[pyo3(signature = (generators, bounds, grid = 201, jet_order = None))]
fn envelope<'py>(
    py: Python<'py>,
    generators: Vec<String>,
    bounds: Vec<[f64; 2]>,
    grid: usize,
    jet_order: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let gens = generators.iter().map(|s| Expr::parse(s)).collect::<diffalg::Result<Vec<_>>>().map_err(err)?;
    let sample = Sample::new(bounds, grid).map_err(err)?;
    let opts = EnvelopeOptions {
        jet_order,
        ..EnvelopeOptions::default()
    };
    to_py(py, &envelope_verdict(&gens, &sample, &opts, &tol()).map_err(err)?)
}

/// Section map over the center and every proper central subalgebra.
#[pyfunction]
#[pyo3(signature = (f, seed = 1))]
fn dauns_hofmann<'py>(py: Python<'py>, f: &PyAlgebra, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let subs = central_subalgebras(&f.inner, &tol()).map_err(err)?;
    let reports = subs
        .iter()
        .map(|b| dauns_hofmann_check(&f.inner, b, 10, seed, &tol()))
        .collect::<diffalg::Result<Vec<_>>>()
        .map_err(err)?;
    to_py(py, &reports)
}

/// Convolution and involution laws for a group such as `"Z4xZ2"`.
#[pyfunction]
#[pyo3(signature = (group, seed = 1))]
fn fourier<'py>(py: Python<'py>, group: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let g = FiniteAbelianGroup::parse(group).map_err(err)?;
    to_py(py, &fourier_check(&g, 20, seed, &tol()).map_err(err)?)
}

/// The invariant suite; one dict per criterion.
#[pyfunction]
#[pyo3(signature = (seed = 1, instances = None))]
fn run_selftest<'py>(py: Python<'py>, seed: u64, instances: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = selftest::Config {
        seed,
        instances,
        tol: tol(),
    };
    to_py(py, &selftest::run_all(&cfg))
}

/// Run the command-line front end with `args` (without the program name)
/// and return its exit code.
#[pyfunction]
fn cli(args: Vec<String>) -> i32 {
    diffalg::cli::main_with_args(std::iter::once("diffalg".to_string()).chain(args))
}

#[pymodule]
fn diffalg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DiffalgError", m.py().get_type::<DiffalgError>())?;
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(series_mul, m)?)?;
    m.add_function(wrap_pyfunction!(jet, m)?)?;
    m.add_function(wrap_pyfunction!(ztower, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(dauns_hofmann, m)?)?;
    m.add_function(wrap_pyfunction!(fourier, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
