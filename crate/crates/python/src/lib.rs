//! Python bindings. Reports come back as plain dicts built from the same
//! JSON the CLI writes.

use lab::comparator::{self, ProbeInputs, ProbeMode};
use lab::data::{self, SelbergDatum};
use lab::ef::{self, EFParams};
use lab::fourier::{self, FourierPair};
use lab::{lfunc, runner, zeros, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) | Error::BadCharacter { .. } | Error::Unsupported(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = lab::report::to_json_string(value).map_err(py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// An L-function datum built from a name such as `zeta`, `chi3`, `chi5_1` or `zeta*chi3`.
#[pyclass(frozen, module = "ef_lab")]
struct Datum {
    inner: SelbergDatum,
}

#[pymethods]
impl Datum {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        data::parse_datum(name, None).map(|inner| Datum { inner }).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn degree(&self) -> f64 {
        self.inner.degree()
    }

    #[getter]
    fn pole_order(&self) -> u32 {
        self.inner.pole_order()
    }

    #[getter]
    fn conductor_scale(&self) -> f64 {
        self.inner.conductor_scale()
    }

    #[getter]
    fn root_number(&self) -> Complex64 {
        self.inner.root_number()
    }

    fn a(&self, n: u64) -> Complex64 {
        self.inner.a(n)
    }

    fn b_lambda(&self, n: u64) -> Complex64 {
        self.inner.b_lambda(n)
    }

    fn value(&self, s: Complex64) -> PyResult<Complex64> {
        lfunc::l_value(&self.inner, s).map_err(py_err)
    }

    fn fe_residual(&self, s: Complex64) -> PyResult<f64> {
        lfunc::functional_equation_residual(&self.inner, s).map_err(py_err)
    }

    fn z(&self, t: f64) -> PyResult<f64> {
        zeros::rotated_real_form(&self.inner, t).map_err(py_err)
    }

    fn conjugate(&self) -> Datum {
        Datum { inner: self.inner.conjugate() }
    }

    fn __mul__(&self, other: &Datum) -> Datum {
        Datum { inner: data::make_product(&self.inner, &other.inner) }
    }

    fn __repr__(&self) -> String {
        format!("Datum('{}')", self.inner.name())
    }
}

/// A test-function pair (h, g), from `sinc:X1,X2,..` or `ingham:N,alpha,M`.
#[pyclass(frozen, module = "ef_lab")]
struct Pair {
    inner: FourierPair,
}

#[pymethods]
impl Pair {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        fourier::parse_pair(spec).map(|inner| Pair { inner }).map_err(py_err)
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn support_halfwidth(&self) -> f64 {
        self.inner.support_halfwidth
    }

    fn h(&self, s: Complex64) -> Complex64 {
        self.inner.h(s)
    }

    fn g(&self, x: f64) -> PyResult<f64> {
        self.inner.g(x).map_err(py_err)
    }

    fn envelope(&self, y: f64) -> f64 {
        self.inner.envelope(y)
    }

    fn __repr__(&self) -> String {
        format!("Pair('{}')", self.inner.label())
    }
}

/// Certified zeros of a datum up to a height.
#[pyclass(frozen, module = "ef_lab")]
struct Zeros {
    inner: zeros::ZeroList,
}

#[pymethods]
impl Zeros {
    #[getter]
    fn ordinates(&self) -> Vec<f64> {
        self.inner.ordinates.clone()
    }

    #[getter]
    fn conjugate_ordinates(&self) -> Option<Vec<f64>> {
        (!self.inner.self_conjugate).then(|| self.inner.conjugate_ordinates.clone())
    }

    #[getter]
    fn t_max(&self) -> f64 {
        self.inner.t_max
    }

    fn __len__(&self) -> usize {
        self.inner.ordinates.len()
    }
}

#[pyfunction]
#[pyo3(signature = (datum, t_max, mesh = None))]
fn scan_zeros(py: Python<'_>, datum: &Datum, t_max: f64, mesh: Option<f64>) -> PyResult<Zeros> {
    let inner = py.detach(|| zeros::scan_zeros(&datum.inner, t_max, mesh)).map_err(py_err)?;
    Ok(Zeros { inner })
}

#[pyfunction]
fn zero_count_check<'py>(py: Python<'py>, datum: &Datum, zeros: &Zeros, t: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = zeros::zero_count_check_with(&datum.inner, &zeros.inner, t).map_err(py_err)?;
    to_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (datum, pair, t, l, zeros = None, zero_height = None))]
fn verify_formula<'py>(
    py: Python<'py>,
    datum: &Datum,
    pair: &Pair,
    t: f64,
    l: f64,
    zeros: Option<&Zeros>,
    zero_height: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let height = zero_height.or(zeros.map(|z| z.inner.t_max)).unwrap_or(2.0 * t.abs() + 100.0);
    let params = EFParams::new(t, l, height);
    let report = py
        .detach(|| match zeros {
            Some(z) => ef::verify_formula_with_zeros(&datum.inner, &z.inner, &pair.inner, &params),
            None => ef::verify_formula(&datum.inner, &pair.inner, &params),
        })
        .map_err(py_err)?;
    to_dict(py, &report)
}

#[pyfunction]
fn arch_term(datum: &Datum, pair: &Pair, t: f64, l: f64) -> PyResult<Complex64> {
    ef::arch_term(&datum.inner, &pair.inner, &EFParams::new(t, l, 2.0 * t.abs() + 100.0)).map_err(py_err)
}

#[pyfunction]
fn stirling_h(datum: &Datum, pair: &Pair, t: f64, l: f64) -> PyResult<f64> {
    ef::stirling_h(&datum.inner, &pair.inner, t, l).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (f, g, pair, t, l = None, samples = 64, threshold_factor = 0.5))]
#[allow(clippy::too_many_arguments)]
fn degree_test<'py>(
    py: Python<'py>,
    f: &Datum,
    g: &Datum,
    pair: &Pair,
    t: f64,
    l: Option<f64>,
    samples: usize,
    threshold_factor: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let l = l.unwrap_or(t.ln());
    let r = py
        .detach(|| comparator::degree_test(&f.inner, &g.inner, &pair.inner, t, l, samples, threshold_factor))
        .map_err(py_err)?;
    to_dict(py, &r)
}

/// Recover a_F(m) − a_G(m) from the explicit formula. `mode` is
/// "coefficients" or "zeros"; zeros mode scans both data to 2T + 100.
#[pyfunction]
#[pyo3(signature = (f, g, m, t, l, w = 4.0, pair = None, mode = "zeros", masked = true, n_quad = 1))]
#[allow(clippy::too_many_arguments)]
fn probe<'py>(
    py: Python<'py>,
    f: &Datum,
    g: &Datum,
    m: u64,
    t: f64,
    l: f64,
    w: f64,
    pair: Option<&Pair>,
    mode: &str,
    masked: bool,
    n_quad: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match mode {
        "coefficients" => ProbeMode::Coefficients,
        "zeros" => ProbeMode::Zeros,
        other => return Err(PyValueError::new_err(format!("unknown probe mode `{other}`"))),
    };
    let default_pair;
    let pair = match pair {
        Some(p) => &p.inner,
        None => {
            default_pair = fourier::sinc_product_pair(&[1.0, 1.0]).map_err(py_err)?;
            &default_pair
        }
    };
    let result = py.detach(|| {
        let height = 2.0 * t + 100.0;
        let zl = if mode == ProbeMode::Zeros || masked {
            Some((zeros::scan_zeros(&f.inner, height, None)?, zeros::scan_zeros(&g.inner, height, None)?))
        } else {
            None
        };
        let inputs = ProbeInputs { pair, zeros: zl.as_ref().map(|(a, b)| (a, b)), mode, masked, n_quad };
        comparator::coefficient_probe(&f.inner, &g.inner, m, t, l, w, &inputs)
    });
    to_dict(py, &result.map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (f, g, pair, t, l, n_quad = 4))]
fn mean_value_check<'py>(
    py: Python<'py>,
    f: &Datum,
    g: &Datum,
    pair: &Pair,
    t: f64,
    l: f64,
    n_quad: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| comparator::mean_value_check(&f.inner, &g.inner, &pair.inner, t, l, n_quad))
        .map_err(py_err)?;
    to_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (pair, t_min = 10.0, t_max = 1000.0, per_decade = 64))]
fn verify_decay<'py>(
    py: Python<'py>,
    pair: &Pair,
    t_min: f64,
    t_max: f64,
    per_decade: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = fourier::verify_decay(&pair.inner, &fourier::log_grid(t_min, t_max, per_decade)).map_err(py_err)?;
    to_dict(py, &r)
}

/// Thinness of an exceptional prime set given as `finite:2,3,5` or `residue:1:4`.
#[pyfunction]
#[pyo3(signature = (set, x_max = 1e6, delta = 0.1, ceiling = None))]
fn check_thinness<'py>(
    py: Python<'py>,
    set: &str,
    x_max: f64,
    delta: f64,
    ceiling: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let set = runner::parse_exceptional_set(set).map_err(py_err)?;
    let r = py
        .detach(|| data::check_exceptional_thinness(&set, x_max, delta, ceiling))
        .map_err(py_err)?;
    to_dict(py, &r)
}

#[pymodule]
#[pyo3(name = "ef_lab")]
fn ef_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Datum>()?;
    m.add_class::<Pair>()?;
    m.add_class::<Zeros>()?;
    m.add_function(wrap_pyfunction!(scan_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(zero_count_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_formula, m)?)?;
    m.add_function(wrap_pyfunction!(arch_term, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_h, m)?)?;
    m.add_function(wrap_pyfunction!(degree_test, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(mean_value_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decay, m)?)?;
    m.add_function(wrap_pyfunction!(check_thinness, m)?)?;
    Ok(())
}
