//! Python bindings: parameter types, the single-point physics operations and
//! the sweep/figure CSV generators.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qi::cli::config::parse_config;
use qi::cli::figures::figure_table;
use qi::cli::sweep::run_sweep;
use qi::detection::{self, ErrorModel};
use qi::{dynamics, gaussian, spectra};

create_exception!(qi_opa, PhysicsError, PyValueError, "Parameter point outside the physical domain.");
create_exception!(qi_opa, NumericError, PyRuntimeError, "Failure of the numerical linear algebra.");

fn to_py(e: qi::Error) -> PyErr {
    if e.is_numeric_failure() {
        NumericError::new_err(e.to_string())
    } else {
        PhysicsError::new_err(e.to_string())
    }
}

fn error_model(name: &str) -> PyResult<ErrorModel> {
    name.parse().map_err(PyValueError::new_err)
}

/// Physical inputs; every frequency in rad/s. Defaults are the reference point.
#[pyclass(name = "PhysicalParams", get_all, set_all, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyPhysicalParams {
    omega_m: f64,
    omega_w: f64,
    lambda_o: f64,
    q_m: f64,
    kappa_w: f64,
    kappa_o: f64,
    delta_w: f64,
    delta_o: f64,
    g_w: f64,
    g_o: f64,
    power_w: f64,
    power_o: f64,
    opa_gain: f64,
    opa_phase: f64,
    temperature: f64,
}

impl From<qi::PhysicalParams> for PyPhysicalParams {
    fn from(p: qi::PhysicalParams) -> Self {
        Self {
            omega_m: p.omega_m,
            omega_w: p.omega_w,
            lambda_o: p.lambda_o,
            q_m: p.q_m,
            kappa_w: p.kappa_w,
            kappa_o: p.kappa_o,
            delta_w: p.delta_w,
            delta_o: p.delta_o,
            g_w: p.g_w,
            g_o: p.g_o,
            power_w: p.power_w,
            power_o: p.power_o,
            opa_gain: p.opa_gain,
            opa_phase: p.opa_phase,
            temperature: p.temperature,
        }
    }
}

impl From<PyPhysicalParams> for qi::PhysicalParams {
    fn from(p: PyPhysicalParams) -> Self {
        Self {
            omega_m: p.omega_m,
            omega_w: p.omega_w,
            lambda_o: p.lambda_o,
            q_m: p.q_m,
            kappa_w: p.kappa_w,
            kappa_o: p.kappa_o,
            delta_w: p.delta_w,
            delta_o: p.delta_o,
            g_w: p.g_w,
            g_o: p.g_o,
            power_w: p.power_w,
            power_o: p.power_o,
            opa_gain: p.opa_gain,
            opa_phase: p.opa_phase,
            temperature: p.temperature,
        }
    }
}

#[pymethods]
impl PyPhysicalParams {
    /// Keyword arguments override the reference values; `opa_gain_over_kappa_o`
    /// is a convenience for the usual `G / kappa_o` ratio.
    #[new]
    #[pyo3(signature = (*, opa_gain_over_kappa_o=None, **overrides))]
    fn new(opa_gain_over_kappa_o: Option<f64>, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Self::from(qi::PhysicalParams::default());
        if let Some(kw) = overrides {
            let this = Bound::new(kw.py(), p)?;
            for (key, value) in kw.iter() {
                let name: String = key.extract()?;
                if !FIELDS.contains(&name.as_str()) {
                    return Err(PyValueError::new_err(format!("unknown parameter `{name}`")));
                }
                this.setattr(name.as_str(), value)?;
            }
            p = *this.borrow();
        }
        if let Some(ratio) = opa_gain_over_kappa_o {
            p.opa_gain = ratio * p.kappa_o;
        }
        Ok(p)
    }

    /// Checked copy with the OPA phase reduced to `[0, 2pi)`.
    fn validated(&self) -> PyResult<Self> {
        qi::PhysicalParams::from(*self).validated().map(Self::from).map_err(to_py)
    }

    fn omega_o(&self) -> f64 {
        qi::PhysicalParams::from(*self).omega_o()
    }

    fn gamma_m(&self) -> f64 {
        qi::PhysicalParams::from(*self).gamma_m()
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysicalParams(omega_m={}, opa_gain={}, opa_phase={}, temperature={}, kappa_w={}, kappa_o={})",
            self.omega_m, self.opa_gain, self.opa_phase, self.temperature, self.kappa_w, self.kappa_o
        )
    }
}

const FIELDS: [&str; 15] = [
    "omega_m", "omega_w", "lambda_o", "q_m", "kappa_w", "kappa_o", "delta_w", "delta_o", "g_w", "g_o",
    "power_w", "power_o", "opa_gain", "opa_phase", "temperature",
];

#[pyclass(name = "ScenarioParams", get_all, set_all, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyScenarioParams {
    eta: f64,
    mode_pairs: u64,
    n_background: f64,
}

#[pymethods]
impl PyScenarioParams {
    #[new]
    #[pyo3(signature = (eta=0.07, mode_pairs=1_000_000, n_background=610.0))]
    fn new(eta: f64, mode_pairs: u64, n_background: f64) -> PyResult<Self> {
        let s = detection::ScenarioParams { eta, mode_pairs, n_background }
            .validated()
            .map_err(to_py)?;
        Ok(Self {
            eta: s.eta,
            mode_pairs: s.mode_pairs,
            n_background: s.n_background,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "ScenarioParams(eta={}, mode_pairs={}, n_background={})",
            self.eta, self.mode_pairs, self.n_background
        )
    }
}

impl From<PyScenarioParams> for detection::ScenarioParams {
    fn from(s: PyScenarioParams) -> Self {
        Self {
            eta: s.eta,
            mode_pairs: s.mode_pairs,
            n_background: s.n_background,
        }
    }
}

fn prepare(p: &PyPhysicalParams) -> PyResult<(qi::PhysicalParams, qi::DerivedParams)> {
    let p = qi::PhysicalParams::from(*p).validated().map_err(to_py)?;
    let d = qi::derive(&p).map_err(to_py)?;
    Ok((p, d))
}

fn stable_sidebands(p: &PyPhysicalParams, omega: f64) -> PyResult<(spectra::Sidebands, qi::DerivedParams)> {
    let (p, d) = prepare(p)?;
    let report = dynamics::stability(&dynamics::drift_matrix(&p, &d)).map_err(to_py)?;
    if !report.stable {
        return Err(to_py(qi::Error::Unstable {
            max_real_part: report.max_real_part,
        }));
    }
    let sb = spectra::Sidebands::evaluate(&p, &d, omega).map_err(to_py)?;
    Ok((sb, d))
}

/// Steady-state drives, amplitudes, effective couplings and bath occupations.
#[pyfunction]
fn derive<'py>(py: Python<'py>, params: &PyPhysicalParams) -> PyResult<Bound<'py, PyDict>> {
    let (_, d) = prepare(params)?;
    let out = PyDict::new(py);
    out.set_item("drive_w", d.drive_w)?;
    out.set_item("drive_o", d.drive_o)?;
    out.set_item("alpha_w", d.alpha_w)?;
    out.set_item("alpha_o", d.alpha_o)?;
    out.set_item("g_w_eff", d.g_w_eff)?;
    out.set_item("g_o_eff", d.g_o_eff)?;
    out.set_item("n_w", d.thermal.microwave)?;
    out.set_item("n_o", d.thermal.optical)?;
    out.set_item("n_b", d.thermal.mechanical)?;
    Ok(out)
}

/// Drift-matrix spectrum and the stability verdict.
#[pyfunction]
fn stability<'py>(py: Python<'py>, params: &PyPhysicalParams) -> PyResult<Bound<'py, PyDict>> {
    let (p, d) = prepare(params)?;
    let report = dynamics::stability(&dynamics::drift_matrix(&p, &d)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("stable", report.stable)?;
    out.set_item("max_real_part", report.max_real_part)?;
    out.set_item("eigenvalues", report.eigenvalues)?;
    Ok(out)
}

/// Output transfer coefficients `(A, B)` at `omega`; `numeric=True` uses the direct solve.
#[pyfunction]
#[pyo3(signature = (params, omega, numeric=false))]
fn coefficients(params: &PyPhysicalParams, omega: f64, numeric: bool) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
    let (p, d) = prepare(params)?;
    let c = if numeric {
        spectra::transfer_matrix_numeric(&p, &d, omega)
    } else {
        spectra::output_coefficients(&p, &d, omega)
    }
    .map_err(to_py)?;
    Ok((c.a.to_vec(), c.b.to_vec()))
}

/// 4x4 output covariance matrix in the order (X_w, Y_w, X_o, Y_o).
#[pyfunction]
fn covariance_matrix(params: &PyPhysicalParams, omega: f64) -> PyResult<Vec<Vec<f64>>> {
    let (p, d) = prepare(params)?;
    let v = gaussian::covariance_matrix(&p, &d, omega).map_err(to_py)?;
    Ok(v.entries.iter().map(|r| r.to_vec()).collect())
}

#[pyfunction]
fn log_negativity(params: &PyPhysicalParams, omega: f64) -> PyResult<f64> {
    let (sb, d) = stable_sidebands(params, omega)?;
    let v = gaussian::covariance_from_sidebands(&sb, &d.thermal);
    gaussian::log_negativity(&v).map(|e| e.log_negativity).map_err(to_py)
}

/// `n(o|w)`, `n(w|o)` and the transmitted microwave photon number.
#[pyfunction]
fn photon_numbers<'py>(py: Python<'py>, params: &PyPhysicalParams, omega: f64) -> PyResult<Bound<'py, PyDict>> {
    let (sb, d) = stable_sidebands(params, omega)?;
    let n = spectra::photon_numbers(&sb.plus, &d.thermal);
    let out = PyDict::new(py);
    out.set_item("n_o_given_w", n.n_o_given_w)?;
    out.set_item("n_w_given_o", n.n_w_given_o)?;
    out.set_item("n_w_out", n.n_w_out)?;
    Ok(out)
}

/// Receiver statistics under both hypotheses, SNR, error probability and the coherent benchmark.
#[pyfunction]
#[pyo3(signature = (params, scenario, omega, error_model="as-printed"))]
fn detect<'py>(
    py: Python<'py>,
    params: &PyPhysicalParams,
    scenario: &PyScenarioParams,
    omega: f64,
    error_model: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let model = self::error_model(error_model)?;
    let (sb, d) = stable_sidebands(params, omega)?;
    let scenario = detection::ScenarioParams::from(*scenario);
    let stats = detection::detection_from_sidebands(&sb, &d.thermal, &scenario, model).map_err(to_py)?;
    let n_w = spectra::photon_numbers(&sb.plus, &d.thermal).n_w_out;
    let coh = detection::coherent_from_transmitted(n_w, &scenario, model).map_err(to_py)?;
    let out = PyDict::new(py);
    for (label, h) in [("H0", &stats.h0), ("H1", &stats.h1)] {
        out.set_item(format!("N_plus_{label}"), h.n_plus)?;
        out.set_item(format!("N_minus_{label}"), h.n_minus)?;
        out.set_item(format!("var_{label}"), h.variance)?;
        out.set_item(format!("n_reflected_{label}"), h.n_reflected)?;
    }
    out.set_item("n_idler", stats.n_idler)?;
    out.set_item("snr", stats.snr)?;
    out.set_item("p_err", stats.p_err)?;
    out.set_item("log10_p_err", stats.log10_p_err)?;
    out.set_item("snr_coh", coh.snr)?;
    out.set_item("p_coh", coh.p_err)?;
    out.set_item("log10_p_coh", coh.log10_p_err)?;
    Ok(out)
}

/// CSV for a config-file sweep.
#[pyfunction]
#[pyo3(signature = (config="", jobs=0))]
fn sweep(py: Python<'_>, config: &str, jobs: usize) -> PyResult<String> {
    let spec = parse_config(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.detach(|| run_sweep(&spec, jobs, Vec::new()).table.to_csv()))
}

/// CSV dataset for one figure, e.g. `"fig3b"`.
#[pyfunction]
#[pyo3(signature = (name, config="", jobs=0))]
fn figure(py: Python<'_>, name: &str, config: &str, jobs: usize) -> PyResult<String> {
    let spec = parse_config(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.detach(|| figure_table(name, &spec, jobs))
        .map(|d| d.table.to_csv())
        .ok_or_else(|| PyValueError::new_err(format!("unknown figure `{name}`")))
}

#[pymodule]
fn qi_opa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysicalParams>()?;
    m.add_class::<PyScenarioParams>()?;
    m.add("PhysicsError", m.py().get_type::<PhysicsError>())?;
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    m.add_function(wrap_pyfunction!(derive, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(covariance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(photon_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    Ok(())
}
