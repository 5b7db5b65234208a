use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use majorana_teleport::config::{RunConfig, DEFAULT_CONFIG};
use majorana_teleport::kitaev::{spectrum as chain_spectrum, ChainKind, ChainSpec, OffsetConvention};
use majorana_teleport::logical::six_braids;
use majorana_teleport::noise::closed_form_gate_fidelity;
use majorana_teleport::report::run_experiment;
use majorana_teleport::teleport::{run_teleport, teleport_fidelity, ExecutionMode, InputState, PostselectPolicy, TeleportProgram};
use majorana_teleport::verify::verify_all;

fn err(e: majorana_teleport::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Levels of a single chain as `(energy, multiplicity)` pairs.
#[pyfunction]
#[pyo3(signature = (n, t = 1.0, kind = "kitaev", shifted = false))]
fn spectrum(n: usize, t: f64, kind: &str, shifted: bool) -> PyResult<Vec<(f64, usize)>> {
    let kind = match kind {
        "kitaev" => ChainKind::Kitaev,
        "trivial" => ChainKind::Trivial,
        _ => return Err(PyValueError::new_err(format!("kind must be kitaev or trivial, got '{kind}'"))),
    };
    let offset = if shifted { OffsetConvention::Shifted } else { OffsetConvention::Raw };
    let spec = ChainSpec::new(n, t, kind, offset).map_err(err)?;
    Ok(chain_spectrum(&spec).map_err(err)?.into_iter().map(|l| (l.energy, l.multiplicity)).collect())
}

/// `(pair, spin expression, logical gate name)` for the six two-chain braids.
#[pyfunction]
fn braids() -> PyResult<Vec<(String, String, String)>> {
    Ok(six_braids(2)
        .map_err(err)?
        .into_iter()
        .map(|r| {
            let gate = r.gate.map(|g| g.name()).unwrap_or_default();
            (r.name, r.spin, gate)
        })
        .collect())
}

/// Noiseless teleportation fidelity of `alpha|0> + beta|1>`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, postselect = "ns"))]
fn noiseless_fidelity(alpha: Complex64, beta: Complex64, postselect: &str) -> PyResult<f64> {
    let policy = match postselect {
        "ns" => PostselectPolicy::NoSyndrome,
        "es" => PostselectPolicy::ErrorSyndrome,
        _ => return Err(PyValueError::new_err(format!("postselect must be ns or es, got '{postselect}'"))),
    };
    let input = InputState::custom(alpha, beta).map_err(err)?;
    let program = TeleportProgram::compile().map_err(err)?;
    let outcomes = run_teleport(&input, &program.ideal(), ExecutionMode::FeedForward).map_err(err)?;
    teleport_fidelity(&input, &outcomes, policy).map_err(err)
}

#[pyfunction]
fn gate_fidelity(sigma: f64) -> f64 {
    closed_form_gate_fidelity(sigma)
}

#[pyfunction]
fn default_config() -> &'static str {
    DEFAULT_CONFIG
}

/// Runs the Monte Carlo experiment for a JSON config and returns the
/// contents of the three report files keyed by file name.
#[pyfunction]
fn run(py: Python<'_>, config_json: &str) -> PyResult<Vec<(&'static str, String)>> {
    let loaded = RunConfig::parse(config_json).map_err(err)?;
    let r = py.detach(|| run_experiment(&loaded)).map_err(err)?;
    Ok(vec![
        (majorana_teleport::report::FIDELITY_CSV, r.fidelity_csv()),
        (majorana_teleport::report::DENSITY_JSON, r.density_json().map_err(err)?),
        (majorana_teleport::report::SUMMARY_JSON, r.summary_json().map_err(err)?),
    ])
}

/// `(group, name, passed, detail)` for every symbolic identity check.
#[pyfunction]
fn verify() -> PyResult<Vec<(String, String, bool, String)>> {
    Ok(verify_all()
        .map_err(err)?
        .checks
        .into_iter()
        .map(|c| (c.group.to_string(), c.name, c.passed, c.detail))
        .collect())
}

#[pymodule]
fn majorana_teleport_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(braids, m)?)?;
    m.add_function(wrap_pyfunction!(noiseless_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(gate_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
