//! Python bindings: presets are given as strings like `"sparse(5)"`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use levyspec::cli::config::parse_preset;
use levyspec::ensembles::{build_entry_law, sample_matrix};
use levyspec::error::Error;
use levyspec::linalg::sym_eigenvalues;
use levyspec::moments::{count_colored_trees, lsd_moment};
use levyspec::rde::{solve_rde, RdeParams};
use levyspec::LevyCharacteristics;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Config(_) | Error::Format(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn preset(name: &str) -> PyResult<LevyCharacteristics> {
    parse_preset(name).map_err(to_py)
}

/// Eigenvalues of one sampled `n × n` matrix, ascending.
#[pyfunction]
fn eigenvalues(preset_name: &str, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let law = build_entry_law(&preset(preset_name)?, n, None).map_err(to_py)?;
    sym_eigenvalues(&sample_matrix(&law, seed).matrix).map_err(to_py)
}

/// Exact `∫ x^(2p)` of the limiting law; `inf` when it diverges.
#[pyfunction]
fn limit_moment(preset_name: &str, p: usize) -> PyResult<f64> {
    Ok(lsd_moment(&preset(preset_name)?, p).map_err(to_py)?.value())
}

#[pyfunction]
fn colored_trees(profile: Vec<usize>) -> PyResult<u64> {
    count_colored_trees(&profile).map_err(to_py)
}

/// Population-mean root resolvent at `z`.
#[pyfunction]
#[pyo3(signature = (preset_name, z, seed, pop_size=2000, sweeps=40))]
fn resolvent(preset_name: &str, z: Complex64, seed: u64, pop_size: usize, sweeps: usize) -> PyResult<Complex64> {
    let params = RdeParams {
        pop_size,
        sweeps,
        ..RdeParams::default()
    };
    Ok(solve_rde(&preset(preset_name)?, z, params, seed).map_err(to_py)?.mean())
}

/// Runs the command-line tool in-process and returns its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    levyspec::cli::main_with_args(std::iter::once("levyspec".to_string()).chain(args))
}

#[pymodule]
fn levyspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(limit_moment, m)?)?;
    m.add_function(wrap_pyfunction!(colored_trees, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
