//! Python bindings for the platelab library.

use std::sync::Arc;

use platelab::closed_form::{
    ball_mean_deflection as mean_deflection, twoball_abs_load, twoball_constant_load,
    TwoBallConfig, TwoBallSolution,
};
use platelab::compressed_two_ball::{
    compressed_energy as energy_point, disk_buckling_sigma as buckling, estimate_sigma_threshold,
    DEFAULT_A_GRID, DEFAULT_SIGMA_GRID,
};
use platelab::geometry::Space;
use platelab::plate_fd::{parse_corpus, rasterize, solve_plate, GridField, SolveRecord};
use platelab::verify::run_criterion;
use platelab::PlateError;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: PlateError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn space(name: &str, dim: usize) -> PyResult<Space> {
    let curvature = match name.to_ascii_lowercase().as_str() {
        "flat" | "euclidean" => 0,
        "sphere" | "spherical" => 1,
        "hyperbolic" => -1,
        other => return Err(PyValueError::new_err(format!("unknown space '{other}'"))),
    };
    Space::new(curvature, dim).map_err(to_py)
}

fn solution_dict<'py>(
    py: Python<'py>,
    b: f64,
    s: &TwoBallSolution,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("b", b)?;
    d.set_item("c", s.c)?;
    d.set_item("d", s.d)?;
    d.set_item("energy", s.energy)?;
    d.set_item("energy_derivative", s.energy_derivative)?;
    Ok(d)
}

/// Mean deflection of the clamped ball under unit load.
#[pyfunction]
#[pyo3(signature = (radius, space_name = "flat", dim = 2))]
fn ball_mean_deflection(radius: f64, space_name: &str, dim: usize) -> PyResult<f64> {
    mean_deflection(space(space_name, dim)?, radius).map_err(to_py)
}

/// Two-ball solution with constant load as a dict with keys b, c, d, energy, energy_derivative.
#[pyfunction]
#[pyo3(signature = (radius, a, space_name = "flat", dim = 2))]
fn twoball<'py>(
    py: Python<'py>,
    radius: f64,
    a: f64,
    space_name: &str,
    dim: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = TwoBallConfig::new(space(space_name, dim)?, radius, a).map_err(to_py)?;
    let s = twoball_constant_load(&cfg).map_err(to_py)?;
    solution_dict(py, cfg.b, &s)
}

/// Two-ball solution in flat space with the load +1 on the inner ball and −1 outside.
#[pyfunction]
#[pyo3(signature = (radius, a, dim = 2))]
fn twoball_abs<'py>(
    py: Python<'py>,
    radius: f64,
    a: f64,
    dim: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let b = TwoBallConfig::new(Space::flat(dim).map_err(to_py)?, radius, a)
        .map_err(to_py)?
        .b;
    let s = twoball_abs_load(dim, radius, a).map_err(to_py)?;
    solution_dict(py, b, &s)
}

/// Compressed two-ball energy at (a, σ), or None where it is unbounded below.
#[pyfunction]
fn compressed_energy(a: f64, sigma: f64) -> PyResult<Option<f64>> {
    match energy_point(a, sigma) {
        Ok(p) => Ok(Some(p.energy)),
        Err(PlateError::Unbounded { .. }) => Ok(None),
        Err(e) => Err(to_py(e)),
    }
}

/// First buckling value of the unit-area disk.
#[pyfunction]
fn disk_buckling_sigma() -> f64 {
    buckling()
}

/// Estimated tension value where the centred disk stops minimizing the compressed energy.
#[pyfunction]
fn sigma2_estimate() -> PyResult<f64> {
    estimate_sigma_threshold(DEFAULT_A_GRID, DEFAULT_SIGMA_GRID).map_err(to_py)
}

/// Solves the uniformly loaded plate on every shape of a JSON corpus.
#[pyfunction]
#[pyo3(signature = (corpus_json, h = 1.0 / 64.0, sigma = 0.0))]
fn plate_solve<'py>(
    py: Python<'py>,
    corpus_json: &str,
    h: f64,
    sigma: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let specs = parse_corpus(corpus_json).map_err(to_py)?;
    let records = py
        .detach(|| {
            specs
                .iter()
                .map(|spec| {
                    let step = spec.h.unwrap_or(h);
                    let domain = Arc::new(rasterize(spec, step)?);
                    let load = GridField::constant(domain.clone(), 1.0);
                    let (_, report) = solve_plate(&domain, &load, sigma)?;
                    Ok(SolveRecord::new(spec, step, sigma, &report))
                })
                .collect::<platelab::Result<Vec<_>>>()
        })
        .map_err(to_py)?;
    records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("shape", &r.shape)?;
            d.set_item("h", r.h)?;
            d.set_item("sigma", r.sigma)?;
            d.set_item("compliance", r.compliance)?;
            d.set_item("mean_deflection", r.mean_deflection)?;
            d.set_item("energy", r.energy)?;
            d.set_item("residual", r.residual)?;
            d.set_item("iterations", r.iterations)?;
            Ok(d)
        })
        .collect()
}

/// Runs one acceptance criterion and returns its result as a dict.
#[pyfunction]
fn verify_criterion<'py>(py: Python<'py>, id: u8) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| run_criterion(id)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("id", r.id)?;
    d.set_item("name", r.name)?;
    d.set_item("passed", r.passed)?;
    d.set_item("summary", r.summary)?;
    d.set_item("metrics", r.metrics)?;
    Ok(d)
}

#[pymodule]
fn platelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ball_mean_deflection, m)?)?;
    m.add_function(wrap_pyfunction!(twoball, m)?)?;
    m.add_function(wrap_pyfunction!(twoball_abs, m)?)?;
    m.add_function(wrap_pyfunction!(compressed_energy, m)?)?;
    m.add_function(wrap_pyfunction!(disk_buckling_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(sigma2_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(plate_solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_criterion, m)?)?;
    Ok(())
}
