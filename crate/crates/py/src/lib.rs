//! Python bindings: simulators, solvers and closed forms as plain functions,
//! results as read-only classes.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use hardcore_rsa::analytics;
use hardcore_rsa::classical;
use hardcore_rsa::error::Error;
use hardcore_rsa::ghost::{self, Geometry, GhostMode};
use hardcore_rsa::harness::{self, ExperimentConfig};
use hardcore_rsa::packing2d::{self, Geometry2D};
use hardcore_rsa::recurrence::{self, LimitParams};
use hardcore_rsa::rng::RngStream;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_geometry(s: &str) -> PyResult<Geometry> {
    match s {
        "interval" => Ok(Geometry::Interval),
        "circle" => Ok(Geometry::Circle),
        _ => Err(PyValueError::new_err(format!("unknown geometry `{s}`"))),
    }
}

fn parse_geometry_2d(s: &str) -> PyResult<Geometry2D> {
    match s {
        "boxed" => Ok(Geometry2D::Boxed),
        "torus" => Ok(Geometry2D::Torus),
        _ => Err(PyValueError::new_err(format!("unknown 2D geometry `{s}`"))),
    }
}

/// A finished 1D packing. `rods` holds rod centres.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct Packing {
    pub length: f64,
    pub rods: Vec<f64>,
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub candidates_seen: u64,
}

#[pymethods]
impl Packing {
    #[getter]
    fn rod_count(&self) -> usize {
        self.rods.len()
    }

    fn __len__(&self) -> usize {
        self.rods.len()
    }

    fn __repr__(&self) -> String {
        format!("Packing(length={}, rods={})", self.length, self.rods.len())
    }
}

#[pyfunction]
#[pyo3(signature = (length, seed, substream = 0, mode = "split"))]
fn saturate_classical(length: f64, seed: u64, substream: u64, mode: &str) -> PyResult<Packing> {
    let mut rng = RngStream::new(seed, substream);
    let s = match mode {
        "split" => classical::saturate_split(length, &mut rng),
        "naive" => classical::saturate_naive(length, &mut rng).map_err(to_py)?,
        _ => return Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
    };
    Ok(Packing {
        length,
        rods: s.rods.iter().map(|p| p + 1.0).collect(),
        gaps: s.gaps().iter().map(|g| g.length).collect(),
        max_gap: s.max_gap(classical::BoundaryGaps::Include),
        candidates_seen: s.candidates_seen,
    })
}

#[pyfunction]
#[pyo3(signature = (length, seed, substream = 0, geometry = "interval", mode = "accelerated"))]
fn run_ghost(length: f64, seed: u64, substream: u64, geometry: &str, mode: &str) -> PyResult<Packing> {
    let mut rng = RngStream::new(seed, substream);
    let mode = match mode {
        "naive" => GhostMode::Naive,
        "accelerated" => GhostMode::Accelerated,
        _ => return Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
    };
    let s = match (parse_geometry(geometry)?, mode) {
        (Geometry::Interval, m) => ghost::run_ghost_interval(length, &mut rng, m),
        (Geometry::Circle, GhostMode::Naive) => ghost::run_ghost_circle_naive(length, &mut rng),
        (Geometry::Circle, GhostMode::Accelerated) => ghost::run_ghost_circle(length, &mut rng),
    }
    .map_err(to_py)?;
    Ok(Packing {
        length,
        gaps: s.gaps().iter().map(|g| g.length).collect(),
        max_gap: s.max_gap(),
        candidates_seen: s.candidates_seen,
        rods: s.rods,
    })
}

/// A solved recurrence on a uniform grid.
#[pyclass(frozen, get_all)]
pub struct Table {
    pub name: String,
    pub grid_step: f64,
    pub args: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub est_error: f64,
}

#[pymethods]
impl Table {
    fn value_at(&self, x: f64) -> PyResult<f64> {
        let t = (x - self.args[0]) / self.grid_step;
        let i = t.floor();
        if t < -1e-9 || i as usize >= self.values.len() {
            return Err(PyValueError::new_err(format!("{x} is outside the table")));
        }
        let i = (i.max(0.0) as usize).min(self.values.len() - 1);
        let w = t - i as f64;
        if w.abs() < 1e-9 || i + 1 == self.values.len() {
            return Ok(self.values[i]);
        }
        Ok((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    fn __len__(&self) -> usize {
        self.values.len()
    }
}

impl From<recurrence::RecurrenceTable> for Table {
    fn from(t: recurrence::RecurrenceTable) -> Self {
        Self {
            args: (0..t.len()).map(|i| t.arg(i)).collect(),
            name: t.name,
            grid_step: t.grid_step,
            values: t.values,
            errors: t.errors,
            est_error: t.est_error,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (tolerance = 1e-6))]
fn renyi_alpha(tolerance: f64) -> PyResult<f64> {
    Ok(recurrence::renyi_alpha(tolerance).map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (l_max, h = 0.01))]
fn solve_density(l_max: f64, h: f64) -> PyResult<Table> {
    Ok(recurrence::solve_density(l_max, h).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (r, l_max, h = 0.01))]
fn solve_gap_expectation(r: f64, l_max: f64, h: f64) -> PyResult<Table> {
    Ok(recurrence::solve_gap_expectation(r, l_max, h).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (r, l_max, h = 0.01))]
fn solve_second_moment_bound(r: f64, l_max: f64, h: f64) -> PyResult<Table> {
    Ok(recurrence::solve_second_moment_bound(r, l_max, h).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (s_max, h = 0.01))]
fn solve_retention(s_max: f64, h: f64) -> PyResult<Table> {
    Ok(recurrence::solve_retention(s_max, h).map_err(to_py)?.into())
}

/// Returns `(c_r, residual)`.
#[pyfunction]
#[pyo3(signature = (r, l_big = 200.0, h = 0.01))]
fn limit_coefficient_c(r: f64, l_big: f64, h: f64) -> PyResult<(f64, f64)> {
    let c = recurrence::limit_coefficient_c(r, LimitParams { l_big, step: h }).map_err(to_py)?;
    Ok((c.value, c.residual))
}

/// Returns `(h_r table, lambda_r)`.
#[pyfunction]
#[pyo3(signature = (r, l_big = 200.0, h = 0.01))]
fn solve_h_and_lambda(r: f64, l_big: f64, h: f64) -> PyResult<(Table, f64)> {
    let (t, l) = recurrence::solve_h_and_lambda(r, LimitParams { l_big, step: h }).map_err(to_py)?;
    Ok((t.into(), l.value))
}

#[pyfunction]
fn success_prob(t: u64, length: f64) -> PyResult<f64> {
    analytics::success_prob(t, length).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (length, geometry = "interval"))]
fn expected_rods_ghost(length: f64, geometry: &str) -> PyResult<f64> {
    analytics::expected_rods_ghost(length, parse_geometry(geometry)?).map_err(to_py)
}

#[pyfunction]
fn occupancy(x: f64, length: f64) -> PyResult<f64> {
    analytics::occupancy(x, length).map_err(to_py)
}

#[pyfunction]
fn pair_correlation_circle(x: f64) -> PyResult<f64> {
    analytics::pair_correlation_circle(x).map_err(to_py)
}

#[pyclass(frozen)]
pub struct Packing2D {
    #[pyo3(get)]
    pub length: f64,
    #[pyo3(get)]
    pub geometry: String,
    #[pyo3(get)]
    pub centers: Vec<(f64, f64)>,
    #[pyo3(get)]
    pub ghost_count: Option<usize>,
    state: packing2d::Packing2DState,
}

#[pymethods]
impl Packing2D {
    #[getter]
    fn count(&self) -> usize {
        self.centers.len()
    }

    #[getter]
    fn density(&self) -> f64 {
        self.state.density()
    }

    fn largest_empty_square(&self, resolution: f64) -> PyResult<f64> {
        packing2d::largest_empty_square(&self.state, resolution).map_err(to_py)
    }

    fn is_valid(&self) -> bool {
        self.state.is_valid()
    }
}

impl From<packing2d::Packing2DState> for Packing2D {
    fn from(s: packing2d::Packing2DState) -> Self {
        Self {
            length: s.length,
            geometry: match s.geometry {
                Geometry2D::Boxed => "boxed".into(),
                Geometry2D::Torus => "torus".into(),
            },
            centers: s.centers.clone(),
            ghost_count: s.ghost_count,
            state: s,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (length, seed, substream = 0, geometry = "boxed"))]
fn saturate_classical_2d(length: f64, seed: u64, substream: u64, geometry: &str) -> PyResult<Packing2D> {
    let mut rng = RngStream::new(seed, substream);
    packing2d::saturate_classical_2d_in(length, parse_geometry_2d(geometry)?, &mut rng)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (length, seed, substream = 0, geometry = "boxed"))]
fn run_ghost_2d(length: f64, seed: u64, substream: u64, geometry: &str) -> PyResult<Packing2D> {
    let mut rng = RngStream::new(seed, substream);
    packing2d::run_ghost_2d(length, &mut rng, parse_geometry_2d(geometry)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (length, seed, substream = 0))]
fn ghost_then_classical(length: f64, seed: u64, substream: u64) -> PyResult<Packing2D> {
    let mut rng = RngStream::new(seed, substream);
    packing2d::ghost_then_classical(length, &mut rng)
        .map(Into::into)
        .map_err(to_py)
}

#[pyclass(frozen, get_all)]
pub struct Summary {
    pub statistic: String,
    pub length: f64,
    pub mean: f64,
    pub variance: f64,
    pub ci95_half_width: f64,
    pub trials: u64,
    pub master_seed: u64,
}

#[pymethods]
impl Summary {
    fn __repr__(&self) -> String {
        format!(
            "Summary({} at L={}: {} ± {})",
            self.statistic, self.length, self.mean, self.ci95_half_width
        )
    }
}

/// Runs an experiment from TOML text and returns one summary per statistic and length.
#[pyfunction]
fn run_experiment(config_toml: &str) -> PyResult<Vec<Summary>> {
    let cfg = ExperimentConfig::from_toml_str(config_toml).map_err(to_py)?;
    let out = harness::run_experiment(&cfg).map_err(to_py)?;
    Ok(out
        .summaries
        .into_iter()
        .map(|s| Summary {
            statistic: s.statistic,
            length: s.length,
            mean: s.mean,
            variance: s.variance,
            ci95_half_width: s.ci95_half_width,
            trials: s.trials,
            master_seed: s.master_seed,
        })
        .collect())
}

/// Returns `(solver_value, mc_mean, z_score, passed)`.
#[pyfunction]
#[pyo3(signature = (r, length, trials = 100_000, seed = 0))]
fn cross_validate(r: f64, length: f64, trials: u64, seed: u64) -> PyResult<(f64, f64, f64, bool)> {
    let cv = harness::cross_validate(r, length, trials, seed, false).map_err(to_py)?;
    Ok((cv.solver_value, cv.mc_mean, cv.z_score, cv.pass))
}

#[pymodule]
#[pyo3(name = "hardcore_rsa")]
fn hardcore_rsa_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Packing>()?;
    m.add_class::<Table>()?;
    m.add_class::<Packing2D>()?;
    m.add_class::<Summary>()?;
    m.add_function(wrap_pyfunction!(saturate_classical, m)?)?;
    m.add_function(wrap_pyfunction!(run_ghost, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(solve_density, m)?)?;
    m.add_function(wrap_pyfunction!(solve_gap_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(solve_second_moment_bound, m)?)?;
    m.add_function(wrap_pyfunction!(solve_retention, m)?)?;
    m.add_function(wrap_pyfunction!(limit_coefficient_c, m)?)?;
    m.add_function(wrap_pyfunction!(solve_h_and_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(success_prob, m)?)?;
    m.add_function(wrap_pyfunction!(expected_rods_ghost, m)?)?;
    m.add_function(wrap_pyfunction!(occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(pair_correlation_circle, m)?)?;
    m.add_function(wrap_pyfunction!(saturate_classical_2d, m)?)?;
    m.add_function(wrap_pyfunction!(run_ghost_2d, m)?)?;
    m.add_function(wrap_pyfunction!(ghost_then_classical, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    Ok(())
}
