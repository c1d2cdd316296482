//! Python bindings: `import qvp`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use qvp_core::bounds::assemble_box;
use qvp_core::driver::DEFAULT_MAX_SCALARIZATIONS;
use qvp_core::report::{from_json, to_json, write_csv};
use qvp_core::{verify_wes, Direction, OracleSettings, QvpProblem, Selection, SolveOptions, SolveResult, SolverSettings};

create_exception!(qvp, QvpError, PyException);

fn err(e: qvp_core::QvpError) -> PyErr {
    QvpError::new_err(e.to_string())
}

fn settings(tol_scalar: f64, tol_feas: f64) -> SolverSettings {
    SolverSettings {
        oracle: OracleSettings {
            tol_feas,
            ..OracleSettings::default()
        },
        tol_scalar,
    }
}

fn direction(d: Option<Vec<f64>>) -> PyResult<Option<Direction>> {
    d.map(Direction::new).transpose().map_err(err)
}

#[pyclass(name = "Problem", frozen)]
struct PyProblem {
    inner: QvpProblem,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    #[pyo3(signature = (path, tol_feas = 1e-7))]
    fn from_path(path: std::path::PathBuf, tol_feas: f64) -> PyResult<Self> {
        let oracle = settings(1e-6, tol_feas).oracle;
        QvpProblem::from_path(path, &oracle).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, tol_feas = 1e-7))]
    fn from_json(text: &str, tol_feas: f64) -> PyResult<Self> {
        let oracle = settings(1e-6, tol_feas).oracle;
        QvpProblem::from_json_str(text, &oracle).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }

    #[getter]
    fn num_variables(&self) -> usize {
        self.inner.num_variables()
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.evaluate(&x).map_err(err)
    }

    /// Largest constraint violation at `x`; zero when feasible.
    fn violation(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.feasible_set().violation(&x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(objectives={}, variables={})",
            self.inner.num_objectives(),
            self.inner.num_variables()
        )
    }
}

#[pyclass(name = "Result", frozen)]
struct PySolveResult {
    inner: SolveResult,
}

type WeakTriple = (Vec<f64>, Vec<f64>, Vec<f64>);

#[pymethods]
impl PySolveResult {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn direction(&self) -> Vec<f64> {
        self.inner.direction.as_slice().to_vec()
    }

    /// `(m, M)`.
    #[getter]
    fn outcome_box(&self) -> (Vec<f64>, Vec<f64>) {
        (self.inner.outcome_box.lower.clone(), self.inner.outcome_box.upper.clone())
    }

    #[getter]
    fn v_eps(&self) -> Vec<Vec<f64>> {
        self.inner.v_eps.clone()
    }

    /// `(w, f, x)` per weakly nondominated point.
    #[getter]
    fn y_wn(&self) -> Vec<WeakTriple> {
        self.inner
            .y_wn
            .iter()
            .map(|e| (e.w.clone(), e.f.clone(), e.x.clone()))
            .collect()
    }

    #[getter]
    fn final_gap(&self) -> f64 {
        self.inner.final_gap
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn scalarizations(&self) -> usize {
        self.inner.scalarizations
    }

    #[getter]
    fn wall_time_s(&self) -> f64 {
        self.inner.wall_time_s
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    fn write_csv(&self, dir: std::path::PathBuf) -> PyResult<()> {
        write_csv(&self.inner, dir).map_err(|e| QvpError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Result(epsilon={}, y_wn={}, v_eps={}, final_gap={:.6})",
            self.inner.epsilon,
            self.inner.y_wn.len(),
            self.inner.v_eps.len(),
            self.inner.final_gap
        )
    }
}

#[pyfunction]
#[pyo3(signature = (
    problem, epsilon, direction = None, selection = "fifo", workers = 1,
    tol_scalar = 1e-6, tol_feas = 1e-7, max_scalarizations = DEFAULT_MAX_SCALARIZATIONS,
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    problem: &PyProblem,
    epsilon: f64,
    direction: Option<Vec<f64>>,
    selection: &str,
    workers: usize,
    tol_scalar: f64,
    tol_feas: f64,
    max_scalarizations: usize,
) -> PyResult<PySolveResult> {
    let selection = match selection {
        "fifo" => Selection::Fifo,
        "max_gap" | "max-gap" => Selection::MaxGap,
        other => return Err(QvpError::new_err(format!("unknown selection {other:?}"))),
    };
    if !(epsilon > 0.0) || workers == 0 {
        return Err(QvpError::new_err("epsilon must be positive and workers at least 1"));
    }
    let options = SolveOptions {
        epsilon,
        direction: self::direction(direction)?,
        selection,
        workers,
        settings: settings(tol_scalar, tol_feas),
        max_scalarizations,
    };
    let inner = py
        .detach(|| qvp_core::solve(&problem.inner, &options))
        .map_err(err)?;
    Ok(PySolveResult { inner })
}

/// `(weakly_efficient, t)` for a feasible decision point.
#[pyfunction]
#[pyo3(signature = (problem, x, direction = None, tol_scalar = 1e-6, tol_feas = 1e-7))]
fn verify(
    problem: &PyProblem,
    x: Vec<f64>,
    direction: Option<Vec<f64>>,
    tol_scalar: f64,
    tol_feas: f64,
) -> PyResult<(bool, f64)> {
    let p = &problem.inner;
    let d = self::direction(direction)?
        .or_else(|| p.direction().cloned())
        .unwrap_or_else(|| Direction::ones(p.num_objectives()));
    let v = verify_wes(p, &x, &d, &settings(tol_scalar, tol_feas)).map_err(err)?;
    Ok((v.weakly_efficient, v.t))
}

/// `(m, M)` of the outcome box, with file values taking precedence.
#[pyfunction]
#[pyo3(signature = (problem, tol_feas = 1e-7))]
fn bounds(problem: &PyProblem, tol_feas: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let b = assemble_box(&problem.inner, &settings(1e-6, tol_feas).oracle).map_err(err)?;
    Ok((b.lower, b.upper))
}

#[pymodule]
fn qvp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add("QvpError", m.py().get_type::<QvpError>())?;
    Ok(())
}
