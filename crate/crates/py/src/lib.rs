//! Python bindings for the RSA/RWA toolkit. Exposes topologies, traffic
//! generation, the heuristic and exact solvers, validation, LP export,
//! and the benchmark metrics.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rsabench_core::bench;
use rsabench_core::heuristics::Ordering;
use rsabench_core::{
    ga_rwa_solve, load_assignment, msf_solve, save_assignment, to_rwa_demands,
    validate_assignment, GaConfig, MsfConfig, SolveOutcome, SolverLimits, SpectrumGrid, Topology,
    TrafficMatrix,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Topology", from_py_object)]
#[derive(Clone)]
struct PyTopology {
    inner: Topology,
}

#[pymethods]
impl PyTopology {
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyTopology { inner: rsabench_core::builtin_topology(name).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTopology { inner: rsabench_core::load_topology(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.save()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn link_count(&self) -> usize {
        self.inner.link_count()
    }

    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().to_vec()
    }

    /// k shortest paths as lists of link ids.
    fn k_shortest_paths(&self, src: &str, dst: &str, k: usize) -> PyResult<Vec<Vec<usize>>> {
        let s = self.inner.node_id(src).map_err(err)?;
        let d = self.inner.node_id(dst).map_err(err)?;
        let paths = rsabench_core::yen_k_shortest_paths(&self.inner, s, d, k).map_err(err)?;
        Ok(paths.into_iter().map(|p| p.links).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Topology(name={:?}, nodes={}, links={})",
            self.inner.name,
            self.inner.node_count(),
            self.inner.link_count()
        )
    }
}

#[pyclass(name = "TrafficMatrix", from_py_object)]
#[derive(Clone)]
struct PyTrafficMatrix {
    inner: TrafficMatrix,
}

#[pymethods]
impl PyTrafficMatrix {
    #[staticmethod]
    fn generate(
        topo: &PyTopology,
        n_demands: usize,
        slice_min: u32,
        slice_max: u32,
        seed: u64,
    ) -> PyResult<Self> {
        let tm = rsabench_core::generate_traffic(&topo.inner, n_demands, slice_min, slice_max, seed)
            .map_err(err)?;
        Ok(PyTrafficMatrix { inner: tm })
    }

    #[staticmethod]
    fn from_csv(topo: &PyTopology, text: &str) -> PyResult<Self> {
        Ok(PyTrafficMatrix { inner: rsabench_core::load_traffic(&topo.inner, text).map_err(err)? })
    }

    fn to_csv(&self, topo: &PyTopology) -> String {
        rsabench_core::save_traffic(&topo.inner, &self.inner)
    }

    fn to_rwa(&self) -> Self {
        PyTrafficMatrix { inner: to_rwa_demands(&self.inner) }
    }

    /// Demands as (id, src, dst, slices, rate_gbps) tuples.
    fn demands(&self) -> Vec<(usize, usize, usize, u32, f64)> {
        self.inner
            .demands
            .iter()
            .map(|d| (d.id, d.src, d.dst, d.slices, d.rate_gbps))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.demands.len()
    }
}

#[pyclass(name = "Assignment", from_py_object)]
#[derive(Clone)]
struct PyAssignment {
    inner: rsabench_core::SpectrumAssignment,
}

#[pymethods]
impl PyAssignment {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyAssignment { inner: load_assignment(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        save_assignment(&self.inner)
    }

    /// Used-slice count (the optimization objective).
    fn used_slice_count(&self) -> usize {
        self.inner.used_slice_count()
    }

    /// Max-used-index fitness F.
    fn fitness(&self) -> usize {
        self.inner.fitness()
    }

    fn validate(&self, topo: &PyTopology, tm: &PyTrafficMatrix) -> Vec<String> {
        validate_assignment(&topo.inner, &tm.inner, &self.inner)
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }
}

fn outcome_dict<'py>(py: Python<'py>, out: &SolveOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("status", format!("{:?}", out.status))?;
    d.set_item("objective", out.objective)?;
    d.set_item("lower_bound", out.lower_bound)?;
    d.set_item("nodes", out.stats.nodes)?;
    d.set_item("wall_time_s", out.stats.wall_time_s)?;
    d.set_item("truncated", out.stats.truncated)?;
    d.set_item(
        "solution",
        out.solution.as_ref().map(|s| PyAssignment { inner: s.clone() }),
    )?;
    Ok(d)
}

/// Most Slices First heuristic for RSA.
#[pyfunction]
#[pyo3(signature = (topo, tm, k_paths = 3, slot_count = 80))]
fn solve_rsa_msf(
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    k_paths: usize,
    slot_count: usize,
) -> PyResult<PyAssignment> {
    let grid = SpectrumGrid { slot_count, ..SpectrumGrid::rsa_default() };
    let asg = msf_solve(&topo.inner, &tm.inner, &MsfConfig { k_paths, grid }).map_err(err)?;
    Ok(PyAssignment { inner: asg })
}

/// GA-ordered first-fit heuristic for RWA. Returns (assignment, log) where
/// log is a list of (generation, best_fitness) pairs.
#[pyfunction]
#[pyo3(signature = (topo, tm, seed = 0, k_paths = 10, population = 50, generations = 200))]
fn solve_rwa_ga(
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    seed: u64,
    k_paths: usize,
    population: usize,
    generations: usize,
) -> PyResult<(PyAssignment, Vec<(usize, usize)>)> {
    let cfg = GaConfig { seed, k_paths, population, generations, ..GaConfig::default() };
    let (asg, log) =
        ga_rwa_solve(&topo.inner, &to_rwa_demands(&tm.inner), &cfg).map_err(err)?;
    Ok((
        PyAssignment { inner: asg },
        log.into_iter().map(|g| (g.generation, g.best_fitness)).collect(),
    ))
}

/// First-fit RWA with an explicit serving order (list of demand ids).
#[pyfunction]
#[pyo3(signature = (topo, tm, order, k_paths = 10))]
fn solve_rwa_first_fit(
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    order: Vec<usize>,
    k_paths: usize,
) -> PyResult<PyAssignment> {
    let asg = rsabench_core::first_fit_rwa(
        &topo.inner,
        &to_rwa_demands(&tm.inner),
        &Ordering(order),
        k_paths,
        SpectrumGrid::rwa_default(),
    )
    .map_err(err)?;
    Ok(PyAssignment { inner: asg })
}

/// Exact RSA solve; returns an outcome dict.
#[pyfunction]
#[pyo3(signature = (topo, tm, slot_count = 80, time_limit_s = 60.0, path_cap = 1000))]
fn solve_rsa_exact<'py>(
    py: Python<'py>,
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    slot_count: usize,
    time_limit_s: f64,
    path_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = SpectrumGrid { slot_count, ..SpectrumGrid::rsa_default() };
    let limits = SolverLimits { time_limit_s, path_cap, ..SolverLimits::default() };
    let out = rsabench_core::solve_rsa_exact(&topo.inner, &tm.inner, grid, &limits);
    outcome_dict(py, &out)
}

/// Exact RWA solve; returns an outcome dict.
#[pyfunction]
#[pyo3(signature = (topo, tm, time_limit_s = 60.0, path_cap = 1000))]
fn solve_rwa_exact<'py>(
    py: Python<'py>,
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    time_limit_s: f64,
    path_cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let limits = SolverLimits { time_limit_s, path_cap, ..SolverLimits::default() };
    let out = rsabench_core::solve_rwa_exact(&topo.inner, &tm.inner, &limits);
    outcome_dict(py, &out)
}

/// True minimum used-slice count by exhaustive enumeration (tiny instances
/// only). Returns None if infeasible.
#[pyfunction]
#[pyo3(signature = (topo, tm, slot_count = 10))]
fn brute_force_oracle(
    topo: &PyTopology,
    tm: &PyTrafficMatrix,
    slot_count: usize,
) -> PyResult<Option<usize>> {
    let grid = SpectrumGrid { slot_count, ..SpectrumGrid::rsa_default() };
    rsabench_core::brute_force_oracle(&topo.inner, &tm.inner, grid).map_err(err)
}

#[pyfunction]
fn lower_bound(topo: &PyTopology, tm: &PyTrafficMatrix) -> usize {
    rsabench_core::lower_bound(&topo.inner, &tm.inner)
}

/// LP-format MILP model text for the instance.
#[pyfunction]
#[pyo3(signature = (topo, tm, slot_count = 80))]
fn emit_lp(topo: &PyTopology, tm: &PyTrafficMatrix, slot_count: usize) -> String {
    let grid = SpectrumGrid { slot_count, ..SpectrumGrid::rsa_default() };
    rsabench_core::emit_lp(&topo.inner, &tm.inner, grid)
}

#[pyfunction]
fn gap_percent(optimal: usize, heuristic: usize) -> PyResult<f64> {
    bench::gap_percent(optimal, heuristic).map_err(err)
}

#[pyfunction]
fn spectral_saving_percent(rsa_bw_ghz: f64, rwa_bw_ghz: f64) -> f64 {
    bench::spectral_saving_percent(rsa_bw_ghz, rwa_bw_ghz)
}

#[pymodule]
fn rsabench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTopology>()?;
    m.add_class::<PyTrafficMatrix>()?;
    m.add_class::<PyAssignment>()?;
    m.add_function(wrap_pyfunction!(solve_rsa_msf, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rwa_ga, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rwa_first_fit, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rsa_exact, m)?)?;
    m.add_function(wrap_pyfunction!(solve_rwa_exact, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(emit_lp, m)?)?;
    m.add_function(wrap_pyfunction!(gap_percent, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_saving_percent, m)?)?;
    Ok(())
}
