//! Python bindings: network instances, the percentile solvers, the
//! reduction oracle and the self-check suites.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use slqp_core::bench::{run_algorithm, verify as run_verify, Suite};
use slqp_core::fractional::{solve_parallel_lqp, solve_parallel_slqp, AlgorithmKind, MmOptions};
use slqp_core::hardness::{brute_force_binary_optimum, build_instance, expected_optimum, ComponentGraph};
use slqp_core::network::{self, generate_cellular, random_powers, NetworkConfig, ParallelChannelInstance};
use slqp_core::percentile;
use slqp_core::solver::{self, BarrierOptions};

fn err(e: slqp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Per-user gains, noise power and power cap of an interference network.
#[pyclass(name = "NetworkInstance", module = "slqp", frozen, skip_from_py_object)]
struct PyNetworkInstance {
    inner: network::NetworkInstance,
}

#[pymethods]
impl PyNetworkInstance {
    /// `gains[j][k]` is the gain from transmitter `j` to receiver `k`.
    #[new]
    fn new(gains: Vec<Vec<f64>>, sigma2: f64, pmax: f64) -> PyResult<Self> {
        let inner = network::NetworkInstance::from_rows(&gains, sigma2, pmax).map_err(err)?;
        Ok(Self { inner })
    }

    /// Draw a hexagonal multicell network.
    #[staticmethod]
    #[pyo3(signature = (cells = 7, users_per_cell = 8, pmax_dbm = 43.0, seed = 0))]
    fn cellular(cells: usize, users_per_cell: usize, pmax_dbm: f64, seed: u64) -> PyResult<Self> {
        let cfg = NetworkConfig {
            cells,
            users_per_cell,
            pmax_dbm,
            seed,
            ..Default::default()
        };
        Ok(Self {
            inner: generate_cellular(&cfg).map_err(err)?,
        })
    }

    /// The reduction instance of a connected component graph (0-based edges).
    #[staticmethod]
    fn from_graph(k: usize, kq: usize, l: f64, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let g = ComponentGraph::new(k, kq, l, &edges).map_err(err)?;
        Ok(Self {
            inner: build_instance(&g).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: network::NetworkInstance::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[getter]
    fn users(&self) -> usize {
        self.inner.users()
    }

    #[getter]
    fn pmax(&self) -> f64 {
        self.inner.pmax()
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2()
    }

    fn gain(&self, j: usize, k: usize) -> PyResult<f64> {
        let n = self.inner.users();
        if j >= n || k >= n {
            return Err(PyValueError::new_err(format!("index out of range for {n} users")));
        }
        Ok(self.inner.gain(j, k))
    }

    /// Rates in nats per user at powers `p`.
    fn rates(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        network::rates(&self.inner, &p).map_err(err)
    }

    fn random_powers(&self, seed: u64) -> Vec<f64> {
        random_powers(self.inner.users(), self.inner.pmax(), seed)
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    fn __repr__(&self) -> String {
        format!("NetworkInstance(users={}, pmax={})", self.inner.users(), self.inner.pmax())
    }
}

/// Outcome of one solver run.
#[pyclass(name = "Solution", module = "slqp", frozen, get_all)]
struct PySolution {
    algorithm: String,
    kq: usize,
    value: f64,
    powers: Vec<f64>,
    outer_iters: usize,
    trace: Vec<f64>,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(algorithm={}, kq={}, value={:.6}, outer_iters={})",
            self.algorithm, self.kq, self.value, self.outer_iters
        )
    }
}

#[pyfunction]
fn percentile_number(users: usize, q: f64) -> PyResult<usize> {
    percentile::percentile_number(users, q).map_err(err)
}

/// Sum of the `kq` smallest entries.
#[pyfunction]
#[pyo3(name = "slqp")]
fn sum_smallest(x: Vec<f64>, kq: usize) -> PyResult<f64> {
    percentile::slqp(&x, kq).map_err(err)
}

/// Sum of the `kq` largest entries.
#[pyfunction]
fn sgqp(x: Vec<f64>, kq: usize) -> PyResult<f64> {
    percentile::sgqp(&x, kq).map_err(err)
}

/// Maximize the sum of the `Kq` smallest rates with one algorithm
/// (`qft`, `lft`, `sga`, `cwsr`, `random`, `sumrate`) from seeded random powers,
/// or from `init` when given.
#[pyfunction]
#[pyo3(signature = (instance, q, algorithm = "qft", seed = 0, max_outer = 100, tol = 1e-6, init = None))]
fn solve(
    instance: &PyNetworkInstance,
    q: f64,
    algorithm: &str,
    seed: u64,
    max_outer: usize,
    tol: f64,
    init: Option<Vec<f64>>,
) -> PyResult<PySolution> {
    let inst = &instance.inner;
    let kind: AlgorithmKind = algorithm.parse().map_err(err)?;
    let kq = percentile::percentile_number(inst.users(), q).map_err(err)?;
    let opts = MmOptions {
        max_outer,
        tol,
        ..Default::default()
    };
    opts.validate().map_err(err)?;
    let init = init.unwrap_or_else(|| random_powers(inst.users(), inst.pmax(), seed));
    inst.check_feasible(&init).map_err(err)?;
    let out = run_algorithm(kind, inst, kq, &init, &opts).map_err(err)?;
    Ok(PySolution {
        algorithm: kind.name().to_string(),
        kq,
        value: out.value,
        trace: out.trace.map(|t| t.objectives()).unwrap_or_else(|| vec![out.value]),
        outer_iters: out.outer_iters,
        powers: out.p,
    })
}

/// Global optimum over parallel channels with noise `z` and total power
/// `p_total`. Returns `(powers, value)`, powers in the order of `z`.
#[pyfunction]
#[pyo3(signature = (z, p_total, kq, single_percentile = false))]
fn solve_parallel(z: Vec<f64>, p_total: f64, kq: usize, single_percentile: bool) -> PyResult<(Vec<f64>, f64)> {
    let inst = ParallelChannelInstance::new(z, p_total).map_err(err)?;
    let res = if single_percentile {
        solve_parallel_lqp(&inst, kq)
    } else {
        solve_parallel_slqp(&inst, kq, &BarrierOptions::default())
    }
    .map_err(err)?;
    let mut p = vec![0.0; inst.users()];
    for (slot, &orig) in inst.original_index().iter().enumerate() {
        p[orig] = res.p_star[slot];
    }
    Ok((p, res.value))
}

#[pyfunction]
fn water_fill(z: Vec<f64>, p_total: f64) -> PyResult<Vec<f64>> {
    solver::water_fill(&z, p_total).map_err(err)
}

/// `(brute-force optimum, |I|·ln(1 + 1/L))` for a component graph.
#[pyfunction]
fn hardness_optimum(k: usize, kq: usize, l: f64, edges: Vec<(usize, usize)>) -> PyResult<(f64, f64)> {
    let g = ComponentGraph::new(k, kq, l, &edges).map_err(err)?;
    let inst = build_instance(&g).map_err(err)?;
    let (_, best) = brute_force_binary_optimum(&inst, kq).map_err(err)?;
    Ok((best, expected_optimum(&g).map_err(err)?))
}

/// Run a self-check suite; returns `(passed, report)`.
#[pyfunction]
fn verify(suite: &str) -> PyResult<(bool, String)> {
    let suite: Suite = suite.parse().map_err(err)?;
    let report = run_verify(suite).map_err(err)?;
    Ok((report.passed(), report.to_string()))
}

#[pymodule]
#[pyo3(name = "slqp")]
fn slqp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkInstance>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(percentile_number, m)?)?;
    m.add_function(wrap_pyfunction!(sum_smallest, m)?)?;
    m.add_function(wrap_pyfunction!(sgqp, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_parallel, m)?)?;
    m.add_function(wrap_pyfunction!(water_fill, m)?)?;
    m.add_function(wrap_pyfunction!(hardness_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
