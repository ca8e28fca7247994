//! Python bindings: graphs, exact meeting-time analysis, Monte Carlo batches
//! and the Kesten–McKay tables.

use meetlab::chain::eigendecompose;
use meetlab::graph::{build_torus, count_cycles, gap_check, sample_regular};
use meetlab::montecarlo::{compare_to_limit, sample_meeting};
use meetlab::{mckay, meeting, Error};
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::NumericalFailure { .. }
        | Error::Singularity { .. }
        | Error::SamplingFailure { .. } => PyRuntimeError::new_err(err.to_string()),
        Error::Divergence(_) => PyArithmeticError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for meetlab::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Simple regular graph.
#[pyclass(name = "RegularGraph", module = "meetlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRegularGraph {
    inner: meetlab::RegularGraph,
}

#[pymethods]
impl PyRegularGraph {
    /// Uniform random k-regular graph on n vertices.
    #[staticmethod]
    fn sample(n: usize, k: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: sample_regular(n, k, seed).py()?,
        })
    }

    /// Nearest-neighbour torus of dimension d and side m.
    #[staticmethod]
    fn torus(d: usize, m: usize) -> PyResult<Self> {
        Ok(Self {
            inner: build_torus(d, m).py()?,
        })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: meetlab::RegularGraph::complete(n).py()?,
        })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: meetlab::RegularGraph::cycle(n).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, edges, id = "custom"))]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>, id: &str) -> PyResult<Self> {
        Ok(Self {
            inner: meetlab::RegularGraph::from_edges(n, &edges, id).py()?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id().to_string()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.inner.seed()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn neighbors(&self, x: usize) -> PyResult<Vec<usize>> {
        if x >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {x} out of range")));
        }
        Ok(self.inner.neighbors(x).to_vec())
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// Second-largest and smallest eigenvalue of the walk kernel.
    #[pyo3(signature = (g0 = 0.02))]
    fn gap<'py>(&self, py: Python<'py>, g0: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = gap_check(&self.inner, g0);
        let d = PyDict::new(py);
        d.set_item("lambda2", r.lambda2)?;
        d.set_item("lambda_min", r.lambda_min)?;
        d.set_item("g", r.g)?;
        d.set_item("passes", r.passes)?;
        d.set_item("connected", r.connected)?;
        Ok(d)
    }

    /// Number of cycles of each length up to `r_max`.
    fn census(&self, r_max: usize) -> PyResult<Vec<(usize, u64)>> {
        let census = count_cycles(&self.inner, r_max).py()?;
        Ok(census.counts.into_iter().collect())
    }

    /// Eigenvalues of the walk kernel in descending order.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let kernel = self.inner.kernel().py()?;
        Ok(eigendecompose(&kernel)
            .py()?
            .eigenvalues()
            .iter()
            .copied()
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "RegularGraph(id={:?}, n={}, k={})",
            self.inner.id(),
            self.inner.n(),
            self.inner.k()
        )
    }
}

/// Exact meeting-time analysis of the simple random walk on a graph.
#[pyclass(name = "ExactAnalysis", module = "meetlab", frozen)]
struct PyExactAnalysis {
    inner: meeting::ExactAnalysis,
}

#[pymethods]
impl PyExactAnalysis {
    #[new]
    fn new(graph: &PyRegularGraph) -> PyResult<Self> {
        let kernel = graph.inner.kernel().py()?;
        Ok(Self {
            inner: meeting::ExactAnalysis::new(&kernel).py()?,
        })
    }

    /// E[M] from independent uniform starts.
    fn mean(&self) -> PyResult<f64> {
        Ok(self.inner.mean().py()?.mean.expect("mean populated"))
    }

    /// Matrix of E[M_{x,y}] as nested lists.
    fn mean_matrix(&self) -> PyResult<Vec<Vec<f64>>> {
        let m = self
            .inner
            .mean()
            .py()?
            .mean_matrix
            .expect("mean matrix populated");
        Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    /// E[exp(-lambda M)] and the meeting-place transform.
    fn laplace<'py>(&self, py: Python<'py>, lam: f64) -> PyResult<Bound<'py, PyDict>> {
        let sol = self.inner.laplace(lam).py()?;
        let d = PyDict::new(py);
        d.set_item("lambda", lam)?;
        d.set_item("laplace", sol.laplace)?;
        d.set_item(
            "place_transform",
            sol.place_transform
                .map(|v| v.iter().copied().collect::<Vec<_>>()),
        )?;
        d.set_item(
            "f_lambda",
            sol.f_lambda.map(|v| v.iter().copied().collect::<Vec<_>>()),
        )?;
        Ok(d)
    }

    /// Residuals of the exact identities at `lam`.
    fn residuals<'py>(&self, py: Python<'py>, lam: f64) -> PyResult<Bound<'py, PyDict>> {
        let sol = self.inner.laplace(lam).py()?;
        let prop = self.inner.place_equation(&sol).py()?;
        let d = PyDict::new(py);
        d.set_item("green_identity", self.inner.green_identity(&sol).py()?)?;
        if self.inner.kernel().has_uniform_pi() {
            d.set_item(
                "resolvent_identity",
                self.inner.resolvent_identity(&sol).py()?,
            )?;
        }
        d.set_item("place_equation", prop.equation_residual)?;
        d.set_item("domination_ok", prop.domination_ok)?;
        Ok(d)
    }

    /// Trace-formula value; raises unless the diagonal returns are constant.
    #[pyo3(signature = (lam, depth = 6))]
    fn trace_transform(&self, lam: f64, depth: usize) -> PyResult<f64> {
        self.inner.trace_transform(lam, depth).py()
    }

    /// Gap to the Kesten–McKay tree value at lambda / N.
    fn tree_gap(&self, lam: f64) -> PyResult<f64> {
        Ok(self.inner.tree_gap(lam).py()?.delta)
    }
}

/// Monte Carlo meeting times on one graph.
#[pyclass(name = "SampleBatch", module = "meetlab", frozen)]
struct PySampleBatch {
    inner: meetlab::montecarlo::SampleBatch,
}

#[pymethods]
impl PySampleBatch {
    #[new]
    #[pyo3(signature = (graph, count, seed = 0))]
    fn new(py: Python<'_>, graph: &PyRegularGraph, count: usize, seed: u64) -> PyResult<Self> {
        let g = graph.inner.clone();
        let inner = py.detach(move || sample_meeting(&g, count, seed)).py()?;
        Ok(Self { inner })
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples.clone()
    }

    #[getter]
    fn master_seed(&self) -> u64 {
        self.inner.master_seed
    }

    fn __len__(&self) -> usize {
        self.inner.count()
    }

    /// (estimate, standard error) of E[M].
    fn mean(&self) -> (f64, f64) {
        let e = self.inner.mean();
        (e.value, e.se)
    }

    /// (estimate, standard error) of E[exp(-lambda M)].
    fn laplace(&self, lam: f64) -> (f64, f64) {
        let e = self.inner.laplace(lam);
        (e.value, e.se)
    }

    /// Distances of M/n to the exponential limit law.
    fn compare_to_limit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = compare_to_limit(&self.inner).py()?;
        let d = PyDict::new(py);
        d.set_item("limit_mean", c.limit_mean)?;
        d.set_item("mean_est", c.mean_est)?;
        d.set_item("mean_se", c.mean_se)?;
        d.set_item("moment_ratios", c.moment_ratios)?;
        d.set_item("ks_distance", c.ks_distance)?;
        d.set_item("w1_distance", c.w1_distance)?;
        Ok(d)
    }
}

/// Kesten–McKay density at q.
#[pyfunction]
fn density(k: usize, q: f64) -> f64 {
    mckay::density(k, q)
}

/// Tree return probabilities by exact counting.
#[pyfunction]
#[pyo3(signature = (k, order = 40))]
fn moments_tree_dp(k: usize, order: usize) -> PyResult<Vec<f64>> {
    Ok(mckay::moments_tree_dp(k, order).py()?.moments)
}

/// Tree return probabilities by quadrature against the density.
#[pyfunction]
#[pyo3(signature = (k, order = 40))]
fn moments_quadrature(k: usize, order: usize) -> PyResult<Vec<f64>> {
    Ok(mckay::moments_quadrature(k, order).py()?.moments)
}

/// (exact, partial sums) of the series of tree return probabilities.
#[pyfunction]
#[pyo3(signature = (k, order = 40))]
fn resolvent_sum(k: usize, order: usize) -> PyResult<(f64, Vec<f64>)> {
    let r = mckay::resolvent_sum(k, order).py()?;
    Ok((r.exact, r.partial))
}

/// Limit of E[M]/N on random k-regular graphs.
#[pyfunction]
fn limit_mean(k: usize) -> PyResult<f64> {
    mckay::limit_mean(k).py()
}

#[pymodule]
#[pyo3(name = "meetlab")]
fn meetlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegularGraph>()?;
    m.add_class::<PyExactAnalysis>()?;
    m.add_class::<PySampleBatch>()?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(moments_tree_dp, m)?)?;
    m.add_function(wrap_pyfunction!(moments_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent_sum, m)?)?;
    m.add_function(wrap_pyfunction!(limit_mean, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
