//! Python bindings: instances, spanning trees, double-tree tours, oracles and the lower bound.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use doubletree::bench::{run_single, RunOptions};
use doubletree::hk::DEFAULT_ITERATIONS;
use doubletree::instances::default_cluster_count;
use doubletree::{Depth, Error, Heuristic, Metric, Point, Retention, UpsweepConfig};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Parse { .. } | Error::IndexOutOfRange { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn depth(k: Option<usize>) -> Depth {
    k.map_or(Depth::Unlimited, Depth::Limited)
}

#[pyclass(name = "Instance", module = "doubletree_py", frozen)]
struct PyInstance(doubletree::Instance);

#[pymethods]
impl PyInstance {
    /// Coordinate instance; `rounded` selects TSPLIB `EUC_2D` distances.
    #[staticmethod]
    #[pyo3(signature = (points, rounded = false, name = "points"))]
    fn from_points(points: Vec<(f64, f64)>, rounded: bool, name: &str) -> PyResult<Self> {
        let metric = if rounded { Metric::EuclidRoundedTsplib } else { Metric::EuclidReal };
        let pts = points.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        doubletree::Instance::from_points(name, pts, metric).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (matrix, name = "matrix"))]
    fn from_matrix(matrix: Vec<Vec<f64>>, name: &str) -> PyResult<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        doubletree::Instance::from_matrix(name, n, matrix.concat()).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, side = 1e6))]
    fn uniform(n: usize, seed: u64, side: f64) -> PyResult<Self> {
        doubletree::generate_uniform(n, seed, side).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, side = 1e6, clusters = None))]
    fn clustered(n: usize, seed: u64, side: f64, clusters: Option<usize>) -> PyResult<Self> {
        let c = clusters.unwrap_or_else(|| default_cluster_count(n));
        doubletree::generate_clustered(n, seed, side, c).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_tsplib(text: &str) -> PyResult<Self> {
        doubletree::parse_tsplib(text).map(Self).map_err(to_py)
    }

    fn to_tsplib(&self) -> PyResult<String> {
        doubletree::write_tsplib(&self.0).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Option<Vec<(f64, f64)>> {
        self.0.points().map(|p| p.iter().map(|q| (q.x, q.y)).collect())
    }

    fn dist(&self, a: usize, b: usize) -> PyResult<f64> {
        self.0.distance(a, b).map_err(to_py)
    }

    fn cycle_weight(&self, order: Vec<usize>) -> PyResult<f64> {
        if order.iter().any(|&v| v >= self.0.len()) {
            return Err(PyValueError::new_err("node index out of range"));
        }
        Ok(self.0.cycle_weight(&order))
    }

    fn __repr__(&self) -> String {
        format!("Instance(name={:?}, n={})", self.0.name(), self.0.len())
    }
}

#[pyclass(name = "Tree", module = "doubletree_py", frozen)]
struct PyTree(doubletree::RootedTree);

#[pymethods]
impl PyTree {
    #[new]
    fn new(root: usize, parents: Vec<Option<usize>>) -> PyResult<Self> {
        doubletree::RootedTree::from_parents(root, parents).map(Self).map_err(to_py)
    }

    /// Minimum spanning tree rooted at its lowest-indexed leaf.
    #[staticmethod]
    fn mst(inst: &PyInstance) -> PyResult<Self> {
        let edges = doubletree::minimum_spanning_tree(&inst.0);
        doubletree::root_tree(&edges, inst.0.len()).map(Self).map_err(to_py)
    }

    fn degree_increase(&self, limit: usize) -> PyResult<Self> {
        doubletree::degree_increase(&self.0, limit).map(Self).map_err(to_py)
    }

    #[getter]
    fn root(&self) -> usize {
        self.0.root()
    }

    #[getter]
    fn max_children(&self) -> usize {
        self.0.max_children()
    }

    fn parents(&self) -> Vec<Option<usize>> {
        self.0.parents().to_vec()
    }

    fn children(&self, u: usize) -> PyResult<Vec<usize>> {
        if u >= self.0.len() {
            return Err(PyValueError::new_err("node index out of range"));
        }
        Ok(self.0.children(u).to_vec())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "Tour", module = "doubletree_py", frozen)]
struct PyTour(doubletree::Tour);

#[pymethods]
impl PyTour {
    #[getter]
    fn order(&self) -> Vec<usize> {
        self.0.order.clone()
    }

    #[getter]
    fn weight(&self) -> f64 {
        self.0.weight
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Tour(n={}, weight={})", self.0.len(), self.0.weight)
    }
}

/// Lightest tour conforming to `tree`, with an optional search depth.
#[pyfunction]
#[pyo3(signature = (inst, tree, depth = None))]
fn shortcut(inst: &PyInstance, tree: &PyTree, depth: Option<usize>) -> PyResult<PyTour> {
    let cfg = UpsweepConfig::new(self::depth(depth), Retention::Bipartitions);
    let up = doubletree::upsweep(&inst.0, &tree.0, cfg).map_err(to_py)?;
    doubletree::downsweep(&inst.0, &tree.0, &up).map(PyTour).map_err(to_py)
}

/// Weight of the lightest conforming tour, without rebuilding it.
#[pyfunction]
#[pyo3(signature = (inst, tree, depth = None))]
fn shortcut_weight(inst: &PyInstance, tree: &PyTree, depth: Option<usize>) -> PyResult<f64> {
    let cfg = UpsweepConfig::new(self::depth(depth), Retention::WeightOnly);
    doubletree::upsweep(&inst.0, &tree.0, cfg).map(|r| r.weight).map_err(to_py)
}

/// `DT_{D,k}` end to end; `degree_limit=1, depth=None` is plain DT.
#[pyfunction]
#[pyo3(signature = (inst, degree_limit = 1, depth = None))]
fn solve(inst: &PyInstance, degree_limit: usize, depth: Option<usize>) -> PyResult<PyTour> {
    let h = Heuristic::new(degree_limit, self::depth(depth)).map_err(to_py)?;
    doubletree::solve(&inst.0, h).map(PyTour).map_err(to_py)
}

/// One verified run, returned as a dict with the report columns.
#[pyfunction]
#[pyo3(signature = (inst, degree_limit = 1, depth = None, hk_iterations = DEFAULT_ITERATIONS))]
fn run<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    degree_limit: usize,
    depth: Option<usize>,
    hk_iterations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let h = Heuristic::new(degree_limit, self::depth(depth)).map_err(to_py)?;
    let opts = RunOptions {
        hk_iterations,
        cross_check: false,
    };
    let out = run_single(&inst.0, h, opts, None).map_err(to_py)?;
    let r = &out.record;
    let d = PyDict::new(py);
    d.set_item("instance", &r.instance)?;
    d.set_item("n", r.n)?;
    d.set_item("heuristic", &r.heuristic)?;
    d.set_item("D", r.degree_limit)?;
    d.set_item("k", r.depth.to_string())?;
    d.set_item("mst_weight", r.mst_weight)?;
    d.set_item("tour_weight", r.tour_weight)?;
    d.set_item("hk_bound", r.hk_bound)?;
    d.set_item("excess_pct", r.excess_pct())?;
    d.set_item("wall_time_ms", r.wall_time_ms)?;
    d.set_item("order", out.tour.order.clone())?;
    Ok(d)
}

#[pyfunction]
fn is_conforming(order: Vec<usize>, tree: &PyTree) -> PyResult<bool> {
    let tour = doubletree::Tour { order, weight: 0.0 };
    doubletree::is_conforming(&tour, &tree.0).map_err(to_py)
}

#[pyfunction]
fn enumerate_conforming_min(inst: &PyInstance, tree: &PyTree) -> PyResult<PyTour> {
    doubletree::enumerate_conforming_min(&inst.0, &tree.0)
        .map(PyTour)
        .map_err(to_py)
}

#[pyfunction]
fn brute_force_optimal(inst: &PyInstance) -> PyResult<PyTour> {
    doubletree::brute_force_optimal(&inst.0).map(PyTour).map_err(to_py)
}

#[pyfunction]
fn depth_first_shortcut(inst: &PyInstance, tree: &PyTree) -> PyTour {
    PyTour(doubletree::depth_first_shortcut(&inst.0, &tree.0))
}

#[pyfunction]
#[pyo3(signature = (inst, iterations = DEFAULT_ITERATIONS))]
fn held_karp_lower_bound(inst: &PyInstance, iterations: usize) -> PyResult<f64> {
    doubletree::held_karp_lower_bound(&inst.0, iterations).map_err(to_py)
}

#[pymodule]
fn doubletree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PyTour>()?;
    m.add_function(wrap_pyfunction!(shortcut, m)?)?;
    m.add_function(wrap_pyfunction!(shortcut_weight, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(is_conforming, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_conforming_min, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(depth_first_shortcut, m)?)?;
    m.add_function(wrap_pyfunction!(held_karp_lower_bound, m)?)?;
    Ok(())
}
