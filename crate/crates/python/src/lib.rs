//! Python bindings: graphs, training, noise injection and metrics.

use ndarray::Array2;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rdsa_core::metrics::{self, ClusterScores};
use rdsa_core::modularity::AuxMode;
use rdsa_core::noise::{NoiseLevel, NoiseSpec};
use rdsa_core::synthetic::SyntheticSpec;
use rdsa_core::train::{self, EpochLog, TrainOutcome};
use rdsa_core::{io, modularity, noise, synthetic, TrainError};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>, what: &str) -> PyResult<Array2<f64>> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(PyValueError::new_err(format!("{what} rows differ in length")));
    }
    let n = rows.len();
    Array2::from_shape_vec((n, width), rows.into_iter().flatten().collect()).map_err(value_err)
}

fn rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn scores_dict<'py>(py: Python<'py>, s: &ClusterScores) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("acc", s.acc)?;
    d.set_item("nmi", s.nmi)?;
    d.set_item("ari", s.ari)?;
    d.set_item("f1", s.f1)?;
    Ok(d)
}

/// Attributed undirected graph with optional ground-truth labels.
#[pyclass(name = "Graph", module = "rdsa", skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraph {
    inner: rdsa_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (num_clusters, edges, features, labels=None, name="graph"))]
    fn new(
        num_clusters: usize,
        edges: Vec<(usize, usize)>,
        features: Vec<Vec<f64>>,
        labels: Option<Vec<usize>>,
        name: &str,
    ) -> PyResult<Self> {
        let x = matrix(features, "features")?;
        let inner = rdsa_core::Graph::new(name, x.nrows(), num_clusters, edges, x, labels).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Reads a dataset directory (edges.txt, features.csv, meta.json and
    /// optionally labels.txt).
    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        Ok(Self { inner: io::load_graph(dir).map_err(value_err)? })
    }

    fn save(&self, dir: &str) -> PyResult<()> {
        io::save_graph(&self.inner, dir).map_err(value_err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn num_clusters(&self) -> usize {
        self.inner.num_clusters()
    }

    #[getter]
    fn num_features(&self) -> usize {
        self.inner.num_features()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<usize>> {
        self.inner.labels().map(<[usize]>::to_vec)
    }

    /// Copy with level I, II or III cross-class noise edges added.
    #[pyo3(signature = (level, seed=0))]
    fn with_noise(&self, level: &str, seed: u64) -> PyResult<Self> {
        let level: NoiseLevel = level.parse().map_err(PyValueError::new_err)?;
        let inner = noise::inject_noise(&self.inner, NoiseSpec::new(level, seed)).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Soft modularity of a node-by-cluster assignment matrix.
    fn modularity(&self, assignment: Vec<Vec<f64>>) -> PyResult<f64> {
        let c = matrix(assignment, "assignment")?;
        modularity::modularity(&self.inner, &c).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(name={:?}, nodes={}, edges={}, clusters={}, features={})",
            self.inner.name(),
            self.inner.num_nodes(),
            self.inner.num_edges(),
            self.inner.num_clusters(),
            self.inner.num_features()
        )
    }
}

/// Training hyperparameters; defaults match the command-line tool.
#[pyclass(name = "TrainConfig", module = "rdsa", skip_from_py_object)]
#[derive(Clone)]
pub struct PyTrainConfig {
    inner: train::TrainConfig,
}

#[pymethods]
impl PyTrainConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut cfg = Self { inner: train::TrainConfig::default() };
        if let Some(kwargs) = kwargs {
            let obj = Bound::new(kwargs.py(), cfg.clone())?;
            for (key, value) in kwargs.iter() {
                obj.as_any().setattr(key.extract::<String>()?.as_str(), value)?;
            }
            cfg = obj.borrow().clone();
        }
        Ok(cfg)
    }

    #[getter]
    fn get_epochs(&self) -> usize {
        self.inner.epochs
    }
    #[setter]
    fn set_epochs(&mut self, v: usize) {
        self.inner.epochs = v;
    }

    #[getter]
    fn get_learning_rate(&self) -> f64 {
        self.inner.learning_rate
    }
    #[setter]
    fn set_learning_rate(&mut self, v: f64) {
        self.inner.learning_rate = v;
    }

    #[getter]
    fn get_sigma(&self) -> f64 {
        self.inner.sigma
    }
    #[setter]
    fn set_sigma(&mut self, v: f64) {
        self.inner.sigma = v;
    }

    #[getter]
    fn get_alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[setter]
    fn set_alpha(&mut self, v: f64) {
        self.inner.alpha = v;
    }

    #[getter]
    fn get_nu(&self) -> f64 {
        self.inner.nu
    }
    #[setter]
    fn set_nu(&mut self, v: f64) {
        self.inner.nu = v;
    }

    #[getter]
    fn get_seed(&self) -> u64 {
        self.inner.seed
    }
    #[setter]
    fn set_seed(&mut self, v: u64) {
        self.inner.seed = v;
    }

    #[getter]
    fn get_batch_size(&self) -> Option<usize> {
        self.inner.batch_size
    }
    #[setter]
    fn set_batch_size(&mut self, v: Option<usize>) {
        self.inner.batch_size = v;
    }

    #[getter]
    fn get_hidden_dims(&self) -> Vec<usize> {
        self.inner.hidden_dims.clone()
    }
    #[setter]
    fn set_hidden_dims(&mut self, v: Vec<usize>) {
        self.inner.hidden_dims = v;
    }

    /// `labels:F`, `central` or `none`.
    #[getter]
    fn get_aux(&self) -> String {
        self.inner.aux_mode.to_string()
    }
    #[setter]
    fn set_aux(&mut self, v: &str) -> PyResult<()> {
        self.inner.aux_mode = v.parse::<AuxMode>().map_err(value_err)?;
        Ok(())
    }

    /// `none`, `l1` or `l2`.
    #[getter]
    fn get_feature_norm(&self) -> String {
        format!("{:?}", self.inner.feature_norm).to_lowercase()
    }
    #[setter]
    fn set_feature_norm(&mut self, v: &str) -> PyResult<()> {
        self.inner.feature_norm = v.parse().map_err(value_err)?;
        Ok(())
    }

    /// `sum`, `batchmean` or `mean`.
    #[getter]
    fn get_attr_reduction(&self) -> String {
        format!("{:?}", self.inner.attr_reduction).to_lowercase()
    }
    #[setter]
    fn set_attr_reduction(&mut self, v: &str) -> PyResult<()> {
        self.inner.attr_reduction = v.parse().map_err(value_err)?;
        Ok(())
    }

    #[getter]
    fn get_track_metrics(&self) -> bool {
        self.inner.track_metrics
    }
    #[setter]
    fn set_track_metrics(&mut self, v: bool) {
        self.inner.track_metrics = v;
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    fn __repr__(&self) -> String {
        format!("TrainConfig({})", self.to_json())
    }
}

/// Result of a training run.
#[pyclass(name = "TrainResult", module = "rdsa")]
pub struct PyTrainResult {
    outcome: TrainOutcome,
}

fn epoch_dict<'py>(py: Python<'py>, log: &EpochLog) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("epoch", log.epoch)?;
    d.set_item("res", log.losses.res)?;
    d.set_item("struct", log.losses.structure)?;
    d.set_item("attr", log.losses.attr)?;
    d.set_item("total", log.losses.total)?;
    d.set_item("modularity", log.losses.modularity)?;
    d.set_item("clusters_used", log.clusters_used)?;
    match &log.metrics {
        Some(m) => d.set_item("metrics", scores_dict(py, m)?)?,
        None => d.set_item("metrics", py.None())?,
    }
    Ok(d)
}

#[pymethods]
impl PyTrainResult {
    /// Final cluster label per node.
    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.outcome.labels.clone()
    }

    #[getter]
    fn embeddings(&self) -> Vec<Vec<f64>> {
        rows(&self.outcome.state.h)
    }

    /// Node-to-landmark soft assignment `W`.
    #[getter]
    fn assignment(&self) -> Vec<Vec<f64>> {
        rows(&self.outcome.assignment.w)
    }

    #[getter]
    fn landmarks(&self) -> Vec<usize> {
        self.outcome.landmarks.node_ids.clone()
    }

    #[getter]
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        self.outcome.metrics.as_ref().map(|m| scores_dict(py, m)).transpose()
    }

    #[getter]
    fn history<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.outcome.history.iter().map(|l| epoch_dict(py, l)).collect()
    }

    /// Writes history, checkpoint, predictions, embeddings and summary.
    #[pyo3(signature = (dir, dataset, config))]
    fn save(&self, dir: &str, dataset: &str, config: &PyTrainConfig) -> PyResult<()> {
        rdsa_core::experiment::save_run(dir, dataset, &config.inner, &self.outcome).map_err(value_err)
    }
}

fn train_err(e: TrainError) -> PyErr {
    match e {
        TrainError::NonFiniteLoss { .. } | TrainError::Embed(_) | TrainError::Struct(_) | TrainError::Assign(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => value_err(e),
    }
}

/// Trains on `graph` and returns the final assignment.
#[pyfunction]
#[pyo3(signature = (graph, config=None))]
fn fit(py: Python<'_>, graph: &PyGraph, config: Option<&PyTrainConfig>) -> PyResult<PyTrainResult> {
    let cfg = config.map_or_else(train::TrainConfig::default, |c| c.inner.clone());
    let g = &graph.inner;
    let outcome = py.detach(|| train::train(g, &cfg)).map_err(train_err)?;
    Ok(PyTrainResult { outcome })
}

/// ACC, NMI, ARI and macro-F1 of `pred` against `truth`.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, truth: Vec<usize>, pred: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let s = metrics::evaluate(&truth, &pred).map_err(value_err)?;
    scores_dict(py, &s)
}

#[pyfunction]
fn accuracy(truth: Vec<usize>, pred: Vec<usize>) -> PyResult<f64> {
    metrics::accuracy(&truth, &pred).map_err(value_err)
}

#[pyfunction]
fn nmi(truth: Vec<usize>, pred: Vec<usize>) -> PyResult<f64> {
    metrics::nmi(&truth, &pred).map_err(value_err)
}

#[pyfunction]
fn ari(truth: Vec<usize>, pred: Vec<usize>) -> PyResult<f64> {
    metrics::ari(&truth, &pred).map_err(value_err)
}

#[pyfunction]
fn macro_f1(truth: Vec<usize>, pred: Vec<usize>) -> PyResult<f64> {
    metrics::macro_f1(&truth, &pred).map_err(value_err)
}

/// Planted-partition graph with bag-of-words features.
#[pyfunction]
#[pyo3(signature = (num_nodes=600, num_clusters=4, num_features=200, avg_degree=4.0, homophily=0.85, seed=0))]
fn planted_partition(
    num_nodes: usize,
    num_clusters: usize,
    num_features: usize,
    avg_degree: f64,
    homophily: f64,
    seed: u64,
) -> PyResult<PyGraph> {
    let spec = SyntheticSpec {
        num_nodes,
        num_clusters,
        num_features,
        avg_degree,
        homophily,
        seed,
        ..SyntheticSpec::default()
    };
    Ok(PyGraph { inner: synthetic::generate(&spec).map_err(value_err)? })
}

#[pymodule]
fn rdsa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyTrainConfig>()?;
    m.add_class::<PyTrainResult>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(ari, m)?)?;
    m.add_function(wrap_pyfunction!(macro_f1, m)?)?;
    m.add_function(wrap_pyfunction!(planted_partition, m)?)?;
    Ok(())
}
