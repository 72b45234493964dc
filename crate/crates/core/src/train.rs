//! Joint optimization of reconstruction, structural and node-based losses.
//!
//! Each epoch runs a forward pass, derives `C`, refreshes modules and
//! landmarks, computes `W` and its sharpened target, evaluates
//! `L = L_res + L_struct + L_attr` and takes one Adam step per batch.
//! Without a batch size the whole graph is one batch.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{self, EmbeddingState, EncoderConfig, GraphInput, Params};
use crate::error::TrainError;
use crate::graph::Graph;
use crate::landmark::{self, LandmarkSet};
use crate::metrics::{self, ClusterScores};
use crate::modularity::{self, AuxMode, AuxSubset};

const AUX_SEED_SALT: u64 = 0x5eed_a0c5;
const BATCH_SEED_SALT: u64 = 0xba7c_4e55;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub nu: f64,
    pub seed: u64,
    pub batch_size: Option<usize>,
    pub aux_mode: AuxMode,
    pub hidden_dims: Vec<usize>,
    pub feature_norm: FeatureNorm,
    pub attr_reduction: KlReduction,
    /// Score every epoch against ground truth when the graph has labels.
    pub track_metrics: bool,
}

/// How the entrywise KL terms of the node-based loss are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KlReduction {
    /// Plain sum over nodes and landmarks.
    Sum,
    /// Sum divided by the number of nodes.
    BatchMean,
    /// Sum divided by nodes times landmarks.
    #[default]
    Mean,
}

impl KlReduction {
    pub fn scale(self, rows: usize, cols: usize) -> f64 {
        match self {
            KlReduction::Sum => 1.0,
            KlReduction::BatchMean => 1.0 / rows.max(1) as f64,
            KlReduction::Mean => 1.0 / (rows * cols).max(1) as f64,
        }
    }
}

impl std::str::FromStr for KlReduction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" => Ok(KlReduction::Sum),
            "batchmean" => Ok(KlReduction::BatchMean),
            "mean" => Ok(KlReduction::Mean),
            other => Err(format!("unknown reduction `{other}` (sum, batchmean, mean)")),
        }
    }
}

/// Row scaling applied to node attributes before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureNorm {
    #[default]
    None,
    /// Rows scaled to unit absolute sum.
    L1,
    /// Rows scaled to unit Euclidean norm.
    L2,
}

impl FeatureNorm {
    /// All-zero rows are left as they are.
    pub fn apply(self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = x.clone();
        if self == FeatureNorm::None {
            return out;
        }
        for mut row in out.rows_mut() {
            let norm = match self {
                FeatureNorm::L1 => row.iter().map(|v| v.abs()).sum::<f64>(),
                _ => row.iter().map(|v| v * v).sum::<f64>().sqrt(),
            };
            if norm > 0.0 {
                row /= norm;
            }
        }
        out
    }
}

impl std::str::FromStr for FeatureNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(FeatureNorm::None),
            "l1" => Ok(FeatureNorm::L1),
            "l2" => Ok(FeatureNorm::L2),
            other => Err(format!("unknown feature norm `{other}` (none, l1, l2)")),
        }
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            learning_rate: 1e-3,
            sigma: 0.5,
            alpha: 0.2,
            nu: 1.0,
            seed: 0,
            batch_size: None,
            aux_mode: AuxMode::default(),
            hidden_dims: vec![256, 128, 64],
            feature_norm: FeatureNorm::default(),
            attr_reduction: KlReduction::default(),
            track_metrics: true,
        }
    }
}

impl TrainConfig {
    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig { hidden_dims: self.hidden_dims.clone(), sigma: self.sigma, ..EncoderConfig::default() }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: String| Err(TrainError::InvalidConfig(msg));
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.nu > 0.0) {
            return bad(format!("nu must be positive, got {}", self.nu));
        }
        if self.batch_size == Some(0) {
            return bad("batch size must be positive".into());
        }
        self.encoder().validate()?;
        Ok(())
    }
}

/// Loss values of one epoch (batch means in mini-batch mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub res: f64,
    #[serde(rename = "struct")]
    pub structure: f64,
    pub attr: f64,
    pub total: f64,
    pub modularity: f64,
    pub aux: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub losses: LossParts,
    pub metrics: Option<ClusterScores>,
    /// Number of non-empty predicted clusters.
    pub clusters_used: usize,
    pub dropped_landmarks: usize,
}

/// Node-based soft assignment and its sharpened target.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentPair {
    pub w: Array2<f64>,
    pub w_sharp: Array2<f64>,
    pub nu: f64,
}

/// Final cluster label per node: row argmax of `W`, ties to the lowest
/// landmark.
pub fn extract_clusters(pair: &AssignmentPair) -> Vec<usize> {
    hard_labels(pair.w.view())
}

fn hard_labels(w: ArrayView2<'_, f64>) -> Vec<usize> {
    w.rows().into_iter().map(|r| landmark::argmax(r.iter().copied())).collect()
}

/// Adam with the usual defaults and no weight decay.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: i32,
    first: Params,
    second: Params,
}

impl Adam {
    pub fn new(params: &Params, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            first: params.zeros_like(),
            second: params.zeros_like(),
        }
    }

    pub fn step(&mut self, params: &mut Params, grads: &Params) {
        self.step += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let c1 = 1.0 - b1.powi(self.step);
        let c2 = 1.0 - b2.powi(self.step);
        let lr = self.learning_rate;
        let eps = self.eps;
        for (((p, g), m), v) in params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(self.first.tensors_mut())
            .zip(self.second.tensors_mut())
        {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

/// Everything the losses produce for one batch, with gradients w.r.t. the
/// batch rows of `H` and `X_hat`.
#[derive(Debug, Clone)]
pub struct BatchObjective {
    pub losses: LossParts,
    pub grad_h: Array2<f64>,
    pub grad_x_hat: Array2<f64>,
    pub landmarks: LandmarkSet,
    pub assignment: AssignmentPair,
    pub dropped_landmarks: Vec<usize>,
}

/// Inputs to [`batch_objective`], all restricted to one batch of nodes.
pub struct BatchInputs<'a> {
    pub graph: &'a Graph,
    pub h: ArrayView2<'a, f64>,
    pub x: ArrayView2<'a, f64>,
    pub x_hat: ArrayView2<'a, f64>,
    pub aux: Option<&'a AuxSubset>,
    pub num_landmarks: usize,
    pub alpha: f64,
    pub nu: f64,
    pub attr_reduction: KlReduction,
}

/// Evaluates all three losses on one batch and their gradients.
pub fn batch_objective(inputs: BatchInputs<'_>) -> Result<BatchObjective, TrainError> {
    let BatchInputs { graph, h, x, x_hat, aux, num_landmarks, alpha, nu, attr_reduction } = inputs;

    let res = embed::reconstruction_loss(x, x_hat)?;
    let grad_x_hat = embed::reconstruction_grad(x, x_hat);

    let affinity = modularity::affinity(h);
    let aux = aux.filter(|a| !a.is_empty());
    let (q, grad_c_struct) = if graph.num_edges() > 0 {
        (modularity::modularity(graph, &affinity.c)?, modularity::modularity_grad(graph, &affinity.c)?.mapv(|v| -v))
    } else {
        (0.0, Array2::zeros(affinity.c.raw_dim()))
    };
    let mut grad_c = grad_c_struct;
    let aux_value = match aux {
        Some(a) => {
            if alpha > 0.0 {
                grad_c.scaled_add(alpha, &modularity::aux_grad(&affinity.c, a)?);
            }
            Some(modularity::aux_loss(&affinity.c, a)?)
        }
        None => None,
    };
    let structure = -q + alpha * aux_value.unwrap_or(0.0);
    let mut grad_h = affinity.backward(&grad_c);

    let modules = landmark::extract_modules(affinity.c.view());
    let k = num_landmarks.min(graph.num_nodes()).max(1);
    let landmarks = landmark::select_landmarks(graph, h, &modules, k)?;
    let w = landmark::soft_assign(h, landmarks.u.view(), nu)?;
    let (w_sharp, dropped) = landmark::sharpen_dropping(&w)?;
    if !dropped.is_empty() {
        log::warn!("dropping {} landmark column(s) without mass: {:?}", dropped.len(), dropped);
    }
    let attr_scale = attr_reduction.scale(w.nrows(), w.ncols());
    let attr = attr_scale * landmark::attr_loss(&w, &w_sharp)?;
    let grad_w = landmark::attr_loss_grad(&w, &w_sharp) * attr_scale;
    let (grad_h_attr, grad_u) = landmark::soft_assign_backward(h, landmarks.u.view(), nu, &w, &grad_w);
    grad_h += &grad_h_attr;
    for (slot, &node) in landmarks.node_ids.iter().enumerate() {
        grad_h.row_mut(node).scaled_add(1.0, &grad_u.row(slot));
    }

    let losses = LossParts { res, structure, attr, total: res + structure + attr, modularity: q, aux: aux_value };
    Ok(BatchObjective {
        losses,
        grad_h,
        grad_x_hat,
        landmarks,
        assignment: AssignmentPair { w, w_sharp, nu },
        dropped_landmarks: dropped,
    })
}

/// Result of scoring the current parameters on the full graph.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub state: EmbeddingState,
    pub landmarks: LandmarkSet,
    pub assignment: AssignmentPair,
    pub labels: Vec<usize>,
    pub losses: LossParts,
    pub metrics: Option<ClusterScores>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: Params,
    pub encoder: EncoderConfig,
    pub state: EmbeddingState,
    pub landmarks: LandmarkSet,
    pub assignment: AssignmentPair,
    pub labels: Vec<usize>,
    pub metrics: Option<ClusterScores>,
    pub history: Vec<EpochLog>,
}

/// Stateful training loop; [`train`] drives it to completion.
pub struct Trainer<'g> {
    graph: &'g Graph,
    input: GraphInput,
    cfg: TrainConfig,
    encoder: EncoderConfig,
    params: Params,
    adam: Adam,
    aux: Option<AuxSubset>,
    batch_rng: ChaCha8Rng,
    epoch: usize,
    history: Vec<EpochLog>,
}

impl<'g> Trainer<'g> {
    pub fn new(graph: &'g Graph, cfg: TrainConfig) -> Result<Self, TrainError> {
        cfg.validate()?;
        let encoder = cfg.encoder();
        let input = GraphInput::with_features(graph, cfg.feature_norm.apply(graph.features()));
        let params = Params::init(graph.num_features(), &encoder, cfg.seed)?;
        let adam = Adam::new(&params, cfg.learning_rate);
        let mut trainer = Self {
            graph,
            input,
            encoder,
            params,
            adam,
            aux: None,
            batch_rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ BATCH_SEED_SALT),
            epoch: 0,
            history: Vec::new(),
            cfg,
        };
        trainer.aux = trainer.build_aux()?;
        Ok(trainer)
    }

    fn build_aux(&self) -> Result<Option<AuxSubset>, TrainError> {
        match self.cfg.aux_mode {
            AuxMode::None => Ok(None),
            AuxMode::Labels(fraction) => {
                let labels = self.graph.labels().ok_or(crate::error::GraphError::LabelsRequired)?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ AUX_SEED_SALT);
                Ok(Some(modularity::sample_label_subset(labels, fraction, &mut rng)))
            }
            AuxMode::Central => {
                let (state, _) = embed::forward(&self.input, &self.encoder, &self.params)?;
                Ok(central_aux(self.graph, state.h.view(), self.graph.num_clusters(), 0.1))
            }
        }
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn aux(&self) -> Option<&AuxSubset> {
        self.aux.as_ref()
    }

    pub fn history(&self) -> &[EpochLog] {
        &self.history
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Losses of the current parameters without taking a step, using the
    /// configured batching with a fixed node order.
    pub fn current_losses(&self) -> Result<LossParts, TrainError> {
        let (state, _) = embed::forward(&self.input, &self.encoder, &self.params)?;
        let n = self.graph.num_nodes();
        let nodes: Vec<usize> = (0..n).collect();
        let batch = self.cfg.batch_size.unwrap_or(n).min(n);
        let mut parts = Vec::new();
        for chunk in nodes.chunks(batch) {
            parts.push(self.objective_on(&state, chunk)?.losses);
        }
        Ok(mean_losses(&parts))
    }

    fn objective_on(&self, state: &EmbeddingState, nodes: &[usize]) -> Result<BatchObjective, TrainError> {
        let k = self.graph.num_clusters();
        if nodes.len() == self.graph.num_nodes() {
            return batch_objective(BatchInputs {
                graph: self.graph,
                h: state.h.view(),
                x: self.input.features().view(),
                x_hat: state.x_hat.view(),
                aux: self.aux.as_ref(),
                num_landmarks: k,
                alpha: self.cfg.alpha,
                nu: self.cfg.nu,
                attr_reduction: self.cfg.attr_reduction,
            });
        }
        let sub = self.graph.induced_subgraph(nodes)?;
        let h = state.h.select(Axis(0), nodes);
        let x = self.input.features().select(Axis(0), nodes);
        let x_hat = state.x_hat.select(Axis(0), nodes);
        let aux = self.aux.as_ref().map(|a| a.restrict_to(nodes, self.graph.num_nodes()));
        batch_objective(BatchInputs {
            graph: &sub,
            h: h.view(),
            x: x.view(),
            x_hat: x_hat.view(),
            aux: aux.as_ref(),
            num_landmarks: k,
            alpha: self.cfg.alpha,
            nu: self.cfg.nu,
            attr_reduction: self.cfg.attr_reduction,
        })
    }

    /// Runs one epoch and records its log.
    pub fn step_epoch(&mut self) -> Result<EpochLog, TrainError> {
        let n = self.graph.num_nodes();
        let batches: Vec<Vec<usize>> = match self.cfg.batch_size {
            Some(b) if b < n => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut self.batch_rng);
                order
                    .chunks(b)
                    .map(|c| {
                        let mut c = c.to_vec();
                        c.sort_unstable();
                        c
                    })
                    .collect()
            }
            _ => vec![(0..n).collect()],
        };
        let full_batch = batches.len() == 1;

        let mut parts = Vec::with_capacity(batches.len());
        let mut dropped = 0;
        let mut epoch_labels = None;
        for nodes in &batches {
            let (state, cache) = embed::forward(&self.input, &self.encoder, &self.params)?;
            let objective = self.objective_on(&state, nodes)?;
            if !objective.losses.total.is_finite() {
                return Err(TrainError::NonFiniteLoss { epoch: self.epoch, dump: self.dump(&objective.losses) });
            }
            let (grad_h, grad_x_hat) = if full_batch {
                (objective.grad_h, objective.grad_x_hat)
            } else {
                let mut gh = Array2::zeros(state.h.raw_dim());
                let mut gx = Array2::zeros(state.x_hat.raw_dim());
                for (local, &node) in nodes.iter().enumerate() {
                    gh.row_mut(node).assign(&objective.grad_h.row(local));
                    gx.row_mut(node).assign(&objective.grad_x_hat.row(local));
                }
                (gh, gx)
            };
            let grads = embed::backward(&self.input, &self.encoder, &self.params, &cache, &grad_h, &grad_x_hat);
            self.adam.step(&mut self.params, &grads);
            parts.push(objective.losses);
            dropped += objective.dropped_landmarks.len();
            if full_batch {
                epoch_labels = Some(extract_clusters(&objective.assignment));
            }
        }

        let losses = mean_losses(&parts);
        let want_labels = self.cfg.track_metrics && self.graph.labels().is_some();
        let labels = match epoch_labels {
            Some(l) => Some(l),
            None if want_labels => Some(self.evaluate()?.labels),
            None => None,
        };
        let metrics = match (labels.as_ref(), self.graph.labels()) {
            (Some(pred), Some(truth)) if self.cfg.track_metrics => Some(metrics::evaluate(truth, pred)?),
            _ => None,
        };
        let clusters_used = labels.as_ref().map_or(0, |l| count_distinct(l));
        let log = EpochLog { epoch: self.epoch, losses, metrics, clusters_used, dropped_landmarks: dropped };
        log::debug!(
            "epoch {:>4} total {:.6} res {:.6} struct {:.6} attr {:.6}",
            log.epoch,
            losses.total,
            losses.res,
            losses.structure,
            losses.attr
        );
        self.epoch += 1;
        self.history.push(log.clone());
        Ok(log)
    }

    /// Scores the current parameters on the full graph.
    pub fn evaluate(&self) -> Result<Evaluation, TrainError> {
        let (state, _) = embed::forward(&self.input, &self.encoder, &self.params)?;
        let all: Vec<usize> = (0..self.graph.num_nodes()).collect();
        let objective = self.objective_on(&state, &all)?;
        let labels = extract_clusters(&objective.assignment);
        let metrics = self.graph.labels().map(|truth| metrics::evaluate(truth, &labels)).transpose()?;
        Ok(Evaluation {
            state,
            landmarks: objective.landmarks,
            assignment: objective.assignment,
            labels,
            losses: objective.losses,
            metrics,
        })
    }

    pub fn finish(self) -> Result<TrainOutcome, TrainError> {
        let eval = self.evaluate()?;
        Ok(TrainOutcome {
            params: self.params,
            encoder: self.encoder,
            state: eval.state,
            landmarks: eval.landmarks,
            assignment: eval.assignment,
            labels: eval.labels,
            metrics: eval.metrics,
            history: self.history,
        })
    }

    fn dump(&self, losses: &LossParts) -> String {
        let mut out = format!("losses {losses:?}; param norms:");
        for (info, t) in self.params.tensor_infos().iter().zip(self.params.tensors()) {
            let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
            let _ = write!(out, " {}={norm:.3e}", info.name);
        }
        out
    }
}

fn count_distinct(labels: &[usize]) -> usize {
    let mut v = labels.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn mean_losses(parts: &[LossParts]) -> LossParts {
    if parts.len() == 1 {
        return parts[0];
    }
    let n = parts.len() as f64;
    let mean = |f: fn(&LossParts) -> f64| parts.iter().map(f).sum::<f64>() / n;
    let aux_values: Vec<f64> = parts.iter().filter_map(|p| p.aux).collect();
    let res = mean(|p| p.res);
    let structure = mean(|p| p.structure);
    let attr = mean(|p| p.attr);
    LossParts {
        res,
        structure,
        attr,
        total: res + structure + attr,
        modularity: mean(|p| p.modularity),
        aux: (!aux_values.is_empty()).then(|| aux_values.iter().sum::<f64>() / aux_values.len() as f64),
    }
}

/// Pseudo-labelled subset from module centers: within each of the
/// `num_modules` largest modules of `rownorm(tanh(H)^2)`, the top
/// `ceil(fraction * size)` nodes by intra-module modularity score.
pub fn central_aux(graph: &Graph, h: ArrayView2<'_, f64>, num_modules: usize, fraction: f64) -> Option<AuxSubset> {
    let c = modularity::affinity(h).c;
    let modules = landmark::extract_modules(c.view());
    let scores = modularity::intra_module_scores(graph, &modules.module_of_node).ok()?;
    let mut ids = Vec::new();
    for &(module, size) in modules.modules.iter().take(num_modules.max(1)) {
        let mut members: Vec<usize> = (0..graph.num_nodes()).filter(|&i| modules.module_of_node[i] == module).collect();
        members.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let take = ((fraction * size as f64).ceil() as usize).clamp(1, size);
        ids.extend_from_slice(&members[..take]);
    }
    ids.sort_unstable();
    Some(AuxSubset::from_groups(ids, &modules.module_of_node))
}

/// Trains for `cfg.epochs` epochs and scores the final parameters.
pub fn train(graph: &Graph, cfg: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    let mut trainer = Trainer::new(graph, cfg.clone())?;
    for _ in 0..cfg.epochs {
        trainer.step_epoch()?;
    }
    trainer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn triangles() -> Graph {
        let x = array![[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]];
        let edges = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
        Graph::new("tri", 6, 2, edges, x, Some(vec![0, 0, 0, 1, 1, 1])).unwrap()
    }

    #[test]
    fn extract_cluster_examples() {
        let pair = |w: Array2<f64>| AssignmentPair { w_sharp: w.clone(), w, nu: 1.0 };
        assert_eq!(extract_clusters(&pair(array![[0.0, 1.0], [1.0, 0.0]])), vec![1, 0]);
        assert_eq!(extract_clusters(&pair(array![[2.0 / 3.0, 1.0 / 3.0]])), vec![0]);
        assert_eq!(extract_clusters(&pair(array![[0.25, 0.25, 0.25, 0.25]])), vec![0]);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig { epochs: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { learning_rate: 0.0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { sigma: 2.0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { batch_size: Some(0), ..TrainConfig::default() }.validate().is_err());
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn losses_add_up() {
        let g = triangles();
        let cfg = TrainConfig {
            epochs: 3,
            hidden_dims: vec![8, 4],
            aux_mode: AuxMode::Labels(0.5),
            ..TrainConfig::default()
        };
        let out = train(&g, &cfg).unwrap();
        assert_eq!(out.history.len(), 3);
        for log in &out.history {
            let l = log.losses;
            assert!((l.total - (l.res + l.structure + l.attr)).abs() <= 1e-12);
            assert!(l.total.is_finite());
        }
    }

    #[test]
    fn central_aux_takes_module_centres() {
        let g = triangles();
        let mut h = Array2::zeros((6, 2));
        for i in 0..3 {
            h[[i, 0]] = 2.0;
            h[[i + 3, 1]] = 2.0;
        }
        let aux = central_aux(&g, h.view(), 2, 0.1).unwrap();
        assert_eq!(aux.node_ids, vec![0, 3]);
        assert_eq!(aux.membership, Array2::<f64>::eye(2));
    }

    #[test]
    fn aux_labels_needed() {
        let g = Graph::new("g", 2, 1, vec![(0, 1)], Array2::ones((2, 1)), None).unwrap();
        let cfg = TrainConfig { hidden_dims: vec![2], ..TrainConfig::default() };
        assert!(Trainer::new(&g, cfg).is_err());
    }
}
