//! Fused attribute/topology encoder.
//!
//! Every layer mixes two paths with a fixed weight `sigma`:
//!
//! ```text
//! z_l = relu(z_{l-1} W_l + b_l)                                  (autoencoder)
//! g_l = selu(h_{l-1} S_l + mean_{v in N(u)} h_{l-1,v} N_l + c_l)  (mean-aggregating graph layer)
//! h_l = sigma * z_l + (1 - sigma) * g_l
//! ```
//!
//! with `z_0 = h_0 = X`. The final `h_L` is the embedding `H`. A decoder
//! mirroring the encoder widths maps `H` back to attribute space. Gradients
//! are derived by hand in [`backward`].

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EmbedError;
use crate::graph::Graph;
use crate::sparse::CsrMatrix;

const SELU_SCALE: f64 = 1.050_700_987_355_480_5;
const SELU_ALPHA: f64 = 1.673_263_242_354_377_3;

/// Inputs sparser than this are multiplied in CSR form.
const SPARSE_INPUT_DENSITY: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Selu,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Selu => {
                if x > 0.0 {
                    SELU_SCALE * x
                } else {
                    SELU_SCALE * SELU_ALPHA * x.exp_m1()
                }
            }
            Activation::Identity => x,
        }
    }

    /// Derivative evaluated at the pre-activation `x`.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Selu => {
                if x > 0.0 {
                    SELU_SCALE
                } else {
                    SELU_SCALE * SELU_ALPHA * x.exp()
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub hidden_dims: Vec<usize>,
    /// Weight of the autoencoder path; `1 - sigma` goes to the graph path.
    pub sigma: f64,
    pub ae_activation: Activation,
    pub gnn_activation: Activation,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            hidden_dims: vec![256, 128, 64],
            sigma: 0.5,
            ae_activation: Activation::Relu,
            gnn_activation: Activation::Selu,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(EmbedError::InvalidConfig(format!("sigma {} outside [0, 1]", self.sigma)));
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            return Err(EmbedError::InvalidConfig("hidden_dims must be non-empty and strictly positive".into()));
        }
        Ok(())
    }

    pub fn embedding_dim(&self) -> usize {
        *self.hidden_dims.last().expect("validated config")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn init(fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (fan_in as f64).sqrt();
        let weight = Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-bound..bound));
        let bias = Array1::from_shape_simple_fn(fan_out, || rng.random_range(-bound..bound));
        Self { weight, bias }
    }

    fn zeros_like(&self) -> Self {
        Self { weight: Array2::zeros(self.weight.raw_dim()), bias: Array1::zeros(self.bias.len()) }
    }
}

/// Mean-aggregator graph layer: separate maps for the node itself and for
/// the mean of its neighbors, sharing one bias.
#[derive(Debug, Clone, PartialEq)]
pub struct SageConv {
    pub self_weight: Array2<f64>,
    pub neigh_weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl SageConv {
    fn init(fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / (fan_in as f64).sqrt();
        let mut draw = || rng.random_range(-bound..bound);
        let self_weight = Array2::from_shape_simple_fn((fan_in, fan_out), &mut draw);
        let neigh_weight = Array2::from_shape_simple_fn((fan_in, fan_out), &mut draw);
        let bias = Array1::from_shape_simple_fn(fan_out, &mut draw);
        Self { self_weight, neigh_weight, bias }
    }

    fn zeros_like(&self) -> Self {
        Self {
            self_weight: Array2::zeros(self.self_weight.raw_dim()),
            neigh_weight: Array2::zeros(self.neigh_weight.raw_dim()),
            bias: Array1::zeros(self.bias.len()),
        }
    }
}

/// All trainable tensors. Gradients and optimizer moments reuse this type.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub encoder: Vec<Dense>,
    pub graph: Vec<SageConv>,
    pub decoder: Vec<Dense>,
}

/// Name and shape of one tensor, in [`Params::tensors`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorInfo {
    pub name: String,
    pub shape: Vec<usize>,
}

impl Params {
    pub fn init(in_dim: usize, cfg: &EncoderConfig, seed: u64) -> Result<Self, EmbedError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = vec![in_dim];
        dims.extend_from_slice(&cfg.hidden_dims);
        let encoder = dims.windows(2).map(|w| Dense::init(w[0], w[1], &mut rng)).collect();
        let graph = dims.windows(2).map(|w| SageConv::init(w[0], w[1], &mut rng)).collect();
        let rev: Vec<usize> = dims.iter().rev().copied().collect();
        let decoder = rev.windows(2).map(|w| Dense::init(w[0], w[1], &mut rng)).collect();
        Ok(Self { encoder, graph, decoder })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            encoder: self.encoder.iter().map(Dense::zeros_like).collect(),
            graph: self.graph.iter().map(SageConv::zeros_like).collect(),
            decoder: self.decoder.iter().map(Dense::zeros_like).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.encoder[0].weight.nrows()
    }

    pub fn tensor_infos(&self) -> Vec<TensorInfo> {
        let mut out = Vec::new();
        let info = |name: String, shape: &[usize]| TensorInfo { name, shape: shape.to_vec() };
        for (l, d) in self.encoder.iter().enumerate() {
            out.push(info(format!("encoder.{l}.weight"), d.weight.shape()));
            out.push(info(format!("encoder.{l}.bias"), d.bias.shape()));
        }
        for (l, s) in self.graph.iter().enumerate() {
            out.push(info(format!("graph.{l}.self_weight"), s.self_weight.shape()));
            out.push(info(format!("graph.{l}.neigh_weight"), s.neigh_weight.shape()));
            out.push(info(format!("graph.{l}.bias"), s.bias.shape()));
        }
        for (l, d) in self.decoder.iter().enumerate() {
            out.push(info(format!("decoder.{l}.weight"), d.weight.shape()));
            out.push(info(format!("decoder.{l}.bias"), d.bias.shape()));
        }
        out
    }

    /// Flat views of every tensor, in [`Params::tensor_infos`] order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for d in &self.encoder {
            out.push(d.weight.as_slice().expect("standard layout"));
            out.push(d.bias.as_slice().expect("standard layout"));
        }
        for s in &self.graph {
            out.push(s.self_weight.as_slice().expect("standard layout"));
            out.push(s.neigh_weight.as_slice().expect("standard layout"));
            out.push(s.bias.as_slice().expect("standard layout"));
        }
        for d in &self.decoder {
            out.push(d.weight.as_slice().expect("standard layout"));
            out.push(d.bias.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for d in &mut self.encoder {
            out.push(d.weight.as_slice_mut().expect("standard layout"));
            out.push(d.bias.as_slice_mut().expect("standard layout"));
        }
        for s in &mut self.graph {
            out.push(s.self_weight.as_slice_mut().expect("standard layout"));
            out.push(s.neigh_weight.as_slice_mut().expect("standard layout"));
            out.push(s.bias.as_slice_mut().expect("standard layout"));
        }
        for d in &mut self.decoder {
            out.push(d.weight.as_slice_mut().expect("standard layout"));
            out.push(d.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

/// Layer-0 input, stored sparse when it is mostly zeros.
#[derive(Debug, Clone)]
enum InputMatrix {
    Dense(Array2<f64>),
    Sparse(CsrMatrix),
}

impl InputMatrix {
    fn new(dense: Array2<f64>) -> Self {
        let sparse = CsrMatrix::from_dense(dense.view());
        if sparse.density() < SPARSE_INPUT_DENSITY {
            InputMatrix::Sparse(sparse)
        } else {
            InputMatrix::Dense(dense)
        }
    }

    fn ncols(&self) -> usize {
        match self {
            InputMatrix::Dense(d) => d.ncols(),
            InputMatrix::Sparse(s) => s.cols(),
        }
    }

    fn dot(&self, w: &Array2<f64>) -> Array2<f64> {
        match self {
            InputMatrix::Dense(d) => d.dot(w),
            InputMatrix::Sparse(s) => s.dot(&w.view()),
        }
    }

    fn t_dot(&self, g: &Array2<f64>) -> Array2<f64> {
        match self {
            InputMatrix::Dense(d) => d.t().dot(g),
            InputMatrix::Sparse(s) => s.t_dot(&g.view()),
        }
    }
}

/// Graph-derived tensors that stay fixed during training.
#[derive(Debug, Clone)]
pub struct GraphInput {
    features: Array2<f64>,
    input: InputMatrix,
    mean_input: InputMatrix,
    mean_adj: CsrMatrix,
}

impl GraphInput {
    pub fn new(graph: &Graph) -> Self {
        Self::with_features(graph, graph.features().clone())
    }

    /// Uses `features` (e.g. a normalized copy) in place of the graph's own.
    pub fn with_features(graph: &Graph, features: Array2<f64>) -> Self {
        let mean_adj = CsrMatrix::mean_adjacency(graph);
        let mean_input = InputMatrix::new(mean_adj.dot(&features.view()));
        let input = InputMatrix::new(features.clone());
        Self { features, input, mean_input, mean_adj }
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn num_nodes(&self) -> usize {
        self.features.nrows()
    }
}

/// Output of a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingState {
    /// Fused node embeddings, `N x r`.
    pub h: Array2<f64>,
    /// Reconstructed attributes, same shape as `X`.
    pub x_hat: Array2<f64>,
}

/// Intermediate activations kept for [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    enc_pre: Vec<Array2<f64>>,
    enc_out: Vec<Array2<f64>>,
    graph_pre: Vec<Array2<f64>>,
    /// Fused outputs `h_1 .. h_L`.
    fused: Vec<Array2<f64>>,
    /// Neighbor means of `h_1 .. h_{L-1}` (inputs of graph layers `2..L`).
    fused_mean: Vec<Array2<f64>>,
    dec_pre: Vec<Array2<f64>>,
    dec_out: Vec<Array2<f64>>,
}

fn add_bias(mut m: Array2<f64>, bias: &Array1<f64>) -> Array2<f64> {
    m += &bias.view().insert_axis(Axis(0));
    m
}

fn activate(pre: &Array2<f64>, act: Activation) -> Array2<f64> {
    pre.mapv(|x| act.apply(x))
}

fn check_params(input: &GraphInput, cfg: &EncoderConfig, params: &Params) -> Result<(), EmbedError> {
    cfg.validate()?;
    let layers = cfg.hidden_dims.len();
    for (what, found) in [
        ("encoder layers", params.encoder.len()),
        ("graph layers", params.graph.len()),
        ("decoder layers", params.decoder.len()),
    ] {
        if found != layers {
            return Err(EmbedError::ShapeMismatch { what: what.into(), expected: layers, found });
        }
    }
    if params.input_dim() != input.input.ncols() {
        return Err(EmbedError::ShapeMismatch {
            what: "feature width".into(),
            expected: params.input_dim(),
            found: input.input.ncols(),
        });
    }
    for (l, &width) in cfg.hidden_dims.iter().enumerate() {
        let found = params.encoder[l].weight.ncols();
        if found != width || params.graph[l].self_weight.ncols() != width {
            return Err(EmbedError::ShapeMismatch { what: format!("layer {l} width"), expected: width, found });
        }
    }
    Ok(())
}

/// Runs encoder and decoder over the whole graph.
pub fn forward(
    input: &GraphInput,
    cfg: &EncoderConfig,
    params: &Params,
) -> Result<(EmbeddingState, ForwardCache), EmbedError> {
    check_params(input, cfg, params)?;
    let sigma = cfg.sigma;
    let layers = cfg.hidden_dims.len();
    let mut cache = ForwardCache {
        enc_pre: Vec::with_capacity(layers),
        enc_out: Vec::with_capacity(layers),
        graph_pre: Vec::with_capacity(layers),
        fused: Vec::with_capacity(layers),
        fused_mean: Vec::with_capacity(layers.saturating_sub(1)),
        dec_pre: Vec::with_capacity(layers),
        dec_out: Vec::with_capacity(layers),
    };

    for l in 0..layers {
        let enc = &params.encoder[l];
        let conv = &params.graph[l];
        let (enc_lin, self_lin, neigh_lin) = if l == 0 {
            (input.input.dot(&enc.weight), input.input.dot(&conv.self_weight), input.mean_input.dot(&conv.neigh_weight))
        } else {
            let prev_h = &cache.fused[l - 1];
            let prev_mean = input.mean_adj.dot(&prev_h.view());
            let out = (
                cache.enc_out[l - 1].dot(&enc.weight),
                prev_h.dot(&conv.self_weight),
                prev_mean.dot(&conv.neigh_weight),
            );
            cache.fused_mean.push(prev_mean);
            out
        };
        let enc_pre = add_bias(enc_lin, &enc.bias);
        let enc_out = activate(&enc_pre, cfg.ae_activation);
        let graph_pre = add_bias(self_lin + neigh_lin, &conv.bias);
        let graph_out = activate(&graph_pre, cfg.gnn_activation);
        let mut fused = enc_out.clone();
        Zip::from(&mut fused).and(&graph_out).for_each(|f, &g| *f = sigma * *f + (1.0 - sigma) * g);
        cache.enc_pre.push(enc_pre);
        cache.enc_out.push(enc_out);
        cache.graph_pre.push(graph_pre);
        cache.fused.push(fused);
    }

    let h = cache.fused[layers - 1].clone();
    let mut current = h.clone();
    for (j, dec) in params.decoder.iter().enumerate() {
        let pre = add_bias(current.dot(&dec.weight), &dec.bias);
        let act = if j + 1 == layers { Activation::Identity } else { cfg.ae_activation };
        current = activate(&pre, act);
        cache.dec_pre.push(pre);
        cache.dec_out.push(current.clone());
    }
    let x_hat = current;
    Ok((EmbeddingState { h, x_hat }, cache))
}

/// Back-propagates `grad_h` (loss gradient w.r.t. `H`) and `grad_x_hat`
/// (w.r.t. the reconstruction) into parameter gradients.
pub fn backward(
    input: &GraphInput,
    cfg: &EncoderConfig,
    params: &Params,
    cache: &ForwardCache,
    grad_h: &Array2<f64>,
    grad_x_hat: &Array2<f64>,
) -> Params {
    let layers = cfg.hidden_dims.len();
    let sigma = cfg.sigma;
    let mut grads = params.zeros_like();

    // decoder
    let mut upstream = grad_x_hat.clone();
    for j in (0..layers).rev() {
        let act = if j + 1 == layers { Activation::Identity } else { cfg.ae_activation };
        let mut g_pre = upstream;
        if act != Activation::Identity {
            Zip::from(&mut g_pre).and(&cache.dec_pre[j]).for_each(|g, &p| *g *= act.derivative(p));
        }
        let dec_in = if j == 0 { &cache.fused[layers - 1] } else { &cache.dec_out[j - 1] };
        grads.decoder[j].weight = dec_in.t().dot(&g_pre);
        grads.decoder[j].bias = g_pre.sum_axis(Axis(0));
        upstream = g_pre.dot(&params.decoder[j].weight.t());
    }

    // encoder, top layer down
    let mut grad_fused = upstream + grad_h;
    let mut grad_enc_stream: Option<Array2<f64>> = None;
    for l in (0..layers).rev() {
        let mut g_enc_pre = grad_fused.mapv(|g| sigma * g);
        if let Some(extra) = grad_enc_stream.take() {
            g_enc_pre += &extra;
        }
        Zip::from(&mut g_enc_pre).and(&cache.enc_pre[l]).for_each(|g, &p| *g *= cfg.ae_activation.derivative(p));

        let mut g_graph_pre = grad_fused.mapv(|g| (1.0 - sigma) * g);
        Zip::from(&mut g_graph_pre).and(&cache.graph_pre[l]).for_each(|g, &p| *g *= cfg.gnn_activation.derivative(p));

        if l == 0 {
            grads.encoder[0].weight = input.input.t_dot(&g_enc_pre);
            grads.graph[0].self_weight = input.input.t_dot(&g_graph_pre);
            grads.graph[0].neigh_weight = input.mean_input.t_dot(&g_graph_pre);
        } else {
            grads.encoder[l].weight = cache.enc_out[l - 1].t().dot(&g_enc_pre);
            grads.graph[l].self_weight = cache.fused[l - 1].t().dot(&g_graph_pre);
            grads.graph[l].neigh_weight = cache.fused_mean[l - 1].t().dot(&g_graph_pre);
        }
        grads.encoder[l].bias = g_enc_pre.sum_axis(Axis(0));
        grads.graph[l].bias = g_graph_pre.sum_axis(Axis(0));

        if l > 0 {
            let conv = &params.graph[l];
            let through_neigh = g_graph_pre.dot(&conv.neigh_weight.t());
            grad_fused = g_graph_pre.dot(&conv.self_weight.t()) + input.mean_adj.t_dot(&through_neigh.view());
            grad_enc_stream = Some(g_enc_pre.dot(&params.encoder[l].weight.t()));
        }
    }
    grads
}

/// `(1 / 2N) * ||X - X_hat||_F^2`.
pub fn reconstruction_loss(x: ArrayView2<'_, f64>, x_hat: ArrayView2<'_, f64>) -> Result<f64, EmbedError> {
    if x.dim() != x_hat.dim() {
        return Err(EmbedError::ShapeMismatch { what: "reconstruction".into(), expected: x.len(), found: x_hat.len() });
    }
    let n = x.nrows().max(1) as f64;
    let sq: f64 = Zip::from(&x).and(&x_hat).fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b));
    Ok(sq / (2.0 * n))
}

/// Gradient of [`reconstruction_loss`] w.r.t. `x_hat`.
pub fn reconstruction_grad(x: ArrayView2<'_, f64>, x_hat: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = x.nrows().max(1) as f64;
    (&x_hat - &x) / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn small_graph() -> Graph {
        let x = array![[1.0, 0.0, 0.5], [0.0, 1.0, -0.5], [0.3, 0.3, 0.0], [2.0, -1.0, 1.0]];
        Graph::new("s", 4, 2, vec![(0, 1), (1, 2)], x, None).unwrap()
    }

    fn cfg(sigma: f64) -> EncoderConfig {
        EncoderConfig { hidden_dims: vec![5, 4, 3], sigma, ..EncoderConfig::default() }
    }

    #[test]
    fn reconstruction_examples() {
        let z = array![[1.0, 0.0]];
        assert_eq!(reconstruction_loss(z.view(), z.view()).unwrap(), 0.0);
        assert_abs_diff_eq!(reconstruction_loss(array![[1.0, 0.0]].view(), array![[0.0, 0.0]].view()).unwrap(), 0.5);
        assert_abs_diff_eq!(
            reconstruction_loss(array![[1.0, 1.0], [1.0, 1.0]].view(), Array2::zeros((2, 2)).view()).unwrap(),
            1.0
        );
        assert!(reconstruction_loss(z.view(), Array2::zeros((1, 3)).view()).is_err());
    }

    #[test]
    fn sigma_endpoints_select_single_path() {
        let g = small_graph();
        let input = GraphInput::new(&g);
        let params = Params::init(3, &cfg(1.0), 3).unwrap();

        // sigma = 1: pure autoencoder chain
        let (state, _) = forward(&input, &cfg(1.0), &params).unwrap();
        let mut z = g.features().clone();
        for d in &params.encoder {
            z = (z.dot(&d.weight) + &d.bias).mapv(|v| v.max(0.0));
        }
        assert_abs_diff_eq!(state.h, z, epsilon = 1e-12);

        // sigma = 0: pure graph chain
        let (state, _) = forward(&input, &cfg(0.0), &params).unwrap();
        let adj = CsrMatrix::mean_adjacency(&g).to_dense();
        let mut h = g.features().clone();
        for s in &params.graph {
            let pre = h.dot(&s.self_weight) + adj.dot(&h).dot(&s.neigh_weight) + &s.bias;
            h = pre.mapv(|v| Activation::Selu.apply(v));
        }
        assert_abs_diff_eq!(state.h, h, epsilon = 1e-12);
    }

    #[test]
    fn isolated_node_gets_zero_neighbor_mean() {
        let g = small_graph(); // node 3 is isolated
        let input = GraphInput::new(&g);
        let one_layer = EncoderConfig { hidden_dims: vec![2], sigma: 0.0, ..EncoderConfig::default() };
        let mut params = Params::init(3, &one_layer, 0).unwrap();
        params.graph[0].self_weight = Array2::zeros((3, 2));
        params.graph[0].neigh_weight = Array2::ones((3, 2));
        params.graph[0].bias = array![0.25, -0.5];
        let (state, _) = forward(&input, &one_layer, &params).unwrap();
        // selu(N^T * 0 + c)
        assert_abs_diff_eq!(state.h[[3, 0]], Activation::Selu.apply(0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(state.h[[3, 1]], Activation::Selu.apply(-0.5), epsilon = 1e-15);
    }

    #[test]
    fn fusion_is_affine_in_sigma_for_one_layer() {
        let g = small_graph();
        let input = GraphInput::new(&g);
        let one = |s| EncoderConfig { hidden_dims: vec![4], sigma: s, ..EncoderConfig::default() };
        let params = Params::init(3, &one(0.5), 9).unwrap();
        let h = |s| forward(&input, &one(s), &params).unwrap().0.h;
        let mid = h(0.5);
        let avg = (h(0.0) + h(1.0)) / 2.0;
        assert_abs_diff_eq!(mid, avg, epsilon = 1e-9);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = small_graph();
        let input = GraphInput::new(&g);
        let params = Params::init(7, &cfg(0.5), 0).unwrap();
        assert!(matches!(forward(&input, &cfg(0.5), &params), Err(EmbedError::ShapeMismatch { .. })));
    }

    #[test]
    fn invalid_config() {
        let bad = EncoderConfig { sigma: 1.5, ..EncoderConfig::default() };
        assert!(bad.validate().is_err());
        let bad = EncoderConfig { hidden_dims: vec![], ..EncoderConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn init_is_deterministic() {
        let a = Params::init(3, &cfg(0.5), 42).unwrap();
        let b = Params::init(3, &cfg(0.5), 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Params::init(3, &cfg(0.5), 43).unwrap());
        assert_eq!(a.tensor_infos().len(), a.tensors().len());
    }
}
