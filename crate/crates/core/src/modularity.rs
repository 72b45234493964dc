//! Structure-based soft assignment.
//!
//! `C = rownorm(tanh(H)^2)` is scored with the soft modularity
//! `Q = Tr(C^T B C) / 2m`, `B = A - d d^T / 2m`. The degree term is kept in
//! factored form, `Tr(C^T d d^T C) = ||d^T C||^2`, so nothing `N x N` is
//! ever built on the training path.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::StructError;
use crate::graph::Graph;
use crate::sparse::CsrMatrix;

/// Largest node count for which a full dense `B` may be built without
/// `force`.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Row-stochastic structure-based soft assignment, plus what is needed to
/// back-propagate through it.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    pub c: Array2<f64>,
    tanh: Array2<f64>,
    row_mass: Array1<f64>,
}

impl AffinityMatrix {
    pub fn num_nodes(&self) -> usize {
        self.c.nrows()
    }

    pub fn width(&self) -> usize {
        self.c.ncols()
    }

    /// Pulls `grad_c` (loss gradient w.r.t. `C`) back to `H`. Rows that were
    /// replaced by the uniform fallback are constant and get zero gradient.
    pub fn backward(&self, grad_c: &Array2<f64>) -> Array2<f64> {
        let mut grad_h = Array2::zeros(self.c.raw_dim());
        for (i, mut out) in grad_h.rows_mut().into_iter().enumerate() {
            let mass = self.row_mass[i];
            if mass <= f64::MIN_POSITIVE {
                continue;
            }
            let g = grad_c.row(i);
            let c = self.c.row(i);
            let inner = g.dot(&c);
            Zip::from(&mut out).and(&g).and(&self.tanh.row(i)).for_each(|o, &gc, &t| {
                let grad_t = (gc - inner) / mass;
                *o = grad_t * 2.0 * t * (1.0 - t * t);
            });
        }
        grad_h
    }
}

/// Entrywise `tanh(.)^2`, then per-row L1 normalization. A row that is
/// exactly zero becomes uniform.
pub fn affinity(h: ArrayView2<'_, f64>) -> AffinityMatrix {
    let tanh = h.mapv(f64::tanh);
    let mut c = tanh.mapv(|t| t * t);
    let width = c.ncols().max(1) as f64;
    let mut row_mass = Array1::zeros(c.nrows());
    for (i, mut row) in c.rows_mut().into_iter().enumerate() {
        let mass = row.sum();
        row_mass[i] = mass;
        if mass <= f64::MIN_POSITIVE {
            row.fill(1.0 / width);
        } else {
            row /= mass;
        }
    }
    AffinityMatrix { c, tanh, row_mass }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseLimit {
    pub cap: usize,
    pub force: bool,
}

impl Default for DenseLimit {
    fn default() -> Self {
        Self { cap: DEFAULT_DENSE_CAP, force: false }
    }
}

/// Rows of the modularity matrix, `B(i, j) = a_ij - d_i d_j / 2m`, for the
/// requested nodes against all `N` columns.
pub fn modularity_matrix_entries(graph: &Graph, rows: &[usize], limit: DenseLimit) -> Result<Array2<f64>, StructError> {
    let m = graph.num_edges();
    if m == 0 {
        return Err(StructError::EmptyGraph);
    }
    let n = graph.num_nodes();
    if rows.len() >= n && n > limit.cap && !limit.force {
        return Err(StructError::DenseTooLarge { rows: rows.len(), cols: n, cap: limit.cap });
    }
    let two_m = 2.0 * m as f64;
    let degrees = graph.degrees();
    let mut out = Array2::zeros((rows.len(), n));
    for (r, &i) in rows.iter().enumerate() {
        if i >= n {
            return Err(StructError::InvalidIndex(i));
        }
        let di = degrees[i];
        let mut row = out.row_mut(r);
        for (j, v) in row.iter_mut().enumerate() {
            *v = -di * degrees[j] / two_m;
        }
        for &j in graph.neighbors(i) {
            row[j] += 1.0;
        }
    }
    Ok(out)
}

fn check_rows(graph: &Graph, c: &Array2<f64>) -> Result<(), StructError> {
    if graph.num_edges() == 0 {
        return Err(StructError::EmptyGraph);
    }
    if c.nrows() != graph.num_nodes() {
        return Err(StructError::ShapeMismatch {
            what: "assignment rows",
            expected: graph.num_nodes(),
            found: c.nrows(),
        });
    }
    Ok(())
}

/// Soft modularity `Tr(C^T B C) / 2m` with the degree term factored.
pub fn modularity(graph: &Graph, c: &Array2<f64>) -> Result<f64, StructError> {
    check_rows(graph, c)?;
    let two_m = 2.0 * graph.num_edges() as f64;
    let mut edge_term = 0.0;
    for &(i, j) in graph.edges() {
        edge_term += 2.0 * c.row(i).dot(&c.row(j));
    }
    let degrees = Array1::from(graph.degrees());
    let degree_proj = c.t().dot(&degrees);
    let degree_term = degree_proj.dot(&degree_proj) / two_m;
    Ok((edge_term - degree_term) / two_m)
}

/// Same value as [`modularity`], through an explicit dense `B`. Only for
/// small graphs.
pub fn modularity_dense(graph: &Graph, c: &Array2<f64>) -> Result<f64, StructError> {
    check_rows(graph, c)?;
    let all: Vec<usize> = (0..graph.num_nodes()).collect();
    let b = modularity_matrix_entries(graph, &all, DenseLimit::default())?;
    let two_m = 2.0 * graph.num_edges() as f64;
    let trace = (c.t().dot(&b) * c.t()).sum();
    Ok(trace / two_m)
}

/// Gradient of [`modularity`] w.r.t. `C`:
/// `(2 A C - d (d^T C) / m) / 2m`.
pub fn modularity_grad(graph: &Graph, c: &Array2<f64>) -> Result<Array2<f64>, StructError> {
    check_rows(graph, c)?;
    let m = graph.num_edges() as f64;
    let adj = CsrMatrix::adjacency(graph);
    let degrees = Array1::from(graph.degrees());
    let degree_proj = c.t().dot(&degrees);
    let mut grad = adj.dot(&c.view()) * 2.0;
    let outer = degrees.view().insert_axis(Axis(1)).dot(&degree_proj.view().insert_axis(Axis(0)));
    grad.scaled_add(-1.0 / m, &outer);
    grad /= 2.0 * m;
    Ok(grad)
}

/// `sum_{j in module(i), j != i} B(i, j)` for every node, in `O(m + N)`.
///
/// The self pair is left out: with it, every row of `B` restricted to a
/// module spanning a whole component sums to zero and the score stops
/// distinguishing hubs from leaves.
pub fn intra_module_scores(graph: &Graph, modules: &[usize]) -> Result<Vec<f64>, StructError> {
    let m = graph.num_edges();
    if m == 0 {
        return Err(StructError::EmptyGraph);
    }
    if modules.len() != graph.num_nodes() {
        return Err(StructError::ShapeMismatch {
            what: "module vector",
            expected: graph.num_nodes(),
            found: modules.len(),
        });
    }
    let two_m = 2.0 * m as f64;
    let num_modules = modules.iter().copied().max().map_or(0, |x| x + 1);
    let mut module_degree = vec![0.0; num_modules];
    for i in 0..graph.num_nodes() {
        module_degree[modules[i]] += graph.degree(i) as f64;
    }
    Ok((0..graph.num_nodes())
        .map(|i| {
            let inside = graph.neighbors(i).iter().filter(|&&j| modules[j] == modules[i]).count() as f64;
            let d = graph.degree(i) as f64;
            inside - d * (module_degree[modules[i]] - d) / two_m
        })
        .collect())
}

/// Node subset with known pairwise co-membership.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxSubset {
    pub node_ids: Vec<usize>,
    /// `membership[(a, b)] = 1` iff `node_ids[a]` and `node_ids[b]` share a cluster.
    pub membership: Array2<f64>,
}

impl AuxSubset {
    /// Builds the membership matrix from per-node group ids.
    pub fn from_groups(node_ids: Vec<usize>, groups: &[usize]) -> Self {
        let k = node_ids.len();
        let membership =
            Array2::from_shape_fn((k, k), |(a, b)| if groups[node_ids[a]] == groups[node_ids[b]] { 1.0 } else { 0.0 });
        Self { node_ids, membership }
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    /// Keeps the members that appear in `nodes`, re-indexed by their position
    /// in `nodes`.
    pub fn restrict_to(&self, nodes: &[usize], num_nodes: usize) -> Self {
        let mut position = vec![usize::MAX; num_nodes];
        for (p, &n) in nodes.iter().enumerate() {
            position[n] = p;
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&a| position[self.node_ids[a]] != usize::MAX).collect();
        let node_ids = keep.iter().map(|&a| position[self.node_ids[a]]).collect();
        let membership = self.membership.select(Axis(0), &keep).select(Axis(1), &keep);
        Self { node_ids, membership }
    }
}

/// Where the auxiliary membership information comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuxMode {
    /// A uniform fraction of nodes with their ground-truth labels.
    Labels(f64),
    /// Pseudo-labels from the most central nodes of each current module.
    Central,
    None,
}

impl Default for AuxMode {
    fn default() -> Self {
        AuxMode::Labels(0.1)
    }
}

impl fmt::Display for AuxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxMode::Labels(frac) => write!(f, "labels:{frac}"),
            AuxMode::Central => f.write_str("central"),
            AuxMode::None => f.write_str("none"),
        }
    }
}

impl FromStr for AuxMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "central" => Ok(AuxMode::Central),
            "none" => Ok(AuxMode::None),
            other => {
                let frac = other
                    .strip_prefix("labels:")
                    .ok_or_else(|| format!("unknown aux mode `{other}` (labels:F, central, none)"))?;
                let frac: f64 = frac.parse().map_err(|_| format!("bad fraction `{frac}`"))?;
                if !(frac > 0.0 && frac <= 1.0) {
                    return Err(format!("aux fraction {frac} must lie in (0, 1]"));
                }
                Ok(AuxMode::Labels(frac))
            }
        }
    }
}

impl Serialize for AuxMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AuxMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Draws `round(fraction * N)` nodes (at least one) uniformly without
/// replacement and uses their labels. Node ids come back sorted.
pub fn sample_label_subset<R: Rng + ?Sized>(labels: &[usize], fraction: f64, rng: &mut R) -> AuxSubset {
    let n = labels.len();
    let size = ((fraction * n as f64).round() as usize).clamp(1.min(n), n);
    let mut ids = index::sample(rng, n, size).into_vec();
    ids.sort_unstable();
    AuxSubset::from_groups(ids, labels)
}

fn check_aux(c: &Array2<f64>, aux: &AuxSubset) -> Result<(), StructError> {
    if aux.is_empty() {
        return Err(StructError::EmptySubset);
    }
    if aux.membership.dim() != (aux.len(), aux.len()) {
        return Err(StructError::ShapeMismatch {
            what: "membership matrix",
            expected: aux.len(),
            found: aux.membership.nrows(),
        });
    }
    if let Some(&bad) = aux.node_ids.iter().find(|&&i| i >= c.nrows()) {
        return Err(StructError::InvalidIndex(bad));
    }
    Ok(())
}

/// `||N - C_M C_M^T||_F^2 / ||N||_F^2`.
pub fn aux_loss(c: &Array2<f64>, aux: &AuxSubset) -> Result<f64, StructError> {
    check_aux(c, aux)?;
    let cm = c.select(Axis(0), &aux.node_ids);
    let residual = &aux.membership - &cm.dot(&cm.t());
    let norm = aux.membership.mapv(|v| v * v).sum();
    Ok(residual.mapv(|v| v * v).sum() / norm)
}

/// Gradient of [`aux_loss`] w.r.t. the full `C` (zero outside the subset).
pub fn aux_grad(c: &Array2<f64>, aux: &AuxSubset) -> Result<Array2<f64>, StructError> {
    check_aux(c, aux)?;
    let cm = c.select(Axis(0), &aux.node_ids);
    let residual = &aux.membership - &cm.dot(&cm.t());
    let norm = aux.membership.mapv(|v| v * v).sum();
    let local = residual.dot(&cm) * (-2.0 / norm);
    let mut grad = Array2::zeros(c.raw_dim());
    // residual is symmetric, so both factors contribute equally
    for (a, &i) in aux.node_ids.iter().enumerate() {
        grad.row_mut(i).scaled_add(2.0, &local.row(a));
    }
    Ok(grad)
}

/// Parts of the structural objective `-Q + alpha * L_aux`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructLoss {
    pub modularity: f64,
    pub aux: Option<f64>,
    pub total: f64,
}

pub fn struct_loss(
    graph: &Graph,
    c: &Array2<f64>,
    aux: Option<&AuxSubset>,
    alpha: f64,
) -> Result<StructLoss, StructError> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(StructError::NegativeAlpha(alpha));
    }
    let q = modularity(graph, c)?;
    let aux_value = aux.map(|a| aux_loss(c, a)).transpose()?;
    let total = -q + alpha * aux_value.unwrap_or(0.0);
    Ok(StructLoss { modularity: q, aux: aux_value, total })
}

/// Gradient of the structural objective w.r.t. `C`.
pub fn struct_loss_grad(
    graph: &Graph,
    c: &Array2<f64>,
    aux: Option<&AuxSubset>,
    alpha: f64,
) -> Result<Array2<f64>, StructError> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(StructError::NegativeAlpha(alpha));
    }
    let mut grad = modularity_grad(graph, c)?.mapv(|v| -v);
    if let Some(aux) = aux {
        if alpha > 0.0 {
            grad.scaled_add(alpha, &aux_grad(c, aux)?);
        }
    }
    Ok(grad)
}
