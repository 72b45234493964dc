//! Node-based soft assignment.
//!
//! Modules are read off the affinity matrix by row argmax. The most
//! populous modules each contribute one landmark, the member with the
//! largest intra-module modularity score. Nodes are then assigned to
//! landmarks with a Student-t kernel, and the assignment is sharpened into
//! a self-training target.

use ndarray::{Array2, ArrayView2, Axis, Zip};

use crate::error::AssignError;
use crate::graph::Graph;
use crate::modularity::intra_module_scores;

/// Clamp applied to the target inside the KL logarithm.
pub const TARGET_FLOOR: f64 = 1e-12;

/// Hard module membership derived from `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleAssignment {
    pub module_of_node: Vec<usize>,
    /// Non-empty modules as `(module id, size)`, largest first; equal sizes
    /// keep ascending module id.
    pub modules: Vec<(usize, usize)>,
}

/// Row argmax of `c`, ties to the lowest column.
pub fn extract_modules(c: ArrayView2<'_, f64>) -> ModuleAssignment {
    let module_of_node: Vec<usize> = c.rows().into_iter().map(|row| argmax(row.iter().copied())).collect();
    let mut sizes = vec![0usize; c.ncols().max(1)];
    for &m in &module_of_node {
        sizes[m] += 1;
    }
    let mut modules: Vec<(usize, usize)> = sizes.into_iter().enumerate().filter(|&(_, s)| s > 0).collect();
    modules.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ModuleAssignment { module_of_node, modules }
}

/// Index of the largest value; the first one wins ties. NaN never wins.
pub fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    pub node_ids: Vec<usize>,
    /// Embedding rows of the landmarks, `k x r`.
    pub u: Array2<f64>,
    pub module_of_node: Vec<usize>,
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }
}

/// Picks `k` landmarks.
///
/// The `k` largest modules contribute their best-scoring member. When there
/// are fewer than `k` non-empty modules, the remaining slots are filled
/// round-robin over the modules (largest first) with each module's next
/// best member.
pub fn select_landmarks(
    graph: &Graph,
    h: ArrayView2<'_, f64>,
    modules: &ModuleAssignment,
    k: usize,
) -> Result<LandmarkSet, AssignError> {
    if k == 0 {
        return Err(AssignError::ZeroLandmarks);
    }
    if modules.modules.is_empty() {
        return Err(AssignError::NoModules);
    }
    let n = graph.num_nodes();
    if h.nrows() != n || modules.module_of_node.len() != n {
        return Err(AssignError::ShapeMismatch { what: "embedding rows", expected: n, found: h.nrows() });
    }
    if k > n {
        return Err(AssignError::ShapeMismatch { what: "landmark count", expected: n, found: k });
    }

    // graphs without edges have an undefined B; every node then scores 0
    let scores = intra_module_scores(graph, &modules.module_of_node).unwrap_or_else(|_| vec![0.0; n]);

    // members of each module, best score first, ties by node id
    let mut ranked: Vec<Vec<usize>> = modules
        .modules
        .iter()
        .map(|&(id, size)| {
            let mut members = Vec::with_capacity(size);
            members.extend((0..n).filter(|&i| modules.module_of_node[i] == id));
            members.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            members
        })
        .collect();
    if ranked.len() > k {
        ranked.truncate(k);
    }

    let mut node_ids = Vec::with_capacity(k);
    let mut depth = 0;
    while node_ids.len() < k {
        let mut progressed = false;
        for members in &ranked {
            if node_ids.len() == k {
                break;
            }
            if let Some(&node) = members.get(depth) {
                node_ids.push(node);
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
        depth += 1;
    }
    debug_assert_eq!(node_ids.len(), k);

    let u = h.select(Axis(0), &node_ids);
    Ok(LandmarkSet { node_ids, u, module_of_node: modules.module_of_node.clone() })
}

/// Student-t kernel assignment of each row of `h` to the rows of `u`:
/// `W(i,k) ∝ (1 + ||h_i - u_k||^2 / nu)^(-(nu+1)/2)`.
pub fn soft_assign(h: ArrayView2<'_, f64>, u: ArrayView2<'_, f64>, nu: f64) -> Result<Array2<f64>, AssignError> {
    if !(nu > 0.0) {
        return Err(AssignError::InvalidNu(nu));
    }
    if u.nrows() == 0 {
        return Err(AssignError::EmptyLandmarks);
    }
    if u.ncols() != h.ncols() {
        return Err(AssignError::ShapeMismatch { what: "landmark width", expected: h.ncols(), found: u.ncols() });
    }
    let exponent = -(nu + 1.0) / 2.0;
    let dist = squared_distances(h, u);
    let mut w = dist.mapv(|d| exponent * (d / nu).ln_1p());
    for mut row in w.rows_mut() {
        let top = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - top).exp());
        let total = row.sum();
        row /= total;
    }
    Ok(w)
}

fn squared_distances(h: ArrayView2<'_, f64>, u: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = Array2::zeros((h.nrows(), u.nrows()));
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        let hi = h.row(i);
        for (k, v) in row.iter_mut().enumerate() {
            *v = Zip::from(&hi).and(&u.row(k)).fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b));
        }
    }
    out
}

/// Back-propagates `grad_w` through [`soft_assign`]; returns gradients for
/// `h` and `u`.
pub fn soft_assign_backward(
    h: ArrayView2<'_, f64>,
    u: ArrayView2<'_, f64>,
    nu: f64,
    w: &Array2<f64>,
    grad_w: &Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    let dist = squared_distances(h, u);
    let mut grad_h = Array2::zeros(h.raw_dim());
    let mut grad_u = Array2::zeros(u.raw_dim());
    for i in 0..h.nrows() {
        let inner = grad_w.row(i).dot(&w.row(i));
        for k in 0..u.nrows() {
            // dL/dD_ik, D the squared distance
            let coef = w[[i, k]] * (grad_w[[i, k]] - inner) * (-(nu + 1.0)) / (2.0 * (nu + dist[[i, k]]));
            if coef == 0.0 {
                continue;
            }
            let diff = &h.row(i) - &u.row(k);
            grad_h.row_mut(i).scaled_add(2.0 * coef, &diff);
            grad_u.row_mut(k).scaled_add(-2.0 * coef, &diff);
        }
    }
    (grad_h, grad_u)
}

/// Sharpened target `W~(i,k) ∝ W(i,k)^2 / sum_n W(n,k)`. Fails when any
/// landmark column carries no mass.
pub fn sharpen(w: &Array2<f64>) -> Result<Array2<f64>, AssignError> {
    let (target, dropped) = sharpen_dropping(w)?;
    match dropped.first() {
        Some(&col) => Err(AssignError::DegenerateColumn(col)),
        None => Ok(target),
    }
}

/// Like [`sharpen`], but columns without mass are zeroed and reported
/// instead of failing.
pub fn sharpen_dropping(w: &Array2<f64>) -> Result<(Array2<f64>, Vec<usize>), AssignError> {
    let freq = w.sum_axis(Axis(0));
    let dropped: Vec<usize> = freq.iter().enumerate().filter(|(_, &f)| f <= 0.0).map(|(k, _)| k).collect();
    if !w.is_empty() && dropped.len() == w.ncols() {
        return Err(AssignError::AllColumnsDegenerate);
    }
    let mut target = w.clone();
    Zip::from(target.rows_mut()).for_each(|mut row| {
        Zip::from(&mut row).and(&freq).for_each(|t, &f| *t = if f > 0.0 { *t * *t / f } else { 0.0 });
        let total = row.sum();
        if total > 0.0 {
            row /= total;
        }
    });
    Ok((target, dropped))
}

/// `KL(W || W~)` summed over all entries, with `0 log 0 = 0` and the
/// target clamped at [`TARGET_FLOOR`].
pub fn attr_loss(w: &Array2<f64>, target: &Array2<f64>) -> Result<f64, AssignError> {
    if w.dim() != target.dim() {
        return Err(AssignError::ShapeMismatch { what: "target", expected: w.len(), found: target.len() });
    }
    let total =
        Zip::from(w).and(target).fold(
            0.0,
            |acc, &p, &q| {
                if p > 0.0 {
                    acc + p * (p / q.max(TARGET_FLOOR)).ln()
                } else {
                    acc
                }
            },
        );
    Ok(total)
}

/// Gradient of [`attr_loss`] w.r.t. `W` with the target held fixed.
pub fn attr_loss_grad(w: &Array2<f64>, target: &Array2<f64>) -> Array2<f64> {
    let mut grad = Array2::zeros(w.raw_dim());
    Zip::from(&mut grad).and(w).and(target).for_each(|g, &p, &q| {
        if p > 0.0 {
            *g = (p / q.max(TARGET_FLOOR)).ln() + 1.0;
        }
    });
    grad
}

/// Shannon entropy of one distribution, natural log.
pub fn entropy(row: impl IntoIterator<Item = f64>) -> f64 {
    row.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn graph(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        Graph::new("t", n, 2, edges, Array2::zeros((n, 1)), None).unwrap()
    }

    #[test]
    fn modules_from_one_hot_and_ties() {
        let c = array![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let m = extract_modules(c.view());
        assert_eq!(m.module_of_node, vec![1, 0, 1]);
        assert_eq!(m.modules, vec![(1, 2), (0, 1)]);
        assert_eq!(extract_modules(array![[0.5, 0.5]].view()).module_of_node, vec![0]);
    }

    #[test]
    fn two_disjoint_edges_give_two_modules() {
        let c = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let m = extract_modules(c.view());
        assert_eq!(m.modules, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn triangles_pick_lowest_index() {
        let g = graph(6, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let h = Array2::from_shape_fn((6, 2), |(i, j)| (i * 2 + j) as f64);
        let modules = ModuleAssignment { module_of_node: vec![0, 0, 0, 1, 1, 1], modules: vec![(0, 3), (1, 3)] };
        let set = select_landmarks(&g, h.view(), &modules, 2).unwrap();
        assert_eq!(set.node_ids, vec![0, 3]);
        assert_eq!(set.u, array![[0.0, 1.0], [6.0, 7.0]]);
    }

    #[test]
    fn path_center_is_landmark() {
        let g = graph(3, vec![(0, 1), (1, 2)]);
        let h = Array2::zeros((3, 2));
        let modules = ModuleAssignment { module_of_node: vec![0, 0, 0], modules: vec![(0, 3)] };
        assert_eq!(select_landmarks(&g, h.view(), &modules, 1).unwrap().node_ids, vec![1]);
    }

    #[test]
    fn single_landmark_comes_from_largest_module() {
        let g = graph(5, vec![(0, 1), (2, 3), (3, 4)]);
        let h = Array2::zeros((5, 1));
        let modules = ModuleAssignment { module_of_node: vec![1, 1, 0, 0, 0], modules: vec![(0, 3), (1, 2)] };
        let set = select_landmarks(&g, h.view(), &modules, 1).unwrap();
        assert_eq!(set.node_ids, vec![3]);
    }

    #[test]
    fn too_few_modules_fill_round_robin() {
        let g = graph(5, vec![(0, 1), (1, 2), (3, 4)]);
        let h = Array2::zeros((5, 1));
        let modules = ModuleAssignment { module_of_node: vec![0, 0, 0, 1, 1], modules: vec![(0, 3), (1, 2)] };
        let set = select_landmarks(&g, h.view(), &modules, 4).unwrap();
        // module 0 ranks 1 first; module 1 ties -> 3 then 4
        assert_eq!(set.node_ids, vec![1, 3, 0, 4]);
        let empty = ModuleAssignment { module_of_node: vec![0; 5], modules: vec![] };
        assert_eq!(select_landmarks(&g, h.view(), &empty, 1), Err(AssignError::NoModules));
    }

    #[test]
    fn soft_assign_examples() {
        let u = array![[0.0, 0.0], [2.0, 0.0]];
        let w = soft_assign(array![[1.0, 0.0]].view(), u.view(), 1.0).unwrap();
        assert_abs_diff_eq!(w, array![[0.5, 0.5]], epsilon = 1e-15);

        let u = array![[0.0], [1.0]];
        let w = soft_assign(array![[0.0]].view(), u.view(), 1.0).unwrap();
        assert_abs_diff_eq!(w, array![[2.0 / 3.0, 1.0 / 3.0]], epsilon = 1e-15);

        let u = array![[0.0], [1e3]];
        let w = soft_assign(array![[0.0]].view(), u.view(), 1.0).unwrap();
        assert_abs_diff_eq!(w, array![[1.0, 0.0]], epsilon = 1e-6);

        assert_eq!(
            soft_assign(array![[0.0]].view(), Array2::zeros((0, 1)).view(), 1.0),
            Err(AssignError::EmptyLandmarks)
        );
        assert_eq!(soft_assign(array![[0.0]].view(), u.view(), 0.0), Err(AssignError::InvalidNu(0.0)));
    }

    #[test]
    fn sharpen_examples() {
        let uniform = Array2::from_elem((3, 4), 0.25);
        assert_abs_diff_eq!(sharpen(&uniform).unwrap(), uniform, epsilon = 1e-15);

        let w = array![[0.8, 0.2], [0.6, 0.4]];
        let s = sharpen(&w).unwrap();
        let a = 0.64 / 1.4;
        let b = 0.04 / 0.6;
        assert_abs_diff_eq!(s[[0, 0]], a / (a + b), epsilon = 1e-12);
        assert_abs_diff_eq!(s[[0, 0]], 0.8727, epsilon = 1e-4);
        assert_abs_diff_eq!(s[[0, 1]], 0.1273, epsilon = 1e-4);

        let hard = array![[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        assert_eq!(sharpen(&hard).unwrap(), hard);
    }

    #[test]
    fn degenerate_column() {
        let w = array![[1.0, 0.0, 0.0], [0.5, 0.0, 0.5]];
        assert_eq!(sharpen(&w), Err(AssignError::DegenerateColumn(1)));
        let (t, dropped) = sharpen_dropping(&w).unwrap();
        assert_eq!(dropped, vec![1]);
        for row in t.rows() {
            assert_abs_diff_eq!(row.sum(), 1.0, epsilon = 1e-15);
        }
        assert_eq!(sharpen_dropping(&Array2::zeros((2, 2))), Err(AssignError::AllColumnsDegenerate));
    }

    #[test]
    fn attr_loss_examples() {
        let w = array![[0.3, 0.7], [0.5, 0.5]];
        assert_eq!(attr_loss(&w, &w).unwrap(), 0.0);
        let v = attr_loss(&array![[0.5, 0.5]], &array![[0.9, 0.1]]).unwrap();
        let expected = 0.5 * (0.5f64 / 0.9).ln() + 0.5 * (0.5f64 / 0.1).ln();
        assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.5108, epsilon = 1e-4);
        assert!(attr_loss(&w, &array![[1.0]]).is_err());
        // zero mass contributes nothing even against a zero target
        assert_eq!(attr_loss(&array![[1.0, 0.0]], &array![[1.0, 0.0]]).unwrap(), 0.0);
    }
}
