//! Randomized invariants of the graph, assignment, metric and training code.

use ndarray::{Array1, Array2, Axis};
use proptest::prelude::*;

use rdsa_core::embed::{self, EncoderConfig, GraphInput, Params};
use rdsa_core::landmark;
use rdsa_core::metrics;
use rdsa_core::modularity;
use rdsa_core::noise::{inject_noise, NoiseLevel, NoiseSpec};
use rdsa_core::train::{TrainConfig, Trainer};
use rdsa_core::Graph;

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (3..=max_nodes, 2usize..4).prop_flat_map(|(n, k)| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let num_pairs = pairs.len();
        (
            Just(n),
            Just(k),
            proptest::collection::vec(any::<bool>(), num_pairs),
            proptest::collection::vec(0..k, n),
            proptest::collection::vec(-1.0f64..1.0, n * 3),
        )
            .prop_map(move |(n, k, keep, labels, feats)| {
                let edges = pairs.iter().zip(&keep).filter(|(_, &b)| b).map(|(&e, _)| e).collect();
                let x = Array2::from_shape_vec((n, 3), feats).unwrap();
                Graph::new("p", n, k, edges, x, Some(labels)).unwrap()
            })
    })
}

fn row_sums_close(m: &Array2<f64>) -> bool {
    m.sum_axis(Axis(1)).iter().all(|s| (s - 1.0).abs() <= 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degrees_match_edges(g in graph_strategy(12)) {
        g.check_invariants().unwrap();
        let total: f64 = g.degrees().iter().sum();
        prop_assert_eq!(total as usize, 2 * g.num_edges());
        for &(i, j) in g.edges() {
            prop_assert!(i < j);
            prop_assert!(g.has_edge(i, j) && g.has_edge(j, i));
        }
    }

    #[test]
    fn noise_is_exact_cross_class_and_deterministic(g in graph_strategy(14), seed in any::<u64>(), lvl in 1usize..4) {
        let level = [NoiseLevel::I, NoiseLevel::II, NoiseLevel::III][lvl - 1];
        let spec = NoiseSpec::new(level, seed);
        let labels = g.labels().unwrap();
        match inject_noise(&g, spec) {
            Ok(noisy) => {
                prop_assert_eq!(noisy.num_edges() - g.num_edges(), level.added_edges(g.num_edges()));
                for &(i, j) in g.edges() {
                    prop_assert!(noisy.has_edge(i, j));
                }
                for &(i, j) in noisy.edges() {
                    if !g.has_edge(i, j) {
                        prop_assert_ne!(labels[i], labels[j]);
                    }
                }
                let again = inject_noise(&g, spec).unwrap();
                prop_assert_eq!(again.edges(), noisy.edges());
            }
            Err(rdsa_core::GraphError::NotEnoughCrossClassPairs { requested, available }) => {
                prop_assert!(requested > available);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn factored_modularity_matches_explicit_matrix(g in graph_strategy(14), seed in any::<u64>()) {
        prop_assume!(g.num_edges() > 0);
        let h = random(g.num_nodes(), 4, seed);
        let c = modularity::affinity(h.view()).c;
        let a = modularity::modularity(&g, &c).unwrap();
        let b = modularity::modularity_dense(&g, &c).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn distributions_are_row_stochastic(n in 2usize..15, k in 1usize..5, scale in 0.01f64..20.0, seed in any::<u64>(), nu in 0.2f64..5.0) {
        let h = random(n, 4, seed) * scale;
        let c = modularity::affinity(h.view()).c;
        prop_assert!(row_sums_close(&c));
        let k = k.min(n);
        let u = h.slice(ndarray::s![..k, ..]).to_owned();
        let w = landmark::soft_assign(h.view(), u.view(), nu).unwrap();
        prop_assert!(row_sums_close(&w));
        prop_assert!(w.iter().all(|&v| v >= 0.0));
        let (t, dropped) = landmark::sharpen_dropping(&w).unwrap();
        prop_assert!(dropped.is_empty());
        prop_assert!(row_sums_close(&t));
        prop_assert!(landmark::attr_loss(&w, &t).unwrap() >= -1e-12);
    }

    #[test]
    fn sharpening_lowers_entropy_under_equal_column_mass(row in proptest::collection::vec(0.01f64..1.0, 2..6)) {
        let total: f64 = row.iter().sum();
        let k = row.len();
        // all cyclic shifts of one row give every column the same mass
        let w = Array2::from_shape_fn((k, k), |(i, j)| row[(i + j) % k] / total);
        let t = landmark::sharpen(&w).unwrap();
        for i in 0..k {
            prop_assert!(landmark::entropy(t.row(i).iter().copied()) <= landmark::entropy(w.row(i).iter().copied()) + 1e-12);
        }
    }

    #[test]
    fn soft_assign_permutes_with_landmarks(n in 2usize..10, seed in any::<u64>(), shift in 0usize..3) {
        let h = random(n, 3, seed);
        let u = random(3, 3, seed ^ 1);
        let perm: Vec<usize> = (0..3).map(|j| (j + shift) % 3).collect();
        let w = landmark::soft_assign(h.view(), u.view(), 1.0).unwrap();
        let wp = landmark::soft_assign(h.view(), u.select(Axis(0), &perm).view(), 1.0).unwrap();
        for i in 0..n {
            for (j, &p) in perm.iter().enumerate() {
                prop_assert!((wp[[i, j]] - w[[i, p]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn metrics_ignore_relabeling(truth in proptest::collection::vec(0usize..4, 1..30), pred_seed in any::<u64>(), offset in 1usize..5) {
        let pred: Vec<usize> = truth.iter().enumerate().map(|(i, &t)| if (pred_seed >> (i % 64)) & 1 == 1 { (t + 1) % 4 } else { t }).collect();
        let relabel = |v: &[usize]| v.iter().map(|&x| (3 - x) * 7 + offset).collect::<Vec<_>>();
        let base = metrics::evaluate(&truth, &pred).unwrap();
        for (t, p) in [(relabel(&truth), pred.clone()), (truth.clone(), relabel(&pred)), (relabel(&truth), relabel(&pred))] {
            let s = metrics::evaluate(&t, &p).unwrap();
            prop_assert!((s.acc - base.acc).abs() <= 1e-12);
            prop_assert!((s.nmi - base.nmi).abs() <= 1e-12);
            prop_assert!((s.ari - base.ari).abs() <= 1e-12);
            prop_assert!((s.f1 - base.f1).abs() <= 1e-12);
        }
        prop_assert!((0.0..=1.0).contains(&base.acc));
        prop_assert!((0.0..=1.0).contains(&base.nmi));
        prop_assert!((-1.0..=1.0).contains(&base.ari));
    }

    #[test]
    fn accuracy_beats_chance_on_balanced_truth(k in 2usize..6, per in 1usize..6, pred in proptest::collection::vec(0usize..6, 30)) {
        let truth: Vec<usize> = (0..k * per).map(|i| i % k).collect();
        let pred: Vec<usize> = pred[..truth.len()].iter().map(|p| p % k).collect();
        let pred = &pred[..];
        prop_assert!(metrics::accuracy(&truth, pred).unwrap() >= 1.0 / k as f64 - 1e-12);
    }

    #[test]
    fn fusion_is_affine_in_sigma(g in graph_strategy(8), seed in 0u64..1000) {
        let input = GraphInput::new(&g);
        let at = |sigma: f64| {
            let cfg = EncoderConfig { hidden_dims: vec![5], sigma, ..EncoderConfig::default() };
            let params = Params::init(3, &cfg, seed).unwrap();
            embed::forward(&input, &cfg, &params).unwrap().0.h
        };
        let mid = at(0.5);
        let ends = (at(0.0) + at(1.0)) * 0.5;
        prop_assert!((mid - ends).iter().all(|v| v.abs() <= 1e-9));
    }
}

fn random(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-2.0..2.0))
}

fn two_blocks() -> Graph {
    let n = 16;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (i < 8) == (j < 8) && (j - i) % 3 != 0 {
                edges.push((i, j));
            }
        }
    }
    edges.push((0, 8));
    let x = Array2::from_shape_fn((n, 4), |(i, f)| if (i < 8) == (f < 2) { 1.0 } else { 0.1 * f as f64 });
    let labels = (0..n).map(|i| usize::from(i >= 8)).collect();
    Graph::new("blocks", n, 2, edges, x, Some(labels)).unwrap()
}

fn small_cfg() -> TrainConfig {
    TrainConfig { epochs: 5, hidden_dims: vec![8, 4], ..TrainConfig::default() }
}

#[test]
fn losses_add_up_every_epoch() {
    let g = two_blocks();
    let mut trainer = Trainer::new(&g, small_cfg()).unwrap();
    for _ in 0..5 {
        let log = trainer.step_epoch().unwrap();
        let l = log.losses;
        assert!((l.total - (l.res + l.structure + l.attr)).abs() <= 1e-6);
    }
}

#[test]
fn full_size_batch_matches_full_batch() {
    let g = two_blocks();
    let full = rdsa_core::train::train(&g, &small_cfg()).unwrap();
    let batched = rdsa_core::train::train(&g, &TrainConfig { batch_size: Some(g.num_nodes()), ..small_cfg() }).unwrap();
    for (a, b) in full.history.iter().zip(&batched.history) {
        assert!((a.losses.total - b.losses.total).abs() <= 1e-6);
    }
    let oversized = rdsa_core::train::train(&g, &TrainConfig { batch_size: Some(1000), ..small_cfg() }).unwrap();
    assert_eq!(oversized.history, full.history);
}

#[test]
fn mini_batches_train_and_log_finite_losses() {
    let g = two_blocks();
    let out = rdsa_core::train::train(&g, &TrainConfig { batch_size: Some(5), ..small_cfg() }).unwrap();
    assert_eq!(out.history.len(), 5);
    assert!(out.history.iter().all(|l| l.losses.total.is_finite()));
    assert_eq!(out.labels.len(), g.num_nodes());
}

#[test]
fn training_is_deterministic() {
    let g = two_blocks();
    let a = rdsa_core::train::train(&g, &small_cfg()).unwrap();
    let b = rdsa_core::train::train(&g, &small_cfg()).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.state.h, b.state.h);
    assert_eq!(a.history, b.history);
}

#[test]
fn single_epoch_on_ten_nodes() {
    let x = Array2::from_shape_fn((10, 3), |(i, f)| ((i + f) % 3) as f64);
    let edges = (0..9).map(|i| (i, i + 1)).collect();
    let g = Graph::new("path", 10, 2, edges, x, Some((0..10).map(|i| i / 5).collect())).unwrap();
    let out =
        rdsa_core::train::train(&g, &TrainConfig { epochs: 1, hidden_dims: vec![6, 3], ..TrainConfig::default() })
            .unwrap();
    assert_eq!(out.history.len(), 1);
    let l = out.history[0].losses;
    assert!(l.res.is_finite() && l.structure.is_finite() && l.attr.is_finite());
}

#[test]
fn separates_two_disjoint_triangles() {
    let x = ndarray::array![[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]];
    let edges = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
    let truth = vec![0, 0, 0, 1, 1, 1];
    let g = Graph::new("tri", 6, 2, edges, x, Some(truth.clone())).unwrap();
    let out = rdsa_core::train::train(&g, &TrainConfig { epochs: 100, ..TrainConfig::default() }).unwrap();
    // oracle: best of the two label permutations
    let flipped: Vec<usize> = out.labels.iter().map(|&l| 1 - l.min(1)).collect();
    let hits = |p: &[usize]| p.iter().zip(&truth).filter(|(a, b)| a == b).count();
    assert_eq!(hits(&out.labels).max(hits(&flipped)), 6, "labels {:?}", out.labels);
    assert_eq!(metrics::accuracy(&truth, &out.labels).unwrap(), 1.0);
}

#[test]
fn module_extraction_counts_components() {
    let c = ndarray::array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
    let m = landmark::extract_modules(c.view());
    assert_eq!(m.modules, vec![(0, 2), (1, 2)]);
    let _ = Array1::<f64>::zeros(1);
}
