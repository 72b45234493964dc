//! Planted-partition attributed graphs with bag-of-words style features.
//!
//! Useful for smoke runs and as a stand-in when no benchmark data is on
//! disk. Each class owns a block of vocabulary; a node switches on
//! `words_per_node` binary features, each drawn from its class block with
//! probability `topic_purity` and from the whole vocabulary otherwise.

use std::collections::HashSet;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_nodes: usize,
    pub num_clusters: usize,
    pub num_features: usize,
    pub avg_degree: f64,
    /// Probability that an edge stays inside a class.
    pub homophily: f64,
    pub words_per_node: usize,
    pub topic_purity: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            num_nodes: 600,
            num_clusters: 4,
            num_features: 200,
            avg_degree: 4.0,
            homophily: 0.85,
            words_per_node: 12,
            topic_purity: 0.7,
            seed: 0,
        }
    }
}

/// Generates a labelled graph; classes are assigned round-robin so sizes
/// differ by at most one.
pub fn generate(spec: &SyntheticSpec) -> Result<Graph, GraphError> {
    let n = spec.num_nodes;
    let k = spec.num_clusters.max(1);
    let d = spec.num_features.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<usize> = (0..n).map(|i| i % k).collect();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }

    let target = ((spec.avg_degree * n as f64) / 2.0).round() as usize;
    let max_edges = n * n.saturating_sub(1) / 2;
    let target = target.min(max_edges);
    let mut seen = HashSet::with_capacity(target);
    let mut attempts = 0usize;
    while seen.len() < target && attempts < 50 * target.max(1) {
        attempts += 1;
        let i = rng.random_range(0..n);
        let j = if rng.random::<f64>() < spec.homophily {
            let pool = &members[labels[i]];
            pool[rng.random_range(0..pool.len())]
        } else {
            rng.random_range(0..n)
        };
        if i != j {
            seen.insert((i.min(j), i.max(j)));
        }
    }
    let mut edges: Vec<(usize, usize)> = seen.into_iter().collect();
    edges.sort_unstable();

    let block = (d / k).max(1);
    let mut features = Array2::zeros((n, d));
    for (i, &l) in labels.iter().enumerate() {
        let start = (l * block) % d;
        for _ in 0..spec.words_per_node {
            let word = if rng.random::<f64>() < spec.topic_purity {
                start + rng.random_range(0..block.min(d - start))
            } else {
                rng.random_range(0..d)
            };
            features[[i, word]] = 1.0;
        }
    }

    Graph::new(format!("synthetic-{n}-{k}"), n, k, edges, features, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let spec = SyntheticSpec { num_nodes: 90, num_clusters: 3, ..SyntheticSpec::default() };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.features(), b.features());
        a.check_invariants().unwrap();
        assert_eq!(a.num_edges(), 180);
        let labels = a.labels().unwrap();
        let inside = a.edges().iter().filter(|&&(i, j)| labels[i] == labels[j]).count();
        assert!(inside as f64 / a.num_edges() as f64 > 0.7);
    }
}
