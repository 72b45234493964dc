//! Class-aware edge noise.
//!
//! Noise edges join nodes with different ground-truth labels. The number of
//! edges added is `ceil(rho * m)` where `rho` depends on the level.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseLevel {
    #[serde(rename = "clean")]
    Clean,
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
}

impl NoiseLevel {
    /// Edge-addition ratio in tenths, so counts can be computed exactly.
    fn tenths(self) -> usize {
        match self {
            NoiseLevel::Clean => 0,
            NoiseLevel::I => 3,
            NoiseLevel::II => 6,
            NoiseLevel::III => 9,
        }
    }

    pub fn ratio(self) -> f64 {
        self.tenths() as f64 / 10.0
    }

    /// `ceil(ratio * num_edges)`.
    pub fn added_edges(self, num_edges: usize) -> usize {
        (self.tenths() * num_edges).div_ceil(10)
    }
}

impl fmt::Display for NoiseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoiseLevel::Clean => "clean",
            NoiseLevel::I => "I",
            NoiseLevel::II => "II",
            NoiseLevel::III => "III",
        };
        f.write_str(s)
    }
}

impl FromStr for NoiseLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clean" | "0" => Ok(NoiseLevel::Clean),
            "1" | "i" => Ok(NoiseLevel::I),
            "2" | "ii" => Ok(NoiseLevel::II),
            "3" | "iii" => Ok(NoiseLevel::III),
            other => Err(format!("unknown noise level `{other}` (expected clean, 1, 2 or 3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub level: NoiseLevel,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(level: NoiseLevel, seed: u64) -> Self {
        Self { level, seed }
    }
}

/// Returns a copy of `graph` with noise edges added. The input is untouched.
pub fn inject_noise(graph: &Graph, spec: NoiseSpec) -> Result<Graph, GraphError> {
    if spec.level == NoiseLevel::Clean {
        return Ok(graph.clone());
    }
    let added = sample_noise_edges(graph, spec)?;
    graph.with_extra_edges(&added)
}

/// Samples the noise edges for `spec` in canonical `(i < j)` form, in the
/// order they were drawn.
pub fn sample_noise_edges(graph: &Graph, spec: NoiseSpec) -> Result<Vec<(usize, usize)>, GraphError> {
    let labels = graph.labels().ok_or(GraphError::LabelsRequired)?;
    let wanted = spec.level.added_edges(graph.num_edges());
    if wanted == 0 {
        return Ok(Vec::new());
    }

    let available = cross_class_non_edges(graph, labels);
    if wanted > available {
        return Err(GraphError::NotEnoughCrossClassPairs { requested: wanted, available });
    }

    let n = graph.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut added = Vec::with_capacity(wanted);
    let mut taken = HashSet::with_capacity(wanted);
    let max_attempts = 100 * wanted;
    let mut attempts = 0;
    while added.len() < wanted && attempts < max_attempts {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b || labels[a] == labels[b] {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if graph.has_edge(pair.0, pair.1) || !taken.insert(pair) {
            continue;
        }
        added.push(pair);
    }

    if added.len() < wanted {
        log::debug!("noise rejection sampling stalled after {attempts} attempts; enumerating eligible pairs");
        let mut eligible = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if labels[i] != labels[j] && !graph.has_edge(i, j) && !taken.contains(&(i, j)) {
                    eligible.push((i, j));
                }
            }
        }
        let remaining = wanted - added.len();
        for k in index::sample(&mut rng, eligible.len(), remaining).into_iter() {
            added.push(eligible[k]);
        }
    }
    Ok(added)
}

fn cross_class_non_edges(graph: &Graph, labels: &[usize]) -> usize {
    let mut class_sizes = vec![0usize; graph.num_clusters().max(1)];
    for &l in labels {
        class_sizes[l] += 1;
    }
    let n = graph.num_nodes();
    let same: usize = class_sizes.iter().map(|&c| c * c).sum();
    let cross_pairs = (n * n - same) / 2;
    let cross_edges = graph.edges().iter().filter(|&&(i, j)| labels[i] != labels[j]).count();
    cross_pairs - cross_edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn labelled(n: usize, k: usize, edges: Vec<(usize, usize)>) -> Graph {
        let labels = (0..n).map(|i| i % k).collect();
        Graph::new("t", n, k, edges, Array2::zeros((n, 1)), Some(labels)).unwrap()
    }

    #[test]
    fn ceiling_counts() {
        assert_eq!(NoiseLevel::I.added_edges(5429), 1629);
        assert_eq!(NoiseLevel::II.added_edges(5429), 3258);
        assert_eq!(NoiseLevel::III.added_edges(5429), 4887);
        assert_eq!(NoiseLevel::I.added_edges(1), 1);
        assert_eq!(NoiseLevel::Clean.added_edges(1000), 0);
        assert_eq!(NoiseLevel::III.ratio(), 0.9);
    }

    #[test]
    fn clean_is_identity() {
        let g = labelled(6, 2, vec![(0, 1), (2, 3)]);
        let out = inject_noise(&g, NoiseSpec::new(NoiseLevel::Clean, 7)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn needs_labels() {
        let g = Graph::new("t", 3, 1, vec![(0, 1)], Array2::zeros((3, 1)), None).unwrap();
        assert!(matches!(inject_noise(&g, NoiseSpec::new(NoiseLevel::I, 0)), Err(GraphError::LabelsRequired)));
    }

    #[test]
    fn exhausted_cross_class_pairs() {
        // labels [0,0,1,1]; the four cross pairs are already edges
        let labels = vec![0, 0, 1, 1];
        let edges = vec![(0, 2), (0, 3), (1, 2), (1, 3)];
        let g = Graph::new("t", 4, 2, edges, Array2::zeros((4, 1)), Some(labels)).unwrap();
        let err = inject_noise(&g, NoiseSpec::new(NoiseLevel::I, 1)).unwrap_err();
        assert!(matches!(err, GraphError::NotEnoughCrossClassPairs { requested: 2, available: 0 }));
    }

    #[test]
    fn dense_graph_falls_back_to_enumeration() {
        // 3 classes of 2, nearly every cross pair taken: rejection rarely succeeds
        let n = 6;
        let labels: Vec<usize> = (0..n).map(|i| i / 2).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if labels[i] != labels[j] {
                    edges.push((i, j));
                }
            }
        }
        edges.retain(|&e| e != (0, 5) && e != (1, 4));
        let g = Graph::new("t", n, 3, edges, Array2::zeros((n, 1)), Some(labels)).unwrap();
        // m = 10, level I wants 3 but only 2 remain
        assert!(sample_noise_edges(&g, NoiseSpec::new(NoiseLevel::I, 3)).is_err());
        let fewer: Vec<_> = g.edges().iter().copied().filter(|&e| e != (0, 2)).collect();
        let labels = g.labels().map(|l| l.to_vec());
        let sparse = Graph::new("t", n, 3, fewer, Array2::zeros((n, 1)), labels).unwrap();
        // m = 9, wants 3, exactly 3 cross non-edges remain: every one must be picked
        let added = sample_noise_edges(&sparse, NoiseSpec::new(NoiseLevel::I, 11)).unwrap();
        let mut sorted = added.clone();
        sorted.sort();
        assert_eq!(sorted, vec![(0, 2), (0, 5), (1, 4)]);
    }
}
