//! External clustering metrics: ACC, NMI, ARI and macro-F1.
//!
//! ACC and macro-F1 share a single optimal one-to-one matching of predicted
//! clusters to truth classes, found with the Hungarian method on the
//! confusion matrix.

use serde::{Deserialize, Serialize};

use crate::error::MetricError;

/// The four scores as fractions in their natural ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterScores {
    pub acc: f64,
    pub nmi: f64,
    pub ari: f64,
    pub f1: f64,
}

fn check(truth: &[usize], pred: &[usize]) -> Result<(), MetricError> {
    if truth.len() != pred.len() {
        return Err(MetricError::LengthMismatch { truth: truth.len(), pred: pred.len() });
    }
    Ok(())
}

/// Relabels values to `0..k` in ascending order of first appearance value.
fn compress(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut uniq: Vec<usize> = labels.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let mapped = labels.iter().map(|l| uniq.binary_search(l).expect("present")).collect();
    (mapped, uniq.len())
}

/// Contingency counts `table[t][p]` over compressed labels.
struct Contingency {
    table: Vec<Vec<usize>>,
    truth_sizes: Vec<usize>,
    pred_sizes: Vec<usize>,
    n: usize,
}

impl Contingency {
    fn new(truth: &[usize], pred: &[usize]) -> (Self, Vec<usize>, Vec<usize>) {
        let (t, kt) = compress(truth);
        let (p, kp) = compress(pred);
        let mut table = vec![vec![0usize; kp]; kt];
        let mut truth_sizes = vec![0; kt];
        let mut pred_sizes = vec![0; kp];
        for (&a, &b) in t.iter().zip(&p) {
            table[a][b] += 1;
            truth_sizes[a] += 1;
            pred_sizes[b] += 1;
        }
        (Self { table, truth_sizes, pred_sizes, n: truth.len() }, t, p)
    }
}

/// Minimum-cost perfect assignment on a square matrix. Returns, for each
/// row, the assigned column.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based potentials formulation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0usize;
        let mut min_v = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_v[j] {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if min_v[j] < delta {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if col_owner[j] > 0 {
            assignment[col_owner[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Optimal matching from compressed predicted cluster to compressed truth
/// class. Clusters left unmatched (more clusters than classes) map to `None`.
///
/// Among matchings with the most hits, the one with the largest F1 sum wins,
/// so the choice does not depend on how labels are numbered.
fn best_matching(c: &Contingency) -> Vec<Option<usize>> {
    let kt = c.truth_sizes.len();
    let kp = c.pred_sizes.len();
    let size = kt.max(kp);
    // F1 sums stay below kt, so this weight keeps them below half a hit
    let tie_weight = 0.5 / (kt as f64 + 1.0);
    let gain = |t: usize, p: usize| {
        if t < kt && p < kp {
            let hits = c.table[t][p] as f64;
            hits + tie_weight * 2.0 * hits / (c.truth_sizes[t] + c.pred_sizes[p]) as f64
        } else {
            0.0
        }
    };
    // rows = predicted clusters, columns = truth classes
    let cost: Vec<Vec<f64>> = (0..size).map(|p| (0..size).map(|t| -gain(t, p)).collect()).collect();
    let assignment = hungarian(&cost);
    (0..kp).map(|p| Some(assignment[p]).filter(|&t| t < kt)).collect()
}

/// Clustering accuracy under the best one-to-one label matching.
pub fn accuracy(truth: &[usize], pred: &[usize]) -> Result<f64, MetricError> {
    check(truth, pred)?;
    if truth.is_empty() {
        return Ok(1.0);
    }
    let (c, _, _) = Contingency::new(truth, pred);
    let matching = best_matching(&c);
    let hits: usize = matching.iter().enumerate().filter_map(|(p, t)| t.map(|t| c.table[t][p])).sum();
    Ok(hits as f64 / c.n as f64)
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the arithmetic mean of the two
/// entropies.
pub fn nmi(truth: &[usize], pred: &[usize]) -> Result<f64, MetricError> {
    check(truth, pred)?;
    if truth.is_empty() {
        return Ok(1.0);
    }
    let (c, _, _) = Contingency::new(truth, pred);
    let n = c.n as f64;
    let mut mi = 0.0;
    for (t, row) in c.table.iter().enumerate() {
        for (p, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let count = count as f64;
            mi += count / n * (count * n / (c.truth_sizes[t] as f64 * c.pred_sizes[p] as f64)).ln();
        }
    }
    let ht = entropy(&c.truth_sizes, c.n);
    let hp = entropy(&c.pred_sizes, c.n);
    if ht == 0.0 && hp == 0.0 {
        return Ok(1.0);
    }
    let denom = (ht + hp) / 2.0;
    Ok((mi / denom).clamp(0.0, 1.0))
}

fn pairs(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index from contingency pair counts.
pub fn ari(truth: &[usize], pred: &[usize]) -> Result<f64, MetricError> {
    check(truth, pred)?;
    let (c, _, _) = Contingency::new(truth, pred);
    let total = pairs(c.n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let index: f64 = c.table.iter().flatten().map(|&x| pairs(x)).sum();
    let sum_t: f64 = c.truth_sizes.iter().map(|&x| pairs(x)).sum();
    let sum_p: f64 = c.pred_sizes.iter().map(|&x| pairs(x)).sum();
    let expected = sum_t * sum_p / total;
    let max_index = (sum_t + sum_p) / 2.0;
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Unweighted mean of per-class F1 after applying the accuracy matching.
pub fn macro_f1(truth: &[usize], pred: &[usize]) -> Result<f64, MetricError> {
    check(truth, pred)?;
    if truth.is_empty() {
        return Ok(1.0);
    }
    let (c, t, p) = Contingency::new(truth, pred);
    let matching = best_matching(&c);
    let kt = c.truth_sizes.len();
    let mut tp = vec![0usize; kt];
    let mut predicted = vec![0usize; kt];
    for (&ti, &pi) in t.iter().zip(&p) {
        if let Some(mapped) = matching[pi] {
            predicted[mapped] += 1;
            if mapped == ti {
                tp[mapped] += 1;
            }
        }
    }
    let f1_sum: f64 = (0..kt)
        .map(|k| {
            let denom = predicted[k] + c.truth_sizes[k];
            if tp[k] == 0 || denom == 0 {
                0.0
            } else {
                2.0 * tp[k] as f64 / denom as f64
            }
        })
        .sum();
    Ok(f1_sum / kt as f64)
}

pub fn evaluate(truth: &[usize], pred: &[usize]) -> Result<ClusterScores, MetricError> {
    Ok(ClusterScores {
        acc: accuracy(truth, pred)?,
        nmi: nmi(truth, pred)?,
        ari: ari(truth, pred)?,
        f1: macro_f1(truth, pred)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.5);
        assert_eq!(accuracy(&[2, 0, 1], &[2, 0, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1], &[0]), Err(MetricError::LengthMismatch { truth: 2, pred: 1 }));
    }

    #[test]
    fn accuracy_rectangular() {
        // three predicted clusters, two classes
        assert_abs_diff_eq!(accuracy(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 2, 2, 2]).unwrap(), 5.0 / 6.0);
        // one predicted cluster, three classes
        assert_abs_diff_eq!(accuracy(&[0, 0, 1, 2], &[7, 7, 7, 7]).unwrap(), 0.5);
    }

    #[test]
    fn nmi_examples() {
        assert_abs_diff_eq!(nmi(&[0, 0, 1, 1], &[5, 5, 9, 9]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0, epsilon = 1e-9);
        assert_eq!(nmi(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 1], &[1, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn ari_examples() {
        assert_abs_diff_eq!(ari(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_abs_diff_eq!(ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ari(&[0, 0, 1, 1], &[0, 0, 0, 0]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(macro_f1(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(macro_f1(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_abs_diff_eq!(macro_f1(&[0, 0, 1, 1], &[0, 0, 0, 1]).unwrap(), (0.8 + 2.0 / 3.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }
}
