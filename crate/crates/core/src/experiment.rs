//! Multi-seed experiments, noise studies, sigma sweeps and their reports.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checkpoint;
use crate::error::{GraphError, TrainError};
use crate::graph::Graph;
use crate::io::write_label_file;
use crate::metrics::ClusterScores;
use crate::noise::{self, NoiseLevel, NoiseSpec};
use crate::train::{self, TrainConfig, TrainOutcome};

pub const HISTORY_FILE: &str = "history.jsonl";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const PREDICTIONS_FILE: &str = "predictions.txt";
pub const EMBEDDINGS_FILE: &str = "embeddings.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Mean and population standard deviation, percent scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    /// Summarizes fractions; the result is in percent, rounded to 2 decimals.
    pub fn from_fractions(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { mean: round_to(100.0 * mean, 2), std: round_to(100.0 * var.sqrt(), 2) }
    }
}

fn round_to(value: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (value * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummaries {
    pub acc: Summary,
    pub nmi: Summary,
    pub ari: Summary,
    pub f1: Summary,
}

impl MetricSummaries {
    pub fn from_scores(scores: &[ClusterScores]) -> Self {
        let pick = |f: fn(&ClusterScores) -> f64| Summary::from_fractions(&scores.iter().map(f).collect::<Vec<_>>());
        Self { acc: pick(|s| s.acc), nmi: pick(|s| s.nmi), ari: pick(|s| s.ari), f1: pick(|s| s.f1) }
    }
}

/// Relative drop of each mean versus a baseline, in percent, one decimal.
/// `None` where the baseline mean is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Degradation {
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    pub f1: Option<f64>,
}

impl Degradation {
    pub fn between(baseline: &MetricSummaries, current: &MetricSummaries) -> Self {
        let rel = |b: Summary, c: Summary| (b.mean != 0.0).then(|| round_to(100.0 * (b.mean - c.mean) / b.mean, 1));
        Self {
            acc: rel(baseline.acc, current.acc),
            nmi: rel(baseline.nmi, current.nmi),
            ari: rel(baseline.ari, current.ari),
            f1: rel(baseline.f1, current.f1),
        }
    }
}

/// Raw outcome of one seed; scores are fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub train_seed: u64,
    pub noise_seed: u64,
    pub added_edges: usize,
    pub scores: ClusterScores,
    pub first_loss: f64,
    pub final_loss: f64,
    pub clusters_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dataset: String,
    pub config: TrainConfig,
    pub noise: NoiseSpec,
    pub metrics: MetricSummaries,
    pub degradation: Option<Degradation>,
    pub per_seed: Vec<SeedResult>,
}

impl MetricsReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TrainError> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrainError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Trains once on `graph` with noise applied for run index `seed`.
///
/// The training seed is `cfg.seed + seed`, the noise seed
/// `noise.seed + seed`.
pub fn run_seed(
    graph: &Graph,
    cfg: &TrainConfig,
    noise: NoiseSpec,
    seed: u64,
) -> Result<(SeedResult, TrainOutcome), TrainError> {
    let truth = graph.labels().ok_or(GraphError::LabelsRequired)?;
    let noise_seed = noise.seed.wrapping_add(seed);
    let noisy = noise::inject_noise(graph, NoiseSpec::new(noise.level, noise_seed))?;
    let run_cfg = TrainConfig { seed: cfg.seed.wrapping_add(seed), ..cfg.clone() };
    let outcome = train::train(&noisy, &run_cfg)?;
    let scores = crate::metrics::evaluate(truth, &outcome.labels)?;
    let first_loss = outcome.history.first().map_or(f64::NAN, |l| l.losses.total);
    let final_loss = outcome.history.last().map_or(f64::NAN, |l| l.losses.total);
    let mut used = outcome.labels.clone();
    used.sort_unstable();
    used.dedup();
    let result = SeedResult {
        seed,
        train_seed: run_cfg.seed,
        noise_seed,
        added_edges: noisy.num_edges() - graph.num_edges(),
        scores,
        first_loss,
        final_loss,
        clusters_used: used.len(),
    };
    log::info!("seed {seed}: acc {:.4} nmi {:.4} ari {:.4} f1 {:.4}", scores.acc, scores.nmi, scores.ari, scores.f1);
    Ok((result, outcome))
}

/// Runs seeds `0..num_seeds` in order and aggregates them.
pub fn run_experiment(
    graph: &Graph,
    cfg: &TrainConfig,
    noise: NoiseSpec,
    num_seeds: usize,
    baseline: Option<&MetricsReport>,
) -> Result<MetricsReport, TrainError> {
    if num_seeds == 0 {
        return Err(TrainError::InvalidConfig("at least one seed is required".into()));
    }
    let mut per_seed = Vec::with_capacity(num_seeds);
    for seed in 0..num_seeds as u64 {
        per_seed.push(run_seed(graph, cfg, noise, seed)?.0);
    }
    let scores: Vec<ClusterScores> = per_seed.iter().map(|r| r.scores).collect();
    let metrics = MetricSummaries::from_scores(&scores);
    Ok(MetricsReport {
        dataset: graph.name().to_string(),
        config: cfg.clone(),
        noise,
        metrics,
        degradation: baseline.map(|b| Degradation::between(&b.metrics, &metrics)),
        per_seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub metrics: MetricSummaries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub dataset: String,
    pub config: TrainConfig,
    pub noise: NoiseSpec,
    pub num_seeds: usize,
    pub points: Vec<SweepPoint>,
}

/// Repeats [`run_experiment`] for each fusion weight.
pub fn sigma_sweep(
    graph: &Graph,
    cfg: &TrainConfig,
    noise: NoiseSpec,
    sigmas: &[f64],
    num_seeds: usize,
) -> Result<SweepReport, TrainError> {
    let mut points = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let report = run_experiment(graph, &TrainConfig { sigma, ..cfg.clone() }, noise, num_seeds, None)?;
        points.push(SweepPoint { sigma, metrics: report.metrics });
    }
    Ok(SweepReport { dataset: graph.name().to_string(), config: cfg.clone(), noise, num_seeds, points })
}

/// Parses `start:end:step` into an inclusive grid, stepping by integer
/// multiples so values do not drift.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}` in range `{text}`")))
        .collect::<Result<_, _>>()?;
    match nums.as_slice() {
        [single] => Ok(vec![*single]),
        [start, end, step] => {
            if !(*step > 0.0) || end < start {
                return Err(format!("range `{text}` needs start <= end and a positive step"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round_to(start + i as f64 * step, 10)).collect())
        }
        _ => Err(format!("range `{text}` must be F or START:END:STEP")),
    }
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    dataset: &'a str,
    config: &'a TrainConfig,
    epochs_run: usize,
    landmarks: &'a [usize],
    metrics: Option<ClusterScores>,
    final_loss: Option<f64>,
}

/// Writes one training run: per-epoch history, checkpoint, predicted
/// labels, embeddings and a JSON summary.
pub fn save_run(
    dir: impl AsRef<Path>,
    dataset: &str,
    cfg: &TrainConfig,
    outcome: &TrainOutcome,
) -> Result<(), TrainError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    write_history(dir.join(HISTORY_FILE), &outcome.history)?;
    checkpoint::save(dir.join(CHECKPOINT_FILE), &outcome.params, &outcome.encoder)?;
    write_label_file(dir.join(PREDICTIONS_FILE), &outcome.labels)?;

    let mut out = BufWriter::new(fs::File::create(dir.join(EMBEDDINGS_FILE))?);
    for row in outcome.state.h.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;

    let summary = RunSummary {
        dataset,
        config: cfg,
        epochs_run: outcome.history.len(),
        landmarks: &outcome.landmarks.node_ids,
        metrics: outcome.metrics,
        final_loss: outcome.history.last().map(|l| l.losses.total),
    };
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

pub fn write_history(path: impl AsRef<Path>, history: &[train::EpochLog]) -> Result<(), TrainError> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for log in history {
        serde_json::to_writer(&mut out, log)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_history(path: impl AsRef<Path>) -> Result<Vec<train::EpochLog>, TrainError> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(TrainError::from))
        .collect()
}

/// Clean baseline plus the three noise levels, each against the clean run.
pub fn noise_study(
    graph: &Graph,
    cfg: &TrainConfig,
    num_seeds: usize,
    noise_seed: u64,
) -> Result<Vec<MetricsReport>, TrainError> {
    let clean = run_experiment(graph, cfg, NoiseSpec::new(NoiseLevel::Clean, noise_seed), num_seeds, None)?;
    let mut reports = vec![clean];
    for level in [NoiseLevel::I, NoiseLevel::II, NoiseLevel::III] {
        let r = run_experiment(graph, cfg, NoiseSpec::new(level, noise_seed), num_seeds, Some(&reports[0]))?;
        reports.push(r);
    }
    Ok(reports)
}
