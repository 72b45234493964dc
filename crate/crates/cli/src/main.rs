use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdsa_core::experiment::{self, MetricsReport};
use rdsa_core::io::{load_graph, read_label_file, save_graph};
use rdsa_core::modularity::AuxMode;
use rdsa_core::noise::{NoiseLevel, NoiseSpec};
use rdsa_core::synthetic::{self, SyntheticSpec};
use rdsa_core::train::{self, FeatureNorm, KlReduction, TrainConfig};
use rdsa_core::{Graph, TrainError};

const EXIT_INPUT: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "rdsa", version, about = "Deep graph clustering with structure- and node-based soft assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train once and write history, checkpoint, predictions and embeddings.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predicted label file against a ground-truth label file.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Multi-seed run, optionally under edge noise, written as a report.
    Experiment {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "clean")]
        noise: NoiseLevel,
        #[arg(long, default_value_t = 0)]
        noise_seed: u64,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long)]
        out: PathBuf,
        /// Clean-run report to compute relative degradation against.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Repeat the experiment over a grid of fusion weights.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        /// START:END:STEP, inclusive, or a single value.
        #[arg(long = "sigma", value_name = "RANGE")]
        sigma_range: String,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value = "clean")]
        noise: NoiseLevel,
        #[arg(long, default_value_t = 0)]
        noise_seed: u64,
        #[command(flatten)]
        opts: SharedOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a planted-partition dataset directory.
    Synth {
        #[arg(long, default_value_t = 600)]
        nodes: usize,
        #[arg(long, default_value_t = 4)]
        clusters: usize,
        #[arg(long, default_value_t = 200)]
        features: usize,
        #[arg(long, default_value_t = 4.0)]
        avg_degree: f64,
        #[arg(long, default_value_t = 0.85)]
        homophily: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct TrainOpts {
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    shared: SharedOpts,
}

/// Everything but the fusion weight, which `sweep` takes as a range.
#[derive(Args, Clone)]
struct SharedOpts {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    batch_size: Option<usize>,
    /// labels:F, central or none.
    #[arg(long)]
    aux: Option<AuxMode>,
    /// Comma-separated encoder widths, e.g. 256,128,64.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    /// Row scaling of node attributes: none, l1 or l2.
    #[arg(long)]
    feature_norm: Option<FeatureNorm>,
    /// Reduction of the node-based KL loss: sum, batchmean or mean.
    #[arg(long)]
    attr_reduction: Option<KlReduction>,
}

impl TrainOpts {
    fn config(&self) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig { sigma: self.sigma.unwrap_or(d.sigma), ..self.shared.config() }
    }
}

impl SharedOpts {
    fn config(&self) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            epochs: self.epochs.unwrap_or(d.epochs),
            learning_rate: self.lr.unwrap_or(d.learning_rate),
            sigma: d.sigma,
            alpha: self.alpha.unwrap_or(d.alpha),
            nu: self.nu.unwrap_or(d.nu),
            seed: self.seed,
            batch_size: self.batch_size,
            aux_mode: self.aux.unwrap_or(d.aux_mode),
            hidden_dims: self.hidden.clone().unwrap_or(d.hidden_dims),
            feature_norm: self.feature_norm.unwrap_or(d.feature_norm),
            attr_reduction: self.attr_reduction.unwrap_or(d.attr_reduction),
            track_metrics: true,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Diverged(String),
}

impl From<TrainError> for Failure {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NonFiniteLoss { .. } | TrainError::Embed(_) | TrainError::Struct(_) | TrainError::Assign(_) => {
                Failure::Diverged(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<rdsa_core::GraphError> for Failure {
    fn from(e: rdsa_core::GraphError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load(dir: &Path) -> Result<Graph, Failure> {
    Ok(load_graph(dir)?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Train { dataset, opts, out } => {
            let graph = load(&dataset)?;
            let cfg = opts.config();
            let outcome = train::train(&graph, &cfg)?;
            experiment::save_run(&out, graph.name(), &cfg, &outcome)?;
            if let Some(m) = outcome.metrics {
                println!("{}", serde_json::to_string(&m).expect("scores serialize"));
            }
        }
        Command::Eval { pred, truth } => {
            let pred = read_label_file(&pred)?;
            let truth = read_label_file(&truth)?;
            let scores = rdsa_core::metrics::evaluate(&truth, &pred).map_err(|e| Failure::Input(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&scores).expect("scores serialize"));
        }
        Command::Experiment { dataset, noise, noise_seed, seeds, opts, out, baseline } => {
            let baseline = baseline.map(MetricsReport::load).transpose()?;
            let graph = load(&dataset)?;
            let report = experiment::run_experiment(
                &graph,
                &opts.config(),
                NoiseSpec::new(noise, noise_seed),
                seeds,
                baseline.as_ref(),
            )?;
            report.save(&out)?;
            println!("{}", serde_json::to_string(&report.metrics).expect("metrics serialize"));
        }
        Command::Sweep { dataset, sigma_range, seeds, noise, noise_seed, opts, out } => {
            let sigmas = experiment::parse_range(&sigma_range).map_err(Failure::Input)?;
            let graph = load(&dataset)?;
            let report =
                experiment::sigma_sweep(&graph, &opts.config(), NoiseSpec::new(noise, noise_seed), &sigmas, seeds)?;
            write_json(&out, &report)?;
        }
        Command::Synth { nodes, clusters, features, avg_degree, homophily, seed, out } => {
            let spec = SyntheticSpec {
                num_nodes: nodes,
                num_clusters: clusters,
                num_features: features,
                avg_degree,
                homophily,
                seed,
                ..SyntheticSpec::default()
            };
            save_graph(&synthetic::generate(&spec)?, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Diverged(msg)) => {
            eprintln!("training failed: {msg}");
            ExitCode::from(EXIT_DIVERGED)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::Cli;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }
}
