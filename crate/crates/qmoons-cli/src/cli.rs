//! Argument surface of the qmoons binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qmoons::dataset::SplitKind;

use crate::config::{ConfigPatch, ModelKind};

#[derive(Debug, Parser)]
#[command(
    name = "qmoons",
    version,
    about = "Two-moons experiments with a small variational quantum classifier"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a two-moons dataset CSV with a 70/20/10 split
    GenData {
        /// Total number of samples across both classes
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Standard deviation of the Gaussian coordinate jitter
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output CSV path
        #[arg(long, default_value = "moons.csv")]
        out: PathBuf,
    },
    /// Train a model; writes metrics.csv, weights.json and config.json
    Train {
        #[command(flatten)]
        flags: ConfigFlags,
        /// JSON file with config values; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Existing dataset CSV; the dataset is generated when omitted
        #[arg(long)]
        data: Option<PathBuf>,
        /// Output directory
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Train every noise x qubits x samples cell and tabulate test accuracy
    Grid {
        /// Comma-separated base seeds, one grid pass per seed
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long, default_value_t = 4)]
        sublayers: usize,
        #[arg(long, default_value_t = 0.2)]
        lr: f64,
        #[arg(long, default_value_t = 32)]
        batch: usize,
        /// Worker threads for grid cells; 0 picks the rayon default
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output CSV path
        #[arg(long, default_value = "grid.csv")]
        out: PathBuf,
    },
    /// Evaluate saved weights on one split of a dataset
    Eval {
        /// weights.json written by train
        weights: PathBuf,
        /// Dataset CSV
        data: PathBuf,
        /// Split to score: train, val or test
        #[arg(long, default_value = "test")]
        split: SplitKind,
    },
    /// Merge training runs into one long-format CSV of metric curves
    Curves {
        /// Run directories containing config.json and metrics.csv
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Output CSV path
        #[arg(long, default_value = "curves.csv")]
        out: PathBuf,
    },
}

/// Per-field config overrides; unset flags keep file or default values.
#[derive(Debug, Args)]
pub struct ConfigFlags {
    /// Qubit count of the quantum layer
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Ansatz sublayers (RY row, RZ row, CNOT chain)
    #[arg(long)]
    pub sublayers: Option<usize>,
    /// Standard deviation of the dataset jitter
    #[arg(long)]
    pub noise: Option<f64>,
    /// Total dataset size before the split
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// SGD learning rate
    #[arg(long)]
    pub lr: Option<f64>,
    /// Mini-batch size
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Model family to train
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
}

impl ConfigFlags {
    pub fn patch(&self) -> ConfigPatch {
        ConfigPatch {
            n_qubits: self.qubits,
            n_sublayers: self.sublayers,
            noise: self.noise,
            n_samples: self.samples,
            epochs: self.epochs,
            learning_rate: self.lr,
            batch_size: self.batch,
            seed: self.seed,
            model: self.model,
        }
    }
}
