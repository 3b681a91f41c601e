//! Command-line harness: dataset generation, training runs, the accuracy
//! grid, weight evaluation and metric-curve export.

pub mod cli;
pub mod config;
pub mod curves;
pub mod grid;
pub mod runner;

use std::fs;
use std::path::Path;

use anyhow::Context as _;
use clap::Parser as _;

use qmoons::dataset::{load_csv, MoonsDataset, SplitKind};
use qmoons::model::Model;
use qmoons::train::evaluate_split;

use cli::{Cli, Command, ConfigFlags};
use config::ExperimentConfig;
use grid::GridSettings;

/// Usage errors exit with 2 and name the offending flag; runtime failures
/// exit with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Runtime(err)
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenData { samples, noise, seed, out } => cmd_gen_data(samples, noise, seed, &out),
        Command::Train { flags, config, data, out } => {
            cmd_train(&flags, config.as_deref(), data.as_deref(), &out)
        }
        Command::Grid { seeds, epochs, sublayers, lr, batch, workers, out } => {
            let settings = GridSettings {
                epochs,
                sublayers,
                learning_rate: lr,
                batch_size: batch,
                workers,
            };
            cmd_grid(&seeds, &settings, &out)
        }
        Command::Eval { weights, data, split } => cmd_eval(&weights, &data, split),
        Command::Curves { runs, out } => cmd_curves(&runs, &out),
    }
}

fn cmd_gen_data(samples: usize, noise: f64, seed: u64, out: &Path) -> Result<(), CliError> {
    // reuse the train-config checks so the messages stay consistent
    ExperimentConfig { n_samples: samples, noise, ..ExperimentConfig::default() }.validate()?;
    let data = runner::build_dataset(samples, noise, seed)?;
    data.save_csv(out).map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let (train, val, test) = split_sizes(&data)?;
    println!("wrote {} samples to {} (train={train} val={val} test={test})", samples, out.display());
    Ok(())
}

fn split_sizes(data: &MoonsDataset) -> Result<(usize, usize, usize), CliError> {
    let len = |kind: SplitKind| -> Result<usize, CliError> {
        Ok(data
            .indices(kind)
            .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?
            .len())
    };
    Ok((len(SplitKind::Train)?, len(SplitKind::Val)?, len(SplitKind::Test)?))
}

fn cmd_train(
    flags: &ConfigFlags,
    config_path: Option<&Path>,
    data_path: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let cfg = ExperimentConfig::resolve(config_path, &flags.patch())?;
    let data = match data_path {
        Some(path) => load_csv(path).map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?,
        None => runner::build_dataset(cfg.n_samples, cfg.noise, cfg.seed)?,
    };
    let (model, history) = runner::run_experiment(&cfg, &data)?;

    fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let metrics_path = out.join("metrics.csv");
    fs::write(&metrics_path, runner::metrics_csv(&history))
        .with_context(|| format!("writing {}", metrics_path.display()))?;
    let weights_path = out.join("weights.json");
    model
        .save_json(&weights_path)
        .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let config_path = out.join("config.json");
    let mut config_json = serde_json::to_string_pretty(&cfg)
        .with_context(|| format!("encoding {}", config_path.display()))?;
    config_json.push('\n');
    fs::write(&config_path, config_json)
        .with_context(|| format!("writing {}", config_path.display()))?;

    println!("{}", runner::summary_line(&cfg, &model));
    println!("wrote metrics.csv, weights.json, config.json to {}", out.display());
    println!("test_accuracy={:?}", history.test_accuracy);
    Ok(())
}

fn cmd_grid(seeds: &[u64], settings: &GridSettings, out: &Path) -> Result<(), CliError> {
    if seeds.is_empty() {
        return Err(CliError::Usage("--seeds needs at least one seed".into()));
    }
    // validate the shared knobs once, with the same wording as train
    ExperimentConfig {
        n_sublayers: settings.sublayers,
        epochs: settings.epochs,
        learning_rate: settings.learning_rate,
        batch_size: settings.batch_size,
        ..ExperimentConfig::default()
    }
    .validate()?;
    let rows = grid::run_grid(seeds, settings)?;
    fs::write(out, grid::grid_csv(&rows)).with_context(|| format!("writing {}", out.display()))?;
    for (cell, mean) in grid::cell_means(&rows, seeds.len()) {
        println!(
            "mean noise={:?} qubits={} samples={} test_accuracy={:?}",
            cell.noise, cell.n_qubits, cell.n_samples, mean
        );
    }
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_eval(weights: &Path, data: &Path, split: SplitKind) -> Result<(), CliError> {
    let model = Model::load_json(weights).map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let dataset = load_csv(data).map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    let (loss, acc) = evaluate_split(&model, &dataset, split)
        .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
    println!("split={} loss={:?} accuracy={:?}", split.as_str(), loss, acc);
    Ok(())
}

fn cmd_curves(runs: &[std::path::PathBuf], out: &Path) -> Result<(), CliError> {
    let csv = curves::curves_csv(runs)?;
    let rows = csv.lines().count() - 1;
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {rows} rows to {}", out.display());
    Ok(())
}
