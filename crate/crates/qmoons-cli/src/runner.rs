//! Shared plumbing for the train, grid and eval subcommands.
//!
//! One base seed feeds four independent streams: the raw seed generates the
//! dataset, and salted derivations drive the split shuffle, the weight
//! initialisation and the epoch shuffles. Changing, say, the model init can
//! therefore never silently reshuffle the data.

use std::fmt::Write as _;

use qmoons::ansatz::AnsatzSpec;
use qmoons::dataset::{make_moons, MoonsDataset};
use qmoons::model::{FfnnModel, HybridModel, Model, N_CLASSES};
use qmoons::rng::derive_seed;
use qmoons::train::{train, MetricsHistory, TrainConfig, TrainError};

use crate::config::{ExperimentConfig, ModelKind};
use crate::CliError;

pub const SALT_SPLIT: u64 = 1;
pub const SALT_MODEL: u64 = 2;
pub const SALT_TRAIN: u64 = 3;

pub fn build_dataset(n_samples: usize, noise: f64, seed: u64) -> Result<MoonsDataset, CliError> {
    make_moons(n_samples, noise, seed)
        .and_then(|d| d.with_split(derive_seed(seed, SALT_SPLIT)))
        .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))
}

pub fn build_model(cfg: &ExperimentConfig) -> Result<Model, CliError> {
    let model_seed = derive_seed(cfg.seed, SALT_MODEL);
    match cfg.model {
        ModelKind::Hybrid => {
            let spec = AnsatzSpec::new(cfg.n_qubits, cfg.n_sublayers)
                .map_err(|e| CliError::Runtime(anyhow::Error::new(e)))?;
            Ok(Model::Hybrid(HybridModel::new(spec, N_CLASSES, model_seed)))
        }
        ModelKind::Ffnn => Ok(Model::Ffnn(FfnnModel::new(N_CLASSES, model_seed))),
    }
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &MoonsDataset,
) -> Result<(Model, MetricsHistory), CliError> {
    let mut model = build_model(cfg)?;
    let train_cfg = TrainConfig {
        learning_rate: cfg.learning_rate,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        seed: derive_seed(cfg.seed, SALT_TRAIN),
    };
    let history = train(&mut model, data, &train_cfg).map_err(train_error)?;
    Ok((model, history))
}

/// An oversized batch only surfaces once the split sizes are known, so it
/// maps back to the flag; everything else is a genuine runtime failure.
fn train_error(err: TrainError) -> CliError {
    match err {
        TrainError::BatchTooLarge { batch, train } => CliError::Usage(format!(
            "--batch {batch} exceeds the {train} samples in the train split"
        )),
        other => CliError::Runtime(anyhow::Error::new(other)),
    }
}

pub fn metrics_csv(history: &MetricsHistory) -> String {
    let mut out = String::from("epoch,loss,accuracy,val_loss,val_accuracy\n");
    for (i, m) in history.epochs.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?}",
            i + 1,
            m.loss,
            m.accuracy,
            m.val_loss,
            m.val_accuracy
        );
    }
    out
}

pub fn summary_line(cfg: &ExperimentConfig, model: &Model) -> String {
    match model {
        Model::Hybrid(m) => format!(
            "model=hybrid qubits={} sublayers={} ansatz_params={} trainable_weights={}",
            cfg.n_qubits,
            cfg.n_sublayers,
            m.ansatz_param_count(),
            m.trainable_count()
        ),
        Model::Ffnn(m) => format!("model=ffnn trainable_weights={}", m.trainable_count()),
    }
}
