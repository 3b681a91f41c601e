//! Mini-batch SGD with per-epoch metrics.
//!
//! Each epoch shuffles the training indices with a stream derived from the
//! config seed and the epoch number, walks consecutive mini-batches (the
//! trailing partial batch included), and then scores the full train and
//! validation splits with the updated weights. The test split is scored once
//! after the final epoch. Bitwise deterministic for a given model, dataset
//! and config.

use crate::dataset::{MoonsDataset, SplitKind};
use crate::model::{accuracy, loss_mae, one_hot, Model, ModelError};
use crate::rng::{derive_seed, SplitMix64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("epochs must be positive")]
    ZeroEpochs,
    #[error("batch size must be positive")]
    ZeroBatch,
    #[error("learning rate must be positive and finite, got {0}")]
    BadLearningRate(f64),
    #[error("batch size {batch} exceeds training-set size {train}")]
    BatchTooLarge { batch: usize, train: usize },
    #[error("dataset carries no split")]
    NotSplit,
    #[error("the {0} split is empty")]
    EmptySplit(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

/// Metrics recorded after one epoch's updates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochMetrics {
    pub loss: f64,
    pub accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsHistory {
    pub epochs: Vec<EpochMetrics>,
    pub test_accuracy: f64,
}

/// Mean loss and accuracy of one split, rows visited in index order.
pub fn evaluate_split(
    model: &Model,
    data: &MoonsDataset,
    kind: SplitKind,
) -> Result<(f64, f64), TrainError> {
    let indices = data.indices(kind).map_err(|_| TrainError::NotSplit)?;
    if indices.is_empty() {
        return Err(TrainError::EmptySplit(kind.as_str()));
    }
    let n_classes = model.n_classes();
    let mut predictions = Vec::with_capacity(indices.len());
    let mut labels = Vec::with_capacity(indices.len());
    let mut loss_sum = 0.0;
    for &i in indices {
        let probs = model.forward(&data.points[i])?;
        loss_sum += loss_mae(&probs, &one_hot(data.labels[i] as usize, n_classes))?;
        predictions.push(probs);
        labels.push(data.labels[i]);
    }
    let acc = accuracy(&predictions, &labels)?;
    Ok((loss_sum / indices.len() as f64, acc))
}

pub fn train(
    model: &mut Model,
    data: &MoonsDataset,
    config: &TrainConfig,
) -> Result<MetricsHistory, TrainError> {
    if config.epochs == 0 {
        return Err(TrainError::ZeroEpochs);
    }
    if config.batch_size == 0 {
        return Err(TrainError::ZeroBatch);
    }
    if !config.learning_rate.is_finite() || config.learning_rate <= 0.0 {
        return Err(TrainError::BadLearningRate(config.learning_rate));
    }
    let train_indices = data.indices(SplitKind::Train).map_err(|_| TrainError::NotSplit)?;
    for kind in [SplitKind::Train, SplitKind::Val, SplitKind::Test] {
        if data.indices(kind).map_err(|_| TrainError::NotSplit)?.is_empty() {
            return Err(TrainError::EmptySplit(kind.as_str()));
        }
    }
    if config.batch_size > train_indices.len() {
        return Err(TrainError::BatchTooLarge {
            batch: config.batch_size,
            train: train_indices.len(),
        });
    }

    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut order = train_indices.to_vec();
        SplitMix64::new(derive_seed(config.seed, epoch as u64)).shuffle(&mut order);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<([f64; 2], u8)> =
                chunk.iter().map(|&i| (data.points[i], data.labels[i])).collect();
            let grads = model.batch_gradient(&batch)?;
            model.sgd_step(&grads, config.learning_rate)?;
        }
        let (loss, acc) = evaluate_split(model, data, SplitKind::Train)?;
        let (val_loss, val_acc) = evaluate_split(model, data, SplitKind::Val)?;
        history.push(EpochMetrics {
            loss,
            accuracy: acc,
            val_loss,
            val_accuracy: val_acc,
        });
    }
    let (_, test_accuracy) = evaluate_split(model, data, SplitKind::Test)?;
    Ok(MetricsHistory { epochs: history, test_accuracy })
}
