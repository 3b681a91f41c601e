//! Experiment settings: defaults, JSON config files, flag overrides.
//!
//! Resolution order is defaults, then the `--config` file, then individual
//! flags, so a file can pin a baseline and a flag can still vary one knob.
//! The resolved struct is what `train` writes to `config.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Dense encoder, quantum expectation layer, dense softmax head.
    Hybrid,
    /// Purely classical two-hidden-layer baseline.
    Ffnn,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Hybrid => "hybrid",
            ModelKind::Ffnn => "ffnn",
        })
    }
}

/// Fully resolved settings for one training run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    pub n_sublayers: usize,
    pub noise: f64,
    pub n_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub model: ModelKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_qubits: 2,
            n_sublayers: 4,
            noise: 0.05,
            n_samples: 1000,
            epochs: 20,
            learning_rate: 0.2,
            batch_size: 32,
            seed: 7,
            model: ModelKind::Hybrid,
        }
    }
}

/// Partial config, as read from a `--config` file or collected from flags.
/// Unknown keys in a file are rejected rather than silently dropped.
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub n_qubits: Option<usize>,
    pub n_sublayers: Option<usize>,
    pub noise: Option<f64>,
    pub n_samples: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub seed: Option<u64>,
    pub model: Option<ModelKind>,
}

impl ExperimentConfig {
    pub fn resolve(file: Option<&Path>, flags: &ConfigPatch) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Runtime(anyhow::anyhow!("reading config file {}: {e}", path.display()))
            })?;
            let patch: ConfigPatch = serde_json::from_str(&text).map_err(|e| {
                CliError::Usage(format!("config file {}: {e}", path.display()))
            })?;
            cfg.apply(&patch);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, patch: &ConfigPatch) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = patch.$field { self.$field = v; })*
            };
        }
        take!(n_qubits, n_sublayers, noise, n_samples, epochs, learning_rate, batch_size, seed, model);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let complaint = if self.n_qubits == 0 || self.n_qubits > 24 {
            Some(format!("--qubits must be between 1 and 24, got {}", self.n_qubits))
        } else if self.n_sublayers == 0 {
            Some("--sublayers must be at least 1".into())
        } else if !self.noise.is_finite() || self.noise < 0.0 {
            Some(format!("--noise must be finite and nonnegative, got {}", self.noise))
        } else if self.n_samples < 10 {
            Some(format!(
                "--samples must be at least 10 so every split is nonempty, got {}",
                self.n_samples
            ))
        } else if self.epochs == 0 {
            Some("--epochs must be at least 1".into())
        } else if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            Some(format!("--lr must be positive and finite, got {}", self.learning_rate))
        } else if self.batch_size == 0 {
            Some("--batch must be at least 1".into())
        } else {
            None
        };
        match complaint {
            Some(msg) => Err(CliError::Usage(msg)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_validate() {
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn flags_override_file_values() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"noise": 0.25, "epochs": 5}}"#).unwrap();
        let flags = ConfigPatch { epochs: Some(9), ..ConfigPatch::default() };
        let cfg = ExperimentConfig::resolve(Some(file.path()), &flags).unwrap();
        assert_eq!(cfg.noise, 0.25);
        assert_eq!(cfg.epochs, 9);
        assert_eq!(cfg.n_samples, 1000);
    }

    #[test]
    fn unknown_config_key_is_a_usage_error() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"lerning_rate": 0.1}}"#).unwrap();
        let err = ExperimentConfig::resolve(Some(file.path()), &ConfigPatch::default());
        match err {
            Err(CliError::Usage(msg)) => assert!(msg.contains("lerning_rate"), "{msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_flag() {
        let cases: [(fn(&mut ExperimentConfig), &str); 7] = [
            (|c| c.n_qubits = 0, "--qubits"),
            (|c| c.n_sublayers = 0, "--sublayers"),
            (|c| c.noise = -0.1, "--noise"),
            (|c| c.n_samples = 9, "--samples"),
            (|c| c.epochs = 0, "--epochs"),
            (|c| c.learning_rate = 0.0, "--lr"),
            (|c| c.batch_size = 0, "--batch"),
        ];
        for (mutate, flag) in cases {
            let mut cfg = ExperimentConfig::default();
            mutate(&mut cfg);
            match cfg.validate() {
                Err(CliError::Usage(msg)) => assert!(msg.starts_with(flag), "{msg}"),
                other => panic!("expected usage error for {flag}, got {other:?}"),
            }
        }
    }

    #[test]
    fn config_json_round_trips() {
        let cfg = ExperimentConfig { noise: 0.1, seed: 42, ..ExperimentConfig::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
