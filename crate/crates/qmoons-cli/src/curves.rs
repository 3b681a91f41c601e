//! Merges training runs into one long-format CSV of metric curves.
//!
//! Each run directory contributes its noise level (from config.json) and the
//! per-epoch metrics (from metrics.csv). Metric values are copied through as
//! the exact strings the run wrote, so downstream plots see the same numbers
//! the run reported.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const METRICS_HEADER: &str = "epoch,loss,accuracy,val_loss,val_accuracy";
const METRIC_NAMES: [&str; 4] = ["loss", "accuracy", "val_loss", "val_accuracy"];

struct CurveRow {
    noise: f64,
    epoch: usize,
    metric: &'static str,
    value: String,
}

pub fn curves_csv(run_dirs: &[PathBuf]) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for dir in run_dirs {
        collect_run(dir, &mut rows)?;
    }
    rows.sort_by(|a, b| {
        a.noise
            .total_cmp(&b.noise)
            .then(a.epoch.cmp(&b.epoch))
            .then(a.metric.cmp(b.metric))
    });
    let mut out = String::from("noise,epoch,metric,value\n");
    for r in &rows {
        out.push_str(&format!("{:?},{},{},{}\n", r.noise, r.epoch, r.metric, r.value));
    }
    Ok(out)
}

fn collect_run(dir: &Path, rows: &mut Vec<CurveRow>) -> Result<(), CliError> {
    let config_path = dir.join("config.json");
    let text = fs::read_to_string(&config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", config_path.display()))?;

    let metrics_path = dir.join("metrics.csv");
    let text = fs::read_to_string(&metrics_path)
        .with_context(|| format!("reading {}", metrics_path.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some(METRICS_HEADER) {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "{}: expected header {:?}",
            metrics_path.display(),
            METRICS_HEADER
        )));
    }
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{} line {line_no}: expected 5 fields, got {}",
                metrics_path.display(),
                fields.len()
            )));
        }
        let epoch: usize = fields[0].parse().map_err(|_| {
            CliError::Runtime(anyhow::anyhow!(
                "{} line {line_no}: bad epoch number {:?}",
                metrics_path.display(),
                fields[0]
            ))
        })?;
        for (name, value) in METRIC_NAMES.iter().zip(&fields[1..]) {
            rows.push(CurveRow {
                noise: cfg.noise,
                epoch,
                metric: name,
                value: (*value).to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_run(dir: &Path, noise: f64, metric_lines: &[&str]) {
        let cfg = ExperimentConfig { noise, ..ExperimentConfig::default() };
        fs::write(dir.join("config.json"), serde_json::to_string(&cfg).unwrap()).unwrap();
        let mut csv = String::from(METRICS_HEADER);
        csv.push('\n');
        for line in metric_lines {
            csv.push_str(line);
            csv.push('\n');
        }
        fs::write(dir.join("metrics.csv"), csv).unwrap();
    }

    #[test]
    fn rows_sort_by_noise_then_epoch_then_metric() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_run(a.path(), 0.25, &["1,0.4,0.8,0.5,0.7"]);
        write_run(b.path(), 0.05, &["1,0.2,0.9,0.3,0.85", "2,0.1,0.95,0.2,0.9"]);
        let csv =
            curves_csv(&[a.path().to_path_buf(), b.path().to_path_buf()]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "noise,epoch,metric,value");
        assert_eq!(lines[1], "0.05,1,accuracy,0.9");
        assert_eq!(lines[2], "0.05,1,loss,0.2");
        assert_eq!(lines[3], "0.05,1,val_accuracy,0.85");
        assert_eq!(lines[4], "0.05,1,val_loss,0.3");
        assert_eq!(lines[5], "0.05,2,accuracy,0.95");
        assert_eq!(lines[9], "0.25,1,accuracy,0.8");
        assert_eq!(lines.len(), 13);
    }

    #[test]
    fn metric_values_pass_through_untouched() {
        let a = tempfile::tempdir().unwrap();
        // deliberately quirky but distinct strings
        write_run(a.path(), 0.1, &["1,0.30000000000000004,1.0,0.125,0.875"]);
        let csv = curves_csv(&[a.path().to_path_buf()]).unwrap();
        assert!(csv.contains("0.1,1,loss,0.30000000000000004\n"), "{csv}");
        assert!(csv.contains("0.1,1,accuracy,1.0\n"), "{csv}");
    }

    #[test]
    fn missing_metrics_file_reports_the_path() {
        let a = tempfile::tempdir().unwrap();
        write_run(a.path(), 0.1, &[]);
        fs::remove_file(a.path().join("metrics.csv")).unwrap();
        let err = curves_csv(&[a.path().to_path_buf()]).unwrap_err();
        match err {
            CliError::Runtime(e) => {
                assert!(format!("{e:#}").contains("metrics.csv"), "{e:#}")
            }
            other => panic!("expected runtime error, got {other:?}"),
        }
    }
}
