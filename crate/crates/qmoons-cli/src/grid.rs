//! The noise x qubits x sample-count grid behind the accuracy tables.
//!
//! Cells are independent jobs: each one derives its own base seed from the
//! user seed and the cell coordinates, so the grid can run on any number of
//! workers, in any order, and still produce identical rows. Results are
//! collected in canonical (noise, qubits, samples, seed) order.

use std::fmt::Write as _;

use rayon::prelude::*;

use qmoons::rng::derive_seed;

use crate::config::{ExperimentConfig, ModelKind};
use crate::runner::{build_dataset, run_experiment};
use crate::CliError;

pub const GRID_NOISES: [f64; 4] = [0.05, 0.10, 0.25, 0.35];
pub const GRID_QUBITS: [usize; 3] = [2, 3, 4];
pub const GRID_SAMPLES: [usize; 3] = [200, 1000, 5000];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCell {
    pub noise: f64,
    pub n_qubits: usize,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct GridRow {
    pub cell: GridCell,
    pub test_accuracy: f64,
}

/// Training knobs shared by every cell.
#[derive(Clone, Copy, Debug)]
pub struct GridSettings {
    pub epochs: usize,
    pub sublayers: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Worker threads; 0 lets rayon pick.
    pub workers: usize,
}

pub fn cells(seeds: &[u64]) -> Vec<GridCell> {
    let mut out =
        Vec::with_capacity(GRID_NOISES.len() * GRID_QUBITS.len() * GRID_SAMPLES.len() * seeds.len());
    for &noise in &GRID_NOISES {
        for &n_qubits in &GRID_QUBITS {
            for &n_samples in &GRID_SAMPLES {
                for &seed in seeds {
                    out.push(GridCell { noise, n_qubits, n_samples, seed });
                }
            }
        }
    }
    out
}

/// Folds the cell coordinates into the user seed so every cell trains from
/// its own stream no matter where in the grid it sits.
fn cell_seed(cell: &GridCell) -> u64 {
    let mut seed = derive_seed(cell.seed, cell.noise.to_bits());
    seed = derive_seed(seed, cell.n_qubits as u64);
    derive_seed(seed, cell.n_samples as u64)
}

fn cell_config(cell: &GridCell, settings: &GridSettings) -> ExperimentConfig {
    ExperimentConfig {
        n_qubits: cell.n_qubits,
        n_sublayers: settings.sublayers,
        noise: cell.noise,
        n_samples: cell.n_samples,
        epochs: settings.epochs,
        learning_rate: settings.learning_rate,
        batch_size: settings.batch_size,
        seed: cell_seed(cell),
        model: ModelKind::Hybrid,
    }
}

fn run_cell(cell: &GridCell, settings: &GridSettings) -> Result<GridRow, CliError> {
    let cfg = cell_config(cell, settings);
    let data = build_dataset(cfg.n_samples, cfg.noise, cfg.seed)?;
    let (_, history) = run_experiment(&cfg, &data)?;
    Ok(GridRow { cell: *cell, test_accuracy: history.test_accuracy })
}

pub fn run_grid(seeds: &[u64], settings: &GridSettings) -> Result<Vec<GridRow>, CliError> {
    let cells = cells(seeds);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("building the worker pool: {e}")))?;
    // collect() preserves input order, so rows stay canonical on any pool.
    let results: Vec<Result<GridRow, CliError>> =
        pool.install(|| cells.par_iter().map(|c| run_cell(c, settings)).collect());
    let mut rows = Vec::with_capacity(cells.len());
    for (cell, result) in cells.iter().zip(results) {
        rows.push(result.map_err(|e| annotate(cell, e))?);
    }
    Ok(rows)
}

fn annotate(cell: &GridCell, err: CliError) -> CliError {
    let id = format!(
        "grid cell noise={:?} qubits={} samples={} seed={}",
        cell.noise, cell.n_qubits, cell.n_samples, cell.seed
    );
    match err {
        CliError::Usage(msg) => CliError::Usage(format!("{id}: {msg}")),
        CliError::Runtime(e) => CliError::Runtime(e.context(id)),
    }
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("noise,n_qubits,n_samples,seed,test_accuracy\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{:?},{},{},{},{:?}",
            row.cell.noise, row.cell.n_qubits, row.cell.n_samples, row.cell.seed, row.test_accuracy
        );
    }
    out
}

/// Mean test accuracy per cell over the seed list, in canonical cell order.
/// Relies on seeds being the innermost loop of [`cells`].
pub fn cell_means(rows: &[GridRow], n_seeds: usize) -> Vec<(GridCell, f64)> {
    assert!(n_seeds > 0 && rows.len() % n_seeds == 0);
    rows.chunks(n_seeds)
        .map(|chunk| {
            let mean = chunk.iter().map(|r| r.test_accuracy).sum::<f64>() / chunk.len() as f64;
            (chunk[0].cell, mean)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_seed_yields_36_cells_in_canonical_order() {
        let cells = cells(&[7]);
        assert_eq!(cells.len(), 36);
        assert_eq!(
            cells[0],
            GridCell { noise: 0.05, n_qubits: 2, n_samples: 200, seed: 7 }
        );
        assert_eq!(
            cells[35],
            GridCell { noise: 0.35, n_qubits: 4, n_samples: 5000, seed: 7 }
        );
        // noise varies slowest, samples fastest
        assert_eq!(cells[1].n_samples, 1000);
        assert_eq!(cells[3].n_qubits, 3);
        assert_eq!(cells[9].noise, 0.10);
    }

    #[test]
    fn seeds_are_the_innermost_axis() {
        let cells = cells(&[1, 2]);
        assert_eq!(cells.len(), 72);
        assert_eq!(cells[0].seed, 1);
        assert_eq!(cells[1].seed, 2);
        assert_eq!(cells[0].n_samples, cells[1].n_samples);
    }

    #[test]
    fn cell_seeds_differ_across_every_coordinate() {
        let base = GridCell { noise: 0.05, n_qubits: 2, n_samples: 200, seed: 1 };
        let variants = [
            GridCell { noise: 0.10, ..base },
            GridCell { n_qubits: 3, ..base },
            GridCell { n_samples: 1000, ..base },
            GridCell { seed: 2, ..base },
        ];
        for v in variants {
            assert_ne!(cell_seed(&base), cell_seed(&v), "{v:?}");
        }
    }

    #[test]
    fn means_average_consecutive_seed_rows() {
        let cell = GridCell { noise: 0.05, n_qubits: 2, n_samples: 200, seed: 1 };
        let rows = vec![
            GridRow { cell, test_accuracy: 0.9 },
            GridRow { cell: GridCell { seed: 2, ..cell }, test_accuracy: 1.0 },
        ];
        let means = cell_means(&rows, 2);
        assert_eq!(means.len(), 1);
        assert!((means[0].1 - 0.95).abs() < 1e-15);
    }
}
