//! Deterministic two-moons generation, 70/20/10 splitting and CSV
//! persistence.
//!
//! The outer moon is the upper unit half-circle (label 0), the inner moon a
//! mirrored half-circle shifted to interleave with it (label 1). Points get
//! independent Gaussian jitter per coordinate, scaled by `noise`. Noise draws
//! and the row shuffle use separate streams derived from the seed, so two
//! datasets that differ only in `noise` pair up row by row.

use crate::rng::SplitMix64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("noise must be a finite non-negative number, got {0}")]
    InvalidNoise(f64),
    #[error("dataset already carries a split")]
    AlreadySplit,
    #[error("dataset carries no split")]
    NotSplit,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

/// Index lists into the point array, disjoint and jointly exhaustive.
/// Stored sorted ascending so a dataset compares equal after a CSV
/// round-trip.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Train,
    Val,
    Test,
}

impl SplitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitKind::Train => "train",
            SplitKind::Val => "val",
            SplitKind::Test => "test",
        }
    }
}

impl std::str::FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(SplitKind::Train),
            "val" => Ok(SplitKind::Val),
            "test" => Ok(SplitKind::Test),
            other => Err(format!("unknown split {other:?}, expected train, val or test")),
        }
    }
}

/// Labelled 2D samples, optionally partitioned into train/val/test.
#[derive(Clone, Debug, PartialEq)]
pub struct MoonsDataset {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<u8>,
    pub split: Option<Split>,
}

/// Generates `n_samples` two-moons points: ceil(n/2) outer (label 0),
/// floor(n/2) inner (label 1), jittered and shuffled.
pub fn make_moons(n_samples: usize, noise: f64, seed: u64) -> Result<MoonsDataset, DataError> {
    if n_samples < 2 {
        return Err(DataError::TooFewSamples { got: n_samples, min: 2 });
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(DataError::InvalidNoise(noise));
    }

    let mut root = SplitMix64::new(seed);
    let noise_seed = root.next_u64();
    let shuffle_seed = root.next_u64();

    let n_outer = n_samples.div_ceil(2);
    let n_inner = n_samples / 2;

    let mut points = Vec::with_capacity(n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    for t in arc_positions(n_outer) {
        points.push([t.cos(), t.sin()]);
        labels.push(0u8);
    }
    for t in arc_positions(n_inner) {
        points.push([1.0 - t.cos(), 1.0 - t.sin() - 0.5]);
        labels.push(1u8);
    }

    if noise > 0.0 {
        let mut jitter = SplitMix64::new(noise_seed);
        for p in &mut points {
            p[0] += noise * jitter.next_gaussian();
            p[1] += noise * jitter.next_gaussian();
        }
    }

    let mut order: Vec<usize> = (0..n_samples).collect();
    SplitMix64::new(shuffle_seed).shuffle(&mut order);
    let points = order.iter().map(|&i| points[i]).collect();
    let labels = order.iter().map(|&i| labels[i]).collect();

    Ok(MoonsDataset { points, labels, split: None })
}

/// Evenly spaced arc parameters over [0, pi], endpoints included.
fn arc_positions(count: usize) -> impl Iterator<Item = f64> {
    let step = if count > 1 { PI / (count - 1) as f64 } else { 0.0 };
    (0..count).map(move |k| k as f64 * step)
}

impl MoonsDataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Partitions into floor(0.7 n) train, floor(0.2 n) val and the rest test
    /// after a seeded shuffle. Requires at least 10 samples so every part is
    /// non-empty.
    pub fn with_split(mut self, seed: u64) -> Result<Self, DataError> {
        if self.split.is_some() {
            return Err(DataError::AlreadySplit);
        }
        let n = self.len();
        if n < 10 {
            return Err(DataError::TooFewSamples { got: n, min: 10 });
        }
        let mut order: Vec<usize> = (0..n).collect();
        SplitMix64::new(seed).shuffle(&mut order);
        let n_train = n * 7 / 10;
        let n_val = n * 2 / 10;
        let mut train = order[..n_train].to_vec();
        let mut val = order[n_train..n_train + n_val].to_vec();
        let mut test = order[n_train + n_val..].to_vec();
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        self.split = Some(Split { train, val, test });
        Ok(self)
    }

    /// Index list of one split part.
    pub fn indices(&self, kind: SplitKind) -> Result<&[usize], DataError> {
        let split = self.split.as_ref().ok_or(DataError::NotSplit)?;
        Ok(match kind {
            SplitKind::Train => &split.train,
            SplitKind::Val => &split.val,
            SplitKind::Test => &split.test,
        })
    }

    /// CSV serialisation: header `x1,x2,label,split`, one row per point in
    /// storage order, floats in shortest round-trip form.
    pub fn to_csv_string(&self) -> Result<String, DataError> {
        let split = self.split.as_ref().ok_or(DataError::NotSplit)?;
        let mut kind = vec![""; self.len()];
        for &i in &split.train {
            kind[i] = "train";
        }
        for &i in &split.val {
            kind[i] = "val";
        }
        for &i in &split.test {
            kind[i] = "test";
        }
        let mut out = String::from("x1,x2,label,split\n");
        for (i, (p, label)) in self.points.iter().zip(&self.labels).enumerate() {
            writeln!(out, "{:?},{:?},{},{}", p[0], p[1], label, kind[i])
                .expect("writing to a String cannot fail");
        }
        Ok(out)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        let text = self.to_csv_string()?;
        std::fs::write(path, text).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Reads a dataset written by [`MoonsDataset::save_csv`]. Split membership
/// is rebuilt from the `split` column; floats round-trip bit-exactly.
pub fn load_csv(path: impl AsRef<Path>) -> Result<MoonsDataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, &path.display().to_string())
}

fn parse_csv(text: &str, path: &str) -> Result<MoonsDataset, DataError> {
    let err = |line: usize, message: String| DataError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "x1,x2,label,split")) => {}
        Some((_, other)) => {
            return Err(err(1, format!("bad header {other:?}, expected \"x1,x2,label,split\"")))
        }
        None => return Err(err(1, "empty file".to_string())),
    }

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut split = Split { train: Vec::new(), val: Vec::new(), test: Vec::new() };
    for (index, line) in lines {
        let line_no = index + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(err(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let x1: f64 = fields[0]
            .parse()
            .map_err(|_| err(line_no, format!("bad x1 value {:?}", fields[0])))?;
        let x2: f64 = fields[1]
            .parse()
            .map_err(|_| err(line_no, format!("bad x2 value {:?}", fields[1])))?;
        let label: u8 = match fields[2] {
            "0" => 0,
            "1" => 1,
            other => return Err(err(line_no, format!("bad label {other:?}, expected 0 or 1"))),
        };
        let row = points.len();
        match fields[3] {
            "train" => split.train.push(row),
            "val" => split.val.push(row),
            "test" => split.test.push(row),
            other => {
                return Err(err(
                    line_no,
                    format!("bad split {other:?}, expected train, val or test"),
                ))
            }
        }
        points.push([x1, x2]);
        labels.push(label);
    }
    if points.is_empty() {
        return Err(err(1, "no data rows".to_string()));
    }
    Ok(MoonsDataset { points, labels, split: Some(split) })
}
