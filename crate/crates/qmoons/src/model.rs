//! The hybrid classifier and its all-classical baseline.
//!
//! The hybrid model is dense 2 -> angles, quantum expectation layer, dense
//! n_qubits -> classes with softmax. The baseline is a plain 2 -> 16 -> 16 ->
//! classes ReLU net. Both train with mean absolute error between the softmax
//! output and the one-hot target, so the quantum layer only ever needs the
//! Jacobian of its expectations.

use crate::ansatz::{AnsatzError, AnsatzSpec};
use crate::rng::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// The two-moons task is binary; carried as an explicit argument so the
/// counting arithmetic stays visible.
pub const N_CLASSES: usize = 2;

/// Hidden width of the classical baseline.
pub const FFNN_HIDDEN: usize = 16;

pub const WEIGHTS_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("weights file {path}: {message}")]
    Format { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Relu,
    Softmax,
}

/// Fully connected layer, weights row-major `out_dim x in_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    /// Fan-balanced uniform init: weights in [-s, s] with
    /// s = sqrt(6 / (in + out)), drawn row-major; biases zero.
    pub fn init(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut SplitMix64) -> Self {
        let s = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = (0..in_dim * out_dim).map(|_| rng.uniform(-s, s)).collect();
        Self { in_dim, out_dim, weights, bias: vec![0.0; out_dim], activation }
    }

    pub fn param_count(&self) -> usize {
        self.out_dim * (self.in_dim + 1)
    }

    /// Pre-activation z = Wx + b.
    fn affine(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        let mut z = self.bias.clone();
        for (row, zr) in z.iter_mut().enumerate() {
            let w = &self.weights[row * self.in_dim..(row + 1) * self.in_dim];
            for (wc, xc) in w.iter().zip(x) {
                *zr += wc * xc;
            }
        }
        z
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let z = self.affine(x);
        match self.activation {
            Activation::Linear => z,
            Activation::Relu => z.into_iter().map(|v| v.max(0.0)).collect(),
            Activation::Softmax => softmax(&z),
        }
    }

    /// Gradient with respect to the layer input: W^T g.
    fn input_gradient(&self, g_out: &[f64]) -> Vec<f64> {
        let mut g_in = vec![0.0; self.in_dim];
        for (row, g) in g_out.iter().enumerate() {
            let w = &self.weights[row * self.in_dim..(row + 1) * self.in_dim];
            for (gi, wc) in g_in.iter_mut().zip(w) {
                *gi += g * wc;
            }
        }
        g_in
    }
}

/// Numerically safe softmax: exponents are shifted by the max entry.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean absolute error between a probability vector and a one-hot target.
pub fn loss_mae(probs: &[f64], target: &[f64]) -> Result<f64, ModelError> {
    if probs.len() != target.len() {
        return Err(ModelError::LengthMismatch { left: probs.len(), right: target.len() });
    }
    if probs.is_empty() {
        return Err(ModelError::Empty);
    }
    let sum: f64 = probs.iter().zip(target).map(|(p, y)| (p - y).abs()).sum();
    Ok(sum / probs.len() as f64)
}

/// dMAE/dp with the subgradient at p = y taken as 0.
pub fn mae_subgradient(probs: &[f64], target: &[f64]) -> Result<Vec<f64>, ModelError> {
    if probs.len() != target.len() {
        return Err(ModelError::LengthMismatch { left: probs.len(), right: target.len() });
    }
    let scale = 1.0 / probs.len() as f64;
    Ok(probs
        .iter()
        .zip(target)
        .map(|(p, y)| {
            let d = p - y;
            if d > 0.0 {
                scale
            } else if d < 0.0 {
                -scale
            } else {
                0.0
            }
        })
        .collect())
}

/// Pulls a gradient over probabilities back through softmax:
/// g_z[j] = p[j] * (g_p[j] - sum_i g_p[i] p[i]).
fn softmax_backward(probs: &[f64], g_probs: &[f64]) -> Vec<f64> {
    let dot: f64 = probs.iter().zip(g_probs).map(|(p, g)| p * g).sum();
    probs.iter().zip(g_probs).map(|(p, g)| p * (g - dot)).collect()
}

pub fn one_hot(class: usize, n_classes: usize) -> Vec<f64> {
    let mut y = vec![0.0; n_classes];
    y[class] = 1.0;
    y
}

/// Fraction of rows whose argmax matches the label; ties resolve to the
/// lower index.
pub fn accuracy(predictions: &[Vec<f64>], labels: &[u8]) -> Result<f64, ModelError> {
    if predictions.len() != labels.len() {
        return Err(ModelError::LengthMismatch { left: predictions.len(), right: labels.len() });
    }
    if predictions.is_empty() {
        return Err(ModelError::Empty);
    }
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, &label)| argmax(p) == label as usize)
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Dense 2 -> angles, quantum expectations, dense n_qubits -> classes.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridModel {
    pub input_dense: DenseLayer,
    pub spec: AnsatzSpec,
    pub output_dense: DenseLayer,
}

struct HybridTrace {
    angles: Vec<f64>,
    expectations: Vec<f64>,
    probs: Vec<f64>,
}

impl HybridModel {
    /// Seeded init: input layer weights drawn first, then output layer.
    pub fn new(spec: AnsatzSpec, n_classes: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let input_dense = DenseLayer::init(2, spec.param_count(), Activation::Linear, &mut rng);
        let output_dense = DenseLayer::init(spec.n_qubits(), n_classes, Activation::Softmax, &mut rng);
        Self { input_dense, spec, output_dense }
    }

    fn trace(&self, x: &[f64; 2]) -> Result<HybridTrace, ModelError> {
        if !x[0].is_finite() || !x[1].is_finite() {
            return Err(ModelError::NonFinite("model input"));
        }
        let angles = self.input_dense.forward(x);
        let expectations = self.spec.expectations(&angles)?;
        let probs = self.output_dense.forward(&expectations);
        Ok(HybridTrace { angles, expectations, probs })
    }

    pub fn forward(&self, x: &[f64; 2]) -> Result<Vec<f64>, ModelError> {
        Ok(self.trace(x)?.probs)
    }

    pub fn trainable_count(&self) -> usize {
        self.input_dense.param_count() + self.output_dense.param_count()
    }

    /// Number of circuit angles, reported separately because the quantum
    /// layer itself holds no trainable weights.
    pub fn ansatz_param_count(&self) -> usize {
        self.spec.param_count()
    }

    fn sample_gradient(&self, x: &[f64; 2], label: u8) -> Result<Vec<f64>, ModelError> {
        let t = self.trace(x)?;
        let target = one_hot(label as usize, self.output_dense.out_dim);
        let g_probs = mae_subgradient(&t.probs, &target)?;
        let g_logits = softmax_backward(&t.probs, &g_probs);
        let g_expectations = self.output_dense.input_gradient(&g_logits);
        let jac = self.spec.jacobian(&t.angles)?;
        let g_angles = jac.transpose_mul(&g_expectations);

        let mut grads = vec![0.0; self.trainable_count()];
        let mut cursor = LayoutCursor::new(&mut grads);
        cursor.layer(&self.input_dense, &g_angles, x);
        cursor.layer(&self.output_dense, &g_logits, &t.expectations);
        Ok(grads)
    }
}

/// Plain feed-forward baseline: 2 -> 16 -> 16 -> classes.
#[derive(Clone, Debug, PartialEq)]
pub struct FfnnModel {
    pub layers: Vec<DenseLayer>,
}

impl FfnnModel {
    pub fn new(n_classes: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let layers = vec![
            DenseLayer::init(2, FFNN_HIDDEN, Activation::Relu, &mut rng),
            DenseLayer::init(FFNN_HIDDEN, FFNN_HIDDEN, Activation::Relu, &mut rng),
            DenseLayer::init(FFNN_HIDDEN, n_classes, Activation::Softmax, &mut rng),
        ];
        Self { layers }
    }

    pub fn forward(&self, x: &[f64; 2]) -> Result<Vec<f64>, ModelError> {
        Ok(self.activations(x)?.pop().expect("at least one layer"))
    }

    /// Post-activation outputs of every layer, inputs excluded.
    fn activations(&self, x: &[f64; 2]) -> Result<Vec<Vec<f64>>, ModelError> {
        if !x[0].is_finite() || !x[1].is_finite() {
            return Err(ModelError::NonFinite("model input"));
        }
        let mut acts = Vec::with_capacity(self.layers.len());
        let mut current: Vec<f64> = x.to_vec();
        for layer in &self.layers {
            current = layer.forward(&current);
            acts.push(current.clone());
        }
        Ok(acts)
    }

    pub fn trainable_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    fn sample_gradient(&self, x: &[f64; 2], label: u8) -> Result<Vec<f64>, ModelError> {
        let acts = self.activations(x)?;
        let probs = acts.last().expect("at least one layer");
        let target = one_hot(label as usize, probs.len());
        let g_probs = mae_subgradient(probs, &target)?;
        let mut g_out = softmax_backward(probs, &g_probs);

        // walk backwards collecting per-layer output gradients
        let mut per_layer_gout: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len()];
        for index in (0..self.layers.len()).rev() {
            per_layer_gout[index] = g_out.clone();
            if index == 0 {
                break;
            }
            let g_in = self.layers[index].input_gradient(&g_out);
            // ReLU mask from the previous layer's post-activation output
            g_out = g_in
                .iter()
                .zip(&acts[index - 1])
                .map(|(g, a)| if *a > 0.0 { *g } else { 0.0 })
                .collect();
        }

        let mut grads = vec![0.0; self.trainable_count()];
        let mut cursor = LayoutCursor::new(&mut grads);
        let x_slice: &[f64] = x;
        for (index, layer) in self.layers.iter().enumerate() {
            let input: &[f64] = if index == 0 { x_slice } else { &acts[index - 1] };
            cursor.layer(layer, &per_layer_gout[index], input);
        }
        Ok(grads)
    }
}

/// Writes one layer's weight and bias gradients into the flat layout:
/// weights row-major, then biases, layers in forward order.
struct LayoutCursor<'a> {
    buffer: &'a mut [f64],
    offset: usize,
}

impl<'a> LayoutCursor<'a> {
    fn new(buffer: &'a mut [f64]) -> Self {
        Self { buffer, offset: 0 }
    }

    fn layer(&mut self, layer: &DenseLayer, g_out: &[f64], input: &[f64]) {
        for (row, g) in g_out.iter().enumerate() {
            let base = self.offset + row * layer.in_dim;
            for (col, xv) in input.iter().enumerate() {
                self.buffer[base + col] += g * xv;
            }
        }
        self.offset += layer.in_dim * layer.out_dim;
        for (slot, g) in self.buffer[self.offset..self.offset + layer.out_dim]
            .iter_mut()
            .zip(g_out)
        {
            *slot += g;
        }
        self.offset += layer.out_dim;
    }
}

/// Either trainable architecture behind one interface.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Hybrid(HybridModel),
    Ffnn(FfnnModel),
}

impl Model {
    pub fn forward(&self, x: &[f64; 2]) -> Result<Vec<f64>, ModelError> {
        match self {
            Model::Hybrid(m) => m.forward(x),
            Model::Ffnn(m) => m.forward(x),
        }
    }

    pub fn trainable_count(&self) -> usize {
        match self {
            Model::Hybrid(m) => m.trainable_count(),
            Model::Ffnn(m) => m.trainable_count(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::Hybrid(m) => m.output_dense.out_dim,
            Model::Ffnn(m) => m.layers.last().expect("at least one layer").out_dim,
        }
    }

    fn layers(&self) -> Vec<&DenseLayer> {
        match self {
            Model::Hybrid(m) => vec![&m.input_dense, &m.output_dense],
            Model::Ffnn(m) => m.layers.iter().collect(),
        }
    }

    fn layers_mut(&mut self) -> Vec<&mut DenseLayer> {
        match self {
            Model::Hybrid(m) => vec![&mut m.input_dense, &mut m.output_dense],
            Model::Ffnn(m) => m.layers.iter_mut().collect(),
        }
    }

    /// Flat parameter vector in gradient layout order.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.trainable_count());
        for layer in self.layers() {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), ModelError> {
        if params.len() != self.trainable_count() {
            return Err(ModelError::LengthMismatch {
                left: params.len(),
                right: self.trainable_count(),
            });
        }
        let mut offset = 0;
        for layer in self.layers_mut() {
            let w = layer.in_dim * layer.out_dim;
            layer.weights.copy_from_slice(&params[offset..offset + w]);
            offset += w;
            layer.bias.copy_from_slice(&params[offset..offset + layer.out_dim]);
            offset += layer.out_dim;
        }
        Ok(())
    }

    fn sample_gradient(&self, x: &[f64; 2], label: u8) -> Result<Vec<f64>, ModelError> {
        match self {
            Model::Hybrid(m) => m.sample_gradient(x, label),
            Model::Ffnn(m) => m.sample_gradient(x, label),
        }
    }

    /// Mean loss gradient over a batch. Per-sample gradients run in
    /// parallel but are reduced in sample order, so the result does not
    /// depend on the thread count.
    pub fn batch_gradient(&self, batch: &[([f64; 2], u8)]) -> Result<Vec<f64>, ModelError> {
        if batch.is_empty() {
            return Err(ModelError::Empty);
        }
        let per_sample: Vec<Vec<f64>> = batch
            .par_iter()
            .map(|(x, label)| self.sample_gradient(x, *label))
            .collect::<Result<_, _>>()?;
        let mut mean = vec![0.0; self.trainable_count()];
        for sample in &per_sample {
            for (m, g) in mean.iter_mut().zip(sample) {
                *m += g;
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for m in &mut mean {
            *m *= inv;
        }
        Ok(mean)
    }

    /// One SGD update: w <- w - learning_rate * g.
    pub fn sgd_step(&mut self, grads: &[f64], learning_rate: f64) -> Result<(), ModelError> {
        if grads.len() != self.trainable_count() {
            return Err(ModelError::LengthMismatch {
                left: grads.len(),
                right: self.trainable_count(),
            });
        }
        let mut params = self.params();
        for (w, g) in params.iter_mut().zip(grads) {
            *w -= learning_rate * g;
        }
        self.set_params(&params)
    }
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightsDoc {
    format_version: u32,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_sublayers: Option<usize>,
    layers: Vec<LayerDoc>,
}

fn layer_doc(layer: &DenseLayer) -> LayerDoc {
    LayerDoc {
        in_dim: layer.in_dim,
        out_dim: layer.out_dim,
        activation: layer.activation,
        weights: layer.weights.clone(),
        bias: layer.bias.clone(),
    }
}

fn layer_from_doc(doc: LayerDoc, path: &str) -> Result<DenseLayer, ModelError> {
    if doc.weights.len() != doc.in_dim * doc.out_dim {
        return Err(ModelError::Format {
            path: path.to_string(),
            message: format!(
                "layer declares {}x{} but carries {} weights",
                doc.out_dim,
                doc.in_dim,
                doc.weights.len()
            ),
        });
    }
    if doc.bias.len() != doc.out_dim {
        return Err(ModelError::Format {
            path: path.to_string(),
            message: format!(
                "layer declares {} outputs but carries {} biases",
                doc.out_dim,
                doc.bias.len()
            ),
        });
    }
    Ok(DenseLayer {
        in_dim: doc.in_dim,
        out_dim: doc.out_dim,
        weights: doc.weights,
        bias: doc.bias,
        activation: doc.activation,
    })
}

impl Model {
    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        let doc = match self {
            Model::Hybrid(m) => WeightsDoc {
                format_version: WEIGHTS_FORMAT_VERSION,
                kind: "hybrid".to_string(),
                n_qubits: Some(m.spec.n_qubits()),
                n_sublayers: Some(m.spec.n_sublayers()),
                layers: vec![layer_doc(&m.input_dense), layer_doc(&m.output_dense)],
            },
            Model::Ffnn(m) => WeightsDoc {
                format_version: WEIGHTS_FORMAT_VERSION,
                kind: "ffnn".to_string(),
                n_qubits: None,
                n_sublayers: None,
                layers: m.layers.iter().map(layer_doc).collect(),
            },
        };
        let text = serde_json::to_string_pretty(&doc).expect("weights serialise cleanly");
        std::fs::write(path, text).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Model, ModelError> {
        let path_ref = path.as_ref();
        let path = path_ref.display().to_string();
        let text = std::fs::read_to_string(path_ref).map_err(|source| ModelError::Io {
            path: path.clone(),
            source,
        })?;
        let doc: WeightsDoc = serde_json::from_str(&text).map_err(|e| ModelError::Format {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let fail = |message: String| ModelError::Format { path: path.clone(), message };
        if doc.format_version != WEIGHTS_FORMAT_VERSION {
            return Err(fail(format!(
                "format version {} unsupported, expected {WEIGHTS_FORMAT_VERSION}",
                doc.format_version
            )));
        }
        match doc.kind.as_str() {
            "hybrid" => {
                let n_qubits =
                    doc.n_qubits.ok_or_else(|| fail("hybrid weights need n_qubits".into()))?;
                let n_sublayers = doc
                    .n_sublayers
                    .ok_or_else(|| fail("hybrid weights need n_sublayers".into()))?;
                let spec = AnsatzSpec::new(n_qubits, n_sublayers)
                    .map_err(|e| fail(format!("bad ansatz shape: {e}")))?;
                let mut layers = doc.layers;
                if layers.len() != 2 {
                    return Err(fail(format!(
                        "hybrid weights need 2 dense layers, got {}",
                        layers.len()
                    )));
                }
                let output_dense = layer_from_doc(layers.pop().expect("checked len"), &path)?;
                let input_dense = layer_from_doc(layers.pop().expect("checked len"), &path)?;
                if input_dense.in_dim != 2 {
                    return Err(fail(format!(
                        "input layer takes {} features, expected 2",
                        input_dense.in_dim
                    )));
                }
                if input_dense.out_dim != spec.param_count() {
                    return Err(fail(format!(
                        "input layer emits {} angles but the ansatz needs {}",
                        input_dense.out_dim,
                        spec.param_count()
                    )));
                }
                if output_dense.in_dim != spec.n_qubits() {
                    return Err(fail(format!(
                        "output layer takes {} inputs but the ansatz has {} qubits",
                        output_dense.in_dim,
                        spec.n_qubits()
                    )));
                }
                if output_dense.activation != Activation::Softmax {
                    return Err(fail("output layer must use softmax".into()));
                }
                Ok(Model::Hybrid(HybridModel { input_dense, spec, output_dense }))
            }
            "ffnn" => {
                if doc.layers.is_empty() {
                    return Err(fail("ffnn weights need at least one layer".into()));
                }
                let mut layers = Vec::with_capacity(doc.layers.len());
                for layer in doc.layers {
                    layers.push(layer_from_doc(layer, &path)?);
                }
                if layers[0].in_dim != 2 {
                    return Err(fail(format!(
                        "input layer takes {} features, expected 2",
                        layers[0].in_dim
                    )));
                }
                for pair in layers.windows(2) {
                    if pair[0].out_dim != pair[1].in_dim {
                        return Err(fail(format!(
                            "layer chain mismatch: {} outputs feed {} inputs",
                            pair[0].out_dim, pair[1].in_dim
                        )));
                    }
                }
                if layers.last().expect("non-empty").activation != Activation::Softmax {
                    return Err(fail("output layer must use softmax".into()));
                }
                Ok(Model::Ffnn(FfnnModel { layers }))
            }
            other => Err(fail(format!("unknown model kind {other:?}"))),
        }
    }
}
