use rand::Rng;
use serde::{Deserialize, Serialize};

use super::topology::{LayerLayout, NetKind, Topology};
use crate::error::{Error, Result};
use crate::hrv::{FeatureMatrix, FeatureVector, Normalizer};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub iterations: usize,
    pub final_loss: f64,
    pub stop_reason: String,
}

/// A multilayer perceptron together with everything needed to apply it
/// to raw feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub topology: Topology,
    /// Flat parameters in [`Topology::layout`] order.
    pub params: Vec<f64>,
    pub normalizer: Option<Normalizer>,
    pub class_names: Vec<String>,
    pub seed: u64,
    pub training: Option<TrainingInfo>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Index of the winning output (0-based; pair winner 1 or 2 is `class + 1`).
    pub class: usize,
    pub scores: Vec<f64>,
}

/// Normalised inputs with one-hot targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl Batch {
    /// One-hot encodes the labels of an already normalised matrix.
    pub fn from_matrix(m: &FeatureMatrix, output_dim: usize) -> Result<Self> {
        if let Some(&bad) = m.labels.iter().find(|&&l| l >= output_dim) {
            return Err(Error::invalid(format!("label {bad} exceeds {output_dim} outputs")));
        }
        Ok(Batch {
            inputs: m.rows.iter().map(|r| r.0.to_vec()).collect(),
            targets: m
                .labels
                .iter()
                .map(|&l| {
                    let mut t = vec![0.0; output_dim];
                    t[l] = 1.0;
                    t
                })
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Uniform weights in ±1/sqrt(fan_in) from a ChaCha stream keyed by
/// `seed`; biases start at zero. Cascade layers count their input skips
/// in the fan-in.
pub fn init_network(topology: Topology, class_names: Vec<String>, seed: u64) -> Mlp {
    let mut params = vec![0.0; topology.n_params()];
    let mut g = rng::stream(seed);
    for l in topology.layout() {
        let fan_in = l.in_dim + l.skips.map_or(0, |_| topology.input_dim);
        let bound = 1.0 / (fan_in as f64).sqrt();
        for w in &mut params[l.weights..l.weights + l.in_dim * l.out_dim] {
            *w = g.random_range(-bound..=bound);
        }
        if let Some(s) = l.skips {
            for w in &mut params[s..s + l.out_dim * topology.input_dim] {
                *w = g.random_range(-bound..=bound);
            }
        }
    }
    Mlp {
        topology,
        params,
        normalizer: None,
        class_names,
        seed,
        training: None,
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

fn affine(params: &[f64], l: &LayerLayout, input: &[f64], prev: &[f64], input_dim: usize) -> Vec<f64> {
    let mut z = params[l.biases..l.biases + l.out_dim].to_vec();
    for (o, zo) in z.iter_mut().enumerate() {
        let row = &params[l.weights + o * l.in_dim..l.weights + (o + 1) * l.in_dim];
        *zo += row.iter().zip(prev).map(|(w, a)| w * a).sum::<f64>();
        if let Some(s) = l.skips {
            let row = &params[s + o * input_dim..s + (o + 1) * input_dim];
            *zo += row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
        }
    }
    z
}

/// Activations of every layer; element 0 is the input, the last element
/// holds output pre-activations (logits for softmax kinds).
fn forward_layers(topology: &Topology, params: &[f64], x: &[f64]) -> Vec<Vec<f64>> {
    let layout = topology.layout();
    let mut acts = Vec::with_capacity(layout.len() + 1);
    acts.push(x.to_vec());
    for (i, l) in layout.iter().enumerate() {
        let mut z = affine(params, l, x, &acts[i], topology.input_dim);
        if i + 1 < layout.len() {
            z.iter_mut().for_each(|v| *v = v.tanh());
        }
        acts.push(z);
    }
    acts
}

pub(crate) fn forward_params(topology: &Topology, params: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = forward_layers(topology, params, x).pop().unwrap_or_default();
    if topology.kind.uses_softmax() {
        softmax_in_place(&mut out);
    }
    out
}

/// Mean loss over the batch: cross-entropy on softmax for pattern nets,
/// squared error averaged over rows and outputs for the other kinds.
pub(crate) fn batch_loss(topology: &Topology, params: &[f64], batch: &Batch) -> f64 {
    let n = batch.len() as f64;
    let k = topology.output_dim as f64;
    let mut total = 0.0;
    for (x, t) in batch.inputs.iter().zip(&batch.targets) {
        let z = forward_layers(topology, params, x).pop().unwrap_or_default();
        total += row_loss(topology.kind, &z, t);
    }
    if topology.kind.uses_softmax() {
        total / n
    } else {
        total / (n * k)
    }
}

fn row_loss(kind: NetKind, z: &[f64], t: &[f64]) -> f64 {
    if kind.uses_softmax() {
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        z.iter().zip(t).map(|(zi, ti)| -ti * (zi - lse)).sum()
    } else {
        z.iter().zip(t).map(|(y, ti)| (y - ti) * (y - ti)).sum()
    }
}

pub(crate) fn batch_loss_grad(topology: &Topology, params: &[f64], batch: &Batch) -> (f64, Vec<f64>) {
    let layout = topology.layout();
    let n = batch.len() as f64;
    let softmax = topology.kind.uses_softmax();
    let scale = if softmax { 1.0 / n } else { 1.0 / (n * topology.output_dim as f64) };
    let mut grad = vec![0.0; params.len()];
    let mut total = 0.0;

    for (x, t) in batch.inputs.iter().zip(&batch.targets) {
        let acts = forward_layers(topology, params, x);
        let z = acts.last().unwrap();
        total += row_loss(topology.kind, z, t);

        let mut delta: Vec<f64> = if softmax {
            let mut p = z.clone();
            softmax_in_place(&mut p);
            p.iter().zip(t).map(|(pi, ti)| (pi - ti) * scale).collect()
        } else {
            z.iter().zip(t).map(|(y, ti)| 2.0 * (y - ti) * scale).collect()
        };

        for (i, l) in layout.iter().enumerate().rev() {
            let prev = &acts[i];
            for (o, d) in delta.iter().enumerate() {
                let w0 = l.weights + o * l.in_dim;
                for (g, a) in grad[w0..w0 + l.in_dim].iter_mut().zip(prev) {
                    *g += d * a;
                }
                grad[l.biases + o] += d;
                if let Some(s) = l.skips {
                    let s0 = s + o * topology.input_dim;
                    for (g, xi) in grad[s0..s0 + topology.input_dim].iter_mut().zip(x) {
                        *g += d * xi;
                    }
                }
            }
            if i == 0 {
                break;
            }
            // back through W and the tanh of the previous layer
            let mut next = vec![0.0; l.in_dim];
            for (o, d) in delta.iter().enumerate() {
                let row = &params[l.weights + o * l.in_dim..l.weights + (o + 1) * l.in_dim];
                for (nj, w) in next.iter_mut().zip(row) {
                    *nj += w * d;
                }
            }
            for (nj, a) in next.iter_mut().zip(prev) {
                *nj *= 1.0 - a * a;
            }
            delta = next;
        }
    }
    (total * scale, grad)
}

/// Mean loss and its exact gradient over `batch` (inputs already normalised).
pub fn loss_and_gradient(net: &Mlp, batch: &Batch) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    check_batch(&net.topology, batch)?;
    Ok(batch_loss_grad(&net.topology, &net.params, batch))
}

pub(crate) fn check_batch(topology: &Topology, batch: &Batch) -> Result<()> {
    if batch.inputs.iter().any(|x| x.len() != topology.input_dim)
        || batch.targets.iter().any(|t| t.len() != topology.output_dim)
        || batch.inputs.len() != batch.targets.len()
    {
        return Err(Error::invalid("batch dimensions do not match the topology"));
    }
    Ok(())
}

impl Mlp {
    /// Output scores for an already normalised input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.topology.input_dim {
            return Err(Error::invalid(format!(
                "expected {} inputs, got {}",
                self.topology.input_dim,
                x.len()
            )));
        }
        Ok(forward_params(&self.topology, &self.params, x))
    }

    pub fn is_trained(&self) -> bool {
        self.training.is_some() && self.normalizer.is_some()
    }

    /// Normalises raw features, runs the net and picks the highest score.
    /// Exact ties go to the lower output index.
    pub fn predict(&self, raw: &FeatureVector) -> Result<Prediction> {
        let nz = match (&self.normalizer, &self.training) {
            (Some(nz), Some(_)) => nz,
            _ => return Err(Error::Untrained),
        };
        let scores = self.forward(nz.apply(raw).as_slice())?;
        Ok(Prediction {
            class: argmax(&scores),
            scores,
        })
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
