//! Seeded synthetic data and a plain-float reference network.
//!
//! The dataset generator and [`FloatNet`] exist as harness plumbing: they
//! produce training fixtures and serve as the independent software oracle
//! that crossbar inference is checked against. `FloatNet` deliberately uses
//! nothing from the crossbar path, just nested `Vec` loops.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::ann::Activation;
use crate::error::{Error, Result};

/// Labeled point cloud; samples are stored class-major (all class 0 first).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// 2D Gaussian blobs, one per class, centers evenly spaced on a circle.
pub fn gaussian_blobs(
    n_per_class: usize,
    n_classes: usize,
    radius: f64,
    sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_per_class == 0 || n_classes == 0 {
        return Err(Error::Invariant(format!(
            "dataset needs positive sizes, got {n_per_class} per class, {n_classes} classes"
        )));
    }
    if !(sigma > 0.0) || !(radius >= 0.0) {
        return Err(Error::Invariant(format!(
            "blob shape needs sigma > 0 and radius >= 0, got sigma = {sigma}, radius = {radius}"
        )));
    }
    let noise = Normal::new(0.0, sigma)
        .map_err(|e| Error::Invariant(format!("bad noise width: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n_per_class * n_classes);
    let mut labels = Vec::with_capacity(n_per_class * n_classes);
    for class in 0..n_classes {
        let angle = 2.0 * std::f64::consts::PI * class as f64 / n_classes as f64;
        let (cx, cy) = (radius * angle.cos(), radius * angle.sin());
        for _ in 0..n_per_class {
            inputs.push(vec![cx + noise.sample(&mut rng), cy + noise.sample(&mut rng)]);
            labels.push(class);
        }
    }
    Ok(Dataset {
        inputs,
        labels,
        n_classes,
    })
}

/// One dense layer of the float reference: `weights[n][m]` connects input `n`
/// to output `m`, matching the crossbar orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatLayer {
    pub weights: Vec<Vec<f64>>,
    pub activation: Activation,
}

/// Bias-free multilayer perceptron evaluated in plain f64.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatNet {
    pub layers: Vec<FloatLayer>,
}

impl FloatNet {
    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        for layer in &self.layers {
            let rows = layer.weights.len();
            let cols = layer.weights.first().map_or(0, Vec::len);
            assert_eq!(x.len(), rows, "input length mismatch");
            let mut y = vec![0.0; cols];
            for (m, out) in y.iter_mut().enumerate() {
                let mut acc = 0.0;
                for n in 0..rows {
                    acc += layer.weights[n][m] * x[n];
                }
                *out = layer.activation.apply(acc);
            }
            x = y;
        }
        x
    }

    /// Predicted class: argmax of the output, lowest index on ties.
    pub fn predict(&self, input: &[f64]) -> usize {
        let out = self.forward(input);
        let mut best = 0;
        for (i, &v) in out.iter().enumerate() {
            if v > out[best] {
                best = i;
            }
        }
        best
    }

    pub fn accuracy(&self, data: &Dataset) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let correct = data
            .inputs
            .iter()
            .zip(&data.labels)
            .filter(|(x, &label)| self.predict(x) == label)
            .count();
        correct as f64 / data.len() as f64
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Train a two-layer (input -> hidden relu -> classes) bias-free classifier
/// by full-batch gradient descent on softmax cross-entropy. Deterministic
/// for a given seed.
pub fn train_classifier(
    data: &Dataset,
    hidden: usize,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<FloatNet> {
    if data.is_empty() {
        return Err(Error::Invariant("cannot train on an empty dataset".into()));
    }
    if hidden == 0 {
        return Err(Error::Invariant("hidden width must be positive".into()));
    }
    let n_in = data.inputs[0].len();
    let n_out = data.n_classes;
    let init = Uniform::new(-0.5, 0.5).map_err(|e| Error::Invariant(format!("bad init: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w1 = vec![vec![0.0; hidden]; n_in];
    let mut w2 = vec![vec![0.0; n_out]; hidden];
    for row in w1.iter_mut() {
        for w in row.iter_mut() {
            *w = init.sample(&mut rng);
        }
    }
    for row in w2.iter_mut() {
        for w in row.iter_mut() {
            *w = init.sample(&mut rng);
        }
    }

    let batch = data.len() as f64;
    for _ in 0..epochs {
        let mut dw1 = vec![vec![0.0; hidden]; n_in];
        let mut dw2 = vec![vec![0.0; n_out]; hidden];
        for (x, &label) in data.inputs.iter().zip(&data.labels) {
            let mut z1 = vec![0.0; hidden];
            for (h, z) in z1.iter_mut().enumerate() {
                for n in 0..n_in {
                    *z += w1[n][h] * x[n];
                }
            }
            let a1: Vec<f64> = z1.iter().map(|&z| z.max(0.0)).collect();
            let mut z2 = vec![0.0; n_out];
            for (k, z) in z2.iter_mut().enumerate() {
                for h in 0..hidden {
                    *z += w2[h][k] * a1[h];
                }
            }
            let p = softmax(&z2);
            // dL/dz2 = p - onehot(label)
            let mut dz2 = p;
            dz2[label] -= 1.0;
            for h in 0..hidden {
                for k in 0..n_out {
                    dw2[h][k] += a1[h] * dz2[k];
                }
            }
            for h in 0..hidden {
                if z1[h] <= 0.0 {
                    continue;
                }
                let mut da = 0.0;
                for k in 0..n_out {
                    da += w2[h][k] * dz2[k];
                }
                for n in 0..n_in {
                    dw1[n][h] += x[n] * da;
                }
            }
        }
        for n in 0..n_in {
            for h in 0..hidden {
                w1[n][h] -= learning_rate * dw1[n][h] / batch;
            }
        }
        for h in 0..hidden {
            for k in 0..n_out {
                w2[h][k] -= learning_rate * dw2[h][k] / batch;
            }
        }
    }

    Ok(FloatNet {
        layers: vec![
            FloatLayer {
                weights: w1,
                activation: Activation::Relu,
            },
            FloatLayer {
                weights: w2,
                activation: Activation::None,
            },
        ],
    })
}
