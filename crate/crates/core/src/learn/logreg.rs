//! Multinomial logistic regression by full-batch gradient descent.
//!
//! The model predicts `argmax softmax(x . w + b)` over the distinct rank
//! labels; parameters are learned by minimizing categorical cross-entropy.
//! Held-out metrics are per-class precision, a confusion matrix, and the
//! mean predicted probability of the predicted class ("confidence").

use std::io::Write;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::learn::chunked_vec_sum;
use crate::Result;

const CHUNK: usize = 1024;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 500,
            seed: 0,
            train_fraction: 0.8,
        }
    }
}

/// Softmax classifier over rank labels.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub classes: Vec<u32>,
    /// classes x dimension weight matrix.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LogisticModel {
    pub fn dimension(&self) -> usize {
        self.weights[0].len()
    }

    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b)
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        let z = self.logits(x);
        let mut best = 0;
        for (i, v) in z.iter().enumerate() {
            if *v > z[best] {
                best = i;
            }
        }
        self.classes[best]
    }

    /// CSV dump: `class,bias,w_0,...,w_{n-1}` per class row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "class,bias")?;
        for j in 0..self.dimension() {
            write!(out, ",w_{j}")?;
        }
        writeln!(out)?;
        for ((c, w), b) in self.classes.iter().zip(&self.weights).zip(&self.bias) {
            write!(out, "{c},{b}")?;
            for v in w {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Numerically safe softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / s).collect()
}

/// Held-out evaluation report.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub classes: Vec<u32>,
    pub train_size: usize,
    pub test_size: usize,
    /// Per-class precision TP / (TP + FP), classes in `classes` order.
    pub precision: Vec<f64>,
    /// Macro average of the per-class precisions.
    pub mean_precision: f64,
    pub accuracy: f64,
    /// Mean predicted probability of the predicted class.
    pub confidence: f64,
    /// confusion[i][j]: true class i predicted as j.
    pub confusion: Vec<Vec<usize>>,
    pub final_loss: f64,
}

/// Mean cross-entropy gradient of the batch in (w, b).
///
/// Labels are class indices into `model.classes`. The analytic form per
/// example is `(softmax(z) - onehot) (x) features`; the finite-difference
/// suite pins it down.
pub fn logreg_gradient(
    model: &LogisticModel,
    features: &[Vec<f64>],
    labels: &[usize],
) -> (Vec<Vec<f64>>, Vec<f64>) {
    assert!(!features.is_empty(), "batch must be nonempty");
    assert_eq!(features.len(), labels.len());
    let c = model.classes.len();
    let dim = model.dimension();
    let flat_len = c * (dim + 1);

    let parts: Vec<Vec<f64>> = features
        .par_chunks(CHUNK)
        .zip(labels.par_chunks(CHUNK))
        .map(|(xs, ys)| {
            let mut acc = vec![0.0; flat_len];
            for (x, &y) in xs.iter().zip(ys) {
                let p = softmax(&model.logits(x));
                for k in 0..c {
                    let delta = p[k] - if k == y { 1.0 } else { 0.0 };
                    let row = &mut acc[k * (dim + 1)..(k + 1) * (dim + 1)];
                    for (a, xi) in row[..dim].iter_mut().zip(x) {
                        *a += delta * xi;
                    }
                    row[dim] += delta;
                }
            }
            acc
        })
        .collect();
    let flat = chunked_vec_sum(parts, flat_len);

    let n = features.len() as f64;
    let mut gw = vec![vec![0.0; dim]; c];
    let mut gb = vec![0.0; c];
    for k in 0..c {
        for j in 0..dim {
            gw[k][j] = flat[k * (dim + 1) + j] / n;
        }
        gb[k] = flat[k * (dim + 1) + dim] / n;
    }
    (gw, gb)
}

fn mean_loss(model: &LogisticModel, features: &[Vec<f64>], labels: &[usize]) -> f64 {
    let parts: Vec<f64> = features
        .par_chunks(CHUNK)
        .zip(labels.par_chunks(CHUNK))
        .map(|(xs, ys)| {
            xs.iter()
                .zip(ys)
                .map(|(x, &y)| {
                    let p = softmax(&model.logits(x));
                    -(p[y].max(1e-300)).ln()
                })
                .sum()
        })
        .collect();
    parts.iter().sum::<f64>() / features.len() as f64
}

/// Train on a shuffled split and evaluate on the held-out part.
///
/// Deterministic given the seed: weights start at zero (the objective is
/// convex) and the only randomness is the split shuffle.
pub fn logreg_train(
    features: &[Vec<f64>],
    labels: &[u32],
    config: &TrainConfig,
) -> Result<(LogisticModel, TrainReport)> {
    assert_eq!(features.len(), labels.len());
    let mut classes: Vec<u32> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    if features.len() < 10 {
        return Err(Error::DimensionMismatch {
            expected: 10,
            got: features.len(),
        });
    }
    let class_index = |l: u32| classes.binary_search(&l).expect("label seen");
    let dim = features[0].len();

    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    order.shuffle(&mut rng);
    let cut = ((features.len() as f64) * config.train_fraction).round() as usize;
    let cut = cut.clamp(1, features.len() - 1);
    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| features[i].clone()).collect(),
            idx.iter().map(|&i| class_index(labels[i])).collect(),
        )
    };
    let (train_x, train_y) = gather(&order[..cut]);
    let (test_x, test_y) = gather(&order[cut..]);

    let mut model = LogisticModel {
        classes: classes.clone(),
        weights: vec![vec![0.0; dim]; classes.len()],
        bias: vec![0.0; classes.len()],
    };

    let mut loss = f64::INFINITY;
    for _ in 0..config.epochs {
        let (gw, gb) = logreg_gradient(&model, &train_x, &train_y);
        for (w, g) in model.weights.iter_mut().zip(gw) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= config.learning_rate * gi;
            }
        }
        for (b, g) in model.bias.iter_mut().zip(gb) {
            *b -= config.learning_rate * g;
        }
        loss = mean_loss(&model, &train_x, &train_y);
        if !loss.is_finite() {
            return Err(Error::Diverged);
        }
    }

    let c = classes.len();
    let mut confusion = vec![vec![0usize; c]; c];
    let mut confidence_sum = 0.0;
    for (x, &y) in test_x.iter().zip(&test_y) {
        let p = softmax(&model.logits(x));
        let mut pred = 0;
        for (i, v) in p.iter().enumerate() {
            if *v > p[pred] {
                pred = i;
            }
        }
        confusion[y][pred] += 1;
        confidence_sum += p[pred];
    }
    let precision: Vec<f64> = (0..c)
        .map(|k| {
            let predicted: usize = (0..c).map(|i| confusion[i][k]).sum();
            if predicted == 0 {
                0.0
            } else {
                confusion[k][k] as f64 / predicted as f64
            }
        })
        .collect();
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();
    let report = TrainReport {
        classes,
        train_size: train_x.len(),
        test_size: test_x.len(),
        mean_precision: precision.iter().sum::<f64>() / c as f64,
        precision,
        accuracy: correct as f64 / test_x.len() as f64,
        confidence: confidence_sum / test_x.len() as f64,
        confusion,
        final_loss: loss,
    };
    Ok((model, report))
}
