//! Principal component analysis by deflated power iteration.
//!
//! Columns are centered but not rescaled: the traces are already
//! centered solution counts. Variance uses the 1/n convention, so the
//! projected coordinates' empirical variances reproduce
//! `explained_variance` exactly.

use std::io::Write;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::learn::chunked_vec_sum;
use crate::Result;

const EIGEN_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 10_000;
const CHUNK: usize = 1024;

/// Orthonormal principal directions of a centered point cloud.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// k rows, each a unit direction of dimension n; pairwise orthonormal.
    pub components: Vec<Vec<f64>>,
    /// Variance captured per component, non-increasing.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    /// CSV dump: `component,index,mean,weight` rows for every direction.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "component,index,mean,weight")?;
        for (c, comp) in self.components.iter().enumerate() {
            for (i, w) in comp.iter().enumerate() {
                writeln!(out, "{},{},{},{}", c + 1, i, self.mean[i], w)?;
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// v -> (X - mean)^T (X - mean) v / n without forming the covariance.
fn cov_apply(matrix: &[Vec<f64>], mean: &[f64], v: &[f64]) -> Vec<f64> {
    let n = matrix.len() as f64;
    let dim = mean.len();
    // u_i = (row_i - mean) . v, then sum u_i (row_i - mean)
    let shift = dot(mean, v);
    let parts: Vec<Vec<f64>> = matrix
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; dim];
            for row in chunk {
                let u = dot(row, v) - shift;
                for ((a, &x), &m) in acc.iter_mut().zip(row).zip(mean) {
                    *a += u * (x - m);
                }
            }
            acc
        })
        .collect();
    let mut out = chunked_vec_sum(parts, dim);
    for x in out.iter_mut() {
        *x /= n;
    }
    out
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
}

/// Make the entry of largest magnitude positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Top-k principal directions of the column-centered data.
pub fn pca_fit(matrix: &[Vec<f64>], k: usize, seed: u64) -> Result<PcaModel> {
    let rows = matrix.len();
    if rows < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rows,
        });
    }
    let dim = matrix[0].len();
    if k == 0 {
        return Err(Error::ZeroVariance);
    }
    if k > rows.min(dim) {
        return Err(Error::DimensionMismatch {
            expected: rows.min(dim),
            got: k,
        });
    }

    let mut mean = vec![0.0; dim];
    for row in matrix {
        assert_eq!(row.len(), dim, "ragged matrix");
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= rows as f64;
    }

    let total_variance: f64 = matrix
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(&x, &m)| (x - m) * (x - m)).sum::<f64>())
        .sum::<f64>()
        / rows as f64;
    if total_variance == 0.0 {
        return Err(Error::ZeroVariance);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut eigenvalues: Vec<f64> = Vec::with_capacity(k);

    for _ in 0..k {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, &components);
        normalize(&mut v);
        let mut lambda = 0.0f64;
        for _ in 0..MAX_ITERS {
            let mut w = cov_apply(matrix, &mean, &v);
            // deflate the directions already extracted
            for (b, &l) in components.iter().zip(&eigenvalues) {
                let c = l * dot(b, &v);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            orthogonalize(&mut w, &components);
            let norm = normalize(&mut w);
            if norm <= total_variance * 1e-15 {
                // operator vanished: any orthonormal completion works
                lambda = 0.0;
                break;
            }
            let next = dot(&w, &cov_apply(matrix, &mean, &w));
            v = w;
            if (next - lambda).abs() <= EIGEN_TOL * next.abs().max(1e-300) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        fix_sign(&mut v);
        components.push(v);
        eigenvalues.push(lambda.max(0.0));
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance: eigenvalues,
    })
}

/// Project rows onto the model: `(row - mean) . component_j`.
pub fn pca_project(model: &PcaModel, matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let dim = model.dimension();
    let mut out = Vec::with_capacity(matrix.len());
    for row in matrix {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        let centered: Vec<f64> = row.iter().zip(&model.mean).map(|(&x, &m)| x - m).collect();
        out.push(model.components.iter().map(|c| dot(&centered, c)).collect());
    }
    Ok(out)
}

/// Pair the prime grid with the first component's weights, prime order.
pub fn first_component_profile(model: &PcaModel, primes: &[u64]) -> Result<Vec<(u64, f64)>> {
    if primes.len() != model.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            got: primes.len(),
        });
    }
    Ok(primes
        .iter()
        .copied()
        .zip(model.components[0].iter().copied())
        .collect())
}
