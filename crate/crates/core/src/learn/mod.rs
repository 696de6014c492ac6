//! Interpretable probes on a_p matrices: PCA and softmax regression.
//!
//! Both are written out in full. PCA runs deflated power iteration (at
//! most two components are ever wanted); the classifier is full-batch
//! gradient descent on categorical cross-entropy. Everything is
//! deterministic given the seed, including under parallel execution.

mod logreg;
mod pca;

pub use logreg::{
    logreg_gradient, logreg_train, softmax, LogisticModel, TrainConfig, TrainReport,
};
pub use pca::{first_component_profile, pca_fit, pca_project, PcaModel};

/// a_p rows as floats.
pub fn to_f64_matrix(rows: &[Vec<i64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| v as f64).collect())
        .collect()
}

/// Temper the Hasse growth of |a_p| by scaling column j by 1 / sqrt(p_j).
/// Used by the classifier preprocessing; switchable from the CLI.
pub fn scale_columns_inv_sqrt_p(matrix: &mut [Vec<f64>], primes: &[u64]) {
    let inv: Vec<f64> = primes.iter().map(|&p| 1.0 / (p as f64).sqrt()).collect();
    for row in matrix.iter_mut() {
        assert_eq!(row.len(), inv.len());
        for (v, s) in row.iter_mut().zip(&inv) {
            *v *= s;
        }
    }
}

/// Fixed-shape partial-sum reduction: chunk sums are accumulated in
/// chunk order no matter how many workers ran them, so float results do
/// not depend on the thread count.
pub(crate) fn chunked_vec_sum(parts: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for part in parts {
        for (a, v) in acc.iter_mut().zip(part) {
            *a += v;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inv_sqrt_scaling() {
        let mut m = vec![vec![2.0, 3.0], vec![-4.0, 9.0]];
        scale_columns_inv_sqrt_p(&mut m, &[4, 9]);
        assert_eq!(m, vec![vec![1.0, 1.0], vec![-2.0, 3.0]]);
    }
}
