//! Coefficient features for unseen samples and 1-NN classification.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{NmfError, Result};
use crate::factorize::uniform_matrix;
use crate::linalg::{self, hadamard_div_guarded, hadamard_mul, DenseMatrix};
use crate::DEFAULT_GUARD_EPS;

/// Default number of fixed-basis updates used to encode test samples.
pub const DEFAULT_FEATURE_ITERS: usize = 200;

/// Labeled coefficient columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet<L> {
    features: DenseMatrix,
    labels: Vec<L>,
}

impl<L> FeatureSet<L> {
    pub fn new(features: DenseMatrix, labels: Vec<L>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(NmfError::LengthMismatch {
                left: features.cols(),
                right: labels.len(),
            });
        }
        features.require_nonnegative("FeatureSet")?;
        Ok(Self { features, labels })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Encodes the columns of `x_new` against a fixed basis `w`.
///
/// `H` starts uniform on `[1e-4, 1)` from `seed` and takes `iters` plain
/// `H`-updates `H ⊙ WᵀX / (WᵀWH)` with `W` held fixed.
pub fn extract_features(w: &DenseMatrix, x_new: &DenseMatrix, iters: usize, seed: u64) -> Result<DenseMatrix> {
    if w.rows() != x_new.rows() {
        return Err(NmfError::ShapeMismatch {
            op: "extract_features",
            left: w.shape(),
            right: x_new.shape(),
        });
    }
    w.require_nonnegative("extract_features: W")?;
    x_new.require_nonnegative("extract_features: X")?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = uniform_matrix(w.cols(), x_new.cols(), &mut rng);
    let num = linalg::matmul_tn(w, x_new)?;
    let wtw = linalg::matmul_tn(w, w)?;
    for _ in 0..iters {
        let den = linalg::matmul(&wtw, &h)?;
        h = hadamard_mul(&h, &hadamard_div_guarded(&num, &den, DEFAULT_GUARD_EPS)?)?;
    }
    Ok(h)
}

/// 1-NN by Euclidean distance; ties go to the lowest training index.
pub fn nearest_neighbor<L: Clone>(train: &FeatureSet<L>, test_features: &DenseMatrix) -> Result<Vec<L>> {
    if train.is_empty() {
        return Err(NmfError::EmptyTrainingSet);
    }
    let train_t = train.features.transpose();
    let test_t = test_features.transpose();
    if train_t.cols() != test_t.cols() {
        return Err(NmfError::ShapeMismatch {
            op: "nearest_neighbor",
            left: train.features.shape(),
            right: test_features.shape(),
        });
    }
    let predictions = (0..test_t.rows())
        .map(|t| {
            let query = test_t.row(t);
            let mut best = (0, f64::INFINITY);
            for j in 0..train_t.rows() {
                let d = squared_distance(query, train_t.row(j));
                if d < best.1 {
                    best = (j, d);
                }
            }
            train.labels[best.0].clone()
        })
        .collect();
    Ok(predictions)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn recognition_rate<L: PartialEq>(predicted: &[L], truth: &[L]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(NmfError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(NmfError::EmptyMatrix);
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predicted.len() as f64)
}
