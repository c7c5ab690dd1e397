use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, LabeledDataset};

/// Column indices of a stratified train/test partition, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTestSplit {
    pub train_cols: Vec<usize>,
    pub test_cols: Vec<usize>,
}

/// Picks `per_class_train` columns of every class, uniformly without
/// replacement, for training; everything else is test.
///
/// Classes are visited in ascending label order and draw from one ChaCha8
/// stream seeded with `seed`.
pub fn random_split(ds: &LabeledDataset, per_class_train: usize, seed: u64) -> Result<TrainTestSplit, DatasetError> {
    if per_class_train == 0 {
        return Err(DatasetError::Invalid(
            "per-class training count must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_cols = Vec::new();
    let mut test_cols = Vec::new();
    for (label, count) in ds.class_counts() {
        if count < per_class_train + 1 {
            return Err(DatasetError::ClassTooSmall {
                label,
                count,
                per_class_train,
            });
        }
        let members: Vec<usize> = (0..ds.n()).filter(|&j| ds.labels()[j] == label).collect();
        let mut chosen = vec![false; count];
        for k in index::sample(&mut rng, count, per_class_train) {
            chosen[k] = true;
        }
        for (k, &col) in members.iter().enumerate() {
            if chosen[k] {
                train_cols.push(col);
            } else {
                test_cols.push(col);
            }
        }
    }
    train_cols.sort_unstable();
    test_cols.sort_unstable();
    Ok(TrainTestSplit { train_cols, test_cols })
}
