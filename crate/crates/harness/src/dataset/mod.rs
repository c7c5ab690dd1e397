//! Labeled image data: PGM decoding, block downscaling, the ORL directory
//! layout, stratified train/test splits and a synthetic stand-in dataset.

mod downscale;
mod orl;
pub mod pgm;
mod split;
mod synthetic;

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;
use znmf_core::{DenseMatrix, NmfError};

pub use downscale::downscale;
pub use orl::{load_orl, load_orl_layout, ORL_HEIGHT, ORL_IMAGES, ORL_SUBJECTS, ORL_WIDTH};
pub use pgm::{read_pgm, GrayImage, PgmError};
pub use split::{random_split, TrainTestSplit};
pub use synthetic::{synthetic_parts, SyntheticSpec};

pub type Label = u32;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing subject directory {}", .0.display())]
    MissingSubject(PathBuf),
    #[error("missing image {}", .0.display())]
    MissingImage(PathBuf),
    #[error("{}: expected a {expected_w}x{expected_h} image, found {width}x{height}", path.display())]
    WrongDimensions {
        path: PathBuf,
        width: usize,
        height: usize,
        expected_w: usize,
        expected_h: usize,
    },
    #[error("{}: {source}", path.display())]
    Pgm {
        path: PathBuf,
        #[source]
        source: PgmError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("downscale factor {factor} does not divide a {width}x{height} image")]
    NotDivisible { factor: usize, width: usize, height: usize },
    #[error("class {label} has {count} samples; a split with {per_class_train} training samples needs at least {}", per_class_train + 1)]
    ClassTooSmall {
        label: Label,
        count: usize,
        per_class_train: usize,
    },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error(transparent)]
    Matrix(#[from] NmfError),
}

/// Pixel matrix `x` (`p×n`, one image per column, entries in `[0, 1]`) and
/// one class label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    x: DenseMatrix,
    labels: Vec<Label>,
    image_height: usize,
    image_width: usize,
}

impl LabeledDataset {
    pub fn new(
        x: DenseMatrix,
        labels: Vec<Label>,
        image_height: usize,
        image_width: usize,
    ) -> Result<Self, DatasetError> {
        if labels.len() != x.cols() {
            return Err(DatasetError::Invalid(format!(
                "{} labels for {} columns",
                labels.len(),
                x.cols()
            )));
        }
        if image_height * image_width != x.rows() {
            return Err(DatasetError::Invalid(format!(
                "image shape {image_height}x{image_width} does not match {} pixels",
                x.rows()
            )));
        }
        if x.min() < 0.0 || x.max() > 1.0 {
            return Err(DatasetError::Invalid(format!(
                "pixel values must lie in [0, 1], found [{}, {}]",
                x.min(),
                x.max()
            )));
        }
        Ok(Self {
            x,
            labels,
            image_height,
            image_width,
        })
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Pixels per image.
    pub fn p(&self) -> usize {
        self.x.rows()
    }

    /// Number of images.
    pub fn n(&self) -> usize {
        self.x.cols()
    }

    pub fn image_height(&self) -> usize {
        self.image_height
    }

    pub fn image_width(&self) -> usize {
        self.image_width
    }

    /// Samples per class, ordered by label.
    pub fn class_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for &label in &self.labels {
            *counts.entry(label).or_insert(0) += 1;
        }
        counts
    }

    /// Columns `cols` as a `p×|cols|` matrix plus their labels.
    pub fn subset(&self, cols: &[usize]) -> Result<(DenseMatrix, Vec<Label>), DatasetError> {
        let x = self.x.select_columns(cols)?;
        let labels = cols.iter().map(|&c| self.labels[c]).collect();
        Ok((x, labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_invariants_are_checked() {
        let x = DenseMatrix::from_rows(&[&[0.0, 0.5], &[1.0, 0.25]]).unwrap();
        assert!(LabeledDataset::new(x.clone(), vec![1, 2], 1, 2).is_ok());
        assert!(LabeledDataset::new(x.clone(), vec![1], 1, 2).is_err());
        assert!(LabeledDataset::new(x.clone(), vec![1, 2], 2, 2).is_err());
        assert!(LabeledDataset::new(x.scale(2.0), vec![1, 2], 2, 1).is_err());
    }

    #[test]
    fn subset_and_counts() {
        let x = DenseMatrix::from_rows(&[&[0.1, 0.2, 0.3]]).unwrap();
        let ds = LabeledDataset::new(x, vec![4, 2, 4], 1, 1).unwrap();
        assert_eq!(ds.class_counts().into_iter().collect::<Vec<_>>(), vec![(2, 1), (4, 2)]);
        let (sub, labels) = ds.subset(&[2, 1]).unwrap();
        assert_eq!(sub.as_slice(), &[0.3, 0.2]);
        assert_eq!(labels, vec![4, 2]);
    }
}
