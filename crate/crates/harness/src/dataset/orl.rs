//! AT&T / ORL face database: `root/s<subject>/<index>.pgm`, 40 subjects × 10
//! images, each 92 wide × 112 tall.

use std::path::Path;

use znmf_core::DenseMatrix;

use super::{downscale, read_pgm, DatasetError, LabeledDataset};

pub const ORL_SUBJECTS: usize = 40;
pub const ORL_IMAGES: usize = 10;
pub const ORL_WIDTH: usize = 92;
pub const ORL_HEIGHT: usize = 112;

/// Loads the full ORL tree, downscaling every image by `factor`.
///
/// Columns are ordered subject-major then by image index; labels are the
/// subject numbers. With `factor = 4` the result is 644×400.
pub fn load_orl(root: &Path, factor: usize) -> Result<LabeledDataset, DatasetError> {
    load_orl_layout(root, ORL_SUBJECTS, ORL_IMAGES, factor)
}

/// Same directory convention with a configurable subject/image count.
pub fn load_orl_layout(
    root: &Path,
    subjects: usize,
    images_per_subject: usize,
    factor: usize,
) -> Result<LabeledDataset, DatasetError> {
    let n = subjects * images_per_subject;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut shape = (0, 0);

    for subject in 1..=subjects {
        let dir = root.join(format!("s{subject}"));
        if !dir.is_dir() {
            return Err(DatasetError::MissingSubject(dir));
        }
        for index in 1..=images_per_subject {
            let path = dir.join(format!("{index}.pgm"));
            if !path.is_file() {
                return Err(DatasetError::MissingImage(path));
            }
            let bytes = std::fs::read(&path).map_err(|source| DatasetError::Io {
                path: path.clone(),
                source,
            })?;
            let img = read_pgm(&bytes).map_err(|source| DatasetError::Pgm {
                path: path.clone(),
                source,
            })?;
            if img.width() != ORL_WIDTH || img.height() != ORL_HEIGHT {
                return Err(DatasetError::WrongDimensions {
                    path,
                    width: img.width(),
                    height: img.height(),
                    expected_w: ORL_WIDTH,
                    expected_h: ORL_HEIGHT,
                });
            }
            let small = downscale(&img, factor)?;
            shape = (small.height(), small.width());
            let scale = f64::from(small.maxval());
            columns.push(small.pixels().iter().map(|&v| f64::from(v) / scale).collect());
            labels.push(subject as u32);
        }
    }

    if columns.is_empty() {
        return Err(DatasetError::Invalid("no images requested".into()));
    }
    let p = shape.0 * shape.1;
    let x = DenseMatrix::from_fn(p, n, |i, j| columns[j][i]);
    LabeledDataset::new(x, labels, shape.0, shape.1)
}
