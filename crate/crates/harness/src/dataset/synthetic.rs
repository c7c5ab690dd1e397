use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use znmf_core::DenseMatrix;

use super::{DatasetError, LabeledDataset};

/// Parameters of [`synthetic_parts`], also parsed from
/// `classes=C,p=P,n-per-class=N,noise=X[,seed=S]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub p: usize,
    pub n_per_class: usize,
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn generate(&self) -> Result<LabeledDataset, DatasetError> {
        synthetic_parts(self.p, self.n_per_class, self.classes, self.noise, self.seed)
    }
}

impl FromStr for SyntheticSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut spec = SyntheticSpec {
            classes: 0,
            p: 0,
            n_per_class: 0,
            noise: 0.0,
            seed: 0,
        };
        let mut seen = [false; 3];
        for part in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let bad = |e: &dyn fmt::Display| format!("{key}: {e}");
            match key.trim() {
                "classes" => {
                    spec.classes = value.parse().map_err(|e| bad(&e))?;
                    seen[0] = true;
                }
                "p" => {
                    spec.p = value.parse().map_err(|e| bad(&e))?;
                    seen[1] = true;
                }
                "n-per-class" => {
                    spec.n_per_class = value.parse().map_err(|e| bad(&e))?;
                    seen[2] = true;
                }
                "noise" => spec.noise = value.parse().map_err(|e| bad(&e))?,
                "seed" => spec.seed = value.parse().map_err(|e| bad(&e))?,
                other => return Err(format!("unknown key {other:?}")),
            }
        }
        if seen.contains(&false) {
            return Err("classes, p and n-per-class are required".into());
        }
        Ok(spec)
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "classes={},p={},n-per-class={},noise={},seed={}",
            self.classes, self.p, self.n_per_class, self.noise, self.seed
        )
    }
}

/// Parts-based toy data with a known class structure.
///
/// Class `c` owns the pixel block `[c·b, (c+1)·b)` with `b = ⌊p/classes⌋`
/// and a prototype uniform on `[0.5, 1)` there, zero elsewhere. A sample is
/// the prototype times per-pixel gains uniform on `[0.8, 1.2]`, plus
/// background uniform on `[0, noise]`, clamped to `[0, 1]`. Columns are
/// class-major; labels run `1..=classes`.
pub fn synthetic_parts(
    p: usize,
    n_per_class: usize,
    classes: usize,
    noise: f64,
    seed: u64,
) -> Result<LabeledDataset, DatasetError> {
    if classes < 2 {
        return Err(DatasetError::Invalid("need at least two classes".into()));
    }
    if p < classes {
        return Err(DatasetError::Invalid(format!(
            "p = {p} is smaller than classes = {classes}"
        )));
    }
    if n_per_class == 0 {
        return Err(DatasetError::Invalid("n-per-class must be positive".into()));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(DatasetError::Invalid(format!(
            "noise must be a nonnegative number, got {noise}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block = p / classes;
    let prototypes: Vec<Vec<f64>> = (0..classes)
        .map(|c| {
            (0..p)
                .map(|i| {
                    if (c * block..(c + 1) * block).contains(&i) {
                        rng.random_range(0.5..1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    let n = classes * n_per_class;
    let mut columns = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (c, proto) in prototypes.iter().enumerate() {
        for _ in 0..n_per_class {
            let col: Vec<f64> = proto
                .iter()
                .map(|&v| {
                    let gain = rng.random_range(0.8..=1.2);
                    let background = rng.random_range(0.0..=noise);
                    (v * gain + background).clamp(0.0, 1.0)
                })
                .collect();
            columns.push(col);
            labels.push(c as u32 + 1);
        }
    }
    let x = DenseMatrix::from_fn(p, n, |i, j| columns[j][i]);
    LabeledDataset::new(x, labels, 1, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::random_split;
    use znmf_core::features::{nearest_neighbor, recognition_rate};
    use znmf_core::FeatureSet;

    #[test]
    fn noiseless_classes_have_disjoint_support() {
        let ds = synthetic_parts(20, 3, 2, 0.0, 4).unwrap();
        for j in 0..ds.n() {
            let support: Vec<usize> = (0..ds.p()).filter(|&i| ds.x().get(i, j) > 0.0).collect();
            let expected: Vec<usize> = if ds.labels()[j] == 1 {
                (0..10).collect()
            } else {
                (10..20).collect()
            };
            assert_eq!(support, expected);
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        let a = synthetic_parts(50, 10, 5, 0.05, 11).unwrap();
        assert_eq!(a, synthetic_parts(50, 10, 5, 0.05, 11).unwrap());
        assert_ne!(a, synthetic_parts(50, 10, 5, 0.05, 12).unwrap());
        assert!(a.x().min() >= 0.0 && a.x().max() <= 1.0);
    }

    #[test]
    fn raw_pixel_nearest_neighbor_separates_classes() {
        let ds = synthetic_parts(50, 10, 5, 0.05, 0).unwrap();
        for seed in 0..10 {
            let split = random_split(&ds, 5, seed).unwrap();
            let (train_x, train_y) = ds.subset(&split.train_cols).unwrap();
            let (test_x, test_y) = ds.subset(&split.test_cols).unwrap();
            let predicted = nearest_neighbor(&FeatureSet::new(train_x, train_y).unwrap(), &test_x).unwrap();
            assert!(recognition_rate(&predicted, &test_y).unwrap() > 0.9);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(synthetic_parts(50, 10, 1, 0.0, 0).is_err());
        assert!(synthetic_parts(3, 10, 5, 0.0, 0).is_err());
        assert!(synthetic_parts(50, 0, 5, 0.0, 0).is_err());
        assert!(synthetic_parts(50, 10, 5, -0.1, 0).is_err());
    }

    #[test]
    fn spec_parsing() {
        let spec: SyntheticSpec = "classes=5,p=50,n-per-class=10,noise=0.05".parse().unwrap();
        assert_eq!(
            (spec.classes, spec.p, spec.n_per_class, spec.noise, spec.seed),
            (5, 50, 10, 0.05, 0)
        );
        let spec: SyntheticSpec = "p=8, classes=2, n-per-class=3, seed=9".parse().unwrap();
        assert_eq!((spec.p, spec.seed, spec.noise), (8, 9, 0.0));
        assert!("classes=5,p=50".parse::<SyntheticSpec>().is_err());
        assert!("classes=5,p=50,n-per-class=1,colour=red"
            .parse::<SyntheticSpec>()
            .is_err());
        assert!("classes=five,p=50,n-per-class=1".parse::<SyntheticSpec>().is_err());
    }
}
