use znmf_core::factorize::{self, default_g, FactorizationConfig};
use znmf_core::features::{extract_features, nearest_neighbor, recognition_rate};
use znmf_core::{FeatureSet, PenaltyKind};

use super::grid::{mix, RunDescriptor};
use super::ExperimentError;
use crate::dataset::{random_split, LabeledDataset};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub rate: f64,
    /// The `g` the factorization used (ZNMF only).
    pub g: Option<f64>,
}

/// Split, factorize the training columns, encode the test columns against
/// the learned basis and score 1-NN in coefficient space.
pub fn run_cell(ds: &LabeledDataset, d: &RunDescriptor) -> Result<CellOutcome, ExperimentError> {
    let split = random_split(ds, d.settings.per_class_train, d.split_seed)?;
    let (train_x, train_y) = ds.subset(&split.train_cols)?;
    let (test_x, test_y) = ds.subset(&split.test_cols)?;

    let mut config = FactorizationConfig::new(d.kind, d.rank)
        .with_penalty(d.alpha, d.beta)
        .with_max_iters(d.settings.max_iters)
        .with_rel_tol(d.settings.rel_tol)
        .with_seed(d.seed);
    if let Some(g) = d.g {
        config = config.with_g(g);
    }
    let fit = factorize::run(&train_x, &config)?;

    let test_h = extract_features(&fit.w, &test_x, d.settings.feature_iters, mix(d.seed, &[1]))?;
    let predicted = nearest_neighbor(&FeatureSet::new(fit.h, train_y)?, &test_h)?;
    Ok(CellOutcome {
        rate: recognition_rate(&predicted, &test_y)?,
        g: fit.g,
    })
}

/// The `g` a ZNMF cell resolves to without running it.
pub fn resolved_g(ds: &LabeledDataset, d: &RunDescriptor) -> Option<f64> {
    match d.kind {
        PenaltyKind::Zellner => Some(d.g.unwrap_or_else(|| {
            let n_train = ds.class_counts().len() * d.settings.per_class_train;
            default_g(n_train, ds.p())
        })),
        _ => None,
    }
}
