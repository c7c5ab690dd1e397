//! Replicated train/classify runs over `α`/`β`/`g`/rank grids.

mod cell;
mod grid;
mod report;

use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;
use znmf_core::NmfError;

use crate::dataset::{DatasetError, LabeledDataset};

pub use cell::{resolved_g, run_cell, CellOutcome};
pub use grid::{
    expand_grid, mix, point_descriptors, run_seed, split_seed, AlphaBetaRegime, RunDescriptor, RunSettings, SweepConfig,
};
pub use report::{
    aggregate_csv, aggregate_path_for, detail_csv, mean_std, write_csv, AggregateRow, DetailRow, RecognitionReport,
    AGGREGATE_HEADER, DETAIL_HEADER,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("run [{descriptor}] failed: {source}")]
    Cell {
        descriptor: String,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Core(#[from] NmfError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Runs every descriptor and aggregates the results in descriptor order.
///
/// With `workers > 1` the runs are spread over a dedicated thread pool;
/// results do not depend on the worker count. The first failing run (in
/// descriptor order) aborts the whole batch.
pub fn run_descriptors(
    ds: &LabeledDataset,
    descriptors: &[RunDescriptor],
    workers: usize,
) -> Result<RecognitionReport, ExperimentError> {
    let one = |d: &RunDescriptor| {
        run_cell(ds, d).map_err(|e| ExperimentError::Cell {
            descriptor: d.to_string(),
            source: Box::new(e),
        })
    };
    let outcomes: Vec<Result<CellOutcome, ExperimentError>> = if workers <= 1 {
        descriptors.iter().map(one).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| ExperimentError::WorkerPool(e.to_string()))?
            .install(|| descriptors.par_iter().map(one).collect())
    };

    let mut details = Vec::with_capacity(descriptors.len());
    for (d, outcome) in descriptors.iter().zip(outcomes) {
        let outcome = outcome?;
        details.push(DetailRow {
            kind: d.kind,
            rank: d.rank,
            alpha: d.alpha,
            beta: d.beta,
            g: outcome.g,
            replication: d.replication,
            seed: d.seed,
            rate: outcome.rate,
        });
    }
    Ok(RecognitionReport::from_details(details))
}

pub fn run_sweep(
    ds: &LabeledDataset,
    config: &SweepConfig,
    workers: usize,
) -> Result<RecognitionReport, ExperimentError> {
    config.validate()?;
    run_descriptors(ds, &expand_grid(config), workers)
}
