//! Face-recognition benchmark harness around `znmf-core`.
//!
//! - [`dataset`]: PGM decoding, block downscaling, the ORL directory layout,
//!   stratified splits and a synthetic parts dataset.
//! - [`experiment`]: replicated factorize/encode/1-NN runs over parameter
//!   grids, aggregated into CSV reports.
//! - [`cli`]: the `znmf` command line.

pub mod cli;
pub mod dataset;
pub mod experiment;
pub mod matrix_io;
