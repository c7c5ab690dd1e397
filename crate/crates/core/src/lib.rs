//! Nonnegative matrix factorization by multiplicative updates.
//!
//! Three variants share one driver:
//!
//! - plain NMF, minimizing `‖X − WH‖²_F`;
//! - CNMF, adding `α‖W‖²_F + β‖H‖²_F`;
//! - ZNMF, adding the data-dependent Zellner penalties
//!   `(α/g)·trace(WᵀXXᵀW) + (β/g)·trace(HXᵀXHᵀ)`.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. Dataset
//! loading, experiment sweeps and the command line live in `znmf-harness`.
//!
//! ```
//! use znmf_core::{factorize, DenseMatrix, FactorizationConfig, PenaltyKind};
//!
//! let x = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]]).unwrap();
//! let config = FactorizationConfig::new(PenaltyKind::None, 1).with_max_iters(300);
//! let result = factorize::run(&x, &config).unwrap();
//! assert!(result.objective_trace.last().unwrap() < &1e-6);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod factorize;
pub mod features;
pub mod linalg;
pub mod objective;

pub use error::{NmfError, Result};
pub use factorize::{FactorizationConfig, FactorizationResult, Factorizer};
pub use features::FeatureSet;
pub use linalg::DenseMatrix;
pub use objective::{PenaltyKind, PenaltyParams};

/// Added to every multiplicative-update denominator.
pub const DEFAULT_GUARD_EPS: f64 = 1e-12;
