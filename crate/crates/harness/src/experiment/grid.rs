//! Parameter grids and per-run seed derivation.
//!
//! Every run gets two seeds. The split seed depends only on the base seed
//! and the replication index, so all cells of one replication share a
//! train/test split and different settings are compared on paired data.
//! The run seed (factor initialization and test-feature initialization)
//! additionally mixes in the rank and the exact `α`, `β` and `g` values.
//! Nothing depends on a cell's position in the grid, so adding or removing
//! cells never changes another cell's result.

use std::fmt;

use znmf_core::factorize::{DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};
use znmf_core::features::DEFAULT_FEATURE_ITERS;
use znmf_core::PenaltyKind;

use super::ExperimentError;

/// How `β` follows `α` along a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaBetaRegime {
    /// `β = α`
    Equal,
    /// `β = 1 − α`
    Complement,
}

impl AlphaBetaRegime {
    pub fn beta_for(self, alpha: f64) -> f64 {
        match self {
            AlphaBetaRegime::Equal => alpha,
            AlphaBetaRegime::Complement => 1.0 - alpha,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AlphaBetaRegime::Equal => "equal",
            AlphaBetaRegime::Complement => "complement",
        }
    }
}

/// Per-run knobs that are not grid axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub per_class_train: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub feature_iters: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            per_class_train: 5,
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            feature_iters: DEFAULT_FEATURE_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub kind: PenaltyKind,
    pub ranks: Vec<usize>,
    pub regime: AlphaBetaRegime,
    pub alpha_values: Vec<f64>,
    /// ZNMF only. Empty means the shape-derived default `max(n, p²)`.
    pub g_values: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
    pub settings: RunSettings,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let invalid = |msg: String| Err(ExperimentError::InvalidConfig(msg));
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return invalid("ranks must be a nonempty list of positive integers".into());
        }
        if self.alpha_values.is_empty() {
            return invalid("at least one alpha value is required".into());
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return invalid(format!("alpha {a} outside [0, 1]"));
        }
        if self.kind != PenaltyKind::Zellner && !self.g_values.is_empty() {
            return invalid(format!("g values only apply to znmf, not {}", self.kind));
        }
        if let Some(g) = self.g_values.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return invalid(format!("g must be positive, got {g}"));
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1".into());
        }
        if self.settings.per_class_train == 0 || self.settings.max_iters == 0 {
            return invalid("per-class-train and max-iters must be positive".into());
        }
        Ok(())
    }
}

/// Everything needed to reproduce one train/classify run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDescriptor {
    pub kind: PenaltyKind,
    pub rank: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `None` means the default `g` for the training matrix shape (ZNMF).
    pub g: Option<f64>,
    pub replication: usize,
    pub split_seed: u64,
    pub seed: u64,
    pub settings: RunSettings,
}

impl fmt::Display for RunDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} q={} alpha={} beta={} g={} replication={} seed={}",
            self.kind,
            self.rank,
            self.alpha,
            self.beta,
            self.g.map_or_else(|| "default".to_string(), |g| g.to_string()),
            self.replication,
            self.seed
        )
    }
}

/// Ranks × alphas × g values × replications, replications innermost.
pub fn expand_grid(config: &SweepConfig) -> Vec<RunDescriptor> {
    let g_axis: Vec<Option<f64>> = if config.kind == PenaltyKind::Zellner && !config.g_values.is_empty() {
        config.g_values.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &rank in &config.ranks {
        for &alpha in &config.alpha_values {
            for &g in &g_axis {
                out.extend(point_descriptors(
                    config.kind,
                    rank,
                    alpha,
                    config.regime.beta_for(alpha),
                    g,
                    config.replications,
                    config.base_seed,
                    config.settings,
                ));
            }
        }
    }
    out
}

/// All replications of a single parameter point.
#[allow(clippy::too_many_arguments)]
pub fn point_descriptors(
    kind: PenaltyKind,
    rank: usize,
    alpha: f64,
    beta: f64,
    g: Option<f64>,
    replications: usize,
    base_seed: u64,
    settings: RunSettings,
) -> Vec<RunDescriptor> {
    (0..replications)
        .map(|replication| {
            let split_seed = split_seed(base_seed, replication);
            RunDescriptor {
                kind,
                rank,
                alpha,
                beta,
                g,
                replication,
                split_seed,
                seed: run_seed(split_seed, rank, alpha, beta, g),
                settings,
            }
        })
        .collect()
}

pub fn split_seed(base_seed: u64, replication: usize) -> u64 {
    mix(base_seed, &[0x0053_504c_4954, replication as u64])
}

pub fn run_seed(split_seed: u64, rank: usize, alpha: f64, beta: f64, g: Option<f64>) -> u64 {
    mix(
        split_seed,
        &[rank as u64, alpha.to_bits(), beta.to_bits(), g.map_or(0, f64::to_bits)],
    )
}

/// Folds `words` into `seed` through the SplitMix64 finalizer.
pub fn mix(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(seed), |h, &w| splitmix64(h ^ w))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
