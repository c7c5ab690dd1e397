//! Multiplicative-update drivers for plain NMF, CNMF and ZNMF.
//!
//! Every step updates `W` first and then `H` using the *new* `W`. All three
//! rules share the numerator of the plain rule and only differ in what is
//! added to the denominator:
//!
//! | variant | `W` denominator          | `H` denominator             |
//! |---------|--------------------------|-----------------------------|
//! | plain   | `WHHᵀ`                   | `WᵀWH`                      |
//! | CNMF    | `WHHᵀ + 2αW`             | `WᵀWH + 2βH`                |
//! | ZNMF    | `WHHᵀ + (α/g)XXᵀW`       | `g·WᵀWH + βHXᵀX` (numerator `g·H ⊙ WᵀX`) |
//!
//! The ZNMF `H` rule is kept in its `g`-scaled form rather than simplified.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NmfError, Result};
use crate::linalg::{self, add_scaled, hadamard_div_guarded, hadamard_mul, DenseMatrix};
use crate::objective::{self, PenaltyKind, PenaltyParams};
use crate::DEFAULT_GUARD_EPS;

pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_REL_TOL: f64 = 1e-5;
/// Iterations between the two objective values compared by the stopping rule.
pub const CONVERGENCE_WINDOW: usize = 10;

const INIT_LOW: f64 = 1e-4;
const INIT_HIGH: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationConfig {
    pub kind: PenaltyKind,
    pub rank: usize,
    /// `params.g`, when set, overrides [`default_g`] for ZNMF.
    pub params: PenaltyParams,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub guard_eps: f64,
    pub seed: u64,
}

impl FactorizationConfig {
    pub fn new(kind: PenaltyKind, rank: usize) -> Self {
        Self {
            kind,
            rank,
            params: PenaltyParams::default(),
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            guard_eps: DEFAULT_GUARD_EPS,
            seed: 0,
        }
    }

    pub fn with_penalty(mut self, alpha: f64, beta: f64) -> Self {
        self.params.alpha = alpha;
        self.params.beta = beta;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.params.g = Some(g);
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_guard_eps(mut self, guard_eps: f64) -> Self {
        self.guard_eps = guard_eps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the configuration against a `p×n` data matrix.
    pub fn validate(&self, p: usize, n: usize) -> Result<()> {
        if self.rank == 0 || self.rank > p.min(n) {
            return Err(NmfError::RankTooLarge {
                rank: self.rank,
                rows: p,
                cols: n,
            });
        }
        if self.max_iters == 0 {
            return Err(NmfError::InvalidParameter {
                name: "max_iters",
                value: 0.0,
            });
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(NmfError::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
            });
        }
        if !(self.guard_eps > 0.0 && self.guard_eps.is_finite()) {
            return Err(NmfError::InvalidParameter {
                name: "guard_eps",
                value: self.guard_eps,
            });
        }
        self.params.validate()
    }

    /// The `g` a ZNMF run on a `p×n` matrix would use; `None` for other kinds.
    pub fn resolved_g(&self, p: usize, n: usize) -> Option<f64> {
        match self.kind {
            PenaltyKind::Zellner => Some(self.params.g.unwrap_or_else(|| default_g(n, p))),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    /// Total objective after each completed iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// `true` only if the stopping rule fired before `max_iters`.
    pub converged: bool,
    /// The `g` actually used (ZNMF only).
    pub g: Option<f64>,
}

impl FactorizationResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

/// Benchmark prior scale `max(n, p²)`.
pub fn default_g(n: usize, p: usize) -> f64 {
    let p = p as f64;
    (n as f64).max(p * p)
}

/// Random `W` (`p×q`) and `H` (`q×n`), entries uniform on `[1e-4, 1)`.
///
/// `W` is drawn first, row by row, then `H`, from a ChaCha8 stream seeded
/// with `seed`.
pub fn init_factors(p: usize, n: usize, q: usize, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    if p == 0 || n == 0 {
        return Err(NmfError::EmptyMatrix);
    }
    if q == 0 || q > p.min(n) {
        return Err(NmfError::RankTooLarge {
            rank: q,
            rows: p,
            cols: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = uniform_matrix(p, q, &mut rng);
    let h = uniform_matrix(q, n, &mut rng);
    Ok((w, h))
}

pub(crate) fn uniform_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(INIT_LOW..INIT_HIGH))
}

/// Penalty-specific pieces of one update step.
#[derive(Debug, Clone, Copy)]
enum Rule<'a> {
    Plain,
    Cnmf {
        alpha: f64,
        beta: f64,
    },
    Znmf {
        alpha: f64,
        beta: f64,
        g: f64,
        /// `XXᵀ`, `p×p`.
        xxt: &'a DenseMatrix,
        /// `XᵀX`, `n×n`.
        xtx: &'a DenseMatrix,
    },
}

fn check_update_inputs(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
    if x.rows() != w.rows() || w.cols() != h.rows() || h.cols() != x.cols() {
        return Err(NmfError::ShapeMismatch {
            op: "update",
            left: w.shape(),
            right: h.shape(),
        });
    }
    x.require_nonnegative("update: X")?;
    w.require_nonnegative("update: W")?;
    h.require_nonnegative("update: H")
}

fn check_weights(alpha: f64, beta: f64) -> Result<()> {
    PenaltyParams::new(alpha, beta).validate()
}

fn step(
    x: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    rule: Rule<'_>,
    eps: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    // W ← W ⊙ XHᵀ / (WHHᵀ + penalty)
    let num = linalg::matmul_nt(x, h)?;
    let hht = linalg::matmul_nt(h, h)?;
    let mut den = linalg::matmul(w, &hht)?;
    match rule {
        Rule::Plain => {}
        Rule::Cnmf { alpha, .. } => {
            if alpha != 0.0 {
                den = add_scaled(&den, w, 2.0 * alpha)?;
            }
        }
        Rule::Znmf { alpha, g, xxt, .. } => {
            if alpha != 0.0 {
                den = add_scaled(&den, &linalg::matmul(xxt, w)?, alpha / g)?;
            }
        }
    }
    let w_next = hadamard_mul(w, &hadamard_div_guarded(&num, &den, eps)?)?;

    // H ← H ⊙ W'ᵀX / (W'ᵀW'H + penalty), using the freshly updated W'
    let num = linalg::matmul_tn(&w_next, x)?;
    let wtw = linalg::matmul_tn(&w_next, &w_next)?;
    let den = linalg::matmul(&wtw, h)?;
    let h_next = match rule {
        Rule::Plain => hadamard_mul(h, &hadamard_div_guarded(&num, &den, eps)?)?,
        Rule::Cnmf { beta, .. } => {
            let den = if beta != 0.0 {
                add_scaled(&den, h, 2.0 * beta)?
            } else {
                den
            };
            hadamard_mul(h, &hadamard_div_guarded(&num, &den, eps)?)?
        }
        Rule::Znmf { beta, g, xtx, .. } => {
            // g·H ⊙ W'ᵀX / (g·W'ᵀW'H + β·HXᵀX). The guard is scaled by g so it
            // sits at the same relative size as in the unscaled rules.
            let mut den = den.scale(g);
            if beta != 0.0 {
                den = add_scaled(&den, &linalg::matmul(h, xtx)?, beta)?;
            }
            hadamard_mul(&h.scale(g), &hadamard_div_guarded(&num, &den, g * eps)?)?
        }
    };
    Ok((w_next, h_next))
}

/// One plain multiplicative step.
pub fn update_plain(
    x: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    guard_eps: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_update_inputs(x, w, h)?;
    step(x, w, h, Rule::Plain, guard_eps)
}

/// One CNMF step with `∂‖W‖²/∂W = 2W` and `∂‖H‖²/∂H = 2H` in the denominators.
pub fn update_cnmf(
    x: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    alpha: f64,
    beta: f64,
    guard_eps: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_update_inputs(x, w, h)?;
    check_weights(alpha, beta)?;
    step(x, w, h, Rule::Cnmf { alpha, beta }, guard_eps)
}

/// One ZNMF step. Recomputes `XXᵀ` and `XᵀX`; [`Factorizer`] caches them.
pub fn update_znmf(
    x: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    alpha: f64,
    beta: f64,
    g: f64,
    guard_eps: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_update_inputs(x, w, h)?;
    check_weights(alpha, beta)?;
    objective::check_g(g)?;
    let xxt = linalg::matmul_nt(x, x)?;
    let xtx = linalg::matmul_tn(x, x)?;
    let rule = Rule::Znmf {
        alpha,
        beta,
        g,
        xxt: &xxt,
        xtx: &xtx,
    };
    step(x, w, h, rule, guard_eps)
}

/// Stepwise driver. [`run`] is a loop over [`Factorizer::step`]; use this
/// directly to inspect every iterate.
#[derive(Debug, Clone)]
pub struct Factorizer<'a> {
    x: &'a DenseMatrix,
    config: FactorizationConfig,
    params: PenaltyParams,
    grams: Option<(DenseMatrix, DenseMatrix)>,
    w: DenseMatrix,
    h: DenseMatrix,
    trace: Vec<f64>,
}

impl<'a> Factorizer<'a> {
    pub fn new(x: &'a DenseMatrix, config: &FactorizationConfig) -> Result<Self> {
        let (p, n) = x.shape();
        config.validate(p, n)?;
        x.require_nonnegative("factorize: X")?;
        let (w, h) = init_factors(p, n, config.rank, config.seed)?;
        let mut params = config.params;
        params.g = config.resolved_g(p, n);
        if let Some(g) = params.g {
            objective::check_g(g)?;
        }
        let grams = match config.kind {
            PenaltyKind::Zellner => Some((linalg::matmul_nt(x, x)?, linalg::matmul_tn(x, x)?)),
            _ => None,
        };
        Ok(Self {
            x,
            config: config.clone(),
            params,
            grams,
            w,
            h,
            trace: Vec::new(),
        })
    }

    /// Applies one update and returns the objective at the new iterate.
    pub fn step(&mut self) -> Result<f64> {
        let rule = match (self.config.kind, &self.grams) {
            (PenaltyKind::None, _) => Rule::Plain,
            (PenaltyKind::Frobenius, _) => Rule::Cnmf {
                alpha: self.params.alpha,
                beta: self.params.beta,
            },
            (PenaltyKind::Zellner, Some((xxt, xtx))) => Rule::Znmf {
                alpha: self.params.alpha,
                beta: self.params.beta,
                g: self.params.g.expect("resolved in new"),
                xxt,
                xtx,
            },
            (PenaltyKind::Zellner, None) => unreachable!("grams are built for ZNMF"),
        };
        let (w, h) = step(self.x, &self.w, &self.h, rule, self.config.guard_eps)?;
        self.w = w;
        self.h = h;
        let f = self.objective()?;
        self.trace.push(f);
        Ok(f)
    }

    /// Objective at the current iterate.
    pub fn objective(&self) -> Result<f64> {
        objective::total_objective(self.x, &self.w, &self.h, self.config.kind, &self.params)
    }

    /// Whether the windowed relative change has dropped below `rel_tol`.
    pub fn has_converged(&self) -> bool {
        let t = self.trace.len();
        if t <= CONVERGENCE_WINDOW {
            return false;
        }
        let current = self.trace[t - 1];
        let previous = self.trace[t - 1 - CONVERGENCE_WINDOW];
        (current - previous).abs() / previous.max(1e-30) < self.config.rel_tol
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn g(&self) -> Option<f64> {
        self.params.g
    }

    pub fn finish(self, converged: bool) -> FactorizationResult {
        FactorizationResult {
            iterations: self.trace.len(),
            w: self.w,
            h: self.h,
            objective_trace: self.trace,
            converged,
            g: self.params.g,
        }
    }
}

/// Factorizes `x` with the variant and stopping rule in `config`.
pub fn run(x: &DenseMatrix, config: &FactorizationConfig) -> Result<FactorizationResult> {
    run_with(x, config, |_, _, _| {})
}

/// Like [`run`], calling `observer(iteration, W, H)` after every step
/// (iterations count from 1).
pub fn run_with(
    x: &DenseMatrix,
    config: &FactorizationConfig,
    mut observer: impl FnMut(usize, &DenseMatrix, &DenseMatrix),
) -> Result<FactorizationResult> {
    let mut driver = Factorizer::new(x, config)?;
    let mut converged = false;
    while driver.iterations() < config.max_iters {
        driver.step()?;
        observer(driver.iterations(), driver.w(), driver.h());
        if driver.has_converged() {
            converged = true;
            break;
        }
    }
    Ok(driver.finish(converged))
}
