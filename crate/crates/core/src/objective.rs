//! Costs, penalties and penalty gradients.
//!
//! The Zellner penalties carry their `1/g` factor, so
//! [`total_objective`] reports `‖X − WH‖² + α·J₁(W) + β·J₂(H)` with
//! `J₁ = (1/g)·trace(WᵀXXᵀW)` and `J₂ = (1/g)·trace(HXᵀXHᵀ)`. Both traces are
//! evaluated as squared Frobenius norms of `XᵀW` and `XHᵀ`.

use crate::error::{NmfError, Result};
use crate::linalg::{self, frobenius_sq, DenseMatrix};

/// Which penalty pair augments the reconstruction cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    /// Plain NMF.
    None,
    /// CNMF: `J₁ = ‖W‖²_F`, `J₂ = ‖H‖²_F`.
    Frobenius,
    /// ZNMF: data-dependent trace penalties scaled by `1/g`.
    Zellner,
}

impl PenaltyKind {
    /// Short name used on the command line and in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            PenaltyKind::None => "none",
            PenaltyKind::Frobenius => "cnmf",
            PenaltyKind::Zellner => "znmf",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "none" | "nmf" => Some(PenaltyKind::None),
            "cnmf" => Some(PenaltyKind::Frobenius),
            "znmf" => Some(PenaltyKind::Zellner),
            _ => None,
        }
    }
}

impl core::fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Penalty weights. `g` is only consulted for [`PenaltyKind::Zellner`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    pub alpha: f64,
    pub beta: f64,
    pub g: Option<f64>,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            g: None,
        }
    }
}

impl PenaltyParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, g: None }
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = Some(g);
        self
    }

    /// Checks `0 ≤ α, β ≤ 1` and, if present, `g > 0`.
    pub fn validate(&self) -> Result<()> {
        check_unit("alpha", self.alpha)?;
        check_unit("beta", self.beta)?;
        if let Some(g) = self.g {
            check_g(g)?;
        }
        Ok(())
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(NmfError::InvalidParameter { name, value })
    }
}

pub(crate) fn check_g(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(NmfError::InvalidParameter { name: "g", value: g })
    }
}

fn check_factor_shapes(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
    if x.rows() != w.rows() || w.cols() != h.rows() || h.cols() != x.cols() {
        return Err(NmfError::ShapeMismatch {
            op: "factor shapes",
            left: w.shape(),
            right: h.shape(),
        });
    }
    Ok(())
}

/// `Σᵢⱼ (Xᵢⱼ − (WH)ᵢⱼ)²`.
pub fn frobenius_cost(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    check_factor_shapes(x, w, h)?;
    let wh = linalg::matmul(w, h)?;
    Ok(x.as_slice()
        .iter()
        .zip(wh.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Generalized KL divergence `Σ (X log(X/WH) − X + WH)`, with `0·log 0 = 0`.
///
/// A positive target against a zero reconstruction is an error, not `+∞`.
pub fn kl_divergence(x: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    check_factor_shapes(x, w, h)?;
    x.require_nonnegative("kl_divergence")?;
    let wh = linalg::matmul(w, h)?;
    wh.require_nonnegative("kl_divergence")?;
    let cols = x.cols();
    let mut total = 0.0;
    for (k, (&a, &b)) in x.as_slice().iter().zip(wh.as_slice()).enumerate() {
        if a == 0.0 {
            total += b;
        } else if b == 0.0 {
            return Err(NmfError::DivergenceUndefined {
                row: k / cols,
                col: k % cols,
            });
        } else {
            total += a * libm::log(a / b) - a + b;
        }
    }
    Ok(total)
}

/// `(1/g)·trace(WᵀXXᵀW)`.
pub fn zellner_penalty_w(x: &DenseMatrix, w: &DenseMatrix, g: f64) -> Result<f64> {
    check_g(g)?;
    Ok(frobenius_sq(&linalg::matmul_tn(x, w)?) / g)
}

/// `(1/g)·trace(HXᵀXHᵀ)`.
pub fn zellner_penalty_h(x: &DenseMatrix, h: &DenseMatrix, g: f64) -> Result<f64> {
    check_g(g)?;
    Ok(frobenius_sq(&linalg::matmul_nt(x, h)?) / g)
}

/// `∂J₁/∂W = (2/g)·XXᵀW`.
pub fn grad_zellner_w(x: &DenseMatrix, w: &DenseMatrix, g: f64) -> Result<DenseMatrix> {
    check_g(g)?;
    let xt_w = linalg::matmul_tn(x, w)?;
    Ok(linalg::matmul(x, &xt_w)?.scale(2.0 / g))
}

/// `∂J₂/∂H = (2/g)·HXᵀX`.
pub fn grad_zellner_h(x: &DenseMatrix, h: &DenseMatrix, g: f64) -> Result<DenseMatrix> {
    check_g(g)?;
    let x_ht = linalg::matmul_nt(x, h)?;
    Ok(linalg::matmul_tn(&x_ht, x)?.scale(2.0 / g))
}

/// Reconstruction cost plus the weighted penalties selected by `kind`.
///
/// `params.g` is required for [`PenaltyKind::Zellner`].
pub fn total_objective(
    x: &DenseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    kind: PenaltyKind,
    params: &PenaltyParams,
) -> Result<f64> {
    params.validate()?;
    let cost = frobenius_cost(x, w, h)?;
    let (j1, j2) = match kind {
        PenaltyKind::None => return Ok(cost),
        PenaltyKind::Frobenius => (frobenius_sq(w), frobenius_sq(h)),
        PenaltyKind::Zellner => {
            let g = params.g.ok_or(NmfError::InvalidParameter {
                name: "g",
                value: f64::NAN,
            })?;
            (zellner_penalty_w(x, w, g)?, zellner_penalty_h(x, h, g)?)
        }
    };
    Ok(cost + params.alpha * j1 + params.beta * j2)
}
