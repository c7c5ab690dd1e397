//! Dense row-major matrices and the handful of kernels the update rules need.
//!
//! Storage: `values[i * cols + j] = A[i, j]`. Shapes are always at least 1x1.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{NmfError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major values, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(NmfError::EmptyMatrix);
        }
        if values.len() != rows * cols {
            return Err(NmfError::BadLength {
                expected: rows * cols,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(NmfError::NonFinite {
                op: "DenseMatrix::new",
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(NmfError::BadLength {
                expected: ncols,
                got: bad.len(),
            });
        }
        let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), ncols, values)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    /// # Panics
    /// If either dimension is zero or `value` is not finite.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert!(value.is_finite(), "fill value must be finite");
        Self {
            rows,
            cols,
            values: vec![value; rows * cols],
        }
    }

    /// # Panics
    /// If `n` is zero.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        m
    }

    /// # Panics
    /// If either dimension is zero or `f` yields a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "from_fn produced a non-finite value");
                values.push(v);
            }
        }
        Self { rows, cols, values }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.cols + col] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    /// New matrix made of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() {
            return Err(NmfError::EmptyMatrix);
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(NmfError::ShapeMismatch {
                op: "select_columns",
                left: self.shape(),
                right: (self.rows, bad + 1),
            });
        }
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(Self {
            rows: self.rows,
            cols: cols.len(),
            values,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                values[j * self.rows + i] = self.values[i * self.cols + j];
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// First negative entry, if any.
    pub fn find_negative(&self) -> Option<(usize, usize, f64)> {
        self.values
            .iter()
            .position(|&v| v < 0.0)
            .map(|k| (k / self.cols, k % self.cols, self.values[k]))
    }

    pub(crate) fn require_nonnegative(&self, op: &'static str) -> Result<()> {
        match self.find_negative() {
            Some((row, col, value)) => Err(NmfError::NegativeEntry { op, row, col, value }),
            None => Ok(()),
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(NmfError::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }
}

/// Standard product `a · b`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(NmfError::ShapeMismatch {
            op: "matmul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut out = vec![0.0; m * n];
    // i-k-j order keeps both inner accesses contiguous.
    for i in 0..m {
        let out_row = &mut out[i * n..(i + 1) * n];
        for l in 0..k {
            let aik = a.values[i * k + l];
            if aik == 0.0 {
                continue;
            }
            let b_row = &b.values[l * n..(l + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += aik * bv;
            }
        }
    }
    Ok(DenseMatrix {
        rows: m,
        cols: n,
        values: out,
    })
}

/// `aᵀ · b` without materializing the transpose.
pub fn matmul_tn(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != b.rows {
        return Err(NmfError::ShapeMismatch {
            op: "matmul_tn",
            left: (a.cols, a.rows),
            right: b.shape(),
        });
    }
    let (m, k, n) = (a.cols, a.rows, b.cols);
    let mut out = vec![0.0; m * n];
    for l in 0..k {
        let a_row = a.row(l);
        let b_row = b.row(l);
        for (i, &ali) in a_row.iter().enumerate() {
            if ali == 0.0 {
                continue;
            }
            let out_row = &mut out[i * n..(i + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += ali * bv;
            }
        }
    }
    Ok(DenseMatrix {
        rows: m,
        cols: n,
        values: out,
    })
}

/// `a · bᵀ` without materializing the transpose.
pub fn matmul_nt(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.cols {
        return Err(NmfError::ShapeMismatch {
            op: "matmul_nt",
            left: a.shape(),
            right: (b.cols, b.rows),
        });
    }
    let (m, n) = (a.rows, b.rows);
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        let a_row = a.row(i);
        for j in 0..n {
            out.push(dot(a_row, b.row(j)));
        }
    }
    Ok(DenseMatrix {
        rows: m,
        cols: n,
        values: out,
    })
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Elementwise product.
pub fn hadamard_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.same_shape(b, "hadamard_mul")?;
    Ok(DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    })
}

/// `a + factor · b`.
pub fn add_scaled(a: &DenseMatrix, b: &DenseMatrix, factor: f64) -> Result<DenseMatrix> {
    a.same_shape(b, "add_scaled")?;
    Ok(DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        values: a.values.iter().zip(&b.values).map(|(x, y)| x + factor * y).collect(),
    })
}

/// Elementwise `num / (den + eps)`.
///
/// `den` must be nonnegative: a negative denominator means a nonnegativity
/// invariant broke upstream, so it is reported rather than divided through.
pub fn hadamard_div_guarded(num: &DenseMatrix, den: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(NmfError::InvalidParameter {
            name: "guard_eps",
            value: eps,
        });
    }
    num.same_shape(den, "hadamard_div_guarded")?;
    den.require_nonnegative("hadamard_div_guarded")?;
    let mut values = Vec::with_capacity(num.values.len());
    for (k, (&n, &d)) in num.values.iter().zip(&den.values).enumerate() {
        let v = n / (d + eps);
        if !v.is_finite() {
            return Err(NmfError::NonFinite {
                op: "hadamard_div_guarded",
                row: k / num.cols,
                col: k % num.cols,
            });
        }
        values.push(v);
    }
    Ok(DenseMatrix {
        rows: num.rows,
        cols: num.cols,
        values,
    })
}

pub fn trace(a: &DenseMatrix) -> Result<f64> {
    if a.rows != a.cols {
        return Err(NmfError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok((0..a.rows).map(|i| a.get(i, i)).sum())
}

/// Sum of squared entries, `‖a‖²_F`.
pub fn frobenius_sq(a: &DenseMatrix) -> f64 {
    a.values.iter().map(|v| v * v).sum()
}
