//! Dense real matrices and the structural tests used by the capacity
//! computation: rank, controllability and observability stacks, spectral
//! radius and the induced infinity norm.
//!
//! Everything here is desk scale. Matrices are row-major `f64` buffers and
//! every constructor rejects non-finite entries, so downstream code never has
//! to guard against NaN.

mod eigen;

use std::fmt;
use std::ops::Index;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

pub use eigen::{characteristic_polynomial, eigenvalues, spectral_radius};

/// Default relative tolerance for [`rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from a row-major buffer.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "matrix entry",
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].as_ref().len()
            )));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter().map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend((0..self.rows).map(|i| self[(i, j)]));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.dim(), 1),
            });
        }
        Ok(Vector(
            self.row_iter().map(|r| dot(r, v.as_slice())).collect(),
        ))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Stacks `blocks` vertically. All blocks must share a column count.
    pub fn vstack(blocks: &[Matrix]) -> Result<Matrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("vstack of no blocks".into()))?;
        let mut data = Vec::new();
        for b in blocks {
            if b.cols != first.cols {
                return Err(Error::DimensionMismatch {
                    op: "vstack",
                    left: first.shape(),
                    right: b.shape(),
                });
            }
            data.extend_from_slice(&b.data);
        }
        Ok(Self {
            rows: data.len() / first.cols,
            cols: first.cols,
            data,
        })
    }

    /// Stacks `blocks` horizontally. All blocks must share a row count.
    pub fn hstack(blocks: &[Matrix]) -> Result<Matrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("hstack of no blocks".into()))?;
        if let Some(b) = blocks.iter().find(|b| b.rows != first.rows) {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: first.shape(),
                right: b.shape(),
            });
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(first.rows * cols);
        for i in 0..first.rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Self {
            rows: first.rows,
            cols,
            data,
        })
    }

    /// Copies rows `start..end` into a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Matrix {
        assert!(start < end && end <= self.rows, "row block out of range");
        Self {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.row_iter()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for r in self.row_iter() {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

/// Dense real column vector.
#[derive(Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "vector dimension must be positive".into(),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "vector entry",
            });
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self(vec![0.0; dim])
    }

    /// The canonical basis vector `e_j` (zero-based `j`).
    pub fn basis(dim: usize, j: usize) -> Self {
        assert!(j < dim, "basis index {j} out of range for dimension {dim}");
        let mut v = Self::zeros(dim);
        v.0[j] = 1.0;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op: "vector add",
                left: (self.dim(), 1),
                right: (other.dim(), 1),
            });
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn inf_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Standard matrix product `a * b`.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "mat_mul",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut data = vec![0.0; a.rows * b.cols];
    for i in 0..a.rows {
        let out = &mut data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for (o, &bkj) in out.iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    Ok(Matrix {
        rows: a.rows,
        cols: b.cols,
        data,
    })
}

/// Numerical rank by Gaussian elimination with partial pivoting.
///
/// A pivot counts when its magnitude exceeds `tol` times the largest absolute
/// entry of the input (or `tol` itself for the zero matrix).
pub fn rank(m: &Matrix, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let scale = m.max_abs();
    let threshold = tol * if scale > 0.0 { scale } else { 1.0 };
    let (rows, cols) = m.shape();
    let mut work = m.data.clone();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (pivot_row, pivot_abs) = (rank..rows).map(|r| (r, work[r * cols + col].abs())).fold(
            (rank, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
        if pivot_abs <= threshold {
            continue;
        }
        if pivot_row != rank {
            for j in 0..cols {
                work.swap(pivot_row * cols + j, rank * cols + j);
            }
        }
        let pivot = work[rank * cols + col];
        for r in rank + 1..rows {
            let factor = work[r * cols + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..cols {
                work[r * cols + j] -= factor * work[rank * cols + j];
            }
        }
        rank += 1;
    }
    rank
}

/// `[B, AB, ..., A^{n-1} B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if b.rows != a.rows {
        return Err(Error::DimensionMismatch {
            op: "controllability_matrix",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut blocks = Vec::with_capacity(a.rows);
    let mut block = b.clone();
    for _ in 0..a.rows {
        let next = mat_mul(a, &block)?;
        blocks.push(std::mem::replace(&mut block, next));
    }
    Matrix::hstack(&blocks)
}

/// `[C; C Ã; ...; C Ã^{n-1}]`, built by propagating the rows of `C`.
pub fn observability_matrix(a_tilde: &Matrix, c: &Matrix) -> Result<Matrix> {
    if !a_tilde.is_square() {
        return Err(Error::NotSquare {
            rows: a_tilde.rows,
            cols: a_tilde.cols,
        });
    }
    if c.cols != a_tilde.rows {
        return Err(Error::DimensionMismatch {
            op: "observability_matrix",
            left: a_tilde.shape(),
            right: c.shape(),
        });
    }
    let mut blocks = Vec::with_capacity(a_tilde.rows);
    let mut block = c.clone();
    for _ in 0..a_tilde.rows {
        let next = mat_mul(&block, a_tilde)?;
        blocks.push(std::mem::replace(&mut block, next));
    }
    Matrix::vstack(&blocks)
}

/// Operator norm induced by the max-coordinate norm: the largest absolute
/// row sum.
pub fn induced_inf_norm(m: &Matrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
