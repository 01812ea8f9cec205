//! Dense matrices over a finite field with exact Gaussian elimination.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u64, u64),
    #[error("system has no unique solution")]
    RankDeficient,
    #[error("entry {0} is not an element of GF({1})")]
    InvalidEntry(u64, u64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Row-major matrix of canonical field representatives.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch("ragged rows".into()));
            }
            for &x in r {
                if !field.contains(x) {
                    return Err(MatrixError::InvalidEntry(x, field.order()));
                }
                data.push(x);
            }
        }
        Ok(Matrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Empty-row matrix with a known column count.
    pub fn empty(field: &Field, cols: usize) -> Self {
        Self::zeros(field, 0, cols)
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j))
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vstack {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "hstack {} vs {} rows",
                self.rows, other.rows
            )));
        }
        Ok(Matrix::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    fn check_field(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch(self.field.order(), other.field.order()));
        }
        Ok(())
    }

    /// Re-express the entries in a field containing this one.
    pub fn lift(&self, big: &Field) -> Result<Matrix, MatrixError> {
        if &self.field == big {
            return Ok(self.clone());
        }
        let map = self.field.embedding_into(big)?;
        Ok(Matrix {
            field: big.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| map[x as usize]).collect(),
        })
    }

    /// Product in the larger of the two fields (one must be a subfield of the other).
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            if self.field.is_subfield_of(&other.field) {
                return self.lift(&other.field)?.mul(other);
            }
            if other.field.is_subfield_of(&self.field) {
                return self.mul(&other.lift(&self.field)?);
            }
            return Err(MatrixError::FieldMismatch(self.field.order(), other.field.order()));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if b != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, f.add(cur, f.mul(a, b)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix times a vector (entries in this field or an extension).
    pub fn mul_vec(&self, field: &Field, v: &[u64]) -> Result<Vec<u64>, MatrixError> {
        let col = Matrix::from_fn(field, v.len(), 1, |i, _| v[i]);
        Ok(self.mul(&col)?.column(0))
    }

    /// In-place Gauss-Jordan; returns pivot columns in order.
    fn eliminate(&mut self, col_limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..col_limit {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j);
                self.set(r, j, f.mul(v, inv));
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let sub = f.mul(factor, self.get(r, j));
                    let cur = self.get(i, j);
                    self.set(i, j, f.sub(cur, sub));
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and the pivot columns (0-based, ascending).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let cols = m.cols;
        let p = m.eliminate(cols);
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows) of the row space.
    pub fn row_basis(&self) -> Matrix {
        let (r, p) = self.rref();
        r.select_rows(&(0..p.len()).collect::<Vec<_>>())
    }

    /// Basis (as rows) of the right null space {x : self·x = 0}.
    pub fn null_space(&self) -> Matrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            out.set(b, fc, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(b, pc, f.neg(r.get(pr, fc)));
            }
        }
        out
    }

    /// The unique X with self·X = B; B may live over an extension field.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix, MatrixError> {
        if b.rows != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "solve: A has {} rows, b has {}",
                self.rows, b.rows
            )));
        }
        let (a, b) = if self.field == b.field {
            (self.clone(), b.clone())
        } else if self.field.is_subfield_of(&b.field) {
            (self.lift(&b.field)?, b.clone())
        } else {
            return Err(MatrixError::FieldMismatch(self.field.order(), b.field.order()));
        };
        let mut aug = a.hstack(&b)?;
        let all = aug.cols;
        let pivots = aug.eliminate(all);
        if pivots.len() != self.cols || pivots.iter().any(|&p| p >= self.cols) {
            return Err(MatrixError::RankDeficient);
        }
        Ok(Matrix::from_fn(&aug.field, self.cols, b.cols, |i, j| aug.get(i, self.cols + j)))
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimensionMismatch("inverse of non-square".into()));
        }
        self.solve(&Matrix::identity(&self.field, self.rows))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            q: self.field.order(),
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Matrix, MatrixError> {
        let field = Field::from_order(j.q)?;
        let m = if j.rows == 0 {
            Matrix::empty(&field, j.cols)
        } else {
            Matrix::from_rows(&field, &j.entries)?
        };
        if m.rows != j.rows || m.cols != j.cols {
            return Err(MatrixError::DimensionMismatch("header vs entries".into()));
        }
        Ok(m)
    }
}

/// Serialized form: `{"q", "rows", "cols", "entries"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixJson {
    pub q: u64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}
