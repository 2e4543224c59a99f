//! Small dense square matrices.
//!
//! State dimensions are tiny (p = 2 or 3 in every shipped preset), so the
//! coupling matrix and the pairwise iteration matrices are stored as flat
//! row-major `Vec<f64>` with hand-rolled arithmetic. No external linear
//! algebra crate is involved anywhere in the stability path.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix rows have inconsistent lengths: expected {expected}, row {row} has {got}")]
    RaggedRows {
        expected: usize,
        row: usize,
        got: usize,
    },
    #[error("matrix must be square: got {rows} rows of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: matrix is {dim}x{dim}, vector has length {vec_len}")]
    DimMismatch { dim: usize, vec_len: usize },
    #[error("singular system: no unique solution")]
    Singular,
}

/// Dense square matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                if row.len() == rows[0].len() && rows[0].len() != dim {
                    return Err(MatrixError::NotSquare {
                        rows: dim,
                        cols: rows[0].len(),
                    });
                }
                return Err(MatrixError::RaggedRows {
                    expected: dim,
                    row: r,
                    got: row.len(),
                });
            }
        }
        Ok(Matrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|r| self.data[r * self.dim..(r + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| self.get(r, c) == if r == c { 1.0 } else { 0.0 })
        })
    }

    /// `out = self * x`. Panics if lengths disagree with the dimension.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for r in 0..self.dim {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            out[r] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if x.len() != self.dim {
            return Err(MatrixError::DimMismatch {
                dim: self.dim,
                vec_len: x.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c];
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn determinant(&self) -> f64 {
        match self.dim {
            0 => 1.0,
            1 => self.data[0],
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            3 => {
                let m = |r: usize, c: usize| self.get(r, c);
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            _ => {
                // LU with partial pivoting; sign tracked through row swaps.
                let n = self.dim;
                let mut a = self.data.clone();
                let mut det = 1.0;
                for col in 0..n {
                    let pivot = (col..n)
                        .max_by(|&r1, &r2| {
                            a[r1 * n + col]
                                .abs()
                                .total_cmp(&a[r2 * n + col].abs())
                        })
                        .unwrap();
                    if a[pivot * n + col] == 0.0 {
                        return 0.0;
                    }
                    if pivot != col {
                        for c in 0..n {
                            a.swap(col * n + c, pivot * n + c);
                        }
                        det = -det;
                    }
                    det *= a[col * n + col];
                    for r in col + 1..n {
                        let f = a[r * n + col] / a[col * n + col];
                        for c in col..n {
                            a[r * n + c] -= f * a[col * n + c];
                        }
                    }
                }
                det
            }
        }
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting,
    /// followed by one step of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if b.len() != self.dim {
            return Err(MatrixError::DimMismatch {
                dim: self.dim,
                vec_len: b.len(),
            });
        }
        let mut x = self.solve_raw(b)?;
        // r = b - A x, then x += A^{-1} r
        let ax = self.matvec(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        if let Ok(corr) = self.solve_raw(&r) {
            for (xi, ci) in x.iter_mut().zip(&corr) {
                *xi += ci;
            }
        }
        Ok(x)
    }

    fn solve_raw(&self, b: &[f64]) -> Result<Vec<f64>, MatrixError> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))
                .unwrap();
            if a[pivot * n + col] == 0.0 {
                return Err(MatrixError::Singular);
            }
            if pivot != col {
                for c in 0..n {
                    a.swap(col * n + c, pivot * n + c);
                }
                x.swap(col, pivot);
            }
            for r in col + 1..n {
                let f = a[r * n + col] / a[col * n + col];
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut v = x[col];
            for c in col + 1..n {
                v -= a[col * n + c] * x[c];
            }
            x[col] = v / a[col * n + col];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_identity() {
        assert!(Matrix::identity(3).is_identity());
        let mut m = Matrix::identity(2);
        m.set(0, 1, 0.5);
        assert!(!m.is_identity());
    }

    #[test]
    fn from_rows_rejects_non_square() {
        let err = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap_err();
        assert!(matches!(err, MatrixError::NotSquare { rows: 2, cols: 3 }));
        let err = Matrix::from_rows(&[vec![1.0, 2.0], vec![4.0]]).unwrap_err();
        assert!(matches!(err, MatrixError::RaggedRows { .. }));
    }

    #[test]
    fn matvec_and_mul() {
        let m = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(m.matvec(&[2.0, 4.0]).unwrap(), vec![4.0, 4.0]);
        let sq = m.mul(&m);
        assert_eq!(sq.get(0, 1), 1.0);
        assert!(m.matvec(&[1.0]).is_err());
    }

    #[test]
    fn solve_small_systems() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = m.solve(&[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);

        let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(singular.solve(&[1.0, 2.0]).unwrap_err(), MatrixError::Singular);
    }

    #[test]
    fn determinant_matches_hand_values() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.determinant(), -2.0);
        let m3 = Matrix::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 4.0],
        ])
        .unwrap();
        assert_eq!(m3.determinant(), 24.0);
        // LU path agrees with the closed 3x3 form
        let m4 = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![2.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 2.0],
        ])
        .unwrap();
        assert!((m4.determinant() - 6.0).abs() < 1e-12);
    }
}
