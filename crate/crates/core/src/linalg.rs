//! Dense matrix helpers sized for small state-space models and regression
//! design matrices.
//!
//! State dimensions in this crate stay at 4 or below and design matrices at
//! a couple of dozen columns, so everything here is plain row-major `Vec<f64>`
//! with textbook algorithms: LU with partial pivoting, Cholesky, Householder
//! QR least squares, and a Jacobi eigenvalue sweep for symmetric matrices.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("rank-deficient least-squares system at column {column}")]
    RankDeficient { column: usize },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[f64]) -> Self {
        Mat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row_slice(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut s = 0.0;
            for j in 0..self.cols {
                s += self.get(i, j) * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// (self + selfᵀ) / 2.
    pub fn symmetrized(&self) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Solves `self * x = b` by LU with partial pivoting. Square systems only.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.rows;
        if self.cols != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs length {} vs matrix order {}",
                b.len(),
                n
            )));
        }
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut max_val = lu.get(perm[col], col).abs();
            let mut max_row = col;
            for row in (col + 1)..n {
                let v = lu.get(perm[row], col).abs();
                if v > max_val {
                    max_val = v;
                    max_row = row;
                }
            }
            if max_val < 1e-300 {
                return Err(LinalgError::Singular);
            }
            perm.swap(col, max_row);
            let pivot = lu.get(perm[col], col);
            for row in (col + 1)..n {
                let factor = lu.get(perm[row], col) / pivot;
                lu.set(perm[row], col, factor);
                for k in (col + 1)..n {
                    let v = lu.get(perm[row], k) - factor * lu.get(perm[col], k);
                    lu.set(perm[row], k, v);
                }
            }
        }
        // forward then back substitution
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[perm[i]];
            for j in 0..i {
                s -= lu.get(perm[i], j) * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= lu.get(perm[i], j) * x[j];
            }
            x[i] = s / lu.get(perm[i], i);
        }
        Ok(x)
    }

    /// Inverse via column-by-column LU solves.
    pub fn inverse(&self) -> Result<Mat, LinalgError> {
        let n = self.rows;
        let mut out = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                out.set(i, j, col[i]);
            }
            e[j] = 0.0;
        }
        Ok(out)
    }

    /// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
    pub fn cholesky(&self) -> Result<Mat, LinalgError> {
        let n = self.rows;
        if self.cols != n {
            return Err(LinalgError::DimensionMismatch(
                "cholesky needs a square matrix".into(),
            ));
        }
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(LinalgError::NotPositiveDefinite);
                    }
                    l.set(i, j, s.sqrt());
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Ok(l)
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.rows;
        assert_eq!(self.cols, n, "symmetric_eigenvalues needs a square matrix");
        let mut a = self.symmetrized();
        let scale = a.max_abs().max(1e-300);
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a.get(i, j).abs());
                }
            }
            if off < 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eig
    }

    /// Least-squares solution of `self * x ≈ b` (rows ≥ cols) by Householder QR.
    ///
    /// Reports the first column whose diagonal R entry collapses, so callers
    /// can name the offending regressor.
    pub fn lstsq_qr(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let m = self.rows;
        let n = self.cols;
        if b.len() != m {
            return Err(LinalgError::DimensionMismatch(format!(
                "rhs length {} vs {} rows",
                b.len(),
                m
            )));
        }
        if m < n {
            return Err(LinalgError::DimensionMismatch(format!(
                "underdetermined system: {} rows < {} columns",
                m, n
            )));
        }
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        let overall = a.max_abs().max(1e-300);
        for k in 0..n {
            // Householder vector for column k below the diagonal.
            let mut norm = 0.0;
            for i in k..m {
                norm += a.get(i, k) * a.get(i, k);
            }
            let norm = norm.sqrt();
            if norm < 1e-13 * overall {
                return Err(LinalgError::RankDeficient { column: k });
            }
            let akk = a.get(k, k);
            let alpha = if akk >= 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..m).map(|i| a.get(i, k)).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                // apply H = I - 2vvᵀ/vᵀv to the remaining columns and rhs
                for j in k..n {
                    let mut dot = 0.0;
                    for i in k..m {
                        dot += v[i - k] * a.get(i, j);
                    }
                    let f = 2.0 * dot / vnorm2;
                    for i in k..m {
                        let val = a.get(i, j) - f * v[i - k];
                        a.set(i, j, val);
                    }
                }
                let mut dot = 0.0;
                for i in k..m {
                    dot += v[i - k] * rhs[i];
                }
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    rhs[i] -= f * v[i - k];
                }
            }
            a.set(k, k, alpha);
        }
        // rank check on R diagonal, then back substitution
        let rmax = (0..n).fold(0.0f64, |mx, i| mx.max(a.get(i, i).abs()));
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            if a.get(i, i).abs() < 1e-12 * rmax {
                return Err(LinalgError::RankDeficient { column: i });
            }
            let mut s = rhs[i];
            for j in (i + 1)..n {
                s -= a.get(i, j) * x[j];
            }
            x[i] = s / a.get(i, i);
        }
        Ok(x)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
