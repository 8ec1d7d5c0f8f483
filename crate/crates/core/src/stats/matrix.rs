//! Dense matrix kernel for the statistics engine: Householder QR least
//! squares and LU determinant/inverse for small SSCP matrices.

// Explicit index loops mirror the textbook formulations throughout.
#![allow(clippy::needless_range_loop)]

/// Row-major dense matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds an n x k matrix from k column vectors of length n.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = Matrix::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
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

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }
}

/// Least-squares fit of `y` on the columns of `x`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub beta: Vec<f64>,
    /// (X'X)^-1, recovered from the R factor.
    pub xtx_inv: Matrix,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankDeficient {
    /// Index of the first pivot column found linearly dependent.
    pub column: usize,
}

/// Householder QR least squares; errors on rank-deficient designs.
pub fn qr_least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquares, RankDeficient> {
    let n = x.rows();
    let p = x.cols();
    assert_eq!(y.len(), n, "response length mismatch");
    assert!(n >= p, "need at least as many rows as columns");

    let mut a = x.clone();
    let mut qty = y.to_vec();
    let mut max_norm: f64 = 0.0;
    for k in 0..p {
        // Householder vector for column k, rows k..n.
        let mut norm = 0.0;
        for i in k..n {
            norm += a.get(i, k) * a.get(i, k);
        }
        let norm = norm.sqrt();
        max_norm = max_norm.max(norm);
        if norm <= max_norm * 1e-12 {
            return Err(RankDeficient { column: k });
        }
        let alpha = if a.get(k, k) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        v[0] = a.get(k, k) - alpha;
        for i in (k + 1)..n {
            v[i - k] = a.get(i, k);
        }
        let vtv: f64 = v.iter().map(|t| t * t).sum();
        if vtv > 0.0 {
            // Apply H = I - 2 v v'/v'v to the remaining columns and to y.
            for j in k..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * a.get(i, j)).sum();
                let scale = 2.0 * dot / vtv;
                for i in k..n {
                    a.set(i, j, a.get(i, j) - scale * v[i - k]);
                }
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * qty[i]).sum();
            let scale = 2.0 * dot / vtv;
            for i in k..n {
                qty[i] -= scale * v[i - k];
            }
        }
        a.set(k, k, alpha);
    }

    // Back-substitute R beta = (Q'y)[0..p].
    let diag_max = (0..p).fold(0.0_f64, |m, i| m.max(a.get(i, i).abs()));
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        if a.get(i, i).abs() <= diag_max * 1e-12 {
            return Err(RankDeficient { column: i });
        }
        let mut s = qty[i];
        for j in (i + 1)..p {
            s -= a.get(i, j) * beta[j];
        }
        beta[i] = s / a.get(i, i);
    }

    // R^-1 by back substitution, then (X'X)^-1 = R^-1 R^-T.
    let mut r_inv = Matrix::zeros(p, p);
    for col in 0..p {
        let mut e = vec![0.0; p];
        e[col] = 1.0;
        for i in (0..=col).rev() {
            let mut s = e[i];
            for j in (i + 1)..p {
                s -= a.get(i, j) * r_inv.get(j, col);
            }
            r_inv.set(i, col, s / a.get(i, i));
        }
    }
    let xtx_inv = r_inv.matmul(&r_inv.transpose());

    let fitted = x.mul_vec(&beta);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    Ok(LeastSquares {
        beta,
        xtx_inv,
        fitted,
        residuals,
    })
}

/// LU decomposition with partial pivoting; returns (determinant, inverse).
///
/// `None` when the matrix is numerically singular.
pub fn lu_det_inverse(m: &Matrix) -> Option<(f64, Matrix)> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix required");
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det_sign = 1.0;
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0_f64, |acc, (i, j)| acc.max(m.get(i, j).abs()))
        .max(1e-300);

    for k in 0..n {
        let mut pivot = k;
        for i in (k + 1)..n {
            if a.get(i, k).abs() > a.get(pivot, k).abs() {
                pivot = i;
            }
        }
        if a.get(pivot, k).abs() <= scale * 1e-13 {
            return None;
        }
        if pivot != k {
            for j in 0..n {
                let t = a.get(k, j);
                a.set(k, j, a.get(pivot, j));
                a.set(pivot, j, t);
            }
            perm.swap(k, pivot);
            det_sign = -det_sign;
        }
        for i in (k + 1)..n {
            let f = a.get(i, k) / a.get(k, k);
            a.set(i, k, f);
            for j in (k + 1)..n {
                a.set(i, j, a.get(i, j) - f * a.get(k, j));
            }
        }
    }

    let mut det = det_sign;
    for k in 0..n {
        det *= a.get(k, k);
    }

    // Solve A X = I column by column using the stored factors.
    let mut inv = Matrix::zeros(n, n);
    for col in 0..n {
        let mut b = vec![0.0; n];
        for (i, &pi) in perm.iter().enumerate() {
            b[i] = if pi == col { 1.0 } else { 0.0 };
        }
        for i in 1..n {
            let mut s = b[i];
            for j in 0..i {
                s -= a.get(i, j) * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= a.get(i, j) * b[j];
            }
            b[i] = s / a.get(i, i);
        }
        for i in 0..n {
            inv.set(i, col, b[i]);
        }
    }
    Some((det, inv))
}
