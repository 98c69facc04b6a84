//! Dense least squares by Householder QR with collinear-column rejection.
//!
//! Columns are processed in order. Before a column is accepted, it is
//! reflected by the Householder transforms of the columns already accepted;
//! if the remaining norm is below `tol` times the column's original norm the
//! column is rejected as (numerically) collinear and moved behind the
//! accepted block. This is column pivoting that keeps the caller's order
//! among independent columns, so later columns are the ones dropped.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<f64>>) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend(c);
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &coef) in v.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.column(j)) {
                *o += coef * x;
            }
        }
        out
    }

    /// Square matrix from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let ss: f64 = a.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}

/// Result of a rank-revealing least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    /// Indices of accepted columns, in original order.
    pub kept: Vec<usize>,
    /// Indices of rejected (collinear) columns.
    pub dropped: Vec<usize>,
    /// Coefficients for the kept columns.
    pub coefficients: Vec<f64>,
    /// Upper-triangular R of the kept columns, row-major r × r.
    pub r: Vec<Vec<f64>>,
}

impl LeastSquares {
    /// (XᵀX)⁻¹ over the kept columns, computed as R⁻¹R⁻ᵀ.
    pub fn xtx_inverse(&self) -> Vec<Vec<f64>> {
        let k = self.kept.len();
        // columns of R⁻¹ by back substitution on unit vectors
        let mut rinv = vec![vec![0.0; k]; k];
        for c in 0..k {
            for i in (0..=c).rev() {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for j in i + 1..=c {
                    s -= self.r[i][j] * rinv[j][c];
                }
                rinv[i][c] = s / self.r[i][i];
            }
        }
        let mut out = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let s: f64 = (j.max(i)..k).map(|l| rinv[i][l] * rinv[j][l]).sum();
                out[i][j] = s;
                out[j][i] = s;
            }
        }
        out
    }
}

/// Solves min ‖Xβ − y‖ with collinear columns rejected at relative
/// tolerance `tol`.
pub fn least_squares(x: &Matrix, y: &[f64], tol: f64) -> LeastSquares {
    let n = x.rows();
    let p = x.cols();
    assert_eq!(y.len(), n, "response length mismatch");
    let mut a = x.clone();
    let mut qty = y.to_vec();
    let original: Vec<f64> = (0..p).map(|j| norm(x.column(j))).collect();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();

    for j in 0..p {
        let k = kept.len();
        if k >= n {
            dropped.push(j);
            continue;
        }
        let residual = norm(&a.column(j)[k..]);
        if original[j] == 0.0 || residual <= tol * original[j] {
            dropped.push(j);
            continue;
        }
        // reflector mapping a[k.., j] onto −sign(a_kj)·‖·‖·e₁
        let col = &a.column(j)[k..];
        let alpha = if col[0] >= 0.0 { -residual } else { residual };
        let mut v = col.to_vec();
        v[0] -= alpha;
        let vnorm = norm(&v);
        if vnorm > 0.0 {
            for x in &mut v {
                *x /= vnorm;
            }
        }
        let apply = |target: &mut [f64]| {
            let s = 2.0 * dot(&v, &target[k..]);
            for (t, vi) in target[k..].iter_mut().zip(&v) {
                *t -= s * vi;
            }
        };
        for jj in j + 1..p {
            apply(a.column_mut(jj));
        }
        apply(&mut qty);
        let cj = a.column_mut(j);
        cj[k] = alpha;
        for x in &mut cj[k + 1..] {
            *x = 0.0;
        }
        kept.push(j);
    }

    let r_dim = kept.len();
    let r: Vec<Vec<f64>> = (0..r_dim)
        .map(|i| (0..r_dim).map(|c| if c >= i { a.get(i, kept[c]) } else { 0.0 }).collect())
        .collect();
    let mut beta = vec![0.0; r_dim];
    for i in (0..r_dim).rev() {
        let mut s = qty[i];
        for c in i + 1..r_dim {
            s -= r[i][c] * beta[c];
        }
        beta[i] = s / r[i][i];
    }
    LeastSquares {
        kept,
        dropped,
        coefficients: beta,
        r,
    }
}

/// Inverse of a symmetric positive-definite matrix by Cholesky; `None` if
/// the matrix is not numerically positive definite.
pub fn spd_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    let scale = (0..n).map(|i| m[i][i].abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = m[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-14 * scale {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // invert L, then M⁻¹ = L⁻ᵀ L⁻¹
    let mut linv = vec![vec![0.0; n]; n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[i][k] * linv[k][c];
            }
            linv[i][c] = s / l[i][i];
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (i..n).map(|k| linv[k][i] * linv[k][j]).sum();
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    Some(out)
}

/// Quadratic form vᵀMv.
pub fn quadratic_form(m: &[Vec<f64>], v: &[f64]) -> f64 {
    m.iter()
        .zip(v)
        .map(|(row, vi)| vi * dot(row, v))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn to_nalgebra(x: &Matrix) -> DMatrix<f64> {
        DMatrix::from_fn(x.rows(), x.cols(), |i, j| x.get(i, j))
    }

    #[test]
    fn exact_system() {
        let x = Matrix::from_columns(3, vec![vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let ls = least_squares(&x, &[1.0, 3.0, 5.0], 1e-10);
        assert_eq!(ls.kept, vec![0, 1]);
        assert!((ls.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((ls.coefficients[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_later_collinear_column() {
        let c0 = vec![1.0, 1.0, 1.0, 1.0];
        let c1 = vec![1.0, 2.0, 3.0, 5.0];
        let c2: Vec<f64> = c0.iter().zip(&c1).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        let c3 = vec![0.0; 4];
        let c4 = vec![0.5, -1.0, 2.0, 0.0];
        let x = Matrix::from_columns(4, vec![c0, c1, c2, c3, c4]);
        let ls = least_squares(&x, &[1.0, 0.0, 2.0, 4.0], 1e-10);
        assert_eq!(ls.kept, vec![0, 1, 4]);
        assert_eq!(ls.dropped, vec![2, 3]);
    }

    #[test]
    fn spd_inverse_round_trip() {
        let m = vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]];
        let inv = spd_inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
        assert!(spd_inverse(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_none());
    }

    proptest! {
        #[test]
        fn matches_normal_equations(
            seed_cols in proptest::collection::vec(proptest::collection::vec(-5.0..5.0f64, 12), 1..5),
            y in proptest::collection::vec(-5.0..5.0f64, 12),
        ) {
            let x = Matrix::from_columns(12, seed_cols);
            let xn = to_nalgebra(&x);
            let xtx = xn.transpose() * &xn;
            prop_assume!(xtx.clone().cholesky().is_some());
            prop_assume!(xtx.clone().symmetric_eigenvalues().min() > 1e-3);
            let ls = least_squares(&x, &y, 1e-10);
            prop_assert_eq!(ls.kept.len(), x.cols());
            let beta = xtx.clone().cholesky().unwrap().solve(&(xn.transpose() * DVector::from_vec(y.clone())));
            for (a, b) in ls.coefficients.iter().zip(beta.iter()) {
                prop_assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()));
            }
            let inv = ls.xtx_inverse();
            let oracle = xtx.try_inverse().unwrap();
            for i in 0..x.cols() {
                for j in 0..x.cols() {
                    prop_assert!((inv[i][j] - oracle[(i, j)]).abs() < 1e-8 * (1.0 + oracle[(i, j)].abs()));
                }
            }
        }
    }
}
