//! Dense row-major matrices and a one-sided Jacobi SVD.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense real matrix in row-major order. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    ///
    /// Panics on ragged input or non-finite entries; intended for literals.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix::new(rows.len(), cols, data).expect("invalid matrix literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, x) in out.iter_mut().zip(self.row(i)) {
                *acc += x;
            }
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.row_sums().iter().sum()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(l, j)];
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Element-wise combination of two equally shaped matrices.
    pub fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn hstack(&self, right: &Matrix) -> Matrix {
        assert_eq!(self.rows, right.rows, "hstack row mismatch");
        Matrix::from_fn(self.rows, self.cols + right.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                right[(i, j - self.cols)]
            }
        })
    }

    pub fn vstack(&self, bottom: &Matrix) -> Matrix {
        assert_eq!(self.cols, bottom.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&bottom.data);
        Matrix {
            rows: self.rows + bottom.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// First `k` columns.
    pub fn leading_cols(&self, k: usize) -> Matrix {
        let idx: Vec<usize> = (0..k.min(self.cols)).collect();
        self.select_cols(&idx)
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scale_cols(&self, factors: &[f64]) -> Matrix {
        assert_eq!(factors.len(), self.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factors[j])
    }

    /// Multiplies row `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[f64]) -> Matrix {
        assert_eq!(factors.len(), self.rows);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factors[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest absolute element-wise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Applies `m[i][j] / sqrt(row_weights[i] * col_weights[j])`.
pub fn scale_rows_cols(m: &Matrix, row_weights: &[f64], col_weights: &[f64]) -> Result<Matrix> {
    if row_weights.len() != m.rows() || col_weights.len() != m.cols() {
        return Err(Error::InvalidMatrix(format!(
            "weights of length {}/{} do not match a {}x{} matrix",
            row_weights.len(),
            col_weights.len(),
            m.rows(),
            m.cols()
        )));
    }
    for (index, &value) in row_weights.iter().chain(col_weights).enumerate() {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::DegenerateWeight { index, value });
        }
    }
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        m[(i, j)] / (row_weights[i] * col_weights[j]).sqrt()
    }))
}

/// Thin singular value decomposition `m = U diag(s) V^T`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Non-increasing, non-negative; `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    /// `rows x min(rows, cols)`, orthonormal columns.
    pub left_vectors: Matrix,
    /// `cols x min(rows, cols)`, orthonormal columns.
    pub right_vectors: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        self.left_vectors
            .scale_cols(&self.singular_values)
            .matmul(&self.right_vectors.transpose())
    }
}

const MAX_SWEEPS: usize = 80;

/// Computes the thin SVD of `m`.
///
/// Signs are normalised so that the largest-magnitude entry of every left
/// singular vector is positive (first index wins on ties).
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidMatrix("svd of an empty matrix".into()));
    }
    if let Some(pos) = m.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput {
            row: pos / m.cols(),
            col: pos % m.cols(),
        });
    }

    let (mut u, s, mut v) = if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        let (v, s, u) = jacobi_tall(&m.transpose());
        (u, s, v)
    };

    for j in 0..s.len() {
        let col = u.column(j);
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            for i in 0..u.rows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }

    Ok(SvdResult {
        singular_values: s,
        left_vectors: u,
        right_vectors: v,
    })
}

/// One-sided (Hestenes) Jacobi on a matrix with `rows >= cols`.
fn jacobi_tall(a: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let (m, n) = a.shape();
    // column-major working copies
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = f64::EPSILON * (m as f64);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = (1.0 + t * t).sqrt().recip();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let smax = norms[order[0]];
    let null_cut = smax * f64::EPSILON * (m.max(n) as f64);
    let mut ucols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > null_cut && norms[j] > 0.0 {
            ucols.push(w[j].iter().map(|x| x / norms[j]).collect());
        } else {
            ucols.push(vec![0.0; m]);
            pending.push(slot);
        }
    }
    complete_basis(&mut ucols, &pending);

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = Matrix::from_fn(m, n, |i, j| ucols[j][i]);
    let vm = Matrix::from_fn(n, n, |i, j| v[order[j]][i]);
    (u, s, vm)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fills the columns listed in `pending` with unit vectors orthogonal to all
/// other columns, choosing the canonical basis vector with the largest
/// residual each time.
fn complete_basis(cols: &mut [Vec<f64>], pending: &[usize]) {
    let m = cols.first().map_or(0, Vec::len);
    for &slot in pending {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for e in 0..m {
            let mut cand = vec![0.0; m];
            cand[e] = 1.0;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (k, col) in cols.iter().enumerate() {
                    if k == slot {
                        continue;
                    }
                    let proj = dot(&cand, col);
                    for (c, x) in cand.iter_mut().zip(col) {
                        *c -= proj * x;
                    }
                }
            }
            let norm = dot(&cand, &cand).sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, cand) = best.expect("non-empty column space");
        cols[slot] = cand.into_iter().map(|x| x / norm).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(m: &Matrix) -> Matrix {
        m.transpose().matmul(m)
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let r = svd(&Matrix::identity(3)).unwrap();
        assert_eq!(r.singular_values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_matrix_has_zero_singular_values_and_orthonormal_vectors() {
        let r = svd(&Matrix::zeros(4, 3)).unwrap();
        assert_eq!(r.singular_values, vec![0.0, 0.0, 0.0]);
        assert!(gram(&r.left_vectors).max_abs_diff(&Matrix::identity(3)) < 1e-10);
        assert!(gram(&r.right_vectors).max_abs_diff(&Matrix::identity(3)) < 1e-10);
    }

    #[test]
    fn rank_one_matrix_gets_completed_basis() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]);
        let r = svd(&m).unwrap();
        assert!(r.singular_values[1] < 1e-12);
        assert!(gram(&r.left_vectors).max_abs_diff(&Matrix::identity(2)) < 1e-10);
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn wide_matrix_goes_through_transpose() {
        let m = Matrix::from_rows(&[[1.0, 0.0, 2.0, -1.0], [0.5, 3.0, 0.0, 1.0]]);
        let r = svd(&m).unwrap();
        assert_eq!(r.singular_values.len(), 2);
        assert_eq!(r.left_vectors.shape(), (2, 2));
        assert_eq!(r.right_vectors.shape(), (4, 2));
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn sign_convention_makes_largest_left_entry_positive() {
        let m = Matrix::from_rows(&[[-3.0, 0.0], [1.0, 0.5], [0.0, -2.0]]);
        let r = svd(&m).unwrap();
        for j in 0..2 {
            let col = r.left_vectors.column(j);
            let big = col
                .iter()
                .cloned()
                .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn non_finite_entry_is_named() {
        let m = Matrix {
            rows: 2,
            cols: 2,
            data: vec![1.0, 2.0, f64::NAN, 0.0],
        };
        match svd(&m) {
            Err(Error::InvalidInput { row: 1, col: 0 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Matrix::new(1, 2, vec![0.0, f64::INFINITY]),
            Err(Error::InvalidInput { row: 0, col: 1 })
        ));
    }

    #[test]
    fn scale_rows_cols_examples() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(scale_rows_cols(&m, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), m);
        let one = Matrix::from_rows(&[[4.0]]);
        assert_eq!(scale_rows_cols(&one, &[4.0], &[4.0]).unwrap()[(0, 0)], 1.0);
        assert!(matches!(
            scale_rows_cols(&m, &[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::DegenerateWeight { index: 1, .. })
        ));
        assert!(matches!(
            scale_rows_cols(&m, &[1.0, 1.0], &[1.0, -2.0]),
            Err(Error::DegenerateWeight { index: 3, .. })
        ));
    }
}
