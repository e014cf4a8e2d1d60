//! Small dense linear algebra: row-major matrices, partially pivoted LU,
//! Householder QR with optional column pivoting, and square solves.
//!
//! Pivot choices are part of the selection contract, so ties between equal
//! magnitudes always go to the lowest original row (LU) or column (QR) index.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Residual bound for square solves: `‖Ax − b‖∞ ≤ SOLVE_RESIDUAL_TOL (1 + ‖b‖∞)`.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `selfᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "tr_mul_vec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `selfᵀ self`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..n {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                let grow = &mut g.data[a * n..(a + 1) * n];
                for b in a..n {
                    grow[b] += ra * r[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Columns `range` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Self {
        let mut out = Self::zeros(self.rows, end - start);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[start..end]);
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Operator 1-norm: largest absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Operator ∞-norm: largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn one_norm(a: &DenseMatrix) -> f64 {
    a.one_norm()
}

pub fn vec_inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `P·A = L·U` for a rectangular `A` with `rows ≥ cols`.
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    /// `perm[k]` is the original row placed at position `k`.
    pub perm: Vec<usize>,
    /// Unit lower trapezoidal, `rows × cols`.
    pub lower: DenseMatrix,
    /// Upper triangular, `cols × cols`.
    pub upper: DenseMatrix,
    /// `|U_kk|`.
    pub pivots: Vec<f64>,
}

impl LuDecomposition {
    /// Rows of `A` in pivot order, i.e. `P·A`.
    pub fn permuted(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_rows(&self.perm)
    }
}

/// Doolittle elimination with partial (row) pivoting on `A` (`rows ≥ cols`).
/// A zero pivot column is skipped, leaving a zero `U_kk`.
pub fn lu_partial_pivot(a: &DenseMatrix) -> Result<LuDecomposition> {
    let (n, m) = (a.rows, a.cols);
    if n < m {
        return Err(Error::InvalidArgument(format!(
            "LU factorization needs rows >= cols, got {n}x{m}"
        )));
    }
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(m);
    for k in 0..m {
        let mut best = k;
        let mut best_val = w[(k, k)].abs();
        for r in k + 1..n {
            let v = w[(r, k)].abs();
            if v > best_val || (v == best_val && perm[r] < perm[best]) {
                best = r;
                best_val = v;
            }
        }
        if best != k {
            perm.swap(k, best);
            let (lo, hi) = w.data.split_at_mut(best * m);
            lo[k * m..(k + 1) * m].swap_with_slice(&mut hi[..m]);
        }
        pivots.push(best_val);
        let piv = w[(k, k)];
        if piv == 0.0 {
            continue;
        }
        let (top, bottom) = w.data.split_at_mut((k + 1) * m);
        let pivot_row = &top[k * m..(k + 1) * m];
        for r in 0..n - k - 1 {
            let row = &mut bottom[r * m..(r + 1) * m];
            let l = row[k] / piv;
            row[k] = l;
            if l != 0.0 {
                for j in k + 1..m {
                    row[j] -= l * pivot_row[j];
                }
            }
        }
    }
    let mut lower = DenseMatrix::zeros(n, m);
    let mut upper = DenseMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..m {
            if i < m && j >= i {
                upper[(i, j)] = w[(i, j)];
            }
            if j < i {
                lower[(i, j)] = w[(i, j)];
            } else if j == i {
                lower[(i, j)] = 1.0;
            }
        }
    }
    Ok(LuDecomposition {
        perm,
        lower,
        upper,
        pivots,
    })
}

/// `A·P = Q·R` with thin `Q` (`rows × k`, orthonormal columns), `R`
/// (`k × cols`), `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct QrDecomposition {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    /// `|R_kk|`.
    pub diag: Vec<f64>,
}

fn householder_qr(a: &DenseMatrix, pivot: bool, want_q: bool) -> QrDecomposition {
    let (n, m) = (a.rows, a.cols);
    let k_max = n.min(m);
    // work on the transpose so columns are contiguous
    let mut cols: Vec<Vec<f64>> = (0..m).map(|j| a.column(j)).collect();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut diag = Vec::with_capacity(k_max);
    for k in 0..k_max {
        if pivot {
            let norm2 = |c: &Vec<f64>| c[k..].iter().map(|v| v * v).sum::<f64>();
            let mut best = k;
            let mut best_val = norm2(&cols[k]);
            for j in k + 1..m {
                let v = norm2(&cols[j]);
                if v > best_val || (v == best_val && perm[j] < perm[best]) {
                    best = j;
                    best_val = v;
                }
            }
            cols.swap(k, best);
            perm.swap(k, best);
        }
        let x = &cols[k][k..];
        let alpha = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = x.to_vec();
        if alpha > 0.0 {
            let beta = if x[0] >= 0.0 { -alpha } else { alpha };
            v[0] -= beta;
            let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                v.iter_mut().for_each(|t| *t /= vnorm);
            }
            for col in cols.iter_mut().skip(k) {
                let s: f64 = 2.0 * col[k..].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= s * vi;
                }
            }
            // the reflector maps x exactly onto beta e_1
            cols[k][k] = beta;
            for c in cols[k][k + 1..].iter_mut() {
                *c = 0.0;
            }
        } else {
            v.iter_mut().for_each(|t| *t = 0.0);
        }
        diag.push(cols[k][k].abs());
        reflectors.push(v);
    }
    let mut r = DenseMatrix::zeros(k_max, m);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..k_max.min(j + 1) {
            r[(i, j)] = col[i];
        }
    }
    // Q = H_0 H_1 … H_{k-1} applied to the first k columns of the identity
    let mut q = DenseMatrix::zeros(if want_q { n } else { 0 }, k_max);
    for j in 0..if want_q { k_max } else { 0 } {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for k in (0..k_max).rev() {
            let v = &reflectors[k];
            let s: f64 = 2.0 * e[k..].iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
            if s != 0.0 {
                for (c, vi) in e[k..].iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
        }
        for i in 0..n {
            q[(i, j)] = e[i];
        }
    }
    QrDecomposition { q, r, perm, diag }
}

/// Householder QR choosing, at each step, the remaining column of largest
/// norm (norms recomputed exactly, no downdating).
pub fn qr_column_pivot(a: &DenseMatrix) -> QrDecomposition {
    householder_qr(a, true, true)
}

/// Column-pivoted QR without accumulating `Q`; the returned `q` is empty.
pub fn qr_column_pivot_r(a: &DenseMatrix) -> QrDecomposition {
    householder_qr(a, true, false)
}

/// Householder QR without pivoting (`perm` is the identity).
pub fn qr(a: &DenseMatrix) -> QrDecomposition {
    householder_qr(a, false, true)
}

/// Solves `R x = b` for upper triangular square `R`.
pub fn solve_upper(r: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = r.rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= r[(i, j)] * x[j];
        }
        let d = r[(i, i)];
        if d == 0.0 {
            return Err(Error::SingularSystem(format!("zero diagonal at {i}")));
        }
        x[i] = s / d;
    }
    Ok(x)
}

/// Inverse of an upper triangular square matrix.
pub fn invert_upper(r: &DenseMatrix) -> Result<DenseMatrix> {
    let n = r.rows;
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_upper(r, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Square LU factorization ready for repeated solves.
#[derive(Clone, Debug)]
pub struct SquareLu {
    lu: LuDecomposition,
}

impl SquareLu {
    /// Fails with `SingularSystem` when a pivot falls to roundoff level
    /// relative to the largest entry.
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::InvalidArgument(format!(
                "square matrix expected, got {}x{}",
                a.rows, a.cols
            )));
        }
        let lu = lu_partial_pivot(a)?;
        let floor = f64::EPSILON * a.rows.max(1) as f64 * a.max_abs();
        if let Some((k, &p)) = lu.pivots.iter().enumerate().find(|(_, &p)| !(p > floor)) {
            return Err(Error::SingularSystem(format!("pivot {k} is {p:e}")));
        }
        Ok(Self { lu })
    }

    pub fn pivots(&self) -> &[f64] {
        &self.lu.pivots
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.upper.rows;
        let mut y: Vec<f64> = self.lu.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu.lower[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu.upper[(i, j)] * y[j];
            }
            y[i] = s / self.lu.upper[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.lu.upper.rows;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Solves `A x = rhs` and checks the residual contract
/// `‖Ax − rhs‖∞ ≤ 1e−8 (1 + ‖rhs‖∞)`.
pub fn solve(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            actual: rhs.len(),
        });
    }
    let lu = SquareLu::new(a)?;
    let x = lu.solve(rhs);
    let residual = residual_inf(a, &x, rhs);
    if !(residual <= SOLVE_RESIDUAL_TOL * (1.0 + vec_inf_norm(rhs))) {
        return Err(Error::SingularSystem(format!("residual {residual:e} too large")));
    }
    Ok(x)
}

pub fn residual_inf(a: &DenseMatrix, x: &[f64], rhs: &[f64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(rhs)
        .fold(0.0, |m, (ax, b)| m.max((ax - b).abs()))
}

/// `‖A‖₁ ‖A⁻¹‖₁`, infinite when `A` is singular.
pub fn condition_one(a: &DenseMatrix) -> f64 {
    match SquareLu::new(a) {
        Ok(lu) => a.one_norm() * lu.inverse().one_norm(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::from_row_major(rows, cols, data).unwrap()
    }

    fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn lu_identity() {
        let lu = lu_partial_pivot(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(lu.perm, vec![0, 1, 2, 3]);
        assert_eq!(lu.pivots, vec![1.0; 4]);
    }

    #[test]
    fn lu_swaps() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let lu = lu_partial_pivot(&a).unwrap();
        assert_eq!(lu.perm[0], 1);
    }

    #[test]
    fn lu_ties_go_to_lowest_row() {
        let a = DenseMatrix::from_rows(&[[0.5, 1.0], [-1.0, 2.0], [1.0, 3.0], [1.0, 0.0]]);
        let lu = lu_partial_pivot(&a).unwrap();
        assert_eq!(lu.perm[0], 1);
        let ones = DenseMatrix::from_rows(&[[1.0], [1.0], [1.0]]);
        assert_eq!(lu_partial_pivot(&ones).unwrap().perm[0], 0);
    }

    #[test]
    fn lu_rejects_wide() {
        assert!(lu_partial_pivot(&random(2, 3, 0)).is_err());
    }

    #[test]
    fn lu_reconstructs_random() {
        let a = random(6, 4, 1);
        let lu = lu_partial_pivot(&a).unwrap();
        let res = max_diff(&lu.permuted(&a), &lu.lower.matmul(&lu.upper));
        assert!(res <= 1e-12, "{res}");
        // pivot row maximizes the current column: multipliers bounded by 1
        assert!(lu.lower.max_abs() <= 1.0);
    }

    #[test]
    fn qr_orthogonal_input() {
        let s = 1.0 / 2f64.sqrt();
        let a = DenseMatrix::from_rows(&[[2.0 * s, -3.0 * s], [2.0 * s, 3.0 * s]]);
        let f = qr_column_pivot(&a);
        assert!((f.diag[0] - 3.0).abs() < 1e-14);
        assert!((f.diag[1] - 2.0).abs() < 1e-14);
        assert_eq!(f.perm, vec![1, 0]);
    }

    #[test]
    fn qr_rank_one() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [-1.0, -2.0, -3.0]]);
        let f = qr_column_pivot(&a);
        assert!(f.diag[1] <= 1e-12 && f.diag[2] <= 1e-12, "{:?}", f.diag);
    }

    #[test]
    fn qr_reconstructs_random_wide() {
        let a = random(4, 7, 2);
        let f = qr_column_pivot(&a);
        let ap = a.transpose().select_rows(&f.perm).transpose();
        let res = max_diff(&ap, &f.q.matmul(&f.r));
        assert!(res <= 1e-12, "{res}");
        for w in f.diag.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        let qtq = f.q.transpose().matmul(&f.q);
        assert!(max_diff(&qtq, &DenseMatrix::identity(4)) < 1e-13);
    }

    #[test]
    fn qr_unpivoted_tall() {
        let a = random(9, 4, 3);
        let f = qr(&a);
        assert_eq!(f.perm, vec![0, 1, 2, 3]);
        assert!(max_diff(&a, &f.q.matmul(&f.r)) < 1e-13);
        for i in 0..4 {
            for j in 0..i {
                assert_eq!(f.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn solve_identity_and_random() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve(&DenseMatrix::identity(3), &b).unwrap(), b);
        let mut a = random(10, 10, 4);
        for i in 0..10 {
            a[(i, i)] += 4.0;
        }
        let rhs: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let x = solve(&a, &rhs).unwrap();
        assert!(residual_inf(&a, &x, &rhs) <= 1e-10);
    }

    #[test]
    fn solve_singular() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(solve(&a, &[1.0, 1.0]), Err(Error::SingularSystem(_))));
        assert!(condition_one(&a).is_infinite());
    }

    #[test]
    fn one_norm_example() {
        let a = DenseMatrix::from_rows(&[[1.0, -2.0], [3.0, 4.0]]);
        assert_eq!(one_norm(&a), 6.0);
        assert_eq!(a.inf_norm(), 7.0);
    }

    #[test]
    fn gram_matches_matmul() {
        let a = random(7, 5, 9);
        assert!(max_diff(&a.gram(), &a.transpose().matmul(&a)) < 1e-14);
    }

    #[test]
    fn inverse_upper() {
        let r = DenseMatrix::from_rows(&[[2.0, 1.0, -1.0], [0.0, 3.0, 0.5], [0.0, 0.0, -4.0]]);
        let inv = invert_upper(&r).unwrap();
        assert!(max_diff(&r.matmul(&inv), &DenseMatrix::identity(3)) < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn lu_reconstruction(rows in 1usize..40, extra in 0usize..30, seed in any::<u64>()) {
            let cols = rows;
            let a = random(rows + extra, cols, seed);
            let lu = lu_partial_pivot(&a).unwrap();
            let res = max_diff(&lu.permuted(&a), &lu.lower.matmul(&lu.upper));
            prop_assert!(res <= 1e-10 * a.inf_norm());
        }

        #[test]
        fn qr_reconstruction(rows in 1usize..40, cols in 1usize..40, seed in any::<u64>()) {
            let a = random(rows, cols, seed);
            let f = qr_column_pivot(&a);
            let ap = a.transpose().select_rows(&f.perm).transpose();
            prop_assert!(max_diff(&ap, &f.q.matmul(&f.r)) <= 1e-10 * a.inf_norm());
        }
    }

    #[test]
    fn reconstruction_at_size_200() {
        let a = random(200, 120, 77);
        let lu = lu_partial_pivot(&a).unwrap();
        assert!(max_diff(&lu.permuted(&a), &lu.lower.matmul(&lu.upper)) <= 1e-10 * a.inf_norm());
        let f = qr_column_pivot(&a.transpose());
        let ap = a.select_rows(&f.perm).transpose();
        assert!(max_diff(&ap, &f.q.matmul(&f.r)) <= 1e-10 * a.inf_norm());
    }
}
