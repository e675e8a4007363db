//! Smith normal form over ℤ with arbitrary-precision entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::engine::evaluate::SparseIntMatrix;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(v);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_sparse(s: &SparseIntMatrix) -> Self {
        let mut m = IntMatrix::zeros(s.nrows(), s.ncols());
        for (i, row) in s.rows().iter().enumerate() {
            for &(j, v) in row {
                m.data[i * s.ncols() + j as usize] = BigInt::from(v);
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|c| c.to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.to_rows();
        let mut prev = BigInt::one();
        let mut sign = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }
}

/// Which unimodular transforms to accumulate.
#[derive(Clone, Copy, Debug, Default)]
pub struct SnfOptions {
    pub left: bool,
    pub right: bool,
}

/// Invariant factors `d₁ | d₂ | ⋯ | d_r` (all positive, `r` = rank) and,
/// when requested, unimodular `U`, `V` with `U · M · V = diag(d)`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub factors: Vec<BigInt>,
    pub rank: usize,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl SnfResult {
    /// `Π_{d_j > 1} d_j`, the order of the torsion of the cokernel.
    pub fn torsion(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn diagonal(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, f) in self.factors.iter().enumerate() {
            d.set(i, i, f.clone());
        }
        d
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    smith_normal_form_with(m, SnfOptions::default())
}

/// Quotient of `a / b` rounded to the nearest integer.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let twice = &r + &r;
    if twice.abs() > b.abs() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    /// Right transform stored transposed so column operations act on rows.
    vt: Option<Vec<Vec<BigInt>>>,
}

fn row_axpy(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

impl Work {
    /// row_i ← row_i − q · row_t
    fn row_op(&mut self, i: usize, t: usize, q: &BigInt, cols_from: usize) {
        let (lo, hi) = self.a.split_at_mut(i);
        let src = &lo[t];
        let dst = &mut hi[0];
        for j in cols_from..src.len() {
            if !src[j].is_zero() {
                let v = q * &src[j];
                dst[j] -= v;
            }
        }
        if let Some(u) = &mut self.u {
            row_axpy(u, i, t, q);
        }
    }

    /// col_j ← col_j − q · col_t
    fn col_op(&mut self, j: usize, t: usize, q: &BigInt, rows_from: usize) {
        for row in self.a[rows_from..].iter_mut() {
            if !row[t].is_zero() {
                let v = q * &row[t];
                row[j] -= v;
            }
        }
        if let Some(vt) = &mut self.vt {
            row_axpy(vt, j, t, q);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            if let Some(vt) = &mut self.vt {
                vt.swap(i, j);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
}

fn to_square(v: &[Vec<BigInt>]) -> IntMatrix {
    let n = v.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, row) in v.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.data[i * n + j] = x.clone();
        }
    }
    m
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Diagonalises by elimination with minimal-absolute-value pivots, then
/// repairs the divisibility chain with 2×2 gcd/lcm steps.
pub fn smith_normal_form_with(m: &IntMatrix, opts: SnfOptions) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut w = Work {
        a: m.to_rows(),
        u: opts.left.then(|| identity_rows(rows)),
        vt: opts.right.then(|| identity_rows(cols)),
    };
    if cols == 0 {
        w.a = vec![Vec::new(); rows];
    }
    let mut t = 0;
    while t < rows.min(cols) {
        // Global minimal pivot in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        'search: for i in t..rows {
            for j in t..cols {
                let x = &w.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        break 'search;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a[t][t].clone();
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = round_div(&w.a[i][t], &p);
                    w.row_op(i, t, &q, t);
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = round_div(&w.a[t][j], &p);
                    w.col_op(j, t, &q, t);
                }
            }
            // Any remainder left in the pivot row or column is smaller than
            // the pivot; move the smallest one into place and repeat.
            let mut best: Option<(usize, usize)> = None;
            let mut best_abs = p.abs();
            for i in t + 1..rows {
                let x = w.a[i][t].abs();
                if !x.is_zero() && x < best_abs {
                    best_abs = x;
                    best = Some((i, t));
                }
            }
            for j in t + 1..cols {
                let x = w.a[t][j].abs();
                if !x.is_zero() && x < best_abs {
                    best_abs = x;
                    best = Some((t, j));
                }
            }
            match best {
                None => {
                    let clean = (t + 1..rows).all(|i| w.a[i][t].is_zero())
                        && (t + 1..cols).all(|j| w.a[t][j].is_zero());
                    if clean {
                        break;
                    }
                }
                Some((i, j)) => {
                    w.swap_rows(t, i);
                    w.swap_cols(t, j);
                }
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let rank = t;

    // Divisibility chain.
    for i in 0..rank {
        for j in i + 1..rank {
            let (a, b) = (w.a[i][i].clone(), w.a[j][j].clone());
            if (&b % &a).is_zero() {
                continue;
            }
            let eg = a.extended_gcd(&b);
            let (g, s, tt) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &b / &g);
            w.a[i][i] = g.clone();
            w.a[j][j] = &a * &bg;
            if let Some(u) = &mut w.u {
                let (ui, uj) = (u[i].clone(), u[j].clone());
                u[i] = ui.iter().zip(&uj).map(|(x, y)| &s * x + &tt * y).collect();
                u[j] = ui.iter().zip(&uj).map(|(x, y)| -(&bg * x) + &ag * y).collect();
            }
            if let Some(vt) = &mut w.vt {
                let (vi, vj) = (vt[i].clone(), vt[j].clone());
                vt[i] = vi.iter().zip(&vj).map(|(x, y)| x + y).collect();
                let (c1, c2) = (-(&tt * &bg), &s * &ag);
                vt[j] = vi.iter().zip(&vj).map(|(x, y)| &c1 * x + &c2 * y).collect();
            }
        }
    }

    let factors: Vec<BigInt> = (0..rank).map(|i| w.a[i][i].clone()).collect();
    let left = w.u.as_ref().map(|u| to_square(u));
    let right = w.vt.as_ref().map(|vt| {
        let n = vt.len();
        let mut v = IntMatrix::zeros(n, n);
        for (j, row) in vt.iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                v.data[i * n + j] = x.clone();
            }
        }
        v
    });
    SnfResult {
        factors,
        rank,
        left,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_full(rows: &[Vec<i64>]) -> (IntMatrix, SnfResult) {
        let m = IntMatrix::from_i64_rows(rows);
        let r = smith_normal_form_with(&m, SnfOptions { left: true, right: true });
        (m, r)
    }

    fn check(m: &IntMatrix, r: &SnfResult) {
        let u = r.left.as_ref().unwrap();
        let v = r.right.as_ref().unwrap();
        assert_eq!(u.mul(m).mul(v), r.diagonal(m.rows(), m.cols()));
        assert!(u.determinant().abs().is_one());
        assert!(v.determinant().abs().is_one());
        for w in r.factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn diag_two_three() {
        let (m, r) = snf_full(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(r.factors, vec![BigInt::from(1), BigInt::from(6)]);
        check(&m, &r);
    }

    #[test]
    fn zero_matrix_has_no_factors() {
        let (m, r) = snf_full(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(r.rank, 0);
        assert!(r.factors.is_empty());
        assert!(r.torsion().is_one());
        check(&m, &r);
    }

    #[test]
    fn classic_example() {
        let (m, r) = snf_full(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(
            r.factors,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        check(&m, &r);
    }

    #[test]
    fn empty_shapes() {
        let r = smith_normal_form(&IntMatrix::zeros(0, 3));
        assert_eq!(r.rank, 0);
        let r = smith_normal_form(&IntMatrix::zeros(3, 0));
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_i64_rows(&[vec![0, 2, 1], vec![3, 0, 1], vec![1, 1, 1]]);
        assert_eq!(m.determinant(), BigInt::from(-1));
    }
}
