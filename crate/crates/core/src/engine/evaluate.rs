use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{QuotientLevel, RingMatrix, Word};

/// Row-major sparse integer matrix with sorted, nonzero rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(u32, i64)>>,
}

impl SparseIntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    /// Builds from unsorted triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(u32, u32, i64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut rows = vec![Vec::new(); nrows];
        let mut iter = t.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != 0 {
                rows[r as usize].push((c, v));
            }
        }
        SparseIntMatrix { nrows, ncols, rows }
    }

    pub fn from_dense(d: &[Vec<i64>]) -> Self {
        let nrows = d.len();
        let ncols = d.first().map_or(0, |r| r.len());
        let rows = d
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j as u32, v))
                    .collect()
            })
            .collect();
        SparseIntMatrix { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(u32, i64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(u32, i64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map_or(0, |k| self.rows[i][k].1)
    }

    pub fn max_abs(&self) -> i64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|&(_, v)| v.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(_, v)| v.unsigned_abs() as f64).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                t.push((j, i as u32, v));
            }
        }
        SparseIntMatrix::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut rows = Vec::with_capacity(self.nrows);
        let mut acc: HashMap<u32, i64> = HashMap::new();
        for r in &self.rows {
            acc.clear();
            for &(k, a) in r {
                for &(j, b) in &other.rows[k as usize] {
                    *acc.entry(j).or_insert(0) += a * b;
                }
            }
            let mut row: Vec<(u32, i64)> = acc.iter().filter(|(_, &v)| v != 0).map(|(&j, &v)| (j, v)).collect();
            row.sort_unstable_by_key(|&(j, _)| j);
            rows.push(row);
        }
        Ok(SparseIntMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        })
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, r) in y.iter_mut().zip(&self.rows) {
            *yi = r.iter().map(|&(j, v)| v as f64 * x[j as usize]).sum();
        }
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j as usize)] = v as f64;
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.ncols]; self.nrows];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[i][j as usize] = v;
            }
        }
        m
    }
}

/// A group-ring matrix evaluated in the regular representation of one
/// quotient level: every entry becomes a `d × d` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMatrix {
    pub label: i64,
    /// Order of the quotient, i.e. the block size and the index `[G:G_i]`.
    pub index: usize,
    pub matrix: SparseIntMatrix,
}

/// Replaces each entry `Σ c_w w` by `Σ c_w P(w)`, with `P(w)` the permutation
/// matrix sending basis vector `e_p` to `e_{σ_w(p)}`.
pub fn evaluate_matrix(m: &RingMatrix, level: &QuotientLevel) -> Result<LevelMatrix> {
    let d = level.degree();
    let mut cache: HashMap<&Word, Vec<u32>> = HashMap::new();
    let mut triplets = Vec::new();
    for ((i, j), e) in m.entries() {
        for (w, c) in e.terms() {
            if !cache.contains_key(w) {
                let p = level.word_permutation(w)?;
                cache.insert(w, p.images().to_vec());
            }
            let perm = &cache[w];
            let (r0, c0) = ((i * d) as u32, (j * d) as u32);
            for (p, &q) in perm.iter().enumerate() {
                triplets.push((r0 + q, c0 + p as u32, c));
            }
        }
    }
    Ok(LevelMatrix {
        label: level.label(),
        index: d,
        matrix: SparseIntMatrix::from_triplets(m.rows() * d, m.cols() * d, triplets),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupPresentation, QuotientTower, RingElement};
    use proptest::prelude::*;

    fn circle() -> GroupPresentation {
        GroupPresentation::parse("gens a; rels ;").unwrap()
    }

    #[test]
    fn a_minus_one_is_a_zero_row_sum_circulant() {
        let g = circle();
        let m = RingMatrix::from_rows(vec![vec![RingElement::parse("a - 1", g.generators()).unwrap()]]);
        let lm = evaluate_matrix(&m, &QuotientLevel::cyclic(3).unwrap()).unwrap();
        let dense = lm.matrix.to_dense();
        assert_eq!(dense, vec![vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]]);
        for r in &dense {
            assert_eq!(r.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn identity_evaluates_to_identity() {
        let lm = evaluate_matrix(&RingMatrix::identity(3), &QuotientLevel::cyclic(5).unwrap()).unwrap();
        let dense = lm.matrix.to_dense();
        for (i, r) in dense.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                assert_eq!(v, (i == j) as i64);
            }
        }
    }

    #[test]
    fn undeclared_generator_rejected() {
        let m = RingMatrix::from_rows(vec![vec![RingElement::monomial(Word::generator(1), 1)]]);
        assert!(evaluate_matrix(&m, &QuotientLevel::cyclic(3).unwrap()).is_err());
    }

    fn element(gens: usize) -> impl Strategy<Value = RingElement> {
        let syl = (0..gens, -2i64..=2).prop_filter("nonzero", |(_, e)| *e != 0);
        let word = prop::collection::vec(syl, 0..4).prop_map(Word::from_syllables);
        prop::collection::vec((word, -3i64..=3), 0..5).prop_map(RingElement::from_terms)
    }

    fn matrix(gens: usize, r: usize, c: usize) -> impl Strategy<Value = RingMatrix> {
        prop::collection::vec(element(gens), r * c).prop_map(move |v| {
            let rows = v.chunks(c).map(|ch| ch.to_vec()).collect();
            RingMatrix::from_rows(rows)
        })
    }

    proptest! {
        #[test]
        fn evaluation_is_multiplicative(a in matrix(2, 2, 3), b in matrix(2, 3, 2)) {
            let level = QuotientTower::grid(2, &[3]).unwrap().levels()[0].clone();
            let ab = evaluate_matrix(&a.try_mul(&b).unwrap(), &level).unwrap();
            let ea = evaluate_matrix(&a, &level).unwrap();
            let eb = evaluate_matrix(&b, &level).unwrap();
            prop_assert_eq!(ab.matrix, ea.matrix.mul(&eb.matrix).unwrap());
        }

        #[test]
        fn star_evaluates_to_transpose(a in matrix(1, 2, 3)) {
            let level = QuotientLevel::cyclic(8).unwrap();
            let es = evaluate_matrix(&a.star(), &level).unwrap();
            let e = evaluate_matrix(&a, &level).unwrap();
            prop_assert_eq!(es.matrix, e.matrix.transpose());
        }

        #[test]
        fn evaluation_is_additive(a in matrix(2, 2, 2), b in matrix(2, 2, 2)) {
            let level = QuotientLevel::grid(&[2, 3], 6).unwrap();
            let sum = evaluate_matrix(&a.try_add(&b).unwrap(), &level).unwrap().matrix.to_dense();
            let ea = evaluate_matrix(&a, &level).unwrap().matrix.to_dense();
            let eb = evaluate_matrix(&b, &level).unwrap().matrix.to_dense();
            for i in 0..sum.len() {
                for j in 0..sum[i].len() {
                    prop_assert_eq!(sum[i][j], ea[i][j] + eb[i][j]);
                }
            }
        }
    }
}
