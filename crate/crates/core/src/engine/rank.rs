//! Rank of integer matrices over ℚ by sparse elimination modulo large primes.
//!
//! The rank modulo a prime never exceeds the rank over ℚ; it is smaller only
//! when the prime divides every maximal nonvanishing minor. Taking the
//! maximum over two fixed 61/62-bit primes makes that practically
//! impossible for the Hadamard-bounded minors that arise here while keeping
//! the result deterministic.

use crate::engine::evaluate::SparseIntMatrix;

const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn reduce(v: i64, p: u64) -> u64 {
    let r = (v as i128).rem_euclid(p as i128);
    r as u64
}

/// Rank of `m` modulo the prime `p`.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    let ncols = m.ncols();
    let mut buckets: Vec<Vec<Vec<(u32, u64)>>> = vec![Vec::new(); ncols];
    for row in m.rows() {
        let r: Vec<(u32, u64)> = row
            .iter()
            .map(|&(c, v)| (c, reduce(v, p)))
            .filter(|&(_, v)| v != 0)
            .collect();
        if let Some(&(c, _)) = r.first() {
            buckets[c as usize].push(r);
        }
    }
    let mut rank = 0;
    for c in 0..ncols {
        let mut rows = std::mem::take(&mut buckets[c]);
        if rows.is_empty() {
            continue;
        }
        let k = (0..rows.len()).min_by_key(|&i| rows[i].len()).expect("nonempty");
        let pivot = rows.swap_remove(k);
        rank += 1;
        let inv = powmod(pivot[0].1, p - 2, p);
        for r in rows {
            let f = mulmod(r[0].1, inv, p);
            let merged = axpy(&r, &pivot, f, p);
            if let Some(&(lead, _)) = merged.first() {
                buckets[lead as usize].push(merged);
            }
        }
    }
    rank
}

/// `r − f · pivot` over `𝔽_p` on sorted sparse rows.
fn axpy(r: &[(u32, u64)], pivot: &[(u32, u64)], f: u64, p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(r.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < pivot.len() {
        let ci = r.get(i).map_or(u32::MAX, |x| x.0);
        let cj = pivot.get(j).map_or(u32::MAX, |x| x.0);
        if ci < cj {
            out.push(r[i]);
            i += 1;
        } else {
            let sub = mulmod(f, pivot[j].1, p);
            let v = if ci == cj {
                let a = r[i].1;
                i += 1;
                (a + p - sub) % p
            } else {
                (p - sub) % p
            };
            if v != 0 {
                out.push((cj, v));
            }
            j += 1;
        }
    }
    out
}

/// Rank over ℚ (see the module notes for the modular argument).
pub fn rational_rank(m: &SparseIntMatrix) -> usize {
    if m.nnz() == 0 {
        return 0;
    }
    // Eliminate along the shorter side.
    let t;
    let m = if m.ncols() > m.nrows() {
        t = m.transpose();
        &t
    } else {
        m
    };
    PRIMES.iter().map(|&p| rank_mod_p(m, p)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exact rational rank by fraction-free elimination on i128 (small inputs).
    fn bareiss_rank(mut a: Vec<Vec<i128>>) -> usize {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        let mut prev = 1i128;
        for c in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| a[r][c] != 0) else {
                continue;
            };
            a.swap(rank, pr);
            for r in rank + 1..rows {
                for j in c + 1..cols {
                    a[r][j] = (a[rank][c] * a[r][j] - a[r][c] * a[rank][j]) / prev;
                }
                a[r][c] = 0;
            }
            prev = a[rank][c];
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn circulant_rank() {
        let k = 7;
        let d: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { -1 } else if (j + 1) % k == i { 1 } else { 0 }).collect())
            .collect();
        assert_eq!(rational_rank(&SparseIntMatrix::from_dense(&d)), k - 1);
    }

    #[test]
    fn p_torsion_does_not_lower_rational_rank() {
        // det = 2^61 - 1 would vanish mod the first prime; the second prime
        // still sees full rank.
        let big = 2_305_843_009_213_693_951i64;
        let m = SparseIntMatrix::from_dense(&[vec![big, 0], vec![0, 1]]);
        assert_eq!(rank_mod_p(&m, PRIMES[0]), 1);
        assert_eq!(rational_rank(&m), 2);
    }

    proptest! {
        #[test]
        fn matches_fraction_free_rank(
            rows in 1usize..8, cols in 1usize..8,
            seed in prop::collection::vec(-3i64..=3, 64),
            zero_rows in prop::collection::vec(any::<bool>(), 8),
        ) {
            let d: Vec<Vec<i64>> = (0..rows)
                .map(|i| (0..cols).map(|j| if zero_rows[i] && i % 2 == 0 { 0 } else { seed[i * 8 + j] }).collect())
                .collect();
            let exact = bareiss_rank(d.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
            prop_assert_eq!(rational_rank(&SparseIntMatrix::from_dense(&d)), exact);
        }
    }
}
