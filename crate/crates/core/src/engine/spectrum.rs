//! Spectra of self-adjoint group-ring matrices at a quotient level.
//!
//! Three routes:
//! * `Fourier`: the level group is abelian, so its regular representation
//!   splits into `|Q|` characters and the spectrum is the union of the
//!   spectra of the small Hermitian matrices `M(χ)`;
//! * `Dense`: full symmetric eigendecomposition of the evaluated matrix;
//! * `Lanczos`: stochastic Lanczos quadrature for `Σ ln λ` when the matrix
//!   is too large for a dense solve.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::evaluate::{evaluate_matrix, SparseIntMatrix};
use crate::error::Result;
use crate::group::{QuotientLevel, RingMatrix};
use crate::growth::snf::{smith_normal_form_with, IntMatrix, SnfOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    /// Fourier on abelian levels, dense up to the dense limit, Lanczos beyond.
    Auto,
    Dense,
    Fourier,
    Lanczos,
}

impl std::str::FromStr for EigenMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(EigenMethod::Auto),
            "dense" => Ok(EigenMethod::Dense),
            "fourier" => Ok(EigenMethod::Fourier),
            "lanczos" => Ok(EigenMethod::Lanczos),
            _ => Err(format!("unknown eigen method `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodUsed {
    Dense,
    Fourier,
    Lanczos,
}

impl std::fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodUsed::Dense => "dense",
            MethodUsed::Fourier => "fourier",
            MethodUsed::Lanczos => "lanczos",
        })
    }
}

/// Character table data of an abelian level: character `s` sends generator
/// `k` to `exp(2πi · phases[s][k] / modulus)`.
#[derive(Clone, Debug)]
pub struct AbelianCharacters {
    pub modulus: u64,
    pub phases: Vec<Vec<u64>>,
}

impl AbelianCharacters {
    /// Returns `None` unless the level acts regularly through an abelian group.
    pub fn of(level: &QuotientLevel) -> Option<Self> {
        let ngens = level.generator_count();
        let d = level.degree();
        if !level.is_abelian() || !level.is_transitive() {
            return None;
        }
        if ngens == 0 {
            return Some(AbelianCharacters {
                modulus: 1,
                phases: vec![vec![]; d],
            });
        }
        // Coordinates along a Schreier tree; every graph edge yields a relation.
        let (order, parent) = level.schreier_tree();
        let mut coord: Vec<Vec<i64>> = vec![vec![0; ngens]; d];
        for &p in order.iter().skip(1) {
            let (q, g) = parent[p].expect("tree edge");
            let mut v = coord[q].clone();
            v[g] += 1;
            coord[p] = v;
        }
        let mut rels = std::collections::BTreeSet::new();
        for p in 0..d {
            for (g, s) in level.images().iter().enumerate() {
                let q = s.apply(p);
                let r: Vec<i64> = (0..ngens)
                    .map(|k| coord[p][k] + (k == g) as i64 - coord[q][k])
                    .collect();
                if r.iter().any(|&x| x != 0) {
                    rels.insert(r);
                }
            }
        }
        let rels: Vec<Vec<i64>> = rels.into_iter().collect();
        if rels.len() < ngens {
            return None;
        }
        let m = IntMatrix::from_i64_rows(&rels);
        let snf = smith_normal_form_with(
            &m,
            SnfOptions {
                left: false,
                right: true,
            },
        );
        let v = snf.right.expect("right transform requested");
        if snf.rank != ngens {
            return None;
        }
        let factors: Vec<u64> = snf.factors.iter().map(|f| f.to_u64().expect("small")).collect();
        if factors.iter().product::<u64>() != d as u64 {
            return None;
        }
        let modulus = factors.iter().fold(1u64, |a, &b| a.lcm(&b));
        let big_mod = BigInt::from(modulus);
        // weight[k][j] = V[k][j] · (L / d_j) mod L
        let weight: Vec<Vec<u64>> = (0..ngens)
            .map(|k| {
                (0..ngens)
                    .map(|j| {
                        let w = v.get(k, j) * BigInt::from(modulus / factors[j]);
                        let r = w.mod_floor(&big_mod);
                        if r.is_zero() {
                            0
                        } else {
                            r.to_u64().expect("reduced")
                        }
                    })
                    .collect()
            })
            .collect();
        let mut phases = Vec::with_capacity(d);
        let mut s = vec![0u64; ngens];
        for _ in 0..d {
            let ph: Vec<u64> = (0..ngens)
                .map(|k| {
                    let mut acc: u128 = 0;
                    for j in 0..ngens {
                        acc += s[j] as u128 * weight[k][j] as u128;
                    }
                    (acc % modulus as u128) as u64
                })
                .collect();
            phases.push(ph);
            for j in 0..ngens {
                s[j] += 1;
                if s[j] < factors[j] {
                    break;
                }
                s[j] = 0;
            }
        }
        Some(AbelianCharacters { modulus, phases })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `M(χ_s)` as a dense complex matrix.
    pub fn evaluate(&self, m: &RingMatrix, s: usize) -> DMatrix<Complex64> {
        let ph = &self.phases[s];
        let l = self.modulus as i128;
        let mut out = DMatrix::from_element(m.rows(), m.cols(), Complex64::new(0.0, 0.0));
        for ((i, j), e) in m.entries() {
            let mut z = Complex64::new(0.0, 0.0);
            for (w, c) in e.terms() {
                let mut acc: i128 = 0;
                for &(g, ex) in w.syllables() {
                    acc += ex as i128 * ph[g] as i128;
                }
                let r = acc.rem_euclid(l) as f64 / l as f64;
                let theta = std::f64::consts::TAU * r;
                z += Complex64::new(theta.cos(), theta.sin()) * c as f64;
            }
            out[(i, j)] = z;
        }
        out
    }
}

/// Eigenvalues of a Hermitian matrix over ℂ.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    match m.nrows() {
        0 => vec![],
        1 => vec![m[(0, 0)].re],
        _ => SymmetricEigen::new(m).eigenvalues.iter().copied().collect(),
    }
}

/// Spectrum of a self-adjoint group-ring matrix at an abelian level.
pub fn fourier_spectrum(m: &RingMatrix, chars: &AbelianCharacters) -> Vec<f64> {
    use rayon::prelude::*;
    (0..chars.len())
        .into_par_iter()
        .flat_map_iter(|s| hermitian_eigenvalues(chars.evaluate(m, s)))
        .collect()
}

pub fn dense_spectrum(m: &SparseIntMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    m.to_dense_f64().symmetric_eigenvalues().iter().copied().collect()
}

/// Result of stochastic Lanczos quadrature for `Σ_{λ > cutoff} ln λ`.
#[derive(Clone, Debug)]
pub struct LanczosEstimate {
    pub sum_log: f64,
    pub discarded: f64,
    pub min_ritz: f64,
}

pub fn lanczos_log_det(
    m: &SparseIntMatrix,
    cutoff: f64,
    steps: usize,
    probes: usize,
    seed: u64,
) -> LanczosEstimate {
    let n = m.nrows();
    if n == 0 {
        return LanczosEstimate {
            sum_log: 0.0,
            discarded: 0.0,
            min_ritz: 0.0,
        };
    }
    let steps = steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum_log, mut discarded, mut min_ritz) = (0.0, 0.0, f64::INFINITY);
    for _ in 0..probes {
        let mut q: Vec<f64> = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let norm = (n as f64).sqrt();
        q.iter_mut().for_each(|x| *x /= norm);
        let mut basis: Vec<Vec<f64>> = vec![q];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut w = vec![0.0; n];
        for k in 0..steps {
            m.mul_vec(&basis[k], &mut w);
            let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
            alpha.push(a);
            // Full reorthogonalisation, twice for stability.
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let bnorm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if k + 1 == steps || bnorm < 1e-12 {
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }
        let s = alpha.len();
        let mut t = DMatrix::<f64>::zeros(s, s);
        for i in 0..s {
            t[(i, i)] = alpha[i];
            if i + 1 < s {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        for (k, &theta) in eig.eigenvalues.iter().enumerate() {
            let tau2 = eig.eigenvectors[(0, k)].powi(2);
            min_ritz = min_ritz.min(theta);
            if theta > cutoff {
                sum_log += tau2 * theta.ln();
            } else {
                discarded += tau2;
            }
        }
    }
    let scale = n as f64 / probes as f64;
    LanczosEstimate {
        sum_log: sum_log * scale,
        discarded: discarded * scale,
        min_ritz,
    }
}

/// Spectrum of a self-adjoint group-ring matrix evaluated at one level,
/// choosing the route per `method`.
pub fn level_spectrum(
    m: &RingMatrix,
    level: &QuotientLevel,
    method: EigenMethod,
    dense_limit: usize,
) -> Result<Option<(MethodUsed, Vec<f64>)>> {
    let dim = m.rows() * level.degree();
    let chars = match method {
        EigenMethod::Auto | EigenMethod::Fourier => AbelianCharacters::of(level),
        _ => None,
    };
    if let Some(ch) = chars {
        return Ok(Some((MethodUsed::Fourier, fourier_spectrum(m, &ch))));
    }
    let dense = match method {
        EigenMethod::Dense | EigenMethod::Fourier => true,
        EigenMethod::Auto => dim <= dense_limit,
        EigenMethod::Lanczos => false,
    };
    if dense {
        let lm = evaluate_matrix(m, level)?;
        return Ok(Some((MethodUsed::Dense, dense_spectrum(&lm.matrix))));
    }
    Ok(None)
}
