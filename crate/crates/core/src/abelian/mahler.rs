//! Logarithmic Mahler measure `m(p) = ∫_{Tⁿ} ln|p|` by quadrature.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::laurent::LaurentPoly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MahlerMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct MahlerResult {
    pub value: f64,
    /// Points per axis (quadrature) or number of samples (Monte Carlo).
    pub grid: usize,
    pub method: MahlerMethod,
    /// Difference of the last two refinements, or the standard error.
    pub error_proxy: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureConfig {
    /// Starting points per axis (at least 8).
    pub grid: usize,
    pub tolerance: f64,
    /// Upper bound on the total number of points of one grid.
    pub max_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            grid: 8,
            tolerance: 1e-9,
            max_points: 1 << 24,
        }
    }
}

/// Polynomial compiled for repeated evaluation: per-axis exponent tables.
struct Compiled {
    nvars: usize,
    terms: Vec<(Vec<usize>, f64)>,
    /// `offsets[i]` is the smallest exponent of variable `i`.
    offsets: Vec<i64>,
    spans: Vec<usize>,
}

impl Compiled {
    fn new(p: &LaurentPoly) -> Self {
        let n = p.nvars();
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        for (e, _) in p.terms() {
            for i in 0..n {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        let terms = p
            .terms()
            .map(|(e, c)| {
                let idx = (0..n).map(|i| (e[i] - lo[i]) as usize).collect();
                (idx, c.to_f64().unwrap_or(f64::NAN))
            })
            .collect();
        Compiled {
            nvars: n,
            terms,
            spans: (0..n).map(|i| (hi[i] - lo[i]) as usize + 1).collect(),
            offsets: lo,
        }
    }

    /// `z^k` for every exponent of axis `i` at angle `theta`.
    fn axis_table(&self, i: usize, theta: f64, out: &mut Vec<Complex64>) {
        out.clear();
        let z = Complex64::from_polar(1.0, theta);
        let mut w = Complex64::from_polar(1.0, self.offsets[i] as f64 * theta);
        for _ in 0..self.spans[i] {
            out.push(w);
            w *= z;
        }
    }

    fn eval(&self, tables: &[Vec<Complex64>]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.terms {
            let mut m = Complex64::new(*c, 0.0);
            for (i, &k) in idx.iter().enumerate() {
                m *= tables[i][k];
            }
            acc += m;
        }
        acc
    }
}

/// Result of integrating `Σ_j w_j ln|p_j|` on one offset grid.
struct GridSums {
    combined: f64,
    parts: Vec<f64>,
    max_abs: f64,
}

/// Points per parallel task. Fixed, so the summation order does not depend
/// on the thread count.
const BLOCK: usize = 1 << 12;

fn grid_sums(polys: &[Compiled], weights: &[f64], nvars: usize, n: usize) -> GridSums {
    let total = n.pow(nvars as u32);
    let step = std::f64::consts::TAU / n as f64;
    let rows: Vec<(f64, Vec<f64>, f64)> = (0..total.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut tables: Vec<Vec<Vec<Complex64>>> =
                polys.iter().map(|p| vec![Vec::new(); p.nvars]).collect();
            let mut coords = vec![usize::MAX; nvars];
            let mut combined = 0.0;
            let mut parts = vec![0.0; polys.len()];
            let mut max_abs: f64 = 0.0;
            for flat in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut rest = flat;
                for (i, c) in coords.iter_mut().enumerate() {
                    let x = rest % n;
                    rest /= n;
                    if *c != x {
                        *c = x;
                        let t = (x as f64 + 0.5) * step;
                        for (j, p) in polys.iter().enumerate() {
                            p.axis_table(i, t, &mut tables[j][i]);
                        }
                    }
                }
                for (j, p) in polys.iter().enumerate() {
                    let v = p.eval(&tables[j]).norm();
                    max_abs = max_abs.max(v);
                    let l = v.ln();
                    parts[j] += l;
                    combined += weights[j] * l;
                }
            }
            (combined, parts, max_abs)
        })
        .collect();
    let mut out = GridSums {
        combined: 0.0,
        parts: vec![0.0; polys.len()],
        max_abs: 0.0,
    };
    for (c, p, m) in rows {
        out.combined += c;
        for (a, b) in out.parts.iter_mut().zip(p) {
            *a += b;
        }
        out.max_abs = out.max_abs.max(m);
    }
    out.combined /= total as f64;
    out.parts.iter_mut().for_each(|x| *x /= total as f64);
    out
}

pub(crate) struct CombinedQuadrature {
    pub value: f64,
    pub parts: Vec<f64>,
    pub grid: usize,
    pub error_proxy: f64,
}

/// Integrates `Σ_j w_j ln|p_j|` over the torus on half-cell-offset grids,
/// doubling until two successive values agree to the tolerance.
pub(crate) fn combined_quadrature(
    polys: &[LaurentPoly],
    weights: &[f64],
    cfg: &QuadratureConfig,
) -> Result<CombinedQuadrature> {
    if polys.iter().any(|p| p.is_zero()) {
        return Err(Error::ZeroPolynomial);
    }
    let nvars = polys.first().map_or(0, |p| p.nvars());
    let compiled: Vec<Compiled> = polys.iter().map(Compiled::new).collect();
    if nvars == 0 {
        let parts: Vec<f64> = compiled
            .iter()
            .map(|c| c.terms.first().map_or(f64::NEG_INFINITY, |t| t.1.abs().ln()))
            .collect();
        let value = parts.iter().zip(weights).map(|(p, w)| p * w).sum();
        return Ok(CombinedQuadrature {
            value,
            parts,
            grid: 1,
            error_proxy: 0.0,
        });
    }
    let fits = |n: usize| n.checked_pow(nvars as u32).is_some_and(|t| t <= cfg.max_points);
    let mut n = cfg.grid.max(8);
    if !fits(n) {
        return Err(Error::Invalid(format!(
            "starting grid {n}^{nvars} exceeds the point cap {}",
            cfg.max_points
        )));
    }
    let mut prev = grid_sums(&compiled, weights, nvars, n);
    if prev.max_abs < 1e-300 {
        return Err(Error::ZeroPolynomial);
    }
    let mut proxy = f64::INFINITY;
    while fits(2 * n) {
        n *= 2;
        let cur = grid_sums(&compiled, weights, nvars, n);
        proxy = (cur.combined - prev.combined).abs();
        prev = cur;
        if proxy < cfg.tolerance {
            break;
        }
    }
    Ok(CombinedQuadrature {
        value: prev.combined,
        parts: prev.parts,
        grid: n,
        error_proxy: proxy,
    })
}

/// Logarithmic Mahler measure of `p` by offset-grid trapezoid quadrature.
pub fn mahler_log(p: &LaurentPoly, cfg: &QuadratureConfig) -> Result<MahlerResult> {
    let q = combined_quadrature(std::slice::from_ref(p), &[1.0], cfg)?;
    Ok(MahlerResult {
        value: q.value,
        grid: q.grid,
        method: MahlerMethod::Quadrature,
        error_proxy: q.error_proxy,
    })
}

/// Monte Carlo estimate of `m(p)` from uniformly random torus points.
pub fn mahler_monte_carlo(p: &LaurentPoly, samples: usize, seed: u64) -> Result<MahlerResult> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if samples < 2 {
        return Err(Error::Invalid("Monte Carlo needs at least 2 samples".into()));
    }
    let c = Compiled::new(p);
    let n = p.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tables = vec![Vec::new(); n];
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut max_abs: f64 = 0.0;
    for _ in 0..samples {
        for (i, t) in tables.iter_mut().enumerate() {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            c.axis_table(i, theta, t);
        }
        let v = c.eval(&tables).norm();
        max_abs = max_abs.max(v);
        let l = v.ln();
        sum += l;
        sq += l * l;
    }
    if max_abs < 1e-300 {
        return Err(Error::ZeroPolynomial);
    }
    let mean = sum / samples as f64;
    let var = (sq / samples as f64 - mean * mean).max(0.0);
    Ok(MahlerResult {
        value: mean,
        grid: samples,
        method: MahlerMethod::MonteCarlo,
        error_proxy: (var / samples as f64).sqrt(),
    })
}
