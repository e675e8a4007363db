use rayon::prelude::*;
use serde::Serialize;

use crate::chain::ChainComplex;
use crate::engine::evaluate::evaluate_matrix;
use crate::engine::logdet::level_log_det;
use crate::engine::rank::rational_rank;
use crate::engine::{tail_dispersion, EngineConfig};
use crate::error::Result;
use crate::group::{QuotientLevel, QuotientTower};

#[derive(Clone, Debug, Serialize)]
pub struct BettiLevel {
    pub label: i64,
    pub index: usize,
    pub kernel_dim: usize,
    /// `kernel_dim / index`.
    pub value: f64,
    /// Kernel dimension obtained by exact rank rather than eigenvalue counting.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BettiEstimate {
    pub degree: usize,
    pub levels: Vec<BettiLevel>,
    pub extrapolated: f64,
    pub dispersion: f64,
}

impl BettiEstimate {
    pub(crate) fn from_levels(degree: usize, rank: usize, levels: Vec<BettiLevel>) -> Self {
        let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
        let extrapolated = match levels.as_slice() {
            [] => 0.0,
            [only] => only.value,
            [.., a, b] => {
                // Linear in 1/index through the last two levels.
                let (xa, xb) = (1.0 / a.index as f64, 1.0 / b.index as f64);
                if xa == xb {
                    b.value
                } else {
                    (b.value * xa - a.value * xb) / (xa - xb)
                }
            }
        };
        BettiEstimate {
            degree,
            extrapolated: extrapolated.clamp(0.0, rank as f64),
            dispersion: tail_dispersion(&values),
            levels,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }
}

/// Exact ranks of `∂_1 … ∂_top` at one level, `None` where the evaluated
/// matrix exceeds the exact-rank limit.
pub(crate) fn boundary_ranks(
    c: &ChainComplex,
    level: &QuotientLevel,
    cfg: &EngineConfig,
) -> Result<Vec<Option<usize>>> {
    let d = level.degree();
    (1..=c.top_degree())
        .map(|n| {
            let b = c.boundary(n);
            if b.rows().max(b.cols()) * d > cfg.exact_rank_limit {
                return Ok(None);
            }
            Ok(Some(rational_rank(&evaluate_matrix(&b, level)?.matrix)))
        })
        .collect()
}

/// Exact `dim ker Δ_p = r_p·d − rank ∂_p − rank ∂_{p+1}` when available.
pub(crate) fn exact_kernel(
    c: &ChainComplex,
    d: usize,
    ranks: &[Option<usize>],
    p: usize,
    cfg: &EngineConfig,
) -> Option<usize> {
    let dim = c.rank(p) * d;
    if dim > cfg.exact_rank_limit {
        return None;
    }
    let down = if p == 0 { Some(0) } else { ranks[p - 1] };
    let up = if p < c.top_degree() { ranks[p] } else { Some(0) };
    Some(dim - down? - up?)
}

pub(crate) fn betti_level(
    c: &ChainComplex,
    level: &QuotientLevel,
    position: usize,
    p: usize,
    ranks: &[Option<usize>],
    cfg: &EngineConfig,
) -> Result<BettiLevel> {
    let d = level.degree();
    let (kernel_dim, exact) = match exact_kernel(c, d, ranks, p, cfg) {
        Some(k) => (k, true),
        None => {
            let ld = level_log_det(&c.laplacian(p)?, level, position, None, cfg)?;
            (ld.discarded, false)
        }
    };
    Ok(BettiLevel {
        label: level.label(),
        index: d,
        kernel_dim,
        value: kernel_dim as f64 / d as f64,
        exact,
    })
}

/// L²-Betti number estimate in degree `p`.
pub fn betti(c: &ChainComplex, t: &QuotientTower, p: usize, cfg: &EngineConfig) -> Result<BettiEstimate> {
    let levels = t
        .levels()
        .par_iter()
        .enumerate()
        .map(|(i, level)| {
            let ranks = boundary_ranks(c, level, cfg)?;
            betti_level(c, level, i, p, &ranks, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BettiEstimate::from_levels(p, c.rank(p), levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_one_over_k() {
        let t = QuotientTower::cyclic(&[2, 4, 8, 16]).unwrap();
        let c = ChainComplex::circle();
        for p in 0..=1 {
            let b = betti(&c, &t, p, &EngineConfig::default()).unwrap();
            for l in &b.levels {
                assert!(l.exact);
                assert_eq!(l.value, 1.0 / l.index as f64);
            }
            assert_eq!(b.extrapolated, 0.0);
        }
    }

    #[test]
    fn point_of_trivial_group() {
        let t = QuotientTower::new(vec![QuotientLevel::new(1, 1, vec![]).unwrap()], None).unwrap();
        let b = betti(&ChainComplex::point(), &t, 0, &EngineConfig::default()).unwrap();
        assert_eq!(b.levels[0].value, 1.0);
        assert_eq!(b.extrapolated, 1.0);
    }

    #[test]
    fn torus_kernel_counts() {
        let t = QuotientTower::grid(2, &[2, 3, 4]).unwrap();
        let c = ChainComplex::torus();
        for (p, mult) in [(0, 1.0), (1, 2.0), (2, 1.0)] {
            let b = betti(&c, &t, p, &EngineConfig::default()).unwrap();
            for l in &b.levels {
                assert_eq!(l.value, mult / l.index as f64);
            }
            assert!(b.extrapolated.abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_count_agrees_with_exact_count() {
        let t = QuotientTower::grid(2, &[3, 5]).unwrap();
        let c = ChainComplex::torus();
        let exact = betti(&c, &t, 1, &EngineConfig::default()).unwrap();
        let cfg = EngineConfig { exact_rank_limit: 0, ..EngineConfig::default() };
        let numeric = betti(&c, &t, 1, &cfg).unwrap();
        assert!(numeric.levels.iter().all(|l| !l.exact));
        assert_eq!(exact.values(), numeric.values());
    }
}
