use rayon::prelude::*;
use serde::Serialize;

use crate::engine::evaluate::evaluate_matrix;
use crate::engine::rank::rational_rank;
use crate::engine::spectrum::{
    dense_spectrum, fourier_spectrum, lanczos_log_det, AbelianCharacters, EigenMethod, MethodUsed,
};
use crate::engine::{tail_dispersion, EngineConfig};
use crate::error::{Error, Result};
use crate::group::{QuotientLevel, QuotientTower, RingMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct LogDetLevel {
    pub label: i64,
    pub index: usize,
    pub dim: usize,
    /// `(1/index) · Σ_{λ > cutoff} ln λ`.
    pub value: f64,
    pub cutoff: f64,
    pub discarded: usize,
    /// Exact kernel dimension, when the level is small enough to compute it.
    pub kernel: Option<usize>,
    pub min_eigenvalue: f64,
    pub method: MethodUsed,
    /// Discarded count differs from the exact kernel dimension.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogDetEstimate {
    pub levels: Vec<LogDetLevel>,
    /// Last level's value.
    pub headline: f64,
    pub dispersion: f64,
}

impl LogDetEstimate {
    pub(crate) fn from_levels(levels: Vec<LogDetLevel>) -> Self {
        let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
        LogDetEstimate {
            headline: values.last().copied().unwrap_or(0.0),
            dispersion: tail_dispersion(&values),
            levels,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.value).collect()
    }
}

/// Log-determinant of a self-adjoint matrix at one level. `kernel` may carry
/// an exact kernel dimension already known to the caller.
pub(crate) fn level_log_det(
    m: &RingMatrix,
    level: &QuotientLevel,
    position: usize,
    kernel: Option<usize>,
    cfg: &EngineConfig,
) -> Result<LogDetLevel> {
    let lm = evaluate_matrix(m, level)?;
    let a = &lm.matrix;
    if !a.is_symmetric() {
        return Err(Error::NotSelfAdjoint);
    }
    let dim = a.nrows();
    let index = level.degree();
    let cutoff = cfg.cutoff.cutoff(a);
    let kernel = kernel.or_else(|| (dim <= cfg.exact_rank_limit).then(|| dim - rational_rank(a)));

    let chars = match cfg.method {
        EigenMethod::Auto | EigenMethod::Fourier => AbelianCharacters::of(level),
        _ => None,
    };
    let use_dense = match cfg.method {
        EigenMethod::Dense | EigenMethod::Fourier => true,
        EigenMethod::Auto => dim <= cfg.dense_limit,
        EigenMethod::Lanczos => false,
    };
    let (method, sum_log, discarded, min_eigenvalue) = if chars.is_some() || use_dense {
        let (method, spectrum) = match chars {
            Some(ch) => (MethodUsed::Fourier, fourier_spectrum(m, &ch)),
            None => (MethodUsed::Dense, dense_spectrum(a)),
        };
        let min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        let mut discarded = 0;
        for &l in &spectrum {
            if l > cutoff {
                sum += l.ln();
            } else {
                discarded += 1;
            }
        }
        (method, sum, discarded, if dim == 0 { 0.0 } else { min })
    } else {
        let est = lanczos_log_det(a, cutoff, cfg.lanczos_steps, cfg.lanczos_probes, cfg.seed);
        (
            MethodUsed::Lanczos,
            est.sum_log,
            est.discarded.round().max(0.0) as usize,
            est.min_ritz,
        )
    };
    if min_eigenvalue < -cutoff {
        return Err(Error::Indefinite {
            level: position,
            min_eigenvalue,
        });
    }
    Ok(LogDetLevel {
        label: level.label(),
        index,
        dim,
        value: sum_log / index as f64,
        cutoff,
        discarded,
        kernel,
        min_eigenvalue,
        method,
        flagged: kernel.is_some_and(|k| k != discarded),
    })
}

/// Normalized log-determinants of `M` over every level of `t`.
pub fn fk_log_det(m: &RingMatrix, t: &QuotientTower, cfg: &EngineConfig) -> Result<LogDetEstimate> {
    if m.rows() != m.cols() {
        return Err(Error::Shape(format!(
            "log-determinant of a {}×{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let levels = t
        .levels()
        .par_iter()
        .enumerate()
        .map(|(i, level)| level_log_det(m, level, i, None, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LogDetEstimate::from_levels(levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupPresentation, RingElement};

    fn one_var(src: &str) -> RingMatrix {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let p = RingMatrix::from_rows(vec![vec![RingElement::parse(src, g.generators()).unwrap()]]);
        p.star().try_mul(&p).unwrap()
    }

    #[test]
    fn cyclotomic_product_at_100() {
        let t = QuotientTower::cyclic(&[100]).unwrap();
        let est = fk_log_det(&one_var("a - 1"), &t, &EngineConfig::default()).unwrap();
        let l = &est.levels[0];
        assert!((l.value - 2.0 * 100f64.ln() / 100.0).abs() < 1e-10);
        assert_eq!(l.discarded, 1);
        assert_eq!(l.kernel, Some(1));
        assert!(!l.flagged);
    }

    #[test]
    fn resultant_identity_with_every_solver() {
        let m = one_var("a - 2");
        let k = 32usize;
        let t = QuotientTower::cyclic(&[k]).unwrap();
        let closed = 2.0 / k as f64 * (2f64.powi(k as i32) - 1.0).ln();
        for method in [EigenMethod::Fourier, EigenMethod::Dense] {
            let cfg = EngineConfig { method, ..EngineConfig::default() };
            let v = fk_log_det(&m, &t, &cfg).unwrap().headline;
            assert!((v - closed).abs() < 1e-10, "{method:?}: {v} vs {closed}");
        }
        let cfg = EngineConfig { method: EigenMethod::Lanczos, lanczos_steps: 32, ..EngineConfig::default() };
        let v = fk_log_det(&m, &t, &cfg).unwrap().headline;
        assert!((v - closed).abs() < 0.05, "lanczos {v} vs {closed}");
    }

    #[test]
    fn identity_is_zero() {
        let t = QuotientTower::cyclic(&[2, 4, 8]).unwrap();
        let est = fk_log_det(&RingMatrix::identity(2), &t, &EngineConfig::default()).unwrap();
        assert!(est.values().iter().all(|&v| v == 0.0));
        assert_eq!(est.dispersion, 0.0);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let m = RingMatrix::from_rows(vec![vec![RingElement::parse("a + A", g.generators()).unwrap()]]);
        let t = QuotientTower::cyclic(&[4]).unwrap();
        let err = fk_log_det(&m, &t, &EngineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Indefinite { level: 0, .. }));
    }

    #[test]
    fn non_symmetric_rejected() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let m = RingMatrix::from_rows(vec![vec![RingElement::parse("a", g.generators()).unwrap()]]);
        let t = QuotientTower::cyclic(&[4]).unwrap();
        assert!(matches!(
            fk_log_det(&m, &t, &EngineConfig::default()),
            Err(Error::NotSelfAdjoint)
        ));
    }
}
