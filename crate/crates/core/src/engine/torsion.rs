use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{extend_tower, mapping_torus, ChainComplex, MappingTorusSpec};
use crate::engine::betti::{betti_level, boundary_ranks, exact_kernel, BettiEstimate, BettiLevel};
use crate::engine::logdet::{level_log_det, LogDetEstimate, LogDetLevel};
use crate::engine::{tail_dispersion, EngineConfig};
use crate::error::Result;
use crate::group::QuotientTower;
use crate::provenance::Provenance;

/// Contribution `weight · fk_log_det(Δ_p)` of one degree.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeTerm {
    pub degree: usize,
    /// `−½ · (−1)^p · p`.
    pub weight: f64,
    pub log_det: LogDetEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionLevel {
    pub label: i64,
    pub index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionEstimate {
    /// Headline: the last level's value.
    pub value: f64,
    pub provenance: Provenance,
    pub dispersion: f64,
    pub levels: Vec<TorsionLevel>,
    pub degrees: Vec<DegreeTerm>,
    pub betti: Vec<BettiEstimate>,
    pub acyclicity_threshold: f64,
    pub diagnostics: Vec<String>,
}

impl TorsionEstimate {
    pub fn is_l2_acyclic(&self) -> bool {
        self.betti
            .iter()
            .all(|b| b.extrapolated < self.acyclicity_threshold)
    }
}

pub(crate) fn degree_weight(p: usize) -> f64 {
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    // `+ 0.0` turns the degree-0 weight into +0.0 so reports never print -0.
    -0.5 * sign * p as f64 + 0.0
}

/// `ρ = −½ Σ_p (−1)^p · p · fk_log_det(Δ_p)` at every level of `t`.
pub fn l2_torsion(c: &ChainComplex, t: &QuotientTower, cfg: &EngineConfig) -> Result<TorsionEstimate> {
    let top = c.top_degree();
    let laplacians = (0..=top).map(|p| c.laplacian(p)).collect::<Result<Vec<_>>>()?;
    type PerLevel = (Vec<LogDetLevel>, Vec<BettiLevel>);
    let per_level: Vec<PerLevel> = t
        .levels()
        .par_iter()
        .enumerate()
        .map(|(i, level)| -> Result<PerLevel> {
            let ranks = boundary_ranks(c, level, cfg)?;
            let mut lds = Vec::with_capacity(top + 1);
            let mut bs = Vec::with_capacity(top + 1);
            for (p, lap) in laplacians.iter().enumerate() {
                let kernel = exact_kernel(c, level.degree(), &ranks, p, cfg);
                let ld = level_log_det(lap, level, i, kernel, cfg)?;
                let b = match kernel {
                    Some(_) => betti_level(c, level, i, p, &ranks, cfg)?,
                    None => BettiLevel {
                        label: level.label(),
                        index: level.degree(),
                        kernel_dim: ld.discarded,
                        value: ld.discarded as f64 / level.degree() as f64,
                        exact: false,
                    },
                };
                lds.push(ld);
                bs.push(b);
            }
            Ok((lds, bs))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut degrees = Vec::with_capacity(top + 1);
    let mut betti = Vec::with_capacity(top + 1);
    for p in 0..=top {
        let lds: Vec<LogDetLevel> = per_level.iter().map(|(l, _)| l[p].clone()).collect();
        let bs: Vec<BettiLevel> = per_level.iter().map(|(_, b)| b[p].clone()).collect();
        degrees.push(DegreeTerm {
            degree: p,
            weight: degree_weight(p),
            log_det: LogDetEstimate::from_levels(lds),
        });
        betti.push(BettiEstimate::from_levels(p, c.rank(p), bs));
    }

    let levels: Vec<TorsionLevel> = t
        .levels()
        .iter()
        .enumerate()
        .map(|(i, level)| TorsionLevel {
            label: level.label(),
            index: level.degree(),
            value: degrees
                .iter()
                .map(|d| d.weight * d.log_det.levels[i].value)
                .sum(),
        })
        .collect();
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    let threshold = t
        .last_index()
        .map_or(f64::INFINITY, |i| cfg.acyclicity_factor / i as f64);

    let mut diagnostics = Vec::new();
    for b in &betti {
        if b.extrapolated >= threshold {
            diagnostics.push(format!(
                "not L2-acyclic: degree {} Betti estimate {:.6} exceeds threshold {:.6}",
                b.degree, b.extrapolated, threshold
            ));
        }
        if b.levels.iter().any(|l| !l.exact) {
            diagnostics.push(format!(
                "degree {}: kernel dimension counted numerically on levels above the exact-rank limit",
                b.degree
            ));
        }
    }
    for d in &degrees {
        for l in d.log_det.levels.iter().filter(|l| l.flagged) {
            diagnostics.push(format!(
                "level {}: degree {} discarded {} eigenvalues but the exact kernel has dimension {}",
                l.label,
                d.degree,
                l.discarded,
                l.kernel.unwrap_or_default()
            ));
        }
        let methods: std::collections::BTreeSet<String> =
            d.log_det.levels.iter().map(|l| l.method.to_string()).collect();
        if methods.contains("lanczos") {
            diagnostics.push(format!("degree {}: stochastic Lanczos quadrature used", d.degree));
        }
    }

    Ok(TorsionEstimate {
        value: values.last().copied().unwrap_or(0.0),
        provenance: Provenance::Approximated,
        dispersion: tail_dispersion(&values),
        levels,
        degrees,
        betti,
        acyclicity_threshold: threshold,
        diagnostics,
    })
}

/// ρ⁽²⁾ of the twisted self-map in `spec`, computed over the extended tower
/// `Q ⋊ ℤ/(m · ord Φ_Q)`.
pub fn rho_of_automorphism(
    spec: &MappingTorusSpec,
    t: &QuotientTower,
    m: usize,
    cfg: &EngineConfig,
) -> Result<TorsionEstimate> {
    let (_, complex) = mapping_torus(spec, t)?;
    let ext = extend_tower(spec.base.group(), t, &spec.automorphism, m)?;
    l2_torsion(&complex, &ext, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupPresentation, QuotientLevel, RingElement};

    #[test]
    fn circle_per_level_value() {
        let t = QuotientTower::cyclic(&[8, 16, 32]).unwrap();
        let r = l2_torsion(&ChainComplex::circle(), &t, &EngineConfig::default()).unwrap();
        for l in &r.levels {
            let k = l.index as f64;
            assert!((l.value - k.ln() / k).abs() < 1e-10);
        }
        assert!(r.is_l2_acyclic());
        assert_eq!(r.provenance, Provenance::Approximated);
    }

    #[test]
    fn a_minus_two_gives_ln_two() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let c = ChainComplex::one_cell(g.clone(), RingElement::parse("a - 2", g.generators()).unwrap()).unwrap();
        let t = QuotientTower::cyclic(&[16, 32, 64]).unwrap();
        let r = l2_torsion(&c, &t, &EngineConfig::default()).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn torus_vanishes() {
        let t = QuotientTower::grid(2, &[4, 8, 16]).unwrap();
        let r = l2_torsion(&ChainComplex::torus(), &t, &EngineConfig::default()).unwrap();
        assert!(r.value.abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn doubled_edge_fails_acyclicity() {
        // ∂₁ = (a − 1, a − 1) leaves one free ℤ-orbit of 1-cycles: b₁ = 1.
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let e = RingElement::parse("a - 1", g.generators()).unwrap();
        let d1 = crate::group::RingMatrix::from_rows(vec![vec![e.clone(), e]]);
        let c = ChainComplex::new(g, vec![1, 2], vec![d1], None).unwrap();
        let t = QuotientTower::cyclic(&[16, 32, 64]).unwrap();
        let r = l2_torsion(&c, &t, &EngineConfig::default()).unwrap();
        assert!(!r.is_l2_acyclic());
        assert!(r.diagnostics[0].contains("degree 1"), "{:?}", r.diagnostics);
        assert!((r.betti[1].extrapolated - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mapping_torus_is_the_circle() {
        let spec = MappingTorusSpec::identity(ChainComplex::point());
        let t = QuotientTower::new(vec![QuotientLevel::new(1, 1, vec![]).unwrap()], None).unwrap();
        let r = rho_of_automorphism(&spec, &t, 64, &EngineConfig::default()).unwrap();
        assert!((r.value - 64f64.ln() / 64.0).abs() < 1e-10);
    }
}
