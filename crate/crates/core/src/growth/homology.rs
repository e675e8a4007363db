use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::ChainComplex;
use crate::engine::{evaluate_matrix, l2_torsion, EngineConfig};
use crate::error::{Error, Result};
use crate::group::{QuotientLevel, QuotientTower};
use crate::growth::snf::{smith_normal_form, IntMatrix};

/// `∂_n` of the cover `X[L]`, as an integer matrix.
pub fn cover_boundary(c: &ChainComplex, level: &QuotientLevel, n: usize) -> Result<IntMatrix> {
    let lm = evaluate_matrix(&c.boundary(n), level)?;
    Ok(IntMatrix::from_sparse(&lm.matrix))
}

/// `|tors H_n(X[L]; ℤ)|`.
///
/// `C_n / im ∂_{n+1}` is `H_n` plus the free module `im ∂_n`, so its torsion
/// is the torsion of `H_n` and equals the product of the invariant factors
/// of `∂_{n+1}`.
pub fn homology_torsion(c: &ChainComplex, level: &QuotientLevel, n: usize) -> Result<BigInt> {
    if n >= c.top_degree() {
        return Ok(BigInt::one());
    }
    Ok(smith_normal_form(&cover_boundary(c, level, n + 1)?).torsion())
}

/// Natural logarithm of a positive big integer.
pub fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub label: i64,
    pub index: usize,
    pub degree: usize,
    /// Decimal representation of `|tors H_n|`.
    pub torsion: String,
    /// `ln|tors H_n| / index`.
    pub normalized_log: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// `Σ_n (−1)^n ln|tors H_n| / index`, one entry per level.
    pub rho_z: Vec<f64>,
    /// Engine L²-torsion headline of the same complex and tower.
    pub engine_rho: Option<f64>,
}

impl GrowthReport {
    pub const CSV_HEADER: &'static str = "level,index,degree,torsion,normalized_log,rho_Z,engine_rho";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let levels: Vec<i64> = {
            let mut v: Vec<i64> = self.rows.iter().map(|r| r.label).collect();
            v.dedup();
            v
        };
        let engine = self.engine_rho.map_or(String::new(), |v| format!("{v:.12}"));
        for r in &self.rows {
            let li = levels.iter().position(|&l| l == r.label).expect("label present");
            out.push_str(&format!(
                "{},{},{},{},{:.12},{:.12},{}\n",
                r.label, r.index, r.degree, r.torsion, r.normalized_log, self.rho_z[li], engine
            ));
        }
        out
    }
}

/// Torsion table over every level and degree, with `ρ^ℤ` per level. When
/// `engine` is given the report also carries the engine ρ⁽²⁾ headline.
pub fn growth_series(
    c: &ChainComplex,
    t: &QuotientTower,
    engine: Option<&EngineConfig>,
) -> Result<GrowthReport> {
    if t.len() < 3 {
        return Err(Error::Invalid(format!(
            "growth series needs at least 3 levels, tower has {}",
            t.len()
        )));
    }
    let top = c.top_degree();
    let jobs: Vec<(usize, usize)> = (0..t.len())
        .flat_map(|i| (0..=top).map(move |n| (i, n)))
        .collect();
    let torsions = jobs
        .par_iter()
        .map(|&(i, n)| homology_torsion(c, &t.levels()[i], n))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(jobs.len());
    let mut rho_z = vec![0.0; t.len()];
    for (&(i, n), tors) in jobs.iter().zip(&torsions) {
        let level = &t.levels()[i];
        let normalized_log = big_ln(tors) / level.degree() as f64;
        rho_z[i] += if n % 2 == 0 { normalized_log } else { -normalized_log };
        rows.push(GrowthRow {
            label: level.label(),
            index: level.degree(),
            degree: n,
            torsion: tors.to_string(),
            normalized_log,
        });
    }
    let engine_rho = match engine {
        Some(cfg) => Some(l2_torsion(c, t, cfg)?.value),
        None => None,
    };
    Ok(GrowthReport {
        rows,
        rho_z,
        engine_rho,
    })
}
