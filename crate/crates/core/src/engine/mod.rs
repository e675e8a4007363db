//! Finite-quotient approximation: evaluation of group-ring matrices at tower
//! levels, L²-Betti numbers, Fuglede–Kadison log-determinants and L²-torsion.
//!
//! Every level is processed independently on the rayon pool of the caller;
//! the report assembly is the only join point.

pub mod betti;
pub mod evaluate;
pub mod logdet;
pub mod rank;
pub mod spectrum;
pub mod torsion;

pub use betti::{betti, BettiEstimate, BettiLevel};
pub use evaluate::{evaluate_matrix, LevelMatrix, SparseIntMatrix};
pub use logdet::{fk_log_det, LogDetEstimate, LogDetLevel};
pub use spectrum::{EigenMethod, MethodUsed};
pub use torsion::{l2_torsion, rho_of_automorphism, DegreeTerm, TorsionEstimate, TorsionLevel};

use serde::Serialize;

/// Threshold below which an eigenvalue counts as zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutoffPolicy {
    /// `max(1e-12, 1e-10 · ‖M‖_∞ · dim)` per level.
    Scaled,
    Fixed(f64),
}

impl CutoffPolicy {
    pub fn cutoff(&self, m: &SparseIntMatrix) -> f64 {
        match *self {
            CutoffPolicy::Scaled => (1e-10 * m.inf_norm() * m.nrows() as f64).max(1e-12),
            CutoffPolicy::Fixed(c) => c,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineConfig {
    pub cutoff: CutoffPolicy,
    pub method: EigenMethod,
    /// Largest evaluated dimension handled by a dense eigensolver.
    pub dense_limit: usize,
    /// Largest evaluated dimension whose kernel is computed exactly.
    pub exact_rank_limit: usize,
    /// L²-acyclicity threshold is `acyclicity_factor / last index`.
    pub acyclicity_factor: f64,
    pub lanczos_steps: usize,
    pub lanczos_probes: usize,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            cutoff: CutoffPolicy::Scaled,
            method: EigenMethod::Auto,
            dense_limit: 4096,
            exact_rank_limit: 4096,
            acyclicity_factor: 10.0,
            lanczos_steps: 80,
            lanczos_probes: 30,
            seed: 0x5eed,
        }
    }
}

/// `max − min` over the last three values (fewer if the sequence is shorter).
pub(crate) fn tail_dispersion(values: &[f64]) -> f64 {
    let tail = &values[values.len().saturating_sub(3)..];
    if tail.is_empty() {
        return 0.0;
    }
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}
