//! Integral homology torsion of finite covers and the growth statistics
//! compared against L²-torsion.

pub mod homology;
pub mod snf;

pub use homology::{cover_boundary, growth_series, homology_torsion, GrowthReport, GrowthRow};
pub use snf::{smith_normal_form, smith_normal_form_with, IntMatrix, SnfOptions, SnfResult};
