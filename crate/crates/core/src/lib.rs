//! Finite-quotient approximation of L²-invariants.
//!
//! The crate models finitely presented groups through towers of finite
//! permutation quotients and evaluates group-ring matrices there. On top of
//! that it computes L²-Betti numbers, Fuglede–Kadison log-determinants and
//! L²-torsion of free chain complexes ([`engine`]), builds algebraic mapping
//! tori of twisted chain self-maps ([`chain`]), cross-checks abelian cases
//! against Mahler measures ([`abelian`]), evaluates combination formulas for
//! L²-torsion exactly ([`combine`]) and measures homology torsion growth of
//! finite covers ([`growth`]).

pub mod abelian;
pub mod chain;
pub mod combine;
pub mod engine;
pub mod error;
pub mod group;
pub mod growth;
pub mod provenance;

pub use error::{Error, ParseError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use provenance::Provenance;
