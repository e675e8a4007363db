//! Free chain complexes over group rings and their mapping tori.

pub mod complex;
pub mod mapping_torus;

pub use complex::{validate_complex, ChainComplex, ComplexReport, CompositeCheck};
pub use mapping_torus::{extend_tower, mapping_torus, ExtendedGroup, MappingTorusSpec};
