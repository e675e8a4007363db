//! Presented groups, words, integral group rings and finite quotient towers.

pub mod automorphism;
pub mod parse;
pub mod presentation;
pub mod ring;
pub mod tower;
pub mod word;

pub use automorphism::{AutomorphismSpec, LevelAutomorphism};
pub use presentation::{parse_presentation, GroupPresentation, PresentationParse};
pub use ring::{RingElement, RingMatrix};
pub use tower::{
    derive_connecting_map, validate_tower, LevelCheck, Permutation, QuotientLevel, QuotientTower,
    TowerReport,
};
pub use word::Word;
