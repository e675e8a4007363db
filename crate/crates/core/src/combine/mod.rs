//! Exact evaluation of the combination formulas for L²-torsion over
//! decomposition trees.

pub mod rules;
pub mod spec;
pub mod value;

pub use rules::{
    amalgam, cell_sum, graph_of_groups, jsj_auto, orbifold_euler, scale, surface_auto, OrbitCell,
    Scaling,
};
pub use spec::{DecompositionSpec, Evaluation, Node, TraceStep};
pub use value::{parse_rational, rational_string, Quantity, TorsionValue};
