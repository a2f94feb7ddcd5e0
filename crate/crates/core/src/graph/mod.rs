//! Directed graph data model and primitive algorithms.

pub mod bits;
mod digraph;
mod local;
mod network;
mod pattern;

pub use digraph::{Cost, Edge, EdgeId, VertexId, WeightedDigraph, MAX_COST};
pub use local::{scc_condensation, Condensation, Layout, LocalDigraph};
pub use network::{feasible, is_minimal, minimalize, SolutionNetwork};
pub(crate) use pattern::mask_names;
pub use pattern::{
    identify_terminals, pattern_from_arcs, transitive_closure, transitively_equivalent,
    transitively_equivalent_with_guard, Pattern, DEFAULT_PATTERN_GUARD,
};
