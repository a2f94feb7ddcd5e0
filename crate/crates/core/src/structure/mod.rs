//! Exact cutwidth and treewidth at small sizes and checks of the structure of
//! minimal solutions.

mod core_split;
mod cutwidth;
mod scc;
mod treewidth;

pub use core_split::{common_witness_leaf, core_decomposition, necessary_edges, Arborescence, CoreDecomposition};
pub use cutwidth::{
    composed_layout, composition_bound, cutwidth_exact, cutwidth_of_layout, topological_layout, CutwidthResult,
    CUTWIDTH_MAX_VERTICES,
};
pub use scc::{scc_reports, verify_cutwidth_bound, SccReport};
pub use treewidth::{treewidth_exact, TreeDecomposition, TREEWIDTH_MAX_VERTICES};
