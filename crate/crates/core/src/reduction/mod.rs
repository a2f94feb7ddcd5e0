//! Generators for hard and structured instances: diamond reductions from multicoloured
//! clique, strongly connected subgraph instances, pattern lifts and expander-like graphs.

mod lift;
mod mcc;

pub use lift::{closure_lift, cycle_pattern_instance, expander_base, expander_like_instance, random_digraph};
pub use mcc::{
    mcc_to_flawed_diamond, mcc_to_pure_diamond, MccInstance, ReductionKind, ReductionOutput, CLIQUE_MAX_PARTS,
};
