//! Membership of patterns in caterpillar classes, certificates and obstructions.

mod caterpillar;
mod cover;
mod obstruct;

pub use caterpillar::{
    best_caterpillar_parameters, in_c_lambda_delta, in_c_lambda_delta_with, in_c_star, in_c_star_with, is_caterpillar,
    validate_certificate, SearchLimits,
};
pub use cover::{
    hamiltonian_path_semicomplete, max_matching, star_decomposition, vertex_cover_number, Star, StarDecomposition,
};
pub use obstruct::{decompose_or_obstruct, diamond_shape, validate_obstruction};

use crate::graph::Pattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Out,
    In,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Out => "out",
            Orientation::In => "in",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Out => Orientation::In,
            Orientation::In => Orientation::Out,
        }
    }
}

/// Proof that a pattern lies in a caterpillar class.
///
/// The caterpillar consists of the spine path `v_1 -> ... -> v_λ₀` and the stars
/// `W_i` (listed with `v_i` first). All remaining demands of the certified pattern are
/// in `extra_edges`. When `equivalent_pattern` is set, the certificate is about that
/// pattern, which has the same transitive closure as the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaterpillarCertificate {
    pub lambda0: usize,
    pub orientation: Orientation,
    pub spine: Vec<String>,
    pub stars: Vec<Vec<String>>,
    pub extra_edges: Vec<(String, String)>,
    pub equivalent_pattern: Option<Pattern>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObstructionKind {
    Cycle,
    PureOutDiamond,
    PureInDiamond,
    FlawedOutDiamond,
    FlawedInDiamond,
}

impl ObstructionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObstructionKind::Cycle => "cycle",
            ObstructionKind::PureOutDiamond => "pure-out-diamond",
            ObstructionKind::PureInDiamond => "pure-in-diamond",
            ObstructionKind::FlawedOutDiamond => "flawed-out-diamond",
            ObstructionKind::FlawedInDiamond => "flawed-in-diamond",
        }
    }
}

/// How an obstruction was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObstructionWitness {
    /// A matching `e_1..e_α`; the head of `e_i` is merged with the tail of `e_{i+1}`.
    Matching {
        edges: Vec<(String, String)>,
        cycle: Vec<String>,
    },
    /// An in-star and an out-star of `α - 1` leaves each, roots merged, leaves paired.
    Stars {
        in_root: String,
        in_leaves: Vec<String>,
        out_root: String,
        out_leaves: Vec<String>,
        cycle: Vec<String>,
    },
    /// Two stars with disjoint reachability and the induced vertex partition.
    Diamond {
        r1: String,
        r2: String,
        leaves: Vec<String>,
        apex: Option<String>,
        star1: Vec<String>,
        star2: Vec<String>,
        y1: Vec<String>,
        y2: Vec<String>,
        w1: Vec<String>,
        w2: Vec<String>,
        w: Vec<String>,
        u: Vec<String>,
    },
}

/// Proof that some identification of the pattern is a large cycle or diamond.
///
/// `partition` lists the identification classes; the first name of every class is its
/// representative in the identified pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub size: usize,
    pub partition: Vec<Vec<String>>,
    pub witness: ObstructionWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Certificate(CaterpillarCertificate),
    Obstruction(Obstruction),
}
