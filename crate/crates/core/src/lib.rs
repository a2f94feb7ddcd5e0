//! Exact solving and structural analysis for Directed Steiner Network instances whose
//! demand pattern is close to a caterpillar.

pub mod classify;
pub mod cli;
pub mod dp;
pub mod error;
pub mod graph;
pub mod io;
pub mod reduction;
pub mod structure;

pub use error::{DsnError, Result};
