//! Exact dynamic program over bounded-treewidth solutions, with a brute-force oracle.

mod entry;
mod oracle;
mod table;

pub use entry::{check_entry, entry_type, fixed_path_family, u_projection, DpEntryKey, FixedPath, PathFamily};
pub use oracle::{brute_force_solve, brute_force_solve_with, oracle_cost, OracleOptions, ORACLE_MAX_EDGES};
pub use table::{
    build_table, default_omega, solve_dp, solve_dp_with, DpOptions, DpSolution, DpTable, DP_MAX_EDGES, DP_MAX_VERTICES,
};
