//! Optimal and near-optimal traffic paths between atomic measures.

mod local;
mod oracle;
mod positions;
mod topology;

pub use local::{local_search, reroute_improvement, LocalSearchReport, Move};
pub use oracle::{brute_force_optimal, brute_force_optimal_with, is_optimal, OptimalityReport, OracleOptions, OracleSolution, ORACLE_MAX_ATOMS};
pub use positions::{initial_steiner, optimize_positions, solve_positions, NonConvergence, PositionReport, COLLISION_TOL, MAX_ITERS, REL_STOP};
pub use topology::{full_topologies, terminals_of, Topology};
