//! Exact meeting-time quantities on the product chain.
//!
//! Two independent rate-1 walks `(X, Y)` form a chain on `E × E` that jumps at
//! total rate 2; the meeting time is its hitting time of the diagonal. All
//! quantities here come from linear solves with the killed generator of that
//! chain, plus spectral evaluations of the base kernel.

mod analysis;
mod product;
mod rmatrix;

pub use analysis::{
    laplace_meeting, mean_meeting, normalized_trace_transform, verify_green_identity,
    verify_place_equation, verify_resolvent_identity, verify_tree_gap, ExactAnalysis,
    IdentityResiduals, PlaceEquationCheck, TreeGapCheck, DEFAULT_CONSTANCY_DEPTH,
};
pub use product::{
    MeetingSolution, ProductChain, SolveDiagnostics, SolveMethod, SolverChoice, DENSE_SOLVE_LIMIT,
};
pub use rmatrix::{r_matrix, RMatrix};
