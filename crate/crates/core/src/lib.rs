//! Meeting times of two independent stationary random walks.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`chain`]: reversible transition kernels and their spectral functional
//!   calculus (heat kernels, resolvent Green functions).
//! * [`graph`]: uniform random regular graphs, reference graphs (tori, cycles,
//!   complete graphs), cycle census and spectral-gap reports.
//! * [`meeting`]: exact meeting-time quantities on the product chain and the
//!   numerical checks of the identities they satisfy.
//! * [`mckay`]: the Kesten–McKay law, tree return probabilities and the
//!   resolvent sum `(k-1)/(k-2)`.
//! * [`montecarlo`]: exact event-driven sampling of meeting times and the
//!   comparison against the exponential limit.
//! * [`io`]: CSV/JSON import and export.

pub mod chain;
pub mod error;
pub mod graph;
pub mod io;
pub mod mckay;
pub mod meeting;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;

pub use chain::{
    eigendecompose, green_function, heat_kernel, kernel_from_graph, symmetrize, GreenEvaluation,
    SpectralDecomposition, TransitionKernel,
};
pub use error::{Error, Result};
pub use graph::{
    build_torus, constancy_check, count_cycles, gap_check, sample_regular, ConstancyReport,
    CycleCensus, GapReport, RegularGraph,
};
pub use mckay::{
    density, limit_mean, moments_quadrature, moments_tree_dp, resolvent_sum, MomentMethod,
    ResolventSum, TreeMoments,
};
pub use meeting::{
    laplace_meeting, mean_meeting, normalized_trace_transform, r_matrix, verify_green_identity,
    verify_place_equation, verify_resolvent_identity, verify_tree_gap, ExactAnalysis,
    MeetingSolution, ProductChain, RMatrix,
};
