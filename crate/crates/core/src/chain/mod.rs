//! Finite reversible Markov chains and their spectral functional calculus.
//!
//! A reversible kernel `Q` with stationary law `π` is conjugate to the
//! symmetric matrix `S = Π^{1/2} Q Π^{-1/2}`. Functions of `Q` are defined by
//! applying them to the eigenvalues of `S` and conjugating back, which gives
//! heat kernels `e^{t(Q-1)}` and resolvent Green functions in closed form.

mod green;
mod kernel;
pub mod lanczos;
mod spectral;

pub use green::{green_function, GreenEvaluation};
pub use kernel::{kernel_from_graph, symmetrize, TransitionKernel};
pub use spectral::{
    apply_function, eigendecompose, heat_kernel, SpectralDecomposition, DENSE_EIGEN_LIMIT,
    TOP_GAP_THRESHOLD,
};
