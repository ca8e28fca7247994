//! Regular graphs: uniform random sampling by the pairing model, reference
//! graphs, short-cycle census, spectral-gap reports and return-probability
//! constancy checks.

mod constancy;
mod cycles;
mod gap;
mod regular;

pub use constancy::{closed_walk_counts, constancy_check, ConstancyReport, ConstancyRow};
pub use cycles::{count_cycles, CycleCensus, MAX_CYCLE_LENGTH};
pub use gap::{gap_check, GapMethod, GapReport, DEFAULT_GAP_THRESHOLD, DENSE_GAP_LIMIT};
pub use regular::{
    build_torus, sample_regular, sample_regular_with_budget, RegularGraph, DEFAULT_MAX_ATTEMPTS,
};
