use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::regular::RegularGraph;
use crate::error::{Error, Result};

/// Longest cycle length the census will enumerate.
pub const MAX_CYCLE_LENGTH: usize = 8;

/// Number of cycles of each length `3 ≤ r ≤ r_max`, counted as unrooted,
/// unoriented subgraphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub r_max: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl CycleCensus {
    pub fn count(&self, r: usize) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }
}

/// Exact census by depth-first path enumeration. Each cycle is rooted at its
/// smallest vertex and found once per orientation.
pub fn count_cycles(graph: &RegularGraph, r_max: usize) -> Result<CycleCensus> {
    if r_max < 3 {
        return Err(Error::invalid(format!(
            "census depth must be at least 3, got {r_max}"
        )));
    }
    if r_max > MAX_CYCLE_LENGTH {
        return Err(Error::Budget(format!(
            "census depth {r_max} exceeds the limit of {MAX_CYCLE_LENGTH}"
        )));
    }
    let mut oriented = vec![0u64; r_max + 1];
    let mut on_path = vec![false; graph.n()];
    for root in 0..graph.n() {
        on_path[root] = true;
        extend(graph, root, root, 1, r_max, &mut on_path, &mut oriented);
        on_path[root] = false;
    }
    let counts = (3..=r_max).map(|r| (r, oriented[r] / 2)).collect();
    Ok(CycleCensus { r_max, counts })
}

fn extend(
    graph: &RegularGraph,
    root: usize,
    tip: usize,
    len: usize,
    r_max: usize,
    on_path: &mut [bool],
    oriented: &mut [u64],
) {
    for &next in graph.neighbors(tip) {
        if next == root && len >= 3 {
            oriented[len] += 1;
        } else if next > root && !on_path[next] && len < r_max {
            on_path[next] = true;
            extend(graph, root, next, len + 1, r_max, on_path, oriented);
            on_path[next] = false;
        }
    }
}
