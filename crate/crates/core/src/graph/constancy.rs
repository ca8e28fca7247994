use serde::{Deserialize, Serialize};

use super::regular::RegularGraph;
use crate::chain::TransitionKernel;

const CONSTANCY_TOL: f64 = 1e-12;

/// Whether `x ↦ Q^ℓ(x,x)` is constant, for one `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyRow {
    pub ell: usize,
    pub constant: bool,
    /// Most common diagonal value (values within 1e-12 are merged).
    pub modal_value: f64,
    /// Fraction of states whose diagonal equals the modal value.
    pub modal_fraction: f64,
    /// Fraction of states with `Q^ℓ(x,x) > 0`.
    pub nonzero_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub rows: Vec<ConstancyRow>,
}

impl ConstancyReport {
    pub fn all_constant(&self) -> bool {
        self.rows.iter().all(|r| r.constant)
    }

    /// First `ℓ` at which constancy fails.
    pub fn first_failure(&self) -> Option<usize> {
        self.rows.iter().find(|r| !r.constant).map(|r| r.ell)
    }
}

/// Return probabilities `Q^ℓ(x,x)` for `ℓ = 1..=ell_max`, checked for
/// constancy in `x`.
pub fn constancy_check(kernel: &TransitionKernel, ell_max: usize) -> ConstancyReport {
    let n = kernel.n();
    let rows_sparse = kernel.sparse_rows();
    // diag[ℓ-1][x] = (Q^ℓ δ_x)(x), propagated on the sparse support
    let mut diag = vec![vec![0.0; n]; ell_max];
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    for x in 0..n {
        cur.iter_mut().for_each(|v| *v = 0.0);
        cur[x] = 1.0;
        for row in diag.iter_mut() {
            for (y, out) in next.iter_mut().enumerate() {
                *out = rows_sparse[y].iter().map(|&(z, p)| p * cur[z]).sum();
            }
            std::mem::swap(&mut cur, &mut next);
            row[x] = cur[x];
        }
    }
    let rows = diag
        .iter()
        .enumerate()
        .map(|(i, values)| summarize(i + 1, values))
        .collect();
    ConstancyReport { rows }
}

fn summarize(ell: usize, values: &[f64]) -> ConstancyRow {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut best_value, mut best_count) = (sorted[0], 0usize);
    let mut start = 0;
    for i in 1..=n {
        if i == n || sorted[i] - sorted[start] > CONSTANCY_TOL {
            if i - start > best_count {
                best_count = i - start;
                best_value = sorted[start];
            }
            start = i;
        }
    }
    ConstancyRow {
        ell,
        constant: sorted[n - 1] - sorted[0] <= CONSTANCY_TOL,
        modal_value: best_value,
        modal_fraction: best_count as f64 / n as f64,
        nonzero_fraction: values.iter().filter(|&&v| v > 0.0).count() as f64 / n as f64,
    }
}

/// Exact closed-walk counts `A^ℓ(x,x)` for `ℓ = 0..=ell_max`, indexed
/// `[x][ℓ]`.
pub fn closed_walk_counts(graph: &RegularGraph, ell_max: usize) -> Vec<Vec<u128>> {
    let n = graph.n();
    let mut out = vec![vec![0u128; ell_max + 1]; n];
    let mut cur = vec![0u128; n];
    let mut next = vec![0u128; n];
    for x in 0..n {
        cur.iter_mut().for_each(|v| *v = 0);
        cur[x] = 1;
        out[x][0] = 1;
        for ell in 1..=ell_max {
            for (y, slot) in next.iter_mut().enumerate() {
                *slot = graph.neighbors(y).iter().map(|&z| cur[z]).sum();
            }
            std::mem::swap(&mut cur, &mut next);
            out[x][ell] = cur[x];
        }
    }
    out
}
