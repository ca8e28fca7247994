use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::regular::RegularGraph;
use crate::chain::lanczos::extremal_eigenvalues;

/// Graphs up to this size get a full dense eigensolve; larger graphs use
/// Lanczos on the sparse walk operator.
pub const DENSE_GAP_LIMIT: usize = 512;

/// Default threshold `g₀` for the realized gap.
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.02;

const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Dense,
    Lanczos,
}

/// Second-largest and smallest eigenvalue of `Q = A/k` and the realized gap
/// `g = min(1 - λ₂, 1 - |λ_min|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lambda2: f64,
    pub lambda_min: f64,
    pub g: f64,
    pub threshold: f64,
    pub passes: bool,
    pub connected: bool,
    pub method: GapMethod,
}

/// Spectral gap of the walk on `graph` against threshold `g0`.
///
/// A disconnected graph has `λ₂ = 1` and never passes.
pub fn gap_check(graph: &RegularGraph, g0: f64) -> GapReport {
    let connected = graph.is_connected();
    let n = graph.n();
    if graph.k() == 0 || n < 2 {
        return GapReport {
            lambda2: 1.0,
            lambda_min: 1.0,
            g: 0.0,
            threshold: g0,
            passes: false,
            connected,
            method: GapMethod::Dense,
        };
    }
    let lanczos = if n > DENSE_GAP_LIMIT {
        lanczos_extremes(graph, connected)
    } else {
        None
    };
    let (lambda2, lambda_min, method) = match lanczos {
        Some((l2, lmin)) => (l2, lmin, GapMethod::Lanczos),
        None => {
            let (l2, lmin) = dense_extremes(graph);
            (l2, lmin, GapMethod::Dense)
        }
    };
    let lambda2 = if connected { lambda2 } else { 1.0 };
    let g = (1.0 - lambda2).min(1.0 - lambda_min.abs());
    GapReport {
        lambda2,
        lambda_min,
        g,
        threshold: g0,
        passes: connected && g >= g0,
        connected,
        method,
    }
}

fn dense_extremes(graph: &RegularGraph) -> (f64, f64) {
    let n = graph.n();
    let inv_k = 1.0 / graph.k() as f64;
    let mut q = DMatrix::zeros(n, n);
    for x in 0..n {
        for &y in graph.neighbors(x) {
            q[(x, y)] = inv_k;
        }
    }
    let mut ev: Vec<f64> = q.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    (ev[1], ev[n - 1])
}

fn lanczos_extremes(graph: &RegularGraph, connected: bool) -> Option<(f64, f64)> {
    let n = graph.n();
    let inv_k = 1.0 / graph.k() as f64;
    let matvec = |x: &[f64], y: &mut [f64]| {
        for (v, out) in y.iter_mut().enumerate() {
            *out = graph.neighbors(v).iter().map(|&u| x[u]).sum::<f64>() * inv_k;
        }
    };
    if connected {
        let uniform = vec![1.0 / (n as f64).sqrt(); n];
        let ext = extremal_eigenvalues(n, matvec, Some(&uniform), LANCZOS_TOL).ok()?;
        Some((ext.max, ext.min))
    } else {
        let ext = extremal_eigenvalues(n, matvec, None, LANCZOS_TOL).ok()?;
        Some((1.0, ext.min))
    }
}
