//! Gauss–Legendre panels with adaptive bisection.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration to absolute tolerance `tol` with 20-point panels.
///
/// Global error control: the panel with the largest error estimate is bisected
/// until the summed estimate drops below `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 200_000;
    let rule = GaussLegendre::new(20);
    let panel = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        let whole = rule.integrate(&f, lo, hi);
        let halves = rule.integrate(&f, lo, mid) + rule.integrate(&f, mid, hi);
        Panel {
            lo,
            hi,
            value: halves,
            err: (halves - whole).abs(),
        }
    };
    let mut heap = BinaryHeap::from([panel(a, b)]);
    let mut total_err = heap.peek().map_or(0.0, |p| p.err);
    while total_err > tol {
        if heap.len() >= MAX_PANELS {
            return Err(Error::NumericalFailure {
                what: "adaptive quadrature",
                iterations: heap.len(),
                residual: total_err,
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        let (left, right) = (panel(worst.lo, mid), panel(mid, worst.hi));
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        // resum now and then so round-off in the running total cannot stall us
        if heap.len() % 1024 == 0 {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials_exactly() {
        for order in [1, 2, 5, 20] {
            let rule = GaussLegendre::new(order);
            assert_abs_diff_eq!(rule.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            let deg = 2 * order - 1;
            // odd powers vanish
            assert_abs_diff_eq!(
                rule.integrate(&|x: f64| x.powi(deg as i32), -1.0, 1.0),
                0.0,
                epsilon = 1e-14
            );
            let even = 2 * order - 2;
            assert_abs_diff_eq!(
                rule.integrate(&|x: f64| x.powi(even as i32), -1.0, 1.0),
                2.0 / (even as f64 + 1.0),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn adaptive_handles_sqrt_edge() {
        // ∫_0^1 sqrt(x) dx = 2/3
        let v = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-11);
        let v = adaptive(|x: f64| (-x).exp(), 0.0, 50.0, 1e-13).unwrap();
        assert_abs_diff_eq!(v, 1.0 - (-50f64).exp(), epsilon = 1e-12);
    }
}
