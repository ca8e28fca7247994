use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;
const REVERSIBILITY_TOL: f64 = 1e-12;

/// Irreducible, reversible, zero-trace transition matrix with its stationary
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    entries: DMatrix<f64>,
    pi: DVector<f64>,
}

impl TransitionKernel {
    /// Validate `entries` against the stationary law `pi`.
    pub fn new(entries: DMatrix<f64>, pi: DVector<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n < 2 || entries.ncols() != n {
            return Err(Error::invalid(format!(
                "kernel must be square with at least 2 states, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if pi.len() != n {
            return Err(Error::invalid(format!(
                "stationary vector has length {}, expected {n}",
                pi.len()
            )));
        }
        for x in 0..n {
            if entries[(x, x)] != 0.0 {
                return Err(Error::invalid(format!(
                    "kernel must have zero trace, Q({x},{x}) = {}",
                    entries[(x, x)]
                )));
            }
            let mut row = 0.0;
            for y in 0..n {
                let p = entries[(x, y)];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!(
                        "Q({x},{y}) = {p} is not a probability"
                    )));
                }
                row += p;
            }
            if (row - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(format!("row {x} sums to {row}")));
            }
        }
        if pi.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::invalid("stationary law must be strictly positive"));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::invalid(format!("stationary law sums to {total}")));
        }
        for x in 0..n {
            for y in (x + 1)..n {
                let flow = pi[x] * entries[(x, y)] - pi[y] * entries[(y, x)];
                if flow.abs() > REVERSIBILITY_TOL {
                    return Err(Error::invalid(format!(
                        "detailed balance fails at ({x},{y}) by {flow:e}"
                    )));
                }
            }
        }
        let kernel = Self { entries, pi };
        let reached = kernel.reachable_from(0);
        if reached < n {
            return Err(Error::Irreducible(format!(
                "only {reached} of {n} states reachable from state 0"
            )));
        }
        Ok(kernel)
    }

    /// Build a kernel from its matrix alone, deriving `π` from detailed balance
    /// along a breadth-first spanning tree of the support.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n < 2 || entries.ncols() != n {
            return Err(Error::invalid(
                "kernel must be square with at least 2 states",
            ));
        }
        let mut weight = vec![0.0; n];
        weight[0] = 1.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if entries[(x, y)] > 0.0 && weight[y] == 0.0 && y != x {
                    if !(entries[(y, x)] > 0.0) {
                        return Err(Error::invalid(format!(
                            "Q({x},{y}) > 0 but Q({y},{x}) = 0, kernel is not reversible"
                        )));
                    }
                    weight[y] = weight[x] * entries[(x, y)] / entries[(y, x)];
                    queue.push_back(y);
                }
            }
        }
        if let Some(missing) = weight.iter().position(|&w| w == 0.0) {
            return Err(Error::Irreducible(format!(
                "state {missing} unreachable from state 0"
            )));
        }
        let total: f64 = weight.iter().sum();
        let pi = DVector::from_iterator(n, weight.into_iter().map(|w| w / total));
        Self::new(entries, pi)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn pi(&self) -> &DVector<f64> {
        &self.pi
    }

    /// True when `π` is uniform, equivalently when `Q` is symmetric.
    pub fn has_uniform_pi(&self) -> bool {
        let target = 1.0 / self.n() as f64;
        self.pi.iter().all(|&p| (p - target).abs() <= 1e-14)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|x| (0..x).all(|y| (self.entries[(x, y)] - self.entries[(y, x)]).abs() <= tol))
    }

    /// Nonzero entries of each row as `(column, probability)` pairs.
    pub fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let n = self.n();
        (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| self.entries[(x, y)] > 0.0)
                    .map(|y| (y, self.entries[(x, y)]))
                    .collect()
            })
            .collect()
    }

    /// `Σ_z π(z)²`.
    pub fn pi_square_sum(&self) -> f64 {
        self.pi.iter().map(|p| p * p).sum()
    }

    fn reachable_from(&self, start: usize) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if !seen[y] && self.entries[(x, y)] > 0.0 {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }
}

/// Simple random walk on an undirected simple graph given by neighbor lists.
///
/// `Q(x,y) = 1/deg(x)` on edges and `π(x) ∝ deg(x)`; with `regular` set the
/// graph must be regular and `π` is exactly uniform.
pub fn kernel_from_graph(adjacency: &[Vec<usize>], regular: bool) -> Result<TransitionKernel> {
    let n = adjacency.len();
    if n < 2 {
        return Err(Error::invalid("graph walk needs at least 2 vertices"));
    }
    let mut entries = DMatrix::zeros(n, n);
    for (x, nbrs) in adjacency.iter().enumerate() {
        for &y in nbrs {
            if y >= n {
                return Err(Error::invalid(format!("neighbor {y} of {x} out of range")));
            }
            if y == x {
                return Err(Error::invalid(format!("self-loop at vertex {x}")));
            }
            if entries[(x, y)] != 0.0 {
                return Err(Error::invalid(format!("multi-edge between {x} and {y}")));
            }
            entries[(x, y)] = 1.0;
        }
    }
    for x in 0..n {
        for y in 0..x {
            if entries[(x, y)] != entries[(y, x)] {
                return Err(Error::invalid(format!(
                    "adjacency not symmetric at ({x},{y})"
                )));
            }
        }
    }
    let degrees: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    if let Some(x) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::Irreducible(format!("vertex {x} is isolated")));
    }
    if regular && degrees.iter().any(|&d| d != degrees[0]) {
        return Err(Error::invalid("graph flagged regular but degrees differ"));
    }
    for x in 0..n {
        let d = degrees[x] as f64;
        for y in 0..n {
            entries[(x, y)] /= d;
        }
    }
    let pi = if regular {
        DVector::from_element(n, 1.0 / n as f64)
    } else {
        let total: usize = degrees.iter().sum();
        DVector::from_iterator(n, degrees.iter().map(|&d| d as f64 / total as f64))
    };
    TransitionKernel::new(entries, pi)
}

/// `S(x,y) = π(x)^{1/2} Q(x,y) π(y)^{-1/2}`.
pub fn symmetrize(kernel: &TransitionKernel) -> DMatrix<f64> {
    let n = kernel.n();
    let sqrt_pi: Vec<f64> = kernel.pi().iter().map(|p| p.sqrt()).collect();
    DMatrix::from_fn(n, n, |x, y| {
        sqrt_pi[x] * kernel.entries()[(x, y)] / sqrt_pi[y]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn complete(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|x| (0..n).filter(|&y| y != x).collect())
            .collect()
    }

    fn path(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|x| {
                let mut v = Vec::new();
                if x > 0 {
                    v.push(x - 1);
                }
                if x + 1 < n {
                    v.push(x + 1);
                }
                v
            })
            .collect()
    }

    #[test]
    fn complete_graph_kernel() {
        let q = kernel_from_graph(&complete(4), true).unwrap();
        for x in 0..4 {
            assert_eq!(q.pi()[x], 0.25);
            for y in 0..4 {
                let expected = if x == y { 0.0 } else { 1.0 / 3.0 };
                assert_eq!(q.entries()[(x, y)], expected);
            }
        }
    }

    #[test]
    fn path_stationary_law_is_degree_proportional() {
        let q = kernel_from_graph(&path(3), false).unwrap();
        let expected = [0.25, 0.5, 0.25];
        for x in 0..3 {
            assert_abs_diff_eq!(q.pi()[x], expected[x], epsilon = 1e-15);
        }
        // oracle: π Q = π
        let pq = q.pi().transpose() * q.entries();
        for x in 0..3 {
            assert_abs_diff_eq!(pq[x], q.pi()[x], epsilon = 1e-15);
        }
    }

    #[test]
    fn from_matrix_recovers_pi() {
        let q = kernel_from_graph(&path(5), false).unwrap();
        let again = TransitionKernel::from_matrix(q.entries().clone()).unwrap();
        assert_abs_diff_eq!(again.pi(), q.pi(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_graphs() {
        let two_triangles = vec![
            vec![1, 2],
            vec![0, 2],
            vec![0, 1],
            vec![4, 5],
            vec![3, 5],
            vec![3, 4],
        ];
        assert!(matches!(
            kernel_from_graph(&two_triangles, true),
            Err(Error::Irreducible(_))
        ));
        let looped = vec![vec![0, 1], vec![0]];
        assert!(matches!(
            kernel_from_graph(&looped, false),
            Err(Error::InvalidInput(_))
        ));
        let multi = vec![vec![1, 1], vec![0, 0]];
        assert!(matches!(
            kernel_from_graph(&multi, false),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            kernel_from_graph(&path(3), true),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rejects_holding_and_irreversible_kernels() {
        let lazy = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(TransitionKernel::from_matrix(lazy).is_err());
        // cyclic drift on 3 states: stochastic, zero trace, not reversible
        let drift = DMatrix::from_row_slice(3, 3, &[0.0, 0.9, 0.1, 0.1, 0.0, 0.9, 0.9, 0.1, 0.0]);
        let uniform = DVector::from_element(3, 1.0 / 3.0);
        assert!(TransitionKernel::new(drift, uniform).is_err());
    }

    #[test]
    fn symmetrize_regular_is_identity_map() {
        let q = kernel_from_graph(&complete(5), true).unwrap();
        assert_eq!(symmetrize(&q), *q.entries());
    }

    #[test]
    fn symmetrize_path() {
        let q = kernel_from_graph(&path(3), false).unwrap();
        let s = symmetrize(&q);
        assert_abs_diff_eq!(s[(0, 1)], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[(1, 0)], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s, s.transpose(), epsilon = 1e-12);
    }
}
