use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{kernel_from_graph, TransitionKernel};
use crate::error::{Error, Result};

/// Pairing attempts before [`sample_regular`] gives up.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1_000_000;

/// Simple `k`-regular graph with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularGraph {
    n: usize,
    k: usize,
    adjacency: Vec<Vec<usize>>,
    seed: Option<u64>,
    id: String,
}

impl RegularGraph {
    /// Validate neighbor lists: every vertex has the same degree, no loops,
    /// no repeated neighbors, symmetric adjacency.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>, id: impl Into<String>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::invalid("graph has no vertices"));
        }
        let k = adjacency[0].len();
        for (x, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.len() != k {
                return Err(Error::invalid(format!(
                    "vertex {x} has degree {}, expected {k}",
                    nbrs.len()
                )));
            }
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("repeated neighbor at vertex {x}")));
            }
            if let Some(&y) = nbrs.iter().find(|&&y| y == x || y >= n) {
                return Err(Error::invalid(format!(
                    "invalid neighbor {y} of vertex {x}"
                )));
            }
        }
        for x in 0..n {
            for &y in &adjacency[x] {
                if adjacency[y].binary_search(&x).is_err() {
                    return Err(Error::invalid(format!("edge {x}-{y} is not symmetric")));
                }
            }
        }
        Ok(Self {
            n,
            k,
            adjacency,
            seed: None,
            id: id.into(),
        })
    }

    /// Build from an undirected edge list on `n` vertices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], id: impl Into<String>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge {u}-{v} out of range for {n} vertices"
                )));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Self::from_adjacency(adjacency, id)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let adjacency = (0..n)
            .map(|x| (0..n).filter(|&y| y != x).collect())
            .collect();
        Self::from_adjacency(adjacency, format!("complete-{n}"))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("cycle needs at least 3 vertices"));
        }
        let adjacency = (0..n).map(|x| vec![(x + n - 1) % n, (x + 1) % n]).collect();
        Self::from_adjacency(adjacency, format!("cycle-{n}"))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut sizes = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut size = 0;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for &y in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.component_sizes().len() == 1
    }

    /// Walk kernel `Q = A/k` with uniform stationary law.
    pub fn kernel(&self) -> Result<TransitionKernel> {
        kernel_from_graph(&self.adjacency, true)
    }
}

/// Uniform random simple `k`-regular graph on `n` vertices.
pub fn sample_regular(n: usize, k: usize, seed: u64) -> Result<RegularGraph> {
    sample_regular_with_budget(n, k, seed, DEFAULT_MAX_ATTEMPTS)
}

/// Pairing model with rejection: stubs are matched uniformly at random and
/// the whole matching is redrawn whenever it creates a loop or multi-edge.
/// Conditioned on acceptance the result is uniform over simple graphs.
pub fn sample_regular_with_budget(
    n: usize,
    k: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<RegularGraph> {
    if k < 3 {
        return Err(Error::invalid(format!(
            "degree must be at least 3, got {k}"
        )));
    }
    if k + 1 > n {
        return Err(Error::invalid(format!(
            "need k <= n - 1, got k = {k}, n = {n}"
        )));
    }
    if (k * n) % 2 != 0 {
        return Err(Error::invalid(format!(
            "k*n must be even, got k = {k}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|x| std::iter::repeat_n(x, k)).collect();
    let m = stubs.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::with_capacity(k); n];

    for _ in 0..max_attempts {
        adjacency.iter_mut().for_each(Vec::clear);
        let mut simple = true;
        // partial Fisher–Yates: draw the matching pair by pair and stop at the
        // first conflict
        for i in (0..m).step_by(2) {
            let j = rng.random_range(i..m);
            stubs.swap(i, j);
            let j = rng.random_range(i + 1..m);
            stubs.swap(i + 1, j);
            let (u, v) = (stubs[i], stubs[i + 1]);
            if u == v || adjacency[u].contains(&v) {
                simple = false;
                break;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        if simple {
            let graph = RegularGraph::from_adjacency(adjacency, format!("rrg-k{k}-n{n}-s{seed}"))?;
            return Ok(graph.with_seed(seed));
        }
    }
    Err(Error::SamplingFailure {
        attempts: max_attempts,
    })
}

/// Nearest-neighbor torus `Z_m^d`, `2d`-regular on `m^d` vertices.
pub fn build_torus(d: usize, m: usize) -> Result<RegularGraph> {
    if d == 0 {
        return Err(Error::invalid("torus dimension must be at least 1"));
    }
    if m < 3 {
        return Err(Error::invalid(format!(
            "torus side must be at least 3, got {m}"
        )));
    }
    let n = m
        .checked_pow(d as u32)
        .ok_or_else(|| Error::invalid("torus too large"))?;
    let adjacency = (0..n)
        .map(|x| {
            let mut nbrs = Vec::with_capacity(2 * d);
            let mut stride = 1;
            for _ in 0..d {
                let coord = (x / stride) % m;
                let base = x - coord * stride;
                nbrs.push(base + ((coord + 1) % m) * stride);
                nbrs.push(base + ((coord + m - 1) % m) * stride);
                stride *= m;
            }
            nbrs
        })
        .collect();
    RegularGraph::from_adjacency(adjacency, format!("torus-d{d}-m{m}"))
}
