//! Kesten–McKay law and return probabilities of the walk on the infinite
//! k-regular tree.
//!
//! `Q∞^ℓ` denotes the probability that simple random walk on the k-regular
//! tree is back at its root after ℓ steps. It is computed both by exact
//! counting on the distance chain and by quadrature against the Kesten–McKay
//! density, and the two are checked against each other in tests.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive;

/// Largest moment order accepted by the moment routines.
pub const MAX_MOMENT_ORDER: usize = 60;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentMethod {
    #[serde(rename = "tree-dp")]
    TreeDp,
    #[serde(rename = "quadrature")]
    Quadrature,
}

impl MomentMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentMethod::TreeDp => "tree-dp",
            MomentMethod::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeMoments {
    pub k: usize,
    /// `Q∞^ℓ` for `ℓ = 0..=L`.
    pub moments: Vec<f64>,
    pub method: MomentMethod,
}

/// `2√(k-1)`, the edge of the Kesten–McKay support.
pub fn spectral_edge(k: usize) -> f64 {
    2.0 * ((k as f64) - 1.0).sqrt()
}

/// `2√(k-1)/k`, the decay rate of `Q∞^ℓ`.
pub fn decay_rate(k: usize) -> f64 {
    spectral_edge(k) / k as f64
}

/// Kesten–McKay density of the adjacency spectrum, supported on
/// `|q| < 2√(k-1)`. Returns 0 outside the support and for `k < 2`.
pub fn density(k: usize, q: f64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let kf = k as f64;
    if q.abs() >= spectral_edge(k) {
        return 0.0;
    }
    kf * (4.0 * (kf - 1.0) - q * q).sqrt() / (2.0 * PI * (kf * kf - q * q))
}

fn check_degree(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::invalid(format!(
            "degree must be at least 3, got {k}"
        )));
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_MOMENT_ORDER {
        return Err(Error::Budget(format!(
            "moment order {order} exceeds the limit of {MAX_MOMENT_ORDER}"
        )));
    }
    Ok(())
}

/// `∫ g(q/k) μ_k(dq)` after the substitution `q = 2√(k-1) sin θ`, which turns
/// the square-root edges into a smooth periodic integrand.
pub fn integrate_against_density<G: Fn(f64) -> f64>(k: usize, g: G) -> Result<f64> {
    check_degree(k)?;
    let kf = k as f64;
    let r = spectral_edge(k);
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let q = r * s;
        g(q / kf) * kf * r * r * c * c / (2.0 * PI * (kf * kf - q * q))
    };
    adaptive(integrand, -FRAC_PI_2, FRAC_PI_2, QUAD_TOL)
}

/// `Q∞^ℓ = k^{-ℓ} ∫ q^ℓ μ_k(dq)` by quadrature.
pub fn moments_quadrature(k: usize, order: usize) -> Result<TreeMoments> {
    check_degree(k)?;
    check_order(order)?;
    let moments = (0..=order)
        .map(|ell| integrate_against_density(k, |x| x.powi(ell as i32)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeMoments {
        k,
        moments,
        method: MomentMethod::Quadrature,
    })
}

/// Exact numbers of closed walks from the root of the distance chain where the
/// root has `root_out` outward moves and every other level has `out` outward
/// moves and one inward move.
fn distance_chain_counts(root_out: u128, out: u128, order: usize) -> Result<Vec<u128>> {
    let overflow = || {
        Error::Budget(format!(
            "closed walk count overflows 128 bits at order {order}"
        ))
    };
    let mut level = vec![0u128; order + 2];
    level[0] = 1;
    let mut counts = Vec::with_capacity(order + 1);
    counts.push(1);
    for step in 0..order {
        let mut next = vec![0u128; order + 2];
        // levels that cannot get back to the root in time are dropped
        for d in 0..=(order - step) {
            let c = level[d];
            if c == 0 {
                continue;
            }
            let w = if d == 0 { root_out } else { out };
            next[d + 1] = c
                .checked_mul(w)
                .and_then(|v| v.checked_add(next[d + 1]))
                .ok_or_else(overflow)?;
            if d > 0 {
                next[d - 1] = next[d - 1].checked_add(c).ok_or_else(overflow)?;
            }
        }
        level = next;
        counts.push(level[0]);
    }
    Ok(counts)
}

/// Number `a_ℓ` of closed ℓ-step walks from the root of the k-regular tree,
/// for `ℓ = 0..=order`.
pub fn tree_closed_walks(k: usize, order: usize) -> Result<Vec<u128>> {
    check_degree(k)?;
    check_order(order)?;
    distance_chain_counts(k as u128, k as u128 - 1, order)
}

/// `Q∞^ℓ = a_ℓ / k^ℓ` from exact integer counts.
pub fn moments_tree_dp(k: usize, order: usize) -> Result<TreeMoments> {
    let counts = tree_closed_walks(k, order)?;
    let kf = k as f64;
    let moments = counts
        .iter()
        .enumerate()
        .map(|(ell, &a)| a as f64 / kf.powi(ell as i32))
        .collect();
    Ok(TreeMoments {
        k,
        moments,
        method: MomentMethod::TreeDp,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventSum {
    pub k: usize,
    /// `(k-1)/(k-2)`.
    pub exact: f64,
    /// `Σ_{ℓ≤L} Q∞^ℓ` for `L = 0..=order`.
    pub partial: Vec<f64>,
}

impl ResolventSum {
    /// `Σ_{ℓ>L} ρ^ℓ` with `ρ = 2√(k-1)/k`, an upper bound on the tail.
    pub fn tail_bound(&self, order: usize) -> f64 {
        let rho = decay_rate(self.k);
        rho.powi(order as i32 + 1) / (1.0 - rho)
    }
}

/// `Σ_ℓ Q∞^ℓ = (k-1)/(k-2)` together with partial sums up to `order`.
pub fn resolvent_sum(k: usize, order: usize) -> Result<ResolventSum> {
    if k == 2 {
        return Err(Error::Divergence(
            "the return-probability series diverges for k = 2".into(),
        ));
    }
    let moments = moments_tree_dp(k, order)?;
    let mut acc = 0.0;
    let partial = moments
        .moments
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect();
    let kf = k as f64;
    Ok(ResolventSum {
        k,
        exact: (kf - 1.0) / (kf - 2.0),
        partial,
    })
}

/// `½ (k-1)/(k-2)`, the limit of `E[M]/N` on random k-regular graphs.
pub fn limit_mean(k: usize) -> Result<f64> {
    check_degree(k)?;
    let kf = k as f64;
    Ok(0.5 * (kf - 1.0) / (kf - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeSeries {
    pub value: f64,
    /// Number of terms summed.
    pub terms: usize,
    /// Bound on the omitted tail.
    pub tail_bound: f64,
}

/// `Σ_ℓ 2^ℓ Q∞^ℓ / (s+2)^{ℓ+1}`, the tree analogue of the diagonal Green
/// function at `s`, truncated once the geometric tail bound drops below `tol`.
///
/// Uses a floating-point probability recursion on the distance chain, so the
/// order is not limited by integer width.
pub fn tree_green_series(k: usize, s: f64, tol: f64) -> Result<TreeSeries> {
    check_degree(k)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!(
            "s must be finite and >= 0, got {s}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let rho = decay_rate(k);
    // each term is at most ρ^ℓ/2
    let tail = |order: usize| rho.powi(order as i32 + 1) / (2.0 * (1.0 - rho));
    let mut order = 0;
    while tail(order) > tol {
        order += 1;
        if order > 100_000 {
            return Err(Error::Budget("tree series needs too many terms".into()));
        }
    }
    let kf = k as f64;
    let out = (kf - 1.0) / kf;
    let back = 1.0 / kf;
    let ratio = 2.0 / (s + 2.0);
    let mut level = vec![0.0; order + 2];
    level[0] = 1.0;
    let mut weight = 1.0 / (s + 2.0);
    let mut value = weight;
    for ell in 1..=order {
        let mut next = vec![0.0; order + 2];
        // probability mass at distance d after ell - 1 steps is zero for d > ell - 1
        for d in 0..ell.min(order + 1) {
            let p = level[d];
            if p == 0.0 {
                continue;
            }
            if d == 0 {
                next[1] += p;
            } else {
                next[d + 1] += p * out;
                next[d - 1] += p * back;
            }
        }
        level = next;
        weight *= ratio;
        value += weight * level[0];
    }
    Ok(TreeSeries {
        value,
        terms: order + 1,
        tail_bound: tail(order),
    })
}

/// `∫ 1/(s+2-2q/k) μ_k(dq)` by quadrature; the closed form of the tree series.
pub fn tree_green_integral(k: usize, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!(
            "s must be finite and >= 0, got {s}"
        )));
    }
    integrate_against_density(k, |x| 1.0 / (s + 2.0 - 2.0 * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn density_values() {
        assert_abs_diff_eq!(density(3, 0.0), 8f64.sqrt() / (6.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(density(3, 0.0), 0.15005, epsilon = 1e-5);
        for k in 3..7 {
            assert_eq!(density(k, spectral_edge(k)), 0.0);
            assert_eq!(density(k, -spectral_edge(k)), 0.0);
            let mass = integrate_against_density(k, |_| 1.0).unwrap();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn hand_counts() {
        for k in 3..7u128 {
            let a = tree_closed_walks(k as usize, 6).unwrap();
            assert_eq!(a[0], 1);
            assert_eq!(a[2], k);
            assert_eq!(a[4], k * (2 * k - 1));
            assert!(a.iter().skip(1).step_by(2).all(|&c| c == 0));
        }
        let q = moments_tree_dp(3, 4).unwrap().moments;
        assert_abs_diff_eq!(q[2], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q[4], 5.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn catalan_degeneration() {
        let catalan = |m: u128| -> u128 {
            let mut c = 1u128;
            for i in 0..m {
                c = c * 2 * (2 * i + 1) / (i + 2);
            }
            c
        };
        for w in 2..6u128 {
            let counts = distance_chain_counts(w, w, 40).unwrap();
            for m in 0..=20u128 {
                assert_eq!(
                    counts[2 * m as usize],
                    w.pow(m as u32) * catalan(m),
                    "w {w} m {m}"
                );
            }
        }
    }

    #[test]
    fn dual_oracle_agreement() {
        for k in 3..=6 {
            let dp = moments_tree_dp(k, 40).unwrap();
            let quad = moments_quadrature(k, 40).unwrap();
            assert_eq!(quad.method, MomentMethod::Quadrature);
            for (ell, (a, b)) in dp.moments.iter().zip(&quad.moments).enumerate() {
                assert!((a - b).abs() <= 1e-8, "k {k} ell {ell}: {a} vs {b}");
            }
            assert_abs_diff_eq!(quad.moments[0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(quad.moments[1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn order_limit_and_width() {
        // 6^60 needs 156 bits but a_60 for k = 6 stays within 128
        assert!(moments_tree_dp(6, 60).is_ok());
        assert!(matches!(moments_tree_dp(3, 61), Err(Error::Budget(_))));
        assert!(matches!(moments_quadrature(3, 61), Err(Error::Budget(_))));
        assert!(moments_tree_dp(2, 4).is_err());
    }

    #[test]
    fn growth_bound() {
        for k in 3..=6 {
            let rho = decay_rate(k);
            for (ell, q) in moments_tree_dp(k, 60).unwrap().moments.iter().enumerate() {
                assert!(*q >= 0.0 && *q <= rho.powi(ell as i32) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn resolvent_values() {
        for (k, exact) in [(3, 2.0), (4, 1.5), (5, 4.0 / 3.0)] {
            let r = resolvent_sum(k, 60).unwrap();
            assert_abs_diff_eq!(r.exact, exact, epsilon = 1e-15);
            for w in r.partial.windows(2) {
                assert!(w[1] >= w[0] && w[1] <= exact);
            }
            for (order, p) in r.partial.iter().enumerate() {
                assert!(*p <= exact && p + r.tail_bound(order) >= exact);
            }
        }
        assert!(matches!(resolvent_sum(2, 10), Err(Error::Divergence(_))));
    }

    #[test]
    fn limit_means() {
        assert_abs_diff_eq!(limit_mean(3).unwrap(), 1.0);
        assert_abs_diff_eq!(limit_mean(4).unwrap(), 0.75);
        assert_abs_diff_eq!(limit_mean(1000).unwrap(), 0.5 * 999.0 / 998.0);
        assert!(limit_mean(2).is_err());
    }

    #[test]
    fn tree_series_matches_integral() {
        for k in 3..=6 {
            for s in [0.0, 1.0 / 128.0, 0.1, 1.0] {
                let series = tree_green_series(k, s, 1e-11).unwrap();
                let integral = tree_green_integral(k, s).unwrap();
                assert!(series.tail_bound <= 1e-11);
                assert!((series.value - integral).abs() <= 2e-11, "k {k} s {s}");
            }
            // at s = 0 the series is half the resolvent sum
            let at_zero = tree_green_series(k, 0.0, 1e-12).unwrap().value;
            assert_abs_diff_eq!(at_zero, limit_mean(k).unwrap(), epsilon = 1e-11);
        }
    }
}
