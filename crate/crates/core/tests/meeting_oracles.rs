//! Cross-checks of the exact meeting-time solvers against independent
//! oracles: Poisson-series heat kernels integrated in time, brute-force
//! symmetry arguments, and closed forms on tori.

use meetlab::chain::{kernel_from_graph, TransitionKernel};
use meetlab::graph::{build_torus, sample_regular, RegularGraph};
use meetlab::mckay::tree_green_integral;
use meetlab::meeting::{
    laplace_meeting, mean_meeting, normalized_trace_transform, r_matrix, verify_green_identity,
    verify_place_equation, verify_resolvent_identity, verify_tree_gap, ExactAnalysis,
};
use meetlab::quadrature::adaptive;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn path(n: usize) -> TransitionKernel {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
                .into_iter()
                .flatten()
                .collect()
        })
        .collect();
    kernel_from_graph(&adj, false).unwrap()
}

fn cubic(n: usize, seed: u64) -> TransitionKernel {
    (0..)
        .map(|j| sample_regular(n, 3, seed + j).unwrap())
        .find(RegularGraph::is_connected)
        .unwrap()
        .kernel()
        .unwrap()
}

/// `e^{t(Q-1)}` by its Poisson series, independent of any eigensolver.
fn poisson_heat(q: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = q.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    let mut j = 1.0;
    loop {
        term = &term * q * (t / j);
        sum += &term;
        if term.amax() < 1e-18 && j > t {
            break;
        }
        j += 1.0;
    }
    sum * (-t).exp()
}

#[test]
fn r_matrix_matches_time_integral() {
    for (base, lambda) in [
        (RegularGraph::complete(4).unwrap().kernel().unwrap(), 1.0),
        (path(4), 0.7),
    ] {
        let r = r_matrix(&base, lambda).unwrap();
        let q = base.entries();
        let pi = base.pi();
        let horizon = 45.0 / lambda;
        for x in 0..base.n() {
            for y in 0..base.n() {
                let integrand = |t: f64| {
                    let qt = poisson_heat(q, t);
                    let qqt = q * &qt;
                    (-lambda * t).exp() * qt[(y, x)] * qqt[(y, x)]
                };
                let integral = adaptive(integrand, 0.0, horizon, 1e-11).unwrap();
                let oracle = 2.0 * pi[y] / pi[x] * integral;
                assert!(
                    (r.entries[(x, y)] - oracle).abs() <= 1e-7,
                    "({x},{y}): {} vs {oracle}",
                    r.entries[(x, y)]
                );
            }
        }
    }
}

#[test]
fn r_matrix_symmetry_sign_and_damping() {
    let base = cubic(30, 30);
    let r = r_matrix(&base, 1.0).unwrap();
    assert!(r.asymmetry() <= 1e-9);
    assert!(r.min_entry() >= -1e-12);
    let far = r_matrix(&base, 1e6).unwrap();
    assert!(far.entries.amax() <= 3.0 / 1e6);
}

#[test]
fn green_identity_on_random_graphs_and_torus() {
    let base = cubic(50, 50);
    for lambda in [0.1, 1.0, 10.0] {
        assert!(verify_green_identity(&base, lambda).unwrap() <= 1e-9);
    }
    let torus = build_torus(3, 4).unwrap().kernel().unwrap();
    assert!(verify_green_identity(&torus, 0.5).unwrap() <= 1e-9);
    assert!(
        verify_green_identity(&RegularGraph::complete(4).unwrap().kernel().unwrap(), 1.0).unwrap()
            <= 1e-10
    );
}

#[test]
fn restricted_identity_over_seeds() {
    for seed in 0..10 {
        let analysis = ExactAnalysis::new(&cubic(64, 640 + 10 * seed)).unwrap();
        for lambda0 in [0.2, 2.0] {
            let sol = analysis.laplace(lambda0).unwrap();
            assert!(analysis.resolvent_identity(&sol).unwrap() <= 1e-9);
        }
    }
    assert!(
        verify_resolvent_identity(&RegularGraph::complete(4).unwrap().kernel().unwrap(), 1.0)
            .unwrap()
            <= 1e-10
    );
}

#[test]
fn linear_equation_on_random_cubic() {
    let base = cubic(40, 400);
    for lambda in [0.1, 1.0, 10.0] {
        let check = verify_place_equation(&base, lambda).unwrap();
        assert!(check.equation_residual <= 1e-8, "{check:?}");
        assert!(check.domination_ok);
        assert!(check.max_domination_ratio <= 1.0 + 1e-9);
    }
    let k4 =
        verify_place_equation(&RegularGraph::complete(4).unwrap().kernel().unwrap(), 1.0).unwrap();
    assert!(k4.equation_residual <= 1e-9 && k4.domination_ok);
}

#[test]
fn trace_formula_on_larger_torus() {
    let base = build_torus(3, 5).unwrap().kernel().unwrap();
    for lambda in [0.1, 1.0, 10.0] {
        let exact = laplace_meeting(&base, lambda).unwrap().laplace.unwrap();
        assert!((normalized_trace_transform(&base, lambda).unwrap() - exact).abs() <= 1e-8);
    }
    let k4 = RegularGraph::complete(4).unwrap().kernel().unwrap();
    let exact = laplace_meeting(&k4, 0.5).unwrap().laplace.unwrap();
    assert!((normalized_trace_transform(&k4, 0.5).unwrap() - exact).abs() <= 1e-10);
}

#[test]
fn transitive_mean_depends_only_on_displacement() {
    let torus = build_torus(2, 5).unwrap();
    let m = mean_meeting(&torus.kernel().unwrap())
        .unwrap()
        .mean_matrix
        .unwrap();
    // vertex (i, j) has index 5 i + j in the torus construction
    let idx = |i: usize, j: usize| 5 * (i % 5) + j % 5;
    for a in 0..25 {
        assert_eq!(m[(a, a)], 0.0);
    }
    for (dx, dy) in [(0, 1), (1, 1), (2, 1), (2, 2)] {
        let reference = m[(idx(0, 0), idx(dx, dy))];
        for i in 0..5 {
            for j in 0..5 {
                assert!((m[(idx(i, j), idx(i + dx, j + dy))] - reference).abs() < 1e-9);
            }
        }
    }
    let mean = mean_meeting(&torus.kernel().unwrap())
        .unwrap()
        .mean
        .unwrap();
    assert!(mean > 0.0);
}

#[test]
fn tree_gap_on_torus_matches_closed_form() {
    // on a torus the diagonal of the restricted Green function is constant, so
    // the gap reduces to laplace · |g - tree| with both factors spectral
    for m in [4usize, 6] {
        let base = build_torus(3, m).unwrap().kernel().unwrap();
        let n = base.n() as f64;
        let s = 1.0 / n;
        let analysis = ExactAnalysis::new(&base).unwrap();
        let trace: f64 = analysis
            .spectrum()
            .eigenvalues()
            .iter()
            .map(|q| 1.0 / (s + 2.0 - 2.0 * q))
            .sum();
        let laplace = 1.0 / (s * trace);
        let g = (trace - 1.0 / s) / n;
        let tree = tree_green_integral(6, s).unwrap();
        let closed = laplace * (g - tree).abs();
        let check = analysis.tree_gap(1.0).unwrap();
        assert!(
            (check.delta - closed).abs() < 1e-9,
            "m {m}: {} vs {closed}",
            check.delta
        );
        assert!((verify_tree_gap(&base, 1.0, tree).unwrap() - closed).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn place_transform_sums_to_laplace(seed in 0u64..10_000, lambda in 0.01f64..20.0) {
        let base = cubic(14, seed);
        let sol = laplace_meeting(&base, lambda).unwrap();
        let laplace = sol.laplace.unwrap();
        prop_assert!(laplace > 0.0 && laplace < 1.0);
        prop_assert!((sol.place_transform.unwrap().sum() - laplace).abs() <= 1e-10);
        let bigger = laplace_meeting(&base, lambda * 1.5).unwrap().laplace.unwrap();
        prop_assert!(bigger < laplace);
    }

    #[test]
    fn identities_hold_on_random_reversible_chains(
        weights in proptest::collection::vec(0.1f64..5.0, 6),
        lambda in 0.05f64..10.0,
    ) {
        // weighted 4-cycle with a chord: reversible, non-uniform, zero diagonal
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)];
        let mut w = DMatrix::zeros(4, 4);
        for (&(a, b), &c) in edges.iter().zip(&weights) {
            w[(a, b)] = c;
            w[(b, a)] = c;
        }
        let degree: Vec<f64> = (0..4).map(|a| w.row(a).sum()).collect();
        let total: f64 = degree.iter().sum();
        let q = DMatrix::from_fn(4, 4, |a, b| w[(a, b)] / degree[a]);
        let pi = nalgebra::DVector::from_iterator(4, degree.iter().map(|d| d / total));
        let base = TransitionKernel::new(q, pi).unwrap();
        prop_assert!(verify_green_identity(&base, lambda).unwrap() <= 1e-9);
        let check = verify_place_equation(&base, lambda).unwrap();
        prop_assert!(check.equation_residual <= 1e-8);
        prop_assert!(check.domination_ok);
    }
}
