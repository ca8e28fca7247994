//! Statistical and structural checks of the random regular graph sampler.

use std::collections::HashSet;
use std::f64::consts::PI;

use meetlab::chain::eigendecompose;
use meetlab::graph::{
    build_torus, closed_walk_counts, constancy_check, count_cycles, gap_check, sample_regular,
    GapMethod,
};

#[test]
fn sampled_graphs_are_simple_and_regular() {
    let grid = [(10usize, 3usize), (12, 4), (20, 5), (30, 3), (16, 6)];
    for (i, &(n, k)) in grid.iter().cycle().take(1000).enumerate() {
        let g = sample_regular(n, k, i as u64).unwrap();
        let mut seen = HashSet::new();
        for x in 0..n {
            let nb = g.neighbors(x);
            assert_eq!(nb.len(), k);
            for &y in nb {
                assert_ne!(x, y);
                assert!(g.neighbors(y).contains(&x));
                assert!(seen.insert((x, y)), "multi-edge {x}-{y}");
            }
        }
    }
}

#[test]
fn second_eigenvalue_near_ramanujan_bound() {
    let bound = 2.0 * 2f64.sqrt() / 3.0 + 0.03;
    let mut within = 0;
    for seed in 0..100 {
        let g = sample_regular(2000, 3, 20_000 + seed).unwrap();
        let report = gap_check(&g, 0.02);
        assert_eq!(report.method, GapMethod::Lanczos);
        if report.lambda2 <= bound {
            within += 1;
        }
    }
    assert!(within >= 95, "{within} of 100 within the bound");
}

#[test]
fn triangle_vertices_and_closed_walks() {
    let mut total_fraction = 0.0;
    let mut total_bound = 0.0;
    for seed in 0..20 {
        let g = sample_regular(1000, 3, 300 + seed).unwrap();
        let triangles = count_cycles(&g, 3).unwrap().count(3);
        let walks = closed_walk_counts(&g, 3);
        // each triangle gives 2 closed 3-walks from each of its 3 corners
        let closed3: u128 = walks.iter().map(|w| w[3]).sum();
        assert_eq!(closed3, 6 * triangles as u128);
        let report = constancy_check(&g.kernel().unwrap(), 3);
        let fraction = report
            .rows
            .iter()
            .find(|r| r.ell == 3)
            .unwrap()
            .nonzero_fraction;
        let bound = 3.0 * triangles as f64 / 1000.0;
        assert!(fraction <= bound + 1e-12);
        total_fraction += fraction;
        total_bound += bound;
    }
    // triangles rarely share corners at this size, so the bound is nearly tight
    assert!(total_fraction >= 0.9 * total_bound);
}

#[test]
fn torus_spectrum_is_the_cosine_sum() {
    for (d, m) in [(3usize, 4usize), (2, 5), (1, 7)] {
        let spec = eigendecompose(&build_torus(d, m).unwrap().kernel().unwrap()).unwrap();
        let mut expected = vec![0.0];
        for _ in 0..d {
            expected = expected
                .iter()
                .flat_map(|&acc| {
                    (0..m).map(move |j| acc + (2.0 * PI * j as f64 / m as f64).cos() / d as f64)
                })
                .collect();
        }
        expected.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in spec.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn census_is_deterministic_and_poisson_like_for_four_cycles() {
    let counts: Vec<f64> = (0..200)
        .map(|seed| {
            count_cycles(&sample_regular(500, 3, 70_000 + seed).unwrap(), 4)
                .unwrap()
                .count(4) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / 200.0;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / 199.0;
    // Poisson mean (k-1)^4 / 8 = 2
    assert!(
        (mean - 2.0).abs() <= 4.0 * (var / 200.0).sqrt(),
        "mean {mean}"
    );
    let g = sample_regular(500, 3, 1).unwrap();
    assert_eq!(count_cycles(&g, 6).unwrap(), count_cycles(&g, 6).unwrap());
}
