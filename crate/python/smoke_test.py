"""Smoke test for the meetlab extension module."""

import math

import meetlab


def main():
    k4 = meetlab.RegularGraph.complete(4)
    exact = meetlab.ExactAnalysis(k4)
    assert math.isclose(exact.mean(), 9 / 8, rel_tol=1e-12), exact.mean()

    res = exact.residuals(1.0)
    assert res["green_identity"] < 1e-10 and res["place_equation"] < 1e-10, res
    assert res["domination_ok"]

    lap = exact.laplace(0.5)
    assert 0.0 < lap["laplace"] < 1.0

    g = meetlab.RegularGraph.sample(32, 3, 7)
    assert (g.n, g.k) == (32, 3) and len(g.edges()) == 48
    spec = g.spectrum()
    assert math.isclose(spec[0], 1.0, abs_tol=1e-12)

    dp = meetlab.moments_tree_dp(3, 20)
    quad = meetlab.moments_quadrature(3, 20)
    assert max(abs(a - b) for a, b in zip(dp, quad)) < 1e-10
    assert math.isclose(meetlab.limit_mean(3), 1.0, rel_tol=1e-12)

    batch = meetlab.SampleBatch(k4, 4000, seed=11)
    est, se = batch.mean()
    assert abs(est - 9 / 8) < 5 * se, (est, se)
    again = meetlab.SampleBatch(k4, 4000, seed=11)
    assert batch.samples == again.samples

    try:
        meetlab.resolvent_sum(2, 10)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("k=2 should diverge")

    print("smoke test ok")


if __name__ == "__main__":
    main()
