import math

import numpy as np
import pytest

from coreclust.bicriteria import (
    MedianProvider,
    bicriteria,
    make_metric_provider,
    metric_kmedian_beta,
    metric_kmedian_bicriteria,
    peel_bicriteria,
)
from coreclust.geometry import InputError, Metric, PointSet, cost_to_set
from coreclust.sampling import rng_for
from coreclust.solvers import brute_force_k_median


def check_partition(res, n):
    total = np.zeros(n)
    for r in res.rounds:
        total[r.indices] += r.amounts
    assert np.allclose(total, 1.0), "rounds must consume every point exactly once"


class TestPeelEngine:
    def test_multi_round_partition_and_bounds(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(1500, 2))
        provider = make_metric_provider(k=2, beta=40)
        res = peel_bicriteria(pts, np.ones(1500), Metric(), eps_internal=0.05,
                              provider=provider, rng=rng_for(1, 1))
        assert len(res.rounds) >= 2  # guard 10/0.05 = 200 < 1500: real peeling
        check_partition(res, 1500)
        assert len(res.rounds) <= math.ceil(math.log2(1500))
        assert res.n_centers <= res.center_bound()

    def test_rounds_remove_specified_counts(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(1000, 2))
        eps = 0.05
        provider = make_metric_provider(k=1, beta=25)
        res = peel_bicriteria(pts, np.ones(1000), Metric(), eps,
                              provider=provider, rng=rng_for(2, 1))
        remaining = 1000.0
        for r in res.rounds[:-1]:
            expected = math.ceil((1 - 5 * eps) * 0.75 * remaining - 1e-12)
            assert r.amounts.sum() == pytest.approx(expected)
            remaining -= expected
        assert remaining < 10 / eps  # guard stops the loop


class TestBicriteria:
    def test_identical_points(self):
        P = PointSet(np.zeros((50, 2)))
        res = metric_kmedian_bicriteria(P, k=1, eps=0.5, delta=0.1, seed=0)
        assert res.total_cost == 0.0
        assert np.all(res.B == 0.0)

    def test_round_count_bound_n1024(self):
        rng = np.random.default_rng(2)
        P = PointSet(rng.normal(size=(1024, 1)))
        res = metric_kmedian_bicriteria(P, k=1, eps=1.0, delta=0.1, seed=3,
                                        beta=30)
        peel_rounds = len(res.rounds) - 1
        assert peel_rounds <= 10  # halving argument at n = 1024

    def test_uniform_line_within_three_of_opt(self):
        # (1 + eps) * alpha = 1.5 * 2 = 3 at eps = 0.5
        for seed in range(20):
            rng = np.random.default_rng(100 + seed)
            pts = np.sort(rng.uniform(0, 1, size=500)).reshape(-1, 1)
            P = PointSet(pts)
            res = metric_kmedian_bicriteria(P, k=1, eps=0.5, delta=0.1,
                                            seed=seed)
            opt = brute_force_k_median(P, 1, candidates=pts).cost
            assert res.total_cost <= 3.0 * opt + 1e-9, f"seed {seed}"

    def test_partition_exact_every_run(self):
        rng = np.random.default_rng(3)
        for seed in range(5):
            pts = rng.normal(size=(200, 2))
            P = PointSet(pts)
            res = metric_kmedian_bicriteria(P, k=2, eps=0.4, delta=0.1,
                                            seed=seed, beta=15)
            check_partition(res, 200)
            assert res.n_centers <= res.center_bound()

    def test_total_cost_consistency(self):
        rng = np.random.default_rng(4)
        P = PointSet(rng.normal(size=(120, 2)))
        res = metric_kmedian_bicriteria(P, k=2, eps=0.3, delta=0.1, seed=9)
        assert res.total_cost == pytest.approx(cost_to_set(P, res.B), rel=1e-12)

    def test_seed_reproducibility(self):
        rng = np.random.default_rng(5)
        P = PointSet(rng.normal(size=(300, 2)))
        a = metric_kmedian_bicriteria(P, 2, 0.3, 0.1, seed=11, beta=20)
        b = metric_kmedian_bicriteria(P, 2, 0.3, 0.1, seed=11, beta=20)
        assert np.array_equal(a.B, b.B)
        assert a.total_cost == b.total_cost
        assert len(a.rounds) == len(b.rounds)


class TestMetricKMedian:
    def test_separated_clusters_hit_every_cluster(self):
        rng = np.random.default_rng(6)
        centers = np.array([[0.0, 0.0], [40.0, 0.0], [0.0, 40.0]])
        pts = np.concatenate(
            [c + 0.1 * rng.normal(size=(8, 2)) for c in centers])
        P = PointSet(pts)
        res = metric_kmedian_bicriteria(P, k=3, eps=0.3, delta=0.1, seed=1)
        opt = brute_force_k_median(P, 3, candidates=pts).cost
        assert res.total_cost <= (2 + 0.3) * opt + 1e-9

    def test_k_equals_n(self):
        rng = np.random.default_rng(7)
        pts = rng.normal(size=(12, 2))
        P = PointSet(pts)
        res = metric_kmedian_bicriteria(P, k=12, eps=0.3, delta=0.1, seed=2)
        assert res.total_cost == 0.0

    def test_k_too_large(self):
        P = PointSet(np.zeros((3, 1)))
        with pytest.raises(InputError):
            metric_kmedian_bicriteria(P, k=4, eps=0.3, delta=0.1, seed=0)

    def test_beta_formula(self):
        assert metric_kmedian_beta(3, 0.3, 0.1, 1.0) == math.ceil(
            (3 + math.log(20)) / 0.3 ** 4)

    def test_explicit_metric_mode(self):
        rng = np.random.default_rng(8)
        coords = rng.normal(size=(30, 2))
        from coreclust.geometry import metric_from_points
        metric = metric_from_points(coords)
        P = PointSet(np.arange(30), metric=metric)
        res = metric_kmedian_bicriteria(P, k=2, eps=0.4, delta=0.1, seed=4)
        assert set(np.asarray(res.B).tolist()) <= set(range(30))
        opt = brute_force_k_median(P, 2, candidates=P.points).cost
        assert res.total_cost <= (2 + 0.4) * opt + 1e-9


class TestGenericProvider:
    def test_custom_single_center_provider(self):
        # a provider that always proposes the weighted medoid of its input
        def draw(points, weights, metric, rng):
            from coreclust.geometry import pairwise_dist
            d = pairwise_dist(metric, points, points)
            return points[[int((weights @ d).argmin())]]

        provider = MedianProvider(draw=draw, alpha=1.0, beta=1)
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(400, 2))
        res = bicriteria(PointSet(pts), eps=1.0, provider=provider, seed=5)
        check_partition(res, 400)
        assert res.n_centers <= res.center_bound()
        opt = brute_force_k_median(PointSet(pts), 1, candidates=pts).cost
        assert res.total_cost <= 2.0 * 1.0 * opt  # (1+eps) alpha with slack
