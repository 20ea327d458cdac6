import json
import math

import numpy as np
import pytest

from lpwanplan.capacity import distance_cdf, expected_concurrent_transmitters
from lpwanplan.mcsim import (
    SimConfig,
    SimResult,
    admission_flags,
    default_stream_length,
    empirical_distance_cdf,
    ks_distance,
    mean_pair_distance,
    sample_points,
    simulate_admission,
)

# (2 + sqrt2 + 5 ln(1 + sqrt2)) / 15, confirmed by 2-D quadrature
UNIT_SQUARE_MEAN = 0.5214054331647207


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(0, 1)
        with pytest.raises(ValueError):
            SimConfig(1, 0)
        with pytest.raises(ValueError):
            SimConfig(1, 0.1, n=0)
        with pytest.raises(ValueError):
            SimConfig(1, 0.1, mode="greedy")
        with pytest.raises(ValueError):
            SimConfig(1, 0.1, seed=-1)


class TestDistanceCdf:
    def test_zero_and_diagonal(self):
        c = SimConfig(1, 0.1, n=5000, seed=3)
        assert empirical_distance_cdf(c, 0).estimate == 0
        assert empirical_distance_cdf(c, math.sqrt(2)).estimate == 1

    def test_query_range(self):
        with pytest.raises(ValueError):
            empirical_distance_cdf(SimConfig(1, 0.1, n=10), 1.5)

    def test_matches_closed_form(self):
        r = empirical_distance_cdf(SimConfig(1, 0.1, n=10**6, seed=11), 0.1)
        assert abs(r.estimate - distance_cdf(0.1, 1)) < 3 * r.standard_error
        assert round(r.estimate, 3) in (0.028, 0.029)

    def test_ks(self):
        assert ks_distance(SimConfig(2.0, 0.1, n=200_000, seed=5)) < 0.01


class TestMeanDistance:
    def test_unit_square(self):
        r = mean_pair_distance(SimConfig(1, 0.1, n=10**6, seed=1))
        assert abs(r.estimate - UNIT_SQUARE_MEAN) < 0.001
        assert r.standard_error > 0

    def test_similarity(self):
        a = mean_pair_distance(SimConfig(1, 0.1, n=10_000, seed=9))
        b = mean_pair_distance(SimConfig(7.5, 0.1, n=10_000, seed=9))
        assert b.estimate == pytest.approx(7.5 * a.estimate, rel=1e-12)

    def test_single_sample(self):
        c = SimConfig(1, 0.1, n=1, seed=4)
        r = mean_pair_distance(c)
        u = np.random.Generator(np.random.Philox(key=np.array([4, 0], np.uint64)))
        x = u.random((1, 4))[0]
        assert r.estimate == math.hypot(x[0] - x[2], x[1] - x[3])
        assert r.standard_error == 0 and not r.se_defined


class TestAdmission:
    def test_huge_exclusion_admits_first_only(self):
        for n in (2, 50):
            r = simulate_admission(SimConfig(1, 2, n=n))
            assert r.estimate == 1 and r.saturated

    def test_tiny_exclusion_admits_all(self):
        for mode in ("paper-literal", "accepted-only"):
            assert simulate_admission(SimConfig(1, 1e-12, n=3000, mode=mode)).estimate == 3000

    def test_brute_force_agreement(self):
        c = SimConfig(10, 1.3, n=2500, seed=21)
        pts = sample_points(c, 2500)
        dist = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
        close = np.tril(dist <= 1.3, k=-1)
        literal = ~close.any(axis=1)
        assert np.array_equal(admission_flags(c), literal)
        kept = []
        for i in range(len(pts)):
            if not any(dist[i, j] <= 1.3 for j in kept):
                kept.append(i)
        greedy = np.zeros(len(pts), bool)
        greedy[kept] = True
        acc = SimConfig(10, 1.3, n=2500, seed=21, mode="accepted-only")
        assert np.array_equal(admission_flags(acc), greedy)

    def test_accepted_only_dominates(self):
        for seed in range(5):
            lit = simulate_admission(SimConfig(30, 1, seed=seed))
            acc = simulate_admission(SimConfig(30, 1, seed=seed, mode="accepted-only"))
            assert acc.estimate >= lit.estimate

    def test_geometric_mean(self):
        counts = [simulate_admission(SimConfig(100, 2, seed=s)).estimate for s in range(20)]
        target = expected_concurrent_transmitters(2, 100, "geometric")
        assert np.mean(counts) == pytest.approx(target, rel=0.10)

    def test_default_stream_length(self):
        assert default_stream_length(2, 100) == math.ceil(20 / distance_cdf(2, 100))
        assert simulate_admission(SimConfig(100, 2, seed=1)).n == default_stream_length(2, 100)


class TestDeterminism:
    def test_workers_do_not_change_results(self):
        base = SimConfig(1, 0.1, n=300_000, seed=99)
        par = SimConfig(1, 0.1, n=300_000, seed=99, workers=4)
        assert mean_pair_distance(base).to_json() == mean_pair_distance(par).to_json()
        assert (empirical_distance_cdf(base, 0.3).to_json()
                == empirical_distance_cdf(par, 0.3).to_json())
        assert np.array_equal(sample_points(base, 200_000), sample_points(par, 200_000))

    def test_repeat(self):
        c = SimConfig(50, 2, seed=2024, mode="accepted-only")
        assert simulate_admission(c).to_json() == simulate_admission(c).to_json()

    def test_stream_prefix_independent_of_length(self):
        a = sample_points(SimConfig(1, 0.1, seed=8), 1000)
        b = sample_points(SimConfig(1, 0.1, seed=8), 100_000)
        assert np.array_equal(a, b[:1000])

    def test_json_round_trip(self):
        r = simulate_admission(SimConfig(20, 1, seed=3))
        assert SimResult.from_dict(json.loads(r.to_json())) == r
