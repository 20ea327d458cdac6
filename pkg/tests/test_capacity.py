import math

import pytest
from hypothesis import given, strategies as st

from lpwanplan.capacity import (
    DensityInputs,
    SquareField,
    aggregate_capacity,
    asymptotic_channel_density,
    distance_cdf,
    expected_concurrent_transmitters,
    node_density,
    traffic_density,
)

# Frozen from mpmath (30 digits); d = h and t = 0.1 cross-checked by
# quadrature of the product of the two 1-D |x1 - x2| densities over the disc.
CDF_T01 = 0.028799259869231266
CDF_T1 = 0.9749259869231266
GEOM_T01 = 34.72311457102362
GEOM_T1 = 1.0257188888317637


class TestNodeDensity:
    def test_lora_europe(self):
        assert node_density(9, 0.01, 10) == pytest.approx(2.864788975654116)
        assert round(node_density(9, 0.01, 10), 1) == 2.9

    def test_sigfox_europe(self):
        assert node_density(360, 4e-6, 20) == pytest.approx(71619.72439135290)

    @given(st.floats(0.01, 1000))
    def test_base_case(self, d):
        assert node_density(1, 1, d) == pytest.approx(1 / (math.pi * d * d))

    def test_zero_duty_rejected(self):
        with pytest.raises(ValueError, match="unbounded"):
            node_density(9, 0, 10)


class TestTrafficDensity:
    def test_lora_europe(self):
        assert traffic_density(99290, 10) == pytest.approx(316.04988599188576)
        # the printed 99 209 gives the printed 315 within rounding
        assert round(traffic_density(99209, 10)) == 316
        assert traffic_density(99209, 10) == pytest.approx(315, rel=0.01)

    def test_sigfox_europe(self):
        assert traffic_density(36000, 20) == pytest.approx(28.64788975654116)

    def test_zero(self):
        assert traffic_density(0, 5) == 0


class TestAggregateCapacity:
    def test_lora_europe(self):
        assert aggregate_capacity([(7, 5470), (1, 11000), (1, 50000)]) == 99290

    def test_sigfox_europe(self):
        assert aggregate_capacity([(360, 100)]) == 36000

    def test_empty(self):
        assert aggregate_capacity([]) == 0


def test_density_inputs_consistency():
    x = DensityInputs(0.01, 9, 10, per_channel_capacity=100)
    assert x.aggregate_capacity == 900
    assert x.node_density == node_density(9, 0.01, 10)
    assert x.traffic_density == traffic_density(900, 10)
    with pytest.raises(ValueError):
        DensityInputs(0.01, 9, 10, per_channel_capacity=100, aggregate_capacity=901)
    with pytest.raises(ValueError):
        DensityInputs(0, 9, 10)


class TestDistanceCdf:
    def test_zero(self):
        assert distance_cdf(0, 3) == 0

    def test_full_side(self):
        assert distance_cdf(1, 1) == pytest.approx(CDF_T1, rel=1e-14)
        assert distance_cdf(1, 1) == pytest.approx(math.pi - 8 / 3 + 0.5)

    def test_tenth(self):
        assert distance_cdf(0.1, 1) == pytest.approx(CDF_T01, rel=1e-13)
        assert distance_cdf(2.0, 20.0) == pytest.approx(CDF_T01, rel=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            distance_cdf(1.5, 1)
        with pytest.raises(ValueError):
            distance_cdf(-0.1, 1)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert distance_cdf(lo, 1) <= distance_cdf(hi, 1)


class TestExpectedConcurrent:
    def test_tenth(self):
        assert expected_concurrent_transmitters(0.1, 1) == pytest.approx(GEOM_T01)
        assert expected_concurrent_transmitters(0.1, 1, "paper") == pytest.approx(
            GEOM_T01 - 1
        )

    def test_full_side(self):
        assert expected_concurrent_transmitters(1, 1) == pytest.approx(GEOM_T1)

    @given(st.floats(1e-3, 1), st.floats(1, 100))
    def test_variants_differ_by_one(self, t, h):
        d = t * h
        g = expected_concurrent_transmitters(d, h, "geometric")
        p = expected_concurrent_transmitters(d, h, "paper")
        assert g - p == pytest.approx(1, rel=1e-9)

    def test_divergent(self):
        with pytest.raises(ValueError, match="divergent"):
            expected_concurrent_transmitters(0, 1)

    def test_bad_formula(self):
        with pytest.raises(ValueError):
            expected_concurrent_transmitters(0.1, 1, "closed")

    def test_square_field(self):
        f = SquareField(10, 1)
        assert f.expected_concurrent() == expected_concurrent_transmitters(1, 10)
        with pytest.raises(ValueError):
            SquareField(1, 2)


class TestAsymptoticLimit:
    def test_value(self):
        assert asymptotic_channel_density(10) == pytest.approx(3.183098861837907e-3)

    @given(st.floats(0.01, 1000))
    def test_matches_base_node_density(self, d):
        assert asymptotic_channel_density(d) == pytest.approx(node_density(1, 1, d))

    def test_convergence(self):
        gaps = []
        for ratio in (5, 10, 20, 50, 100, 1000):
            d = 1.0
            h = ratio * d
            est = expected_concurrent_transmitters(d, h) / h**2
            gaps.append(abs(est / asymptotic_channel_density(d) - 1))
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 1e-3
