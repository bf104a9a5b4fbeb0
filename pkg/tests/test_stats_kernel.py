import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlsamplesize.stats_kernel import (
    ConfidenceSpec,
    binomial_variance,
    normal_cdf,
    normal_quantile,
    wald_half_width,
    wilson_half_width,
    wilson_interval,
)

from oracles import bisection_quantile, series_normal_cdf, wilson_by_score_equation

proportions = st.floats(min_value=1e-6, max_value=1 - 1e-6)
levels = st.floats(min_value=0.5, max_value=0.999)


class TestNormalQuantile:
    def test_median(self):
        assert normal_quantile(0.5) == 0.0

    @pytest.mark.parametrize(
        "p, expected",
        [
            (0.975, 1.959964),  # frozen from bisection_quantile(0.975)
            (0.995, 2.575829),  # frozen from bisection_quantile(0.995)
        ],
    )
    def test_frozen_values(self, p, expected):
        assert normal_quantile(p) == pytest.approx(expected, abs=1e-6)
        assert bisection_quantile(p) == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("p", [1e-8, 1e-5, 0.01, 0.02425, 0.1, 0.3, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-8])
    def test_matches_bisection_oracle(self, p):
        assert abs(normal_quantile(p) - bisection_quantile(p)) < 1e-9

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_rejects_outside_open_interval(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)

    @pytest.mark.invariant
    def test_inverts_cdf_on_dense_grid(self):
        xs = np.linspace(-6.0, 6.0, 24001)
        err = max(abs(normal_quantile(normal_cdf(x)) - x) for x in xs)
        assert err < 1e-8

    @pytest.mark.invariant
    def test_antisymmetry_on_grid(self):
        ps = np.linspace(1e-6, 1 - 1e-6, 10001)
        err = max(abs(normal_quantile(p) + normal_quantile(1 - p)) for p in ps)
        assert err < 1e-9

    @pytest.mark.invariant
    @given(proportions)
    def test_antisymmetry_property(self, p):
        # below ~1e-6 the float 1 - p no longer carries p's tail to 1e-9 in x
        assert abs(normal_quantile(p) + normal_quantile(1 - p)) < 1e-9


class TestNormalCdf:
    def test_center(self):
        assert normal_cdf(0.0) == 0.5

    def test_frozen_values(self):
        assert normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)
        assert normal_cdf(-1.959964) == pytest.approx(0.025, abs=1e-7)

    @pytest.mark.parametrize("x", [-8.0, -6.0, -3.3, -1.0, -0.2, 0.4, 1.7, 2.9, 5.0, 7.5])
    def test_matches_series_oracle(self, x):
        assert abs(normal_cdf(x) - float(series_normal_cdf(x))) < 1e-12

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            normal_cdf(float("inf"))


class TestConfidenceSpec:
    @pytest.mark.parametrize("level", [0.0, 1.0, -0.5, 1.2])
    def test_rejects_levels_outside_unit_interval(self, level):
        with pytest.raises(ValueError):
            ConfidenceSpec(level)

    def test_z_is_two_sided_quantile(self):
        assert ConfidenceSpec(0.95).z == pytest.approx(1.959964, abs=1e-6)
        assert ConfidenceSpec(0.90).z == pytest.approx(bisection_quantile(0.95), abs=1e-9)


class TestWaldHalfWidth:
    @pytest.mark.parametrize(
        "p_hat, n, expected",
        [
            (0.85, 196, 0.049989),  # 1.959964 * sqrt(0.1275 / 196)
            (0.85, 195, 0.050117),  # 1.959964 * sqrt(0.1275 / 195)
            (0.0, 50, 0.0),
        ],
    )
    def test_frozen_values(self, p_hat, n, expected):
        assert wald_half_width(p_hat, n, 0.95) == pytest.approx(expected, abs=1e-5)

    def test_196_is_minimal_for_085(self):
        assert wald_half_width(0.85, 196, 0.95) <= 0.05 < wald_half_width(0.85, 195, 0.95)

    def test_rejects_zero_n(self):
        with pytest.raises(ValueError):
            wald_half_width(0.5, 0, 0.95)

    def test_variance_is_plain_product_up_to_rounding(self):
        for p in np.linspace(0.001, 0.999, 999):
            assert binomial_variance(p) == pytest.approx(p * (1 - p), rel=1e-12)

    @pytest.mark.invariant
    @given(proportions, st.integers(min_value=1, max_value=10**6), levels)
    def test_strictly_decreasing_in_n(self, p, n, level):
        assert wald_half_width(p, n + 1, level) < wald_half_width(p, n, level)

    @pytest.mark.invariant
    @given(proportions, st.integers(min_value=1, max_value=10**6), levels, levels)
    def test_strictly_increasing_in_level(self, p, n, a, b):
        if a == b:
            return
        lo, hi = sorted((a, b))
        assert wald_half_width(p, n, lo) < wald_half_width(p, n, hi)

    @pytest.mark.invariant
    @given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=1, max_value=10**6), levels)
    def test_exact_symmetry(self, p, n, level):
        assert wald_half_width(p, n, level) == wald_half_width(1 - p, n, level)


class TestWilsonInterval:
    def test_zero_successes_has_zero_lower_bound(self):
        assert wilson_interval(0, 1, 0.95)[0] == 0.0

    def test_frozen_half_split(self):
        lower, upper = wilson_interval(50, 100, 0.95)
        assert lower == pytest.approx(0.404, abs=0.002)
        assert upper == pytest.approx(0.596, abs=0.002)

    def test_contains_point_estimate(self):
        lower, upper = wilson_interval(196, 230, 0.95)
        assert lower <= 196 / 230 <= upper

    @pytest.mark.parametrize("k, n", [(0, 5), (3, 10), (50, 100), (196, 230), (99, 100), (1000, 1000)])
    def test_matches_score_equation(self, k, n):
        expected = wilson_by_score_equation(k, n, ConfidenceSpec(0.95).z)
        assert wilson_interval(k, n, 0.95) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("k, n", [(5, 4), (-1, 4), (0, 0)])
    def test_rejects_bad_counts(self, k, n):
        with pytest.raises(ValueError):
            wilson_interval(k, n, 0.95)

    def test_half_width_is_half_the_span(self):
        lower, upper = wilson_interval(30, 80, 0.9)
        assert wilson_half_width(30, 80, 0.9) == pytest.approx((upper - lower) / 2)

    @given(st.integers(min_value=1, max_value=5000).flatmap(
        lambda n: st.tuples(st.integers(min_value=0, max_value=n), st.just(n))), levels)
    def test_bounds_and_point_estimate(self, kn, level):
        k, n = kn
        lower, upper = wilson_interval(k, n, level)
        assert 0.0 <= lower <= k / n <= upper <= 1.0

    @pytest.mark.invariant
    @given(st.integers(min_value=1, max_value=2000), levels)
    @settings(max_examples=50)
    def test_endpoints_monotone_in_k(self, n, level):
        bounds = [wilson_interval(k, n, level) for k in range(n + 1)]
        lowers = [b[0] for b in bounds]
        uppers = [b[1] for b in bounds]
        assert all(a <= b for a, b in zip(lowers, lowers[1:]))
        assert all(a <= b for a, b in zip(uppers, uppers[1:]))


def test_level_to_z_is_monotone():
    zs = [ConfidenceSpec(level).z for level in np.linspace(0.01, 0.999, 200)]
    assert all(a < b for a, b in zip(zs, zs[1:]))
    assert math.isclose(ConfidenceSpec(0.99).z, 2.575829, abs_tol=1e-6)
