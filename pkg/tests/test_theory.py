import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ranktail.tails import TailFit
from ranktail.theory import (CoefficientTable, TheoryParams, b_coefficient,
                             coefficient_C, coefficient_Ck, coefficient_lower_bound,
                             coefficient_table, mean_field, predict_line)

INDOCHINA = dict(alpha=1.17, d=26.17, p0=0.18, b=0.65)
STANFORD = dict(alpha=1.1, d=8.2032, p0=0.006, b=0.8558)


def histograms(min_j=0):
    return st.dictionaries(st.integers(min_j, 50), st.floats(0.01, 1.0),
                           min_size=1, max_size=8).map(
        lambda w: {j: p / sum(w.values()) for j, p in w.items()})


class TestB:
    def test_constant_outdegree(self):
        assert b_coefficient({4: 1.0}, 1.3) == pytest.approx(4.0 ** (1 - 1.3))

    def test_dangling_mass_excluded(self):
        assert b_coefficient({0: 1.0}, 1.5) == 0.0

    def test_alpha_one_gives_linked_fraction(self):
        hist = {0: 0.25, 2: 0.5, 7: 0.25}
        assert b_coefficient(hist, 1.0) == pytest.approx(0.75)

    def test_invalid_histogram(self):
        with pytest.raises(ValueError):
            b_coefficient({1: 0.7}, 1.2)

    @given(hist=histograms(), alpha=st.floats(1.0, 2.5))
    @settings(max_examples=100, deadline=None)
    def test_bound_chain(self, hist, alpha):
        b = b_coefficient(hist, alpha)
        p0 = hist.get(0, 0.0)
        d = sum(j * p for j, p in hist.items())
        assert b <= (1 - p0) + 1e-12
        if d > 0:
            assert b >= (1 - p0) ** alpha * d ** (1 - alpha) - 1e-12


class TestParams:
    def test_divergent_series_rejected(self):
        with pytest.raises(ValueError, match="diverges"):
            TheoryParams(c=0.99, alpha=1.05, d=1.0, p0=0.0, b=1.2)

    def test_alpha_must_exceed_one(self):
        with pytest.raises(ValueError):
            TheoryParams(c=0.85, alpha=1.0, d=5.0, p0=0.0, b=0.5)

    def test_from_histogram_checks_mean(self):
        with pytest.raises(ValueError, match="mean"):
            TheoryParams.from_histogram(0.85, 1.2, {1: 0.5, 3: 0.5}, d=5.0)

    def test_from_histogram_derives_fields(self):
        params = TheoryParams.from_histogram(0.85, 1.2, {0: 0.2, 1: 0.4, 3: 0.4})
        assert params.d == pytest.approx(1.6)
        assert params.p0 == pytest.approx(0.2)
        assert params.b == pytest.approx(0.4 + 0.4 * 3 ** -0.2)


class TestCoefficients:
    @pytest.mark.parametrize("c,expected", [(0.2, -2.53), (0.5, -1.96), (0.85, -1.50)])
    def test_limit_heavy_graph_params(self, c, expected):
        params = TheoryParams(c=c, **INDOCHINA)
        assert math.log10(coefficient_C(params)) == pytest.approx(expected, abs=0.01)

    def test_first_iterations_small_graph_params(self):
        params = TheoryParams(c=0.85, **STANFORD)
        assert math.log10(coefficient_Ck(params, 1)) == pytest.approx(-1.08, abs=0.01)
        assert math.log10(coefficient_Ck(params, 2)) == pytest.approx(-0.85, abs=0.01)
        assert math.log10(coefficient_C(params)) == pytest.approx(-0.54, abs=0.01)

    def test_b_zero_collapses_to_c1(self):
        params = TheoryParams(c=0.7, alpha=1.4, d=3.0, p0=0.1, b=0.0)
        c1 = coefficient_Ck(params, 1)
        for k in (2, 5, 50):
            assert coefficient_Ck(params, k) == pytest.approx(c1, rel=1e-14)

    @given(c=st.floats(0.05, 0.95), alpha=st.floats(1.05, 2.0),
           d=st.floats(0.5, 50.0), p0=st.floats(0.0, 0.9), b=st.floats(0.01, 0.95))
    @settings(max_examples=150, deadline=None)
    def test_monotone_increasing_to_limit(self, c, alpha, d, p0, b):
        if c ** alpha * b >= 1.0:
            return
        params = TheoryParams(c=c, alpha=alpha, d=d, p0=p0, b=b)
        limit = coefficient_C(params)
        prev = 0.0
        for k in range(1, 8):
            ck = coefficient_Ck(params, k)
            assert prev <= ck <= limit * (1 + 1e-12)
            # strictly increasing until the increment saturates at the limit
            assert ck > prev or ck == pytest.approx(limit, rel=1e-12)
            prev = ck

    def test_partial_sums_reach_limit(self):
        params = TheoryParams(c=0.85, **STANFORD)
        r = params.geometric_ratio
        k_needed = math.ceil(math.log(1e-12) / math.log(r))
        diff = coefficient_C(params) - coefficient_Ck(params, k_needed)
        assert abs(diff) <= 1e-12
        table = coefficient_table(params)
        assert table.c_k[-1] == pytest.approx(table.c_limit, abs=1e-12)

    def test_damping_to_zero_kills_tail(self):
        params = TheoryParams(c=1e-4, **INDOCHINA)
        assert coefficient_C(params) < 1e-4

    def test_geometric_convergence_rate(self):
        params = TheoryParams(c=0.85, **STANFORD)
        r = params.geometric_ratio
        limit = coefficient_C(params)
        for k in (1, 3, 6):
            gap = limit - coefficient_Ck(params, k)
            assert gap == pytest.approx(limit * r ** k, rel=1e-9)


class TestLowerBound:
    def test_equality_for_constant_outdegree(self):
        params = TheoryParams.from_histogram(0.85, 1.3, {5: 1.0})
        assert coefficient_lower_bound(params) == pytest.approx(
            coefficient_C(params), rel=1e-12)

    def test_heavy_graph_gap(self):
        # direct evaluation of both closed forms at the heavy-graph params:
        # the constant-out-degree bound sits about a quarter below the limit
        # (0.13 decades on a log plot)
        params = TheoryParams(c=0.85, **INDOCHINA)
        bound = coefficient_lower_bound(params)
        limit = coefficient_C(params)
        assert bound <= limit
        assert (limit - bound) / limit == pytest.approx(0.258, abs=0.005)

    def test_alpha_near_one_closes_gap(self):
        # with b computed from a histogram, j^(1-alpha) -> 1 as alpha -> 1+
        # and the Jensen bound meets the limit
        hist = {0: 0.18, 2: 0.3, 9: 0.3, 60: 0.22}
        params = TheoryParams.from_histogram(0.85, 1.0 + 1e-9, hist)
        assert coefficient_lower_bound(params) == pytest.approx(
            coefficient_C(params), rel=1e-6)

    @given(hist=histograms(), c=st.floats(0.05, 0.9), alpha=st.floats(1.01, 2.0))
    @settings(max_examples=100, deadline=None)
    def test_bound_never_exceeds_limit(self, hist, c, alpha):
        d = sum(j * p for j, p in hist.items())
        if d <= 0:
            return
        try:
            params = TheoryParams.from_histogram(c, alpha, hist)
        except ValueError:
            return
        assert coefficient_lower_bound(params) <= coefficient_C(params) * (1 + 1e-12)


class TestMeanField:
    def test_mean_degree_maps_to_unit_score(self):
        params = TheoryParams(c=0.85, alpha=1.5, d=7.0, p0=0.0, b=0.5)
        assert mean_field(7.0, params) == pytest.approx(1.0)

    def test_intercept_at_zero_indegree(self):
        params = TheoryParams(c=0.6, alpha=1.5, d=4.0, p0=0.25, b=0.5)
        assert mean_field(0, params) == pytest.approx(1 - 0.6 * 0.75)

    def test_no_dangling_slope(self):
        params = TheoryParams(c=0.85, alpha=1.5, d=10.0, p0=0.0, b=0.5)
        n = np.arange(5)
        expected = 0.85 * n / 10.0 + 0.15
        assert mean_field(n, params) == pytest.approx(expected)


class TestPredictLine:
    def test_heavy_graph_mid_damping(self):
        fit = TailFit(alpha_hat=1.17, x_min=10.0, intercept=0.80, tail_count=1000)
        params = TheoryParams(c=0.5, **INDOCHINA)
        slope, intercept = predict_line(fit, coefficient_C(params))
        assert slope == -1.17
        assert intercept == pytest.approx(-1.16, abs=0.01)

    def test_unit_coefficient_keeps_intercept(self):
        fit = TailFit(alpha_hat=1.1, x_min=1.0, intercept=0.42, tail_count=50)
        assert predict_line(fit, 1.0) == (-1.1, pytest.approx(0.42))

    def test_small_graph_limit_line(self):
        fit = TailFit(alpha_hat=1.1, x_min=10.0, intercept=0.08, tail_count=1000)
        params = TheoryParams(c=0.85, **STANFORD)
        _, intercept = predict_line(fit, coefficient_C(params))
        assert intercept == pytest.approx(-0.46, abs=0.01)

    def test_table_export(self):
        params = TheoryParams(c=0.85, **STANFORD)
        table = coefficient_table(params, k_max=3)
        assert isinstance(table, CoefficientTable)
        assert len(table.c_k) == 3
        assert "C_limit" in table.to_json()
