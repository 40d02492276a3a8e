"""Log-domain weight arithmetic: examples and algebraic properties."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inferkit import (
    ONE,
    ZERO,
    LogWeight,
    NegativeProbability,
    ZeroWeightDivisor,
    lw_div,
    lw_from_prob,
    lw_mul,
    lw_sum,
    lw_to_prob,
)

MAX_LOG = math.log(2.0) * 1024  # float64 overflows just past this

finite_logs = st.floats(
    min_value=-1e6, max_value=700.0, allow_nan=False, allow_infinity=False
)
weights = st.one_of(st.just(ZERO), finite_logs.map(LogWeight))


def log_close(a: LogWeight, b: LogWeight, rel: float = 1e-12) -> bool:
    la, lb = a.log_value, b.log_value
    if math.isinf(la) or math.isinf(lb):
        return la == lb
    return abs(la - lb) <= rel * max(abs(la), abs(lb), 1.0)


class TestConstruction:
    def test_one_is_log_zero(self):
        assert ONE.log_value == 0.0

    def test_zero_is_log_neg_inf(self):
        assert ZERO.log_value == -math.inf
        assert ZERO.is_zero()
        assert not ONE.is_zero()

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            LogWeight(math.nan)

    def test_positive_infinity_clamps_to_largest_finite(self):
        w = LogWeight(math.inf)
        assert math.isfinite(w.log_value)
        assert w.log_value == pytest.approx(1.7976931348623157e308)

    def test_non_float_rejected(self):
        with pytest.raises(TypeError):
            LogWeight("0.5")  # type: ignore[arg-type]
        with pytest.raises(TypeError):
            LogWeight(True)  # type: ignore[arg-type]

    def test_ordering(self):
        assert ZERO < ONE
        assert LogWeight(-1.0) < LogWeight(1.0)
        assert LogWeight(2.0) <= LogWeight(2.0)


class TestMul:
    def test_adds_logs(self):
        assert lw_mul(LogWeight(-1.5), LogWeight(-2.5)).log_value == -4.0

    def test_deep_underflow_stays_exact(self):
        # exp(-1000) * exp(-1000) is far below float64 range as a plain
        # number, but exact in log space.
        w = lw_mul(LogWeight(-1000.0), LogWeight(-1000.0))
        assert w.log_value == -2000.0
        assert not w.is_zero()

    def test_unit_is_identity(self):
        w = LogWeight(-3.25)
        assert lw_mul(w, ONE) == w
        assert lw_mul(ONE, w) == w

    def test_zero_absorbs(self):
        assert lw_mul(ZERO, LogWeight(5.0)) == ZERO
        assert lw_mul(LogWeight(5.0), ZERO) == ZERO
        assert lw_mul(ZERO, ZERO) == ZERO

    def test_overflow_saturates_finite(self):
        big = LogWeight(1e308)
        w = lw_mul(big, big)
        assert math.isfinite(w.log_value)


class TestDiv:
    def test_subtracts_logs(self):
        assert lw_div(LogWeight(-1.0), LogWeight(-3.0)).log_value == 2.0

    def test_zero_divisor_raises(self):
        with pytest.raises(ZeroWeightDivisor):
            lw_div(ONE, ZERO)

    def test_zero_numerator_stays_zero(self):
        assert lw_div(ZERO, LogWeight(-7.0)) == ZERO

    def test_self_ratio_is_one(self):
        w = LogWeight(-123.456)
        assert lw_div(w, w) == ONE


class TestSum:
    def test_empty_sum_is_zero(self):
        assert lw_sum([]) == ZERO

    def test_all_zero_sum_is_zero(self):
        assert lw_sum([ZERO, ZERO]) == ZERO

    def test_two_equal_weights(self):
        w = lw_sum([LogWeight(-1000.0), LogWeight(-1000.0)])
        assert w.log_value == pytest.approx(-1000.0 + math.log(2.0), rel=1e-15)

    def test_matches_plain_arithmetic_in_range(self):
        vals = [0.1, 0.25, 0.3, 0.05]
        w = lw_sum(lw_from_prob(v) for v in vals)
        assert lw_to_prob(w) == pytest.approx(sum(vals), rel=1e-14)

    def test_zero_entries_ignored(self):
        w = lw_sum([ZERO, LogWeight(-2.0), ZERO])
        assert w.log_value == -2.0

    def test_huge_spread_keeps_dominant_term(self):
        # The tiny term is below resolution; the sum must still be finite
        # and equal to the dominant one.
        w = lw_sum([LogWeight(-1e6), LogWeight(0.0)])
        assert w.log_value == pytest.approx(0.0, abs=1e-12)

    def test_no_overflow_for_many_large_terms(self):
        w = lw_sum([LogWeight(700.0)] * 10000)
        assert math.isfinite(w.log_value)
        assert w.log_value == pytest.approx(700.0 + math.log(10000.0), rel=1e-14)


class TestProbConversion:
    def test_from_prob_examples(self):
        assert lw_from_prob(1.0) == ONE
        assert lw_from_prob(0.0) == ZERO
        assert lw_from_prob(0.5).log_value == pytest.approx(math.log(0.5), rel=1e-15)

    def test_negative_rejected(self):
        with pytest.raises(NegativeProbability):
            lw_from_prob(-0.1)

    def test_nan_rejected(self):
        with pytest.raises(NegativeProbability):
            lw_from_prob(math.nan)

    def test_to_prob_examples(self):
        assert lw_to_prob(ONE) == 1.0
        assert lw_to_prob(ZERO) == 0.0

    @pytest.mark.parametrize("p", [1e-300, 1e-12, 0.5, 1.0, 3.7, 1e12, 1e300])
    def test_round_trip_across_the_float_range(self, p):
        assert lw_to_prob(lw_from_prob(p)) == pytest.approx(p, rel=1e-12)

    def test_to_prob_saturates_beyond_float_range(self):
        assert math.isfinite(lw_to_prob(LogWeight(1e4)))


class TestProperties:
    @given(weights, weights)
    def test_mul_commutes(self, a, b):
        assert log_close(lw_mul(a, b), lw_mul(b, a))

    @given(weights, weights, weights)
    def test_mul_associates(self, a, b, c):
        assert log_close(lw_mul(lw_mul(a, b), c), lw_mul(a, lw_mul(b, c)))

    @given(weights, weights)
    def test_sum_commutes(self, a, b):
        assert log_close(lw_sum([a, b]), lw_sum([b, a]))

    @given(st.lists(weights, max_size=20), weights)
    def test_adding_a_weight_never_decreases_the_sum(self, ws, extra):
        assert lw_sum(ws) <= lw_sum(ws + [extra])

    @given(finite_logs, st.integers(min_value=1, max_value=1000))
    def test_n_copies_sum_to_n_times(self, lv, n):
        w = LogWeight(lv)
        total = lw_sum([w] * n)
        assert total.log_value == pytest.approx(lv + math.log(n), rel=1e-12, abs=1e-12)

    @given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False))
    def test_prob_round_trip(self, p):
        assert lw_to_prob(lw_from_prob(p)) == pytest.approx(p, rel=1e-12)

    @given(weights, finite_logs.map(LogWeight))
    def test_div_inverts_mul(self, a, b):
        # Round-trip error is bounded by rounding at the magnitude of the
        # intermediate product, not of a itself.
        recovered = lw_div(lw_mul(a, b), b)
        if a.is_zero():
            assert recovered == ZERO
            return
        scale = max(abs(a.log_value), abs(b.log_value), 1.0)
        assert abs(recovered.log_value - a.log_value) <= 1e-12 * scale
