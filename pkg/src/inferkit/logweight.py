"""Log-domain weights and stable arithmetic over them.

Importance weights are products of many densities and underflow float64
almost immediately, so the library keeps every weight as its natural
logarithm.  A :class:`LogWeight` wraps one float ``log_value`` in
``[-inf, +inf)``:

* ``-inf`` is the zero weight (a rejected or impossible particle),
* ``0.0`` is the unit weight,
* ``+inf`` and NaN are never representable; operations that would
  overflow saturate at the largest finite float instead.

Multiplication and division are addition and subtraction of logs; sums
use the max-shifted log-sum-exp so that adding any number of finite
weights never overflows and loses no more precision than float64 itself.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Iterable

from .errors import NegativeProbability, ZeroWeightDivisor

__all__ = [
    "LogWeight",
    "ZERO",
    "ONE",
    "lw_mul",
    "lw_div",
    "lw_sum",
    "lw_from_prob",
    "lw_to_prob",
]

_MAX_LOG = sys.float_info.max


@dataclass(frozen=True, slots=True)
class LogWeight:
    """A non-negative weight stored as its logarithm.

    ``log_value`` lies in ``[-inf, +inf)``; construction rejects NaN and
    clamps ``+inf`` to the largest finite float so downstream arithmetic
    can never produce NaN by cancelling infinities.
    """

    log_value: float

    def __post_init__(self) -> None:
        lv = self.log_value
        if isinstance(lv, bool) or not isinstance(lv, (int, float)):
            raise TypeError(f"log_value must be a float, got {type(lv).__name__}")
        lv = float(lv)
        if math.isnan(lv):
            raise ValueError("log weight cannot be NaN")
        if lv == math.inf:
            lv = _MAX_LOG
        object.__setattr__(self, "log_value", lv)

    def is_zero(self) -> bool:
        return self.log_value == -math.inf

    def __lt__(self, other: "LogWeight") -> bool:
        return self.log_value < other.log_value

    def __le__(self, other: "LogWeight") -> bool:
        return self.log_value <= other.log_value

    def __repr__(self) -> str:
        return f"LogWeight({self.log_value!r})"


ZERO = LogWeight(-math.inf)
ONE = LogWeight(0.0)


def lw_mul(a: LogWeight, b: LogWeight) -> LogWeight:
    """Product of two weights (sum of logs).

    The zero weight absorbs everything, including would-be overflows:
    ``lw_mul(ZERO, x) == ZERO`` for every ``x``.  Finite sums that exceed
    the float range saturate at the largest finite log.
    """
    if a.is_zero() or b.is_zero():
        return ZERO
    s = a.log_value + b.log_value
    if s == math.inf:
        s = _MAX_LOG
    return LogWeight(s)


def lw_div(a: LogWeight, b: LogWeight) -> LogWeight:
    """Ratio of two weights (difference of logs).

    Raises :class:`ZeroWeightDivisor` when ``b`` is the zero weight.
    """
    if b.is_zero():
        raise ZeroWeightDivisor("cannot divide by a zero weight")
    if a.is_zero():
        return ZERO
    s = a.log_value - b.log_value
    if s == math.inf:
        s = _MAX_LOG
    return LogWeight(s)


def lw_sum(weights: Iterable[LogWeight]) -> LogWeight:
    """Sum of weights via max-shifted log-sum-exp.

    An empty iterable sums to the zero weight.  The shift by the largest
    log guarantees at least one term of the inner sum is exactly 1, so the
    result is finite whenever any input is, and ``lw_sum([w] * n)`` equals
    ``w * n`` to float64 accuracy for any finite ``w``.
    """
    logs = [w.log_value for w in weights]
    if not logs:
        return ZERO
    m = max(logs)
    if m == -math.inf:
        return ZERO
    total = math.fsum(math.exp(lv - m) for lv in logs)
    return LogWeight(m + math.log(total))


def lw_from_prob(p: float) -> LogWeight:
    """Weight from a plain probability/density value.

    Raises :class:`NegativeProbability` for negative or NaN input;
    ``p == 0`` maps to the zero weight.
    """
    p = float(p)
    if math.isnan(p) or p < 0.0:
        raise NegativeProbability(f"expected a value in [0, +inf), got {p!r}")
    if p == 0.0:
        return ZERO
    return LogWeight(math.log(p))


def lw_to_prob(w: LogWeight) -> float:
    """Plain value of a weight, ``exp(log_value)``.

    Results beyond the float64 range saturate at the largest finite float,
    mirroring the saturation rule of the constructors.
    """
    try:
        return math.exp(w.log_value)
    except OverflowError:
        return sys.float_info.max
