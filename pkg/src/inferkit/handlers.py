"""Composable interpreters over suspended computations.

Each interpreter consumes the requests it is responsible for and
*re-emits* every other request outward, so interpreters stack like
nested exception handlers:

* :func:`weighted`        -- absorbs Score, accumulating a running weight.
* :func:`random_sampler`  -- answers Sample from an RNG stream.
* :func:`yield_on_score`  -- re-emits each Score followed by a Yield,
  turning scoring points into checkpoints.
* :func:`advance`         -- acknowledges up to ``n`` Yields, then hands
  back the *underlying* computation, unwrapped.
* :func:`finalize`        -- acknowledges every remaining Yield.
* :func:`replay`          -- answers Sample from a recorded trace,
  re-emitting only the draws the trace does not cover.

Every interpreter takes a :class:`~inferkit.effects.Step` and returns a
Step of the wrapped computation, which is itself suspendable, so any
composition of interpreters is again an interpreter.

The crucial property of :func:`advance` is that it does **not** stay on
the stack.  When it stops at the ``(n+1)``-th Yield it returns
:class:`StillSuspended` carrying the inner computation's own step; the
wrapper generator has finished and is garbage.  Driving a model through
thousands of checkpoints therefore composes thousands of advances
*sequentially*, never nesting them, and memory stays flat no matter how
many scoring points the model has.
"""

from __future__ import annotations

from typing import Any, Sequence, Union

from .effects import (
    Done,
    Model,
    Resumption,
    Sample,
    Score,
    Step,
    Suspended,
    Yield,
    start,
    start_gen,
)
from .logweight import LogWeight, lw_mul
from .randomness import RngState

__all__ = [
    "WeightedResult",
    "StillSuspended",
    "AdvanceOutcome",
    "weighted",
    "random_sampler",
    "yield_on_score",
    "advance",
    "finalize",
    "replay",
    "yield_on_score_model",
]


class WeightedResult:
    """Final value of a weighted run together with its accumulated weight."""

    __slots__ = ("weight", "value")

    def __init__(self, weight: LogWeight, value: Any):
        self.weight = weight
        self.value = value

    def __repr__(self) -> str:
        return f"WeightedResult({self.weight!r}, {self.value!r})"


class StillSuspended:
    """Advance stopped at an unacknowledged Yield.

    ``step`` is the inner computation's own suspended step -- no advance
    wrapper remains around it, so it can be advanced again, forked, or
    finalized directly.
    """

    __slots__ = ("step",)

    def __init__(self, step: Suspended):
        self.step = step

    @property
    def resumption(self) -> Resumption:
        return self.step.resumption

    def __repr__(self) -> str:
        return f"StillSuspended({self.step!r})"


AdvanceOutcome = Union[Done, StillSuspended]


def _weighted_gen(w0, step):
    w = w0
    while type(step) is Suspended:
        req = step.request
        if type(req) is Score:
            w = lw_mul(w, req.weight)
            step = step.resumption.resume(None)
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return WeightedResult(w, step.value)


def weighted(w0: LogWeight, step: Step) -> Step:
    """Absorb Score requests into a running weight, starting from ``w0``.

    Deep semantics: scores are multiplied in for the rest of the run, and
    Sample/Yield requests pass outward untouched.  The wrapped run
    finishes with a :class:`WeightedResult`.
    """
    return start_gen(_weighted_gen(w0, step))


def _random_sampler_gen(step, rng):
    while type(step) is Suspended:
        req = step.request
        if type(req) is Sample:
            step = step.resumption.resume(rng.next_unit_uniform())
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return step.value


def random_sampler(step: Step, rng: RngState) -> Step:
    """Answer every Sample request with the next uniform from ``rng``."""
    return start_gen(_random_sampler_gen(step, rng))


def _yield_on_score_gen(step):
    while type(step) is Suspended:
        req = step.request
        if type(req) is Score:
            yield req
            yield Yield()
            step = step.resumption.resume(None)
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return step.value


def yield_on_score(step: Step) -> Step:
    """Re-emit each Score followed by a Yield checkpoint.

    This is what gives particle methods their granularity: any model
    becomes interruptible exactly at its scoring points.
    """
    return start_gen(_yield_on_score_gen(step))


def yield_on_score_model(model: Model) -> Model:
    """Model-level form of :func:`yield_on_score`.

    The returned thunk restarts the whole composition, so suspensions of
    the composite can be forked.
    """

    def composed():
        return _yield_on_score_gen(start(model))

    return composed


def _advance_gen(step, n):
    acked = 0
    while type(step) is Suspended:
        req = step.request
        if type(req) is Yield:
            if acked == n:
                return StillSuspended(step)
            acked += 1
            step = step.resumption.resume(None)
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return Done(step.value)


def advance(step: Step, n: int) -> Step:
    """Acknowledge up to ``n`` Yields, stopping at the ``(n+1)``-th.

    Sample and Score pass outward.  The run finishes with an
    :data:`AdvanceOutcome`: ``Done(value)`` if the computation returned
    first, else :class:`StillSuspended` holding the inner step paused at
    the first unacknowledged Yield.  ``advance(m, a)`` then advancing the
    still-suspended step by ``b`` lands exactly where ``advance(m, a + b)``
    does.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    return start_gen(_advance_gen(step, n))


def _finalize_gen(step):
    while type(step) is Suspended:
        req = step.request
        if type(req) is Yield:
            step = step.resumption.resume(None)
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return step.value


def finalize(step: Step) -> Step:
    """Acknowledge every remaining Yield until the computation returns.

    Sample and Score still pass outward; enclosing interpreters must
    handle them.
    """
    return start_gen(_finalize_gen(step))


def _replay_gen(trace, step):
    tr = list(trace)
    consumed = 0
    while type(step) is Suspended:
        req = step.request
        if type(req) is Sample:
            if consumed < len(tr):
                u = tr[consumed]
            else:
                u = yield req
                tr.append(u)
            consumed += 1
            step = step.resumption.resume(u)
        else:
            resp = yield req
            step = step.resumption.resume(resp)
    return tr[:consumed], step.value


def replay(trace: Sequence[float], step: Step) -> Step:
    """Answer the ``i``-th Sample with ``trace[i]``; re-emit draws past the end.

    Fresh responses obtained from outer interpreters are appended, and on
    completion the run finishes with ``(final_trace, value)`` where
    ``final_trace`` is truncated to exactly the entries consumed.  Score
    and Yield pass outward.
    """
    return start_gen(_replay_gen(trace, step))
