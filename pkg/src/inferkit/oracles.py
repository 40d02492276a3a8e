"""Closed-form and exhaustive reference answers for checking inference.

Two independent ways to compute a posterior without Monte Carlo:

* :func:`kalman_filter_exact` -- the scalar linear-Gaussian filtering
  recursion, giving the exact filtered mean and variance after each
  observation of a model the samplers can also be run on.

* :func:`enumerate_discrete_posterior` -- runs a model on every point of
  a uniform grid over its unit-interval draws (midpoints of ``resolution``
  equal cells per draw), weighting each leaf by its scores and the cell
  mass.  For models whose likelihood is piecewise constant at that
  resolution this is the exact posterior; otherwise it converges as the
  grid refines.

Both are deliberately written against the public model interface only,
so agreement with the samplers is evidence, not circularity.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

from .effects import Done, Sample, Score, Yield, start
from .errors import GridTooLarge, ModelError
from .inference import Histogram, normalise
from .logweight import LogWeight

__all__ = [
    "kalman_filter_exact",
    "enumerate_discrete_posterior",
    "gaussian_grid_histogram",
]

MAX_GRID_LEAVES = 10**6


def kalman_filter_exact(
    trans: Sequence[float],
    obs_coeff: Sequence[float],
    process_noise: float,
    obs_noise: Sequence[float],
    observations: Sequence[float],
    prior_mean: float,
    prior_var: float,
):
    """Exact filtered means and variances of a scalar linear-Gaussian chain.

    The latent starts as ``x1 ~ N(prior_mean, prior_var)``; thereafter
    ``x[t+1] = trans[t] * x[t] + N(0, process_noise)``.  Observation ``t``
    is ``y[t] ~ N(obs_coeff[t] * x[t], obs_noise[t])`` (variances, not
    standard deviations).  Returns ``(means, variances)`` with one entry
    per observation: the posterior of ``x[t]`` given ``y[0..t]``.
    """
    n = len(observations)
    if n == 0:
        raise ValueError("need at least one observation")
    if len(obs_coeff) != n or len(obs_noise) != n:
        raise ValueError("obs_coeff and obs_noise must match observations in length")
    if len(trans) != n - 1:
        raise ValueError(f"trans must have {n - 1} entries for {n} observations")
    if not prior_var > 0.0:
        raise ValueError(f"prior_var must be positive, got {prior_var}")
    if process_noise < 0.0:
        raise ValueError(f"process_noise must be non-negative, got {process_noise}")
    for t, r in enumerate(obs_noise):
        if not r > 0.0:
            raise ValueError(f"obs_noise[{t}] must be positive, got {r}")

    means = []
    variances = []
    m, p = float(prior_mean), float(prior_var)
    for t in range(n):
        if t > 0:
            a = trans[t - 1]
            m = a * m
            p = a * a * p + process_noise
        c = obs_coeff[t]
        s = c * c * p + obs_noise[t]
        gain = p * c / s
        m = m + gain * (observations[t] - c * m)
        p = (1.0 - gain * c) * p
        means.append(m)
        variances.append(p)
    return means, variances


def enumerate_discrete_posterior(
    model: Callable,
    resolution: int,
    value_fn: Optional[Callable] = None,
    max_leaves: int = MAX_GRID_LEAVES,
) -> Histogram:
    """Exhaustively integrate a model over a midpoint grid of its draws.

    Every unit-interval draw is answered with each of the ``resolution``
    cell midpoints ``(j + 0.5) / resolution`` in turn, branching the
    computation with :meth:`Resumption.fork`; each completed branch
    contributes its return value weighted by its accumulated scores times
    the cell probabilities.  Returns the normalised histogram.  Raises
    :class:`GridTooLarge` once more than ``max_leaves`` branches finish.
    """
    if not isinstance(resolution, int) or isinstance(resolution, bool) or resolution < 1:
        raise ValueError(f"resolution must be a positive integer, got {resolution!r}")
    midpoints = [(j + 0.5) / resolution for j in range(resolution)]
    log_cell = -math.log(resolution)
    entries = []

    def explore(step, log_w: float):
        while True:
            if type(step) is Done:
                if len(entries) >= max_leaves:
                    raise GridTooLarge(
                        f"grid enumeration exceeded {max_leaves} leaves; lower the resolution"
                    )
                value = step.value if value_fn is None else value_fn(step.value)
                entries.append((LogWeight(log_w), value))
                return
            request = step.request
            if type(request) is Sample:
                break
            if type(request) is Score:
                log_w = log_w + request.weight.log_value
                step = step.resumption.resume(None)
            elif type(request) is Yield:
                step = step.resumption.resume(None)
            else:  # pragma: no cover - _check_request rejects these earlier
                raise ModelError(f"unhandled request {request!r}")
        first = step.resumption
        branches = [first.fork() for _ in range(resolution - 1)]
        explore(first.resume(midpoints[0]), log_w + log_cell)
        for branch, midpoint in zip(branches, midpoints[1:]):
            explore(branch.resume(midpoint), log_w + log_cell)

    explore(start(model), 0.0)
    return normalise(Histogram(entries))


def gaussian_grid_histogram(
    mean: float, std: float, n_points: int = 1001, span: float = 5.0
) -> Histogram:
    """Discretise a Gaussian onto an even grid of ``n_points`` between
    ``mean - span*std`` and ``mean + span*std``, normalised."""
    if not std > 0.0:
        raise ValueError(f"std must be positive, got {std}")
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    lo = mean - span * std
    hi = mean + span * std
    step = (hi - lo) / (n_points - 1)
    entries = []
    for i in range(n_points):
        x = lo + i * step
        z = (x - mean) / std
        entries.append((LogWeight(-0.5 * z * z), x))
    return normalise(Histogram(entries))
