"""Inference algorithms assembled from the interpreter vocabulary.

Every algorithm here is a composition of the interpreters in
:mod:`inferkit.handlers` driven by explicit RNG streams:

* :func:`importance_sampling` -- run ``k`` weighted particles to
  completion and normalise.
* :func:`smc` -- populate particles paused at their first checkpoint,
  then alternate multinomial resampling with advancement by
  ``step_size`` checkpoints.
* :func:`tmcmc` -- Metropolis-Hastings over the model's *trace*, the
  list of unit uniforms it consumed; proposals perturb one entry and
  replay.
* :func:`rmsmc` -- smc over traced particles, inserting ``t_steps`` of
  trace-MH rejuvenation after each resampling step.
* :func:`pmmh` -- trace-MH over a parameter model whose score is the
  total mass of an inner smc run (a pseudo-marginal likelihood
  estimate).

Randomness discipline: a function that takes ``rng`` owns that stream.
Per-particle streams are spawned from it, the resampling stream is
spawned after them, and resampled slots are reseeded from the resampling
stream so duplicated particles diverge.  This layout is shared by
:func:`smc` and :func:`rmsmc` draw-for-draw, which is why
``rmsmc(..., t_steps=0, ...)`` reproduces ``smc`` bit-for-bit, and why
``smc(..., n_steps=0, ...)`` reproduces :func:`importance_sampling`.

The effective sample size of the weight vector is logged on the
``inferkit.inference`` logger at every resampling step.
"""

from __future__ import annotations

import bisect
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

from .effects import Done, Model, Score, Suspended, Yield, result_of, start
from .errors import (
    DegenerateHistogram,
    EmptyTrace,
    ParticleDegeneracy,
)
from .handlers import (
    advance,
    finalize,
    random_sampler,
    replay,
    weighted,
    yield_on_score_model,
)
from .logweight import ONE, LogWeight, lw_div, lw_from_prob, lw_sum
from .randomness import RngState, derive_substream

__all__ = [
    "Histogram",
    "Finished",
    "Running",
    "Particle",
    "TraceRecord",
    "populate",
    "normalise",
    "is_normalized",
    "importance_sampling",
    "estimate_expectation",
    "estimate_mean_std",
    "effective_sample_size",
    "multinomial_resample",
    "smc",
    "perturb_trace",
    "mh_step",
    "tmcmc",
    "rmsmc",
    "pmmh",
]

logger = logging.getLogger("inferkit.inference")


@dataclass(slots=True)
class Histogram:
    """An ordered weighted sample: ``(weight, value)`` entries.

    Duplicate values are legal and meaningful (they carry their own
    weights); order is preserved so that equal-seed runs produce
    identical histograms entry for entry.
    """

    entries: list

    def total(self) -> LogWeight:
        return lw_sum(w for w, _ in self.entries)

    def weights(self) -> list:
        return [w for w, _ in self.entries]

    def values(self) -> list:
        return [v for _, v in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


class Finished:
    """Particle state: the model returned ``value``."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __repr__(self) -> str:
        return f"Finished({self.value!r})"


class Running:
    """Particle state: suspended at an unacknowledged Yield checkpoint."""

    __slots__ = ("step",)

    def __init__(self, step: Suspended):
        self.step = step

    def __repr__(self) -> str:
        return "Running(...)"


class Particle:
    """One weighted particle: a weight, a state, and a private RNG stream."""

    __slots__ = ("weight", "state", "rng")

    def __init__(self, weight: LogWeight, state, rng: RngState):
        self.weight = weight
        self.state = state
        self.rng = rng


@dataclass(slots=True)
class TraceRecord:
    """A model run pinned down by its trace.

    ``trace`` is the list of unit uniforms the run consumed, ``weight``
    the product of its scores (times the run's initial weight), and
    ``result`` its return value.  Replaying ``trace`` through ``model``
    reproduces ``weight`` and ``result`` exactly.
    """

    model: Model
    weight: LogWeight
    trace: list
    result: Any


def _populate_particles(k: int, model: Model, rng: RngState) -> list:
    """Run ``k`` copies of a model up to their first checkpoint.

    Each particle starts with weight ``1/k`` and absorbs every score it
    passes; a model with no Yield checkpoints simply runs to completion.
    Each particle gets its own stream spawned from ``rng``, in slot
    order.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    w0 = lw_div(ONE, lw_from_prob(float(k)))
    particles = []
    for _ in range(k):
        prng = rng.spawn()
        wres = result_of(random_sampler(weighted(w0, advance(start(model), 0)), prng))
        outcome = wres.value
        if type(outcome) is Done:
            state = Finished(outcome.value)
        else:
            state = Running(outcome.step)
        particles.append(Particle(wres.weight, state, prng))
    return particles


def _finish_particles(particles: list) -> Histogram:
    """Run every still-suspended particle to completion; collect entries."""
    entries = []
    for p in particles:
        if type(p.state) is Running:
            wres = result_of(random_sampler(weighted(p.weight, finalize(p.state.step)), p.rng))
            entries.append((wres.weight, wres.value))
        else:
            entries.append((p.weight, p.state.value))
    return Histogram(entries)


def populate(k: int, model: Model, rng: RngState) -> Histogram:
    """``k`` independent weighted runs of a model, un-normalised.

    Every entry's weight is ``1/k`` times the product of the run's
    scores.  Checkpoints are acknowledged transparently.
    """
    return _finish_particles(_populate_particles(k, model, rng))


def normalise(h: Histogram) -> Histogram:
    """Scale weights so they sum to one; raises on zero total mass."""
    total = h.total()
    if total.is_zero():
        raise DegenerateHistogram("cannot normalise a histogram with zero total mass")
    return Histogram([(lw_div(w, total), v) for w, v in h.entries])


def is_normalized(h: Histogram, tol: float = 1e-9) -> bool:
    """True when the total mass is within ``tol`` of one (in log space)."""
    return abs(h.total().log_value) <= tol


def importance_sampling(model: Model, rng: RngState, k: int = 2000) -> Histogram:
    """Self-normalised importance sampling: ``normalise(populate(k, .))``."""
    return normalise(populate(k, model, rng))


def estimate_expectation(h: Histogram, f: Optional[Callable[[Any], float]] = None) -> float:
    """Self-normalised estimate of ``E[f(x)]`` under the histogram.

    Weights are exponentiated after shifting by the largest log weight,
    so the estimate is stable for arbitrarily small (or large) weights.
    """
    if not h.entries:
        raise DegenerateHistogram("cannot take an expectation over an empty histogram")
    if f is None:
        f = float
    m = max(w.log_value for w, _ in h.entries)
    if m == -math.inf:
        raise DegenerateHistogram("cannot take an expectation when all weights are zero")
    nums = []
    dens = []
    for w, v in h.entries:
        c = math.exp(w.log_value - m)
        nums.append(c * f(v))
        dens.append(c)
    return math.fsum(nums) / math.fsum(dens)


def estimate_mean_std(h: Histogram, f: Optional[Callable[[Any], float]] = None):
    """Posterior mean and standard deviation of ``f(x)``."""
    if f is None:
        f = float
    mean = estimate_expectation(h, f)
    var = estimate_expectation(h, lambda v: (f(v) - mean) ** 2)
    return mean, math.sqrt(max(var, 0.0))


def effective_sample_size(weights: Iterable[LogWeight]) -> float:
    """``(sum w)^2 / sum w^2`` computed in log space.

    Equals the particle count for uniform weights and collapses toward 1
    as the weight vector degenerates; 0.0 when every weight is zero.
    """
    logs = [w.log_value for w in weights]
    if not logs or max(logs) == -math.inf:
        return 0.0
    t1 = lw_sum(LogWeight(l) for l in logs)
    t2 = lw_sum(LogWeight(2.0 * l) for l in logs)
    return math.exp(2.0 * t1.log_value - t2.log_value)


def _resample_core(logs: Sequence[float], k_out: int, rng: RngState, where: str):
    """Multinomial selection; returns (total weight, chosen indices)."""
    if not logs:
        raise ParticleDegeneracy(f"no particles to resample{where}")
    m = max(logs)
    if m == -math.inf:
        raise ParticleDegeneracy(f"all particle weights are zero{where}")
    cum = []
    acc = 0.0
    for l in logs:
        acc += math.exp(l - m)
        cum.append(acc)
    total = lw_sum(LogWeight(l) for l in logs)
    span = cum[-1]
    last = len(logs) - 1
    indices = []
    for _ in range(k_out):
        u = rng.next_unit_uniform() * span
        idx = bisect.bisect_right(cum, u)
        indices.append(idx if idx <= last else last)
    return total, indices


def multinomial_resample(h: Histogram, k_out: int, rng: RngState) -> Histogram:
    """Draw ``k_out`` entries proportionally to weight, with replacement.

    The output spreads the input's *total* mass uniformly over the
    ``k_out`` copies, so resampling changes which values carry the mass
    but never the mass itself.
    """
    if not isinstance(k_out, int) or isinstance(k_out, bool) or k_out < 1:
        raise ValueError(f"k_out must be a positive integer, got {k_out!r}")
    logs = [w.log_value for w, _ in h.entries]
    total, indices = _resample_core(logs, k_out, rng, "")
    out_w = lw_div(total, lw_from_prob(float(k_out)))
    return Histogram([(out_w, h.entries[i][1]) for i in indices])


def _resample_particles(particles: list, k_out: int, rng: RngState, step_idx: int) -> list:
    logs = [p.weight.log_value for p in particles]
    ess = effective_sample_size(p.weight for p in particles)
    logger.info("resample step=%d ess=%.6g of %d", step_idx, ess, len(particles))
    total, indices = _resample_core(logs, k_out, rng, f" at resampling step {step_idx}")
    out_w = lw_div(total, lw_from_prob(float(k_out)))
    fresh = []
    for i in indices:
        src = particles[i]
        if type(src.state) is Running:
            step = src.state.step
            state = Running(Suspended(step.request, step.resumption.fork()))
        else:
            state = src.state
        fresh.append(Particle(out_w, state, src.rng))
    return fresh


def smc(
    n_particles: int,
    n_steps: int,
    step_size: int,
    model: Model,
    normalize_output: bool,
    rng: RngState,
) -> Histogram:
    """Sequential Monte Carlo over a model's scoring checkpoints.

    The model is wrapped so every score is followed by a checkpoint;
    ``n_steps`` rounds of (resample, advance ``step_size`` checkpoints)
    are applied, then all particles run to completion.  With
    ``n_steps=0`` this is exactly importance sampling on the same
    stream.
    """
    if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 0:
        raise ValueError(f"n_steps must be a non-negative integer, got {n_steps!r}")
    if not isinstance(step_size, int) or isinstance(step_size, bool) or step_size < 0:
        raise ValueError(f"step_size must be a non-negative integer, got {step_size!r}")
    composite = yield_on_score_model(model)
    particles = _populate_particles(n_particles, composite, rng)
    resample_rng = rng.spawn()
    for step_idx in range(n_steps):
        particles = _resample_particles(particles, n_particles, resample_rng, step_idx)
        for p in particles:
            p.rng = RngState(resample_rng.next_u64())
        for p in particles:
            if type(p.state) is not Running:
                continue
            wres = result_of(
                random_sampler(weighted(p.weight, advance(p.state.step, step_size)), p.rng)
            )
            outcome = wres.value
            p.weight = wres.weight
            if type(outcome) is Done:
                p.state = Finished(outcome.value)
            else:
                p.state = Running(outcome.step)
    h = _finish_particles(particles)
    return normalise(h) if normalize_output else h


def _run_traced(model: Model, trace: Sequence[float], rng: RngState, w0: LogWeight):
    """One weighted, trace-replayed run of a model; fresh draws from ``rng``.

    Returns ``(final_trace, WeightedResult)``.
    """
    st = random_sampler(replay(trace, weighted(w0, start(model))), rng)
    tr, wres = result_of(st)
    return tr, wres


def perturb_trace(trace: Sequence[float], rng: RngState) -> list:
    """Resample one uniformly-chosen entry of a trace; exactly two draws."""
    if not trace:
        raise EmptyTrace("cannot perturb an empty trace")
    i = int(rng.next_unit_uniform() * len(trace))
    if i >= len(trace):
        i = len(trace) - 1
    out = list(trace)
    out[i] = rng.next_unit_uniform()
    return out


def mh_step(model: Model, record: TraceRecord, rng: RngState, w0: LogWeight = ONE) -> TraceRecord:
    """One Metropolis-Hastings step over traces.

    Proposes a one-entry perturbation, replays it, and accepts with
    probability ``min(1, (q * |old|) / (p * |new|))`` where ``p`` and
    ``q`` are the old and proposed run weights and ``|.|`` the trace
    lengths (the correction for dimension-changing runs).  A zero-weight
    proposal is never accepted.  Exactly one decision uniform is
    consumed per step regardless of the ratio.
    """
    proposal = perturb_trace(record.trace, rng)
    new_trace, wres = _run_traced(model, proposal, rng, w0)
    q = wres.weight
    u = rng.next_unit_uniform()
    if q.is_zero():
        return record
    if not record.weight.is_zero():
        log_old_len = math.log(len(record.trace))
        log_new_len = math.log(len(new_trace)) if new_trace else -math.inf
        log_r = (q.log_value + log_old_len) - (record.weight.log_value + log_new_len)
        if log_r < 0.0 and u > 0.0 and math.log(u) >= log_r:
            return record
    return TraceRecord(record.model, q, new_trace, wres.value)


def tmcmc(
    model: Model,
    n_steps: int,
    initial_weight: LogWeight,
    burnin: int,
    rng: RngState,
):
    """Trace-space MCMC: ``n_steps`` of :func:`mh_step` after one full run.

    ``initial_weight`` multiplies every run's weight (it cancels in the
    acceptance ratio, but keeps records reproducible).  Returns
    ``(samples, final_record)`` where ``samples`` holds one
    ``(trace, result)`` pair per post-burnin step.
    """
    if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 0:
        raise ValueError(f"n_steps must be a non-negative integer, got {n_steps!r}")
    if not isinstance(burnin, int) or isinstance(burnin, bool) or burnin < 0:
        raise ValueError(f"burnin must be a non-negative integer, got {burnin!r}")
    tr0, wres0 = _run_traced(model, [], rng, initial_weight)
    if n_steps > 0 and not tr0:
        raise EmptyTrace("the model consumed no draws; there is no trace to explore")
    record = TraceRecord(model, wres0.weight, tr0, wres0.value)
    samples = []
    for idx in range(n_steps):
        record = mh_step(model, record, rng, initial_weight)
        if idx >= burnin:
            samples.append((record.trace, record.result))
    return samples, record


def _segment_model(model: Model, from_scores: int, to_yields):
    """A model that replays ``model`` between two checkpoint positions.

    Scores before the ``from_scores``-th acknowledged checkpoint are
    swallowed (their mass is already in the particle weight); later ones
    pass outward.  Execution stops just before acknowledging checkpoint
    number ``to_yields + 1`` and returns ``("running", None)``, or
    ``("done", value)`` if the model finishes first.  ``to_yields=None``
    runs to completion.
    """
    composite = yield_on_score_model(model)

    def segment():
        step = start(composite)
        n_yields = 0
        while type(step) is Suspended:
            req = step.request
            t = type(req)
            if t is Yield:
                if n_yields == to_yields:
                    return ("running", None)
                n_yields += 1
                step = step.resumption.resume(None)
            elif t is Score:
                if n_yields >= from_scores:
                    yield req
                step = step.resumption.resume(None)
            else:
                u = yield req
                step = step.resumption.resume(u)
        return ("done", step.value)

    return segment


class _TraceParticle:
    __slots__ = ("weight", "trace", "pos", "done", "value", "rng")

    def __init__(self, weight, trace, pos, done, value, rng):
        self.weight = weight
        self.trace = trace
        self.pos = pos
        self.done = done
        self.value = value
        self.rng = rng


def rmsmc(
    model: Model,
    n_particles: int,
    n_steps: int,
    step_size: int,
    t_steps: int,
    rng: RngState,
    *,
    normalize_output: bool = True,
) -> Histogram:
    """Resample-move SMC: smc over traced particles with MH rejuvenation.

    Each particle carries the trace of uniforms it has consumed.  A
    round resamples, then applies ``t_steps`` of trace-MH over each
    particle's consumed prefix (the move step), then extends every trace
    through the next ``step_size`` checkpoints.  With ``t_steps=0`` the
    rounds reduce to resample-and-extend, which consumes the exact same
    random stream as :func:`smc` and reproduces its output bit for bit.
    """
    if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 0:
        raise ValueError(f"n_steps must be a non-negative integer, got {n_steps!r}")
    if not isinstance(step_size, int) or isinstance(step_size, bool) or step_size < 0:
        raise ValueError(f"step_size must be a non-negative integer, got {step_size!r}")
    if not isinstance(t_steps, int) or isinstance(t_steps, bool) or t_steps < 0:
        raise ValueError(f"t_steps must be a non-negative integer, got {t_steps!r}")
    if not isinstance(n_particles, int) or isinstance(n_particles, bool) or n_particles < 1:
        raise ValueError(f"n_particles must be a positive integer, got {n_particles!r}")

    w0 = lw_div(ONE, lw_from_prob(float(n_particles)))
    particles = []
    for _ in range(n_particles):
        prng = rng.spawn()
        tr, wres = _run_traced(_segment_model(model, 0, 0), [], prng, w0)
        status, val = wres.value
        particles.append(
            _TraceParticle(wres.weight, tr, 0, status == "done", val, prng)
        )
    resample_rng = rng.spawn()

    for step_idx in range(n_steps):
        logs = [p.weight.log_value for p in particles]
        ess = effective_sample_size(p.weight for p in particles)
        logger.info("resample step=%d ess=%.6g of %d", step_idx, ess, len(particles))
        total, indices = _resample_core(
            logs, n_particles, resample_rng, f" at resampling step {step_idx}"
        )
        out_w = lw_div(total, lw_from_prob(float(n_particles)))
        particles = [
            _TraceParticle(
                out_w,
                particles[i].trace,
                particles[i].pos,
                particles[i].done,
                particles[i].value,
                particles[i].rng,
            )
            for i in indices
        ]
        for p in particles:
            p.rng = RngState(resample_rng.next_u64())
        if t_steps > 0:
            for p in particles:
                if not p.trace:
                    continue
                rejuvenation = _segment_model(model, 0, p.pos)
                tr0, wres0 = _run_traced(rejuvenation, p.trace, p.rng, ONE)
                rec = TraceRecord(rejuvenation, wres0.weight, tr0, wres0.value)
                for _ in range(t_steps):
                    rec = mh_step(rejuvenation, rec, p.rng, ONE)
                p.trace = rec.trace
                status, val = rec.result
                if status == "done":
                    p.done = True
                    p.value = val
        for p in particles:
            if p.done:
                continue
            segment = _segment_model(model, p.pos + 1, p.pos + step_size)
            tr, wres = _run_traced(segment, p.trace, p.rng, p.weight)
            status, val = wres.value
            p.weight = wres.weight
            p.trace = tr
            if status == "done":
                p.done = True
                p.value = val
            else:
                p.pos += step_size

    for p in particles:
        if p.done:
            continue
        segment = _segment_model(model, p.pos + 1, None)
        tr, wres = _run_traced(segment, p.trace, p.rng, p.weight)
        _, val = wres.value
        p.weight = wres.weight
        p.trace = tr
        p.done = True
        p.value = val

    h = Histogram([(p.weight, p.value) for p in particles])
    return normalise(h) if normalize_output else h


def pmmh(
    parameter_model: Model,
    main_model_ctor: Callable[[Any], Model],
    n_particles: int = 10,
    smc_steps: int = 10,
    mh_steps: int = 10,
    *,
    rng: RngState,
):
    """Particle marginal Metropolis-Hastings.

    ``parameter_model`` draws (and optionally scores) the parameters;
    ``main_model_ctor(params)`` builds the conditional model.  Each
    parameter proposal is scored by the *total un-normalised mass* of an
    inner smc run -- an unbiased likelihood estimate -- and explored
    with trace-MH, whose trace covers only the parameter draws.  The
    inner runs draw from dedicated substreams indexed by invocation, one
    fresh estimate per proposal.

    Returns ``(samples, final_record)`` as :func:`tmcmc` does, with
    parameter values as the results.
    """
    inner_base = rng.next_u64()
    calls = itertools.count()

    def pseudo_marginal_model():
        params = yield from parameter_model()
        inner_rng = RngState(derive_substream(inner_base, next(calls)))
        estimate = smc(n_particles, smc_steps, 1, main_model_ctor(params), False, inner_rng)
        yield Score(estimate.total())
        return params

    return tmcmc(pseudo_marginal_model, mh_steps, ONE, 0, rng)
