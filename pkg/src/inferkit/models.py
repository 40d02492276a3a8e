"""Model-authoring helpers and the stock models.

Models are generator functions that yield requests.  The draw helpers
here are meant to be used with ``yield from`` so that a model reads like
straight-line probabilistic code:

    def my_model():
        x = yield from draw_normal(0.0, 1.0)
        yield Score(log_normal_pdf(observed, 0.5, x))
        return x

Each helper consumes a fixed number of unit-uniform Sample requests
(``draw_unit``: one, ``draw_normal``: two, ``draw_bernoulli``: one), so
a model's trace has a predictable layout and can be replayed and
perturbed positionally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .effects import Model, Sample, Score
from .errors import InvalidProbability
from .logweight import lw_from_prob
from .randomness import RngState, log_normal_pdf, normal_from_uniforms

__all__ = [
    "draw_unit",
    "draw_normal",
    "draw_bernoulli",
    "markov_chain_model",
    "logistic_regression_model",
    "synthetic_logreg_data",
    "ClimateHyperParams",
    "MonthObservations",
    "climate_month_model",
    "hyperparams_for",
    "pmmh_decomposition",
]


def draw_unit():
    """One unit uniform in ``[0, 1)``; consumes one Sample."""
    u = yield Sample()
    return u


def draw_normal(mu: float, sigma: float):
    """Gaussian draw; consumes exactly two Samples (Box-Muller)."""
    u1 = yield Sample()
    u2 = yield Sample()
    return normal_from_uniforms(u1, u2, mu, sigma)


def draw_bernoulli(p: float):
    """Coin flip, true iff ``u < p``; consumes exactly one Sample."""
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p!r}")
    u = yield Sample()
    return u < p


def markov_chain_model():
    """Random walk of six Gaussian steps, each scored against 3.0.

    ``x`` starts at 0; every step samples ``x ~ N(x, 1)`` and scores
    ``N(x; 3.0, 0.2)``, so the posterior over the final position
    concentrates near 3.  Consumes exactly 12 Samples and issues exactly
    6 Scores.
    """
    x = 0.0
    for _ in range(6):
        x = yield from draw_normal(x, 1.0)
        yield Score(log_normal_pdf(x, 0.2, 3.0))
    return x


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def logistic_regression_model(data: Sequence) -> Model:
    """Bayesian logistic regression with standard-normal priors.

    ``data`` is a sequence of ``(x, y)`` pairs with boolean ``y``.  The
    model draws slope and intercept (four Samples total) and issues one
    Bernoulli-likelihood Score per datum, then returns
    ``(slope, intercept)``.
    """
    if not data:
        raise ValueError("logistic regression needs at least one data point")

    def model():
        slope = yield from draw_normal(0.0, 1.0)
        intercept = yield from draw_normal(0.0, 1.0)
        for x, y in data:
            p = _sigmoid(slope * x + intercept)
            yield Score(lw_from_prob(p if y else 1.0 - p))
        return (slope, intercept)

    return model


def synthetic_logreg_data(n: int = 50):
    """Deterministic synthetic classification data.

    ``n`` points with inputs evenly spaced on [-2, 2] and labels drawn
    once from a fixed ground truth (slope 1.5, intercept -0.3) on a
    fixed internal stream, so every caller sees the same data.
    """
    rng = RngState(0xD1CE)
    xs = [-2.0 + 4.0 * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    data = []
    for x in xs:
        p = _sigmoid(1.5 * x - 0.3)
        data.append((x, rng.next_unit_uniform() < p))
    return data


@dataclass(frozen=True, slots=True)
class ClimateHyperParams:
    """Priors for the per-month temperature state-space model.

    ``init_lo``/``init_hi`` bound the uniform prior over the first
    block's latent temperature and are data-derived (see
    :func:`hyperparams_for`); the rest are fixed modelling choices: the
    year-to-year persistence ``a ~ N(1, 0.4)``, the drift
    ``w ~ N(0, 1)``, a multiplicative thermometer bias
    ``c ~ N(1, 0.05)``, and a wide observation noise of 4.7 degrees.
    """

    a_mean: float = 1.0
    a_std: float = 0.4
    w_mean: float = 0.0
    w_std: float = 1.0
    therm_bias_mean: float = 0.0
    therm_bias_std: float = 0.05
    score_sigma: float = 4.7
    init_lo: float = -10.0
    init_hi: float = 10.0


@dataclass(frozen=True, slots=True)
class MonthObservations:
    """One month's readings inside one twenty-year block.

    ``ys`` are the observed monthly averages; ``vs`` the per-reading
    measurement standard deviations, index-aligned with ``ys``.
    """

    ys: tuple
    vs: tuple

    def __post_init__(self):
        if len(self.ys) != len(self.vs):
            raise ValueError(
                f"ys and vs must align: {len(self.ys)} readings vs {len(self.vs)} spreads"
            )
        if any(not v > 0.0 for v in self.vs):
            raise ValueError("every observation spread must be positive")


def hyperparams_for(blocks: Sequence[MonthObservations]) -> ClimateHyperParams:
    """Hyperparameters with the initial prior spanning the first block's data."""
    first = blocks[0].ys
    if not first:
        raise ValueError("the first block has no observations to bound the initial prior")
    return ClimateHyperParams(init_lo=min(first), init_hi=max(first))


def climate_month_model(
    blocks: Sequence[MonthObservations], hp: Optional[ClimateHyperParams] = None
) -> Model:
    """State-space model for one calendar month across 13 twenty-year blocks.

    The latent temperature of block 0 is uniform on
    ``[init_lo, init_hi]`` (one Sample); each later block evolves as
    ``x_i = a * x_{i-1} + w`` with ``a ~ N(1, 0.4)`` and ``w ~ N(0, 1)``.
    Every reading scores the prediction ``x_i * c + v`` -- ``c`` a
    multiplicative thermometer bias, ``v`` that reading's measurement
    noise -- against the observed value at spread 4.7.  Returns the list
    of 13 latent block temperatures.
    """
    if len(blocks) != 13:
        raise ValueError(f"expected 13 blocks of observations, got {len(blocks)}")
    if hp is None:
        hp = hyperparams_for(blocks)

    def model():
        latents = []
        x = 0.0
        for i, block in enumerate(blocks):
            if i == 0:
                u = yield from draw_unit()
                x = hp.init_lo + u * (hp.init_hi - hp.init_lo)
            else:
                a = yield from draw_normal(hp.a_mean, hp.a_std)
                w = yield from draw_normal(hp.w_mean, hp.w_std)
                x = x * a + w
            for y, v in zip(block.ys, block.vs):
                c = yield from draw_normal(1.0 + hp.therm_bias_mean, hp.therm_bias_std)
                noise = yield from draw_normal(0.0, v)
                pred = x * c + noise
                yield Score(log_normal_pdf(y, hp.score_sigma, pred))
            latents.append(x)
        return latents

    return model


def pmmh_decomposition(name: str, **kwargs):
    """Parameter-model / conditional-model split of a stock model.

    Returns ``(parameter_model, main_model_ctor)`` suitable for
    :func:`~inferkit.inference.pmmh`:

    * ``chain``: the starting position is the parameter
      (``x0 ~ N(0, 1)``); the conditional model is the six-step walk
      begun at ``x0``.
    * ``logreg``: slope and intercept are the parameters; the
      conditional model replays the per-datum likelihood scores
      (``data=`` keyword as for :func:`logistic_regression_model`).
    * ``climate``: the first block's latent temperature is the parameter
      (uniform over its data-derived range); the conditional model runs
      the remaining blocks (``blocks=`` and optional ``hp=`` keywords).
    """
    if name == "chain":

        def parameter_model():
            x0 = yield from draw_normal(0.0, 1.0)
            return x0

        def main_ctor(x0):
            def conditional():
                x = x0
                for _ in range(6):
                    x = yield from draw_normal(x, 1.0)
                    yield Score(log_normal_pdf(x, 0.2, 3.0))
                return x

            return conditional

        return parameter_model, main_ctor

    if name == "logreg":
        data = kwargs["data"]

        def parameter_model():
            slope = yield from draw_normal(0.0, 1.0)
            intercept = yield from draw_normal(0.0, 1.0)
            return (slope, intercept)

        def main_ctor(params):
            slope, intercept = params

            def conditional():
                for x, y in data:
                    p = _sigmoid(slope * x + intercept)
                    yield Score(lw_from_prob(p if y else 1.0 - p))
                return params

            return conditional

        return parameter_model, main_ctor

    if name == "climate":
        blocks = kwargs["blocks"]
        if len(blocks) != 13:
            raise ValueError(f"expected 13 blocks of observations, got {len(blocks)}")
        hp = kwargs.get("hp") or hyperparams_for(blocks)

        def parameter_model():
            u = yield from draw_unit()
            return hp.init_lo + u * (hp.init_hi - hp.init_lo)

        def main_ctor(x0):
            def conditional():
                latents = []
                x = x0
                for i, block in enumerate(blocks):
                    if i > 0:
                        a = yield from draw_normal(hp.a_mean, hp.a_std)
                        w = yield from draw_normal(hp.w_mean, hp.w_std)
                        x = x * a + w
                    for y, v in zip(block.ys, block.vs):
                        c = yield from draw_normal(1.0 + hp.therm_bias_mean, hp.therm_bias_std)
                        noise = yield from draw_normal(0.0, v)
                        yield Score(log_normal_pdf(y, hp.score_sigma, x * c + noise))
                    latents.append(x)
                return latents

            return conditional

        return parameter_model, main_ctor

    raise ValueError(f"unknown model name {name!r}")
