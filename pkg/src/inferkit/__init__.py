"""inferkit: modular Bayesian inference from suspendable models.

A model is an ordinary generator function that yields requests --
``Sample`` (give me a unit uniform), ``Score`` (multiply my weight),
``Yield`` (checkpoint) -- and returns its value.  Inference algorithms
are compositions of small interpreters over the resulting step protocol:
importance sampling, sequential Monte Carlo, trace-space
Metropolis-Hastings, resample-move SMC, and particle marginal
Metropolis-Hastings are each a few lines of plumbing over the same
vocabulary.

Quick start::

    from inferkit import Sample, Score, importance_sampling, RngState
    from inferkit import lw_from_prob

    def coin():
        u = yield Sample()
        heads = u < 0.5
        yield Score(lw_from_prob(0.9 if heads else 0.1))
        return heads

    posterior = importance_sampling(coin, RngState(42), k=1000)
"""

from .dataio import (
    BLOCK_YEARS,
    N_BLOCKS,
    WINDOW_END_YEAR,
    WINDOW_START_YEAR,
    BlockSeries,
    MonthlyRecord,
    ci95_to_std,
    load_temperature_csv,
    read_histogram,
    slice_blocks,
    write_histogram,
)
from .effects import (
    Done,
    Model,
    Resumption,
    Sample,
    Score,
    Step,
    Suspended,
    Yield,
    fork,
    result_of,
    resume,
    start,
    start_gen,
)
from .errors import (
    DataFormatError,
    DegenerateHistogram,
    EmptyTrace,
    GridTooLarge,
    InferKitError,
    InvalidProbability,
    InvalidScale,
    ModelError,
    NegativeProbability,
    NondeterministicModel,
    NotRestartable,
    ParticleDegeneracy,
    ResponseTypeMismatch,
    ResumptionConsumed,
    UnhandledRequest,
    ZeroWeightDivisor,
)
from .handlers import (
    AdvanceOutcome,
    StillSuspended,
    WeightedResult,
    advance,
    finalize,
    random_sampler,
    replay,
    weighted,
    yield_on_score,
    yield_on_score_model,
)
from .inference import (
    Finished,
    Histogram,
    Particle,
    Running,
    TraceRecord,
    effective_sample_size,
    estimate_expectation,
    estimate_mean_std,
    importance_sampling,
    is_normalized,
    mh_step,
    multinomial_resample,
    normalise,
    perturb_trace,
    pmmh,
    populate,
    rmsmc,
    smc,
    tmcmc,
)
from .logweight import (
    ONE,
    ZERO,
    LogWeight,
    lw_div,
    lw_from_prob,
    lw_mul,
    lw_sum,
    lw_to_prob,
)
from .oracles import (
    enumerate_discrete_posterior,
    gaussian_grid_histogram,
    kalman_filter_exact,
)
from .models import (
    ClimateHyperParams,
    MonthObservations,
    climate_month_model,
    draw_bernoulli,
    draw_normal,
    draw_unit,
    hyperparams_for,
    logistic_regression_model,
    markov_chain_model,
    pmmh_decomposition,
    synthetic_logreg_data,
)
from .randomness import (
    RngState,
    bernoulli,
    derive_substream,
    gamma_sample,
    log_normal_pdf,
    normal,
    normal_from_uniforms,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # dataio
    "MonthlyRecord",
    "BlockSeries",
    "WINDOW_START_YEAR",
    "WINDOW_END_YEAR",
    "BLOCK_YEARS",
    "N_BLOCKS",
    "load_temperature_csv",
    "ci95_to_std",
    "slice_blocks",
    "write_histogram",
    "read_histogram",
    # oracles
    "kalman_filter_exact",
    "enumerate_discrete_posterior",
    "gaussian_grid_histogram",
    # effects
    "Sample",
    "Score",
    "Yield",
    "Done",
    "Suspended",
    "Step",
    "Model",
    "Resumption",
    "start",
    "start_gen",
    "resume",
    "fork",
    "result_of",
    # errors
    "InferKitError",
    "ZeroWeightDivisor",
    "NegativeProbability",
    "InvalidScale",
    "InvalidProbability",
    "ModelError",
    "ResumptionConsumed",
    "ResponseTypeMismatch",
    "NondeterministicModel",
    "NotRestartable",
    "UnhandledRequest",
    "DegenerateHistogram",
    "ParticleDegeneracy",
    "EmptyTrace",
    "DataFormatError",
    "GridTooLarge",
    # handlers
    "WeightedResult",
    "StillSuspended",
    "AdvanceOutcome",
    "weighted",
    "random_sampler",
    "yield_on_score",
    "yield_on_score_model",
    "advance",
    "finalize",
    "replay",
    # inference
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
    # logweight
    "LogWeight",
    "ZERO",
    "ONE",
    "lw_mul",
    "lw_div",
    "lw_sum",
    "lw_from_prob",
    "lw_to_prob",
    # models
    "draw_unit",
    "draw_normal",
    "draw_bernoulli",
    "markov_chain_model",
    "logistic_regression_model",
    "synthetic_logreg_data",
    "ClimateHyperParams",
    "MonthObservations",
    "hyperparams_for",
    "climate_month_model",
    "pmmh_decomposition",
    # randomness
    "RngState",
    "derive_substream",
    "normal_from_uniforms",
    "normal",
    "bernoulli",
    "gamma_sample",
    "log_normal_pdf",
]
