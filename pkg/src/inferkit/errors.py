"""Exception taxonomy for the whole library.

Every error raised deliberately by this package derives from
:class:`InferKitError`, so callers can catch one base class.  The CLI maps
subfamilies to process exit codes (config -> 2, degeneracy -> 3, IO -> 4).
"""


class InferKitError(Exception):
    """Base class for all errors raised by this library."""


class ZeroWeightDivisor(InferKitError):
    """Division of a weight by the zero weight."""


class NegativeProbability(InferKitError):
    """A probability outside [0, +inf) was passed where one is required."""


class InvalidScale(InferKitError):
    """A scale (standard deviation or shape) parameter was not positive."""


class InvalidProbability(InferKitError):
    """A probability outside [0, 1] was passed to a Bernoulli draw."""


class ModelError(InferKitError):
    """A model raised an exception while executing."""


class ResumptionConsumed(InferKitError):
    """A resumption was resumed (or forked) after it was already used."""


class ResponseTypeMismatch(InferKitError):
    """A suspension was resumed with a response of the wrong type."""


class NondeterministicModel(InferKitError):
    """A restarted model diverged from its recorded request/response log."""


class NotRestartable(InferKitError):
    """Fork or restart was requested on a computation without a thunk."""


class UnhandledRequest(InferKitError):
    """A request escaped past the outermost interpreter."""


class DegenerateHistogram(InferKitError):
    """A histogram with zero total mass cannot be normalized or summarized."""


class ParticleDegeneracy(InferKitError):
    """Every particle weight collapsed to zero during a resampling step."""


class EmptyTrace(InferKitError):
    """A trace operation that needs at least one entry got an empty trace."""


class DataFormatError(InferKitError):
    """An input data file violates its documented format."""


class GridTooLarge(InferKitError):
    """Exhaustive enumeration would exceed the supported grid size."""
