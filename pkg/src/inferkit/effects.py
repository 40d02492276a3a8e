"""Suspendable models and the request/resume protocol.

A *model* is a zero-argument callable returning a Python generator.  The
generator computes normally until it needs something from its
interpreter, at which point it yields a request and suspends:

* :class:`Sample`  -- "give me one unit uniform"; resumed with a float in
  ``[0, 1)``.
* :class:`Score`   -- "multiply this weight into my run"; resumed with
  ``None`` once the enclosing interpreter has recorded it.
* :class:`Yield`   -- "this is a checkpoint"; resumed with ``None`` when
  the interpreter wants the model to continue.

Interpreters see each suspension as a :class:`Step`: either
:class:`Done` with the model's return value, or :class:`Suspended`
carrying the request and a :class:`Resumption`.  Resumptions are
*affine*: each may be resumed (or forked) at most once, which is what
makes it sound to hand them between interpreters.

``fork`` produces an independent copy of a suspended computation.
Python generators cannot be cloned, so forking works by *sharing*: the
fork point becomes a memoizing node, and all copies resuming it with the
same response advance the underlying generator only once.  Copies that
diverge (different sample responses) rebuild their own generator by
re-running the model from the start, feeding it the recorded sample
responses.  That replay is only possible for computations with a restart
thunk, and only correct for *response-deterministic* models: same
responses in, same requests out.  A model that violates this (e.g. reads
the wall clock or a global RNG) raises
:class:`~inferkit.errors.NondeterministicModel` when the divergence is
detected.

The recorded-response log keeps only Sample responses (Score and Yield
acknowledgements carry no information), stored as a structure-shared
linked list, so forks are O(1) and a computation that never samples logs
nothing at all no matter how many times it scores or yields.
"""

from __future__ import annotations

from types import GeneratorType
from typing import Any, Callable, Generator, Union

from .errors import (
    InferKitError,
    ModelError,
    NondeterministicModel,
    NotRestartable,
    ResponseTypeMismatch,
    ResumptionConsumed,
    UnhandledRequest,
)
from .logweight import LogWeight

__all__ = [
    "Sample",
    "Score",
    "Yield",
    "Request",
    "Done",
    "Suspended",
    "Step",
    "Resumption",
    "Model",
    "start",
    "start_gen",
    "resume",
    "fork",
    "result_of",
]


class Sample:
    """Request for one unit uniform in ``[0, 1)``."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Sample()"


class Score:
    """Request to multiply ``weight`` into the current run's weight."""

    __slots__ = ("weight",)

    def __init__(self, weight: LogWeight):
        if not isinstance(weight, LogWeight):
            raise TypeError(f"Score expects a LogWeight, got {type(weight).__name__}")
        self.weight = weight

    def __repr__(self) -> str:
        return f"Score({self.weight!r})"


class Yield:
    """Checkpoint request; interpreters decide when to continue past it."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Yield()"


Request = Union[Sample, Score, Yield]


class Done:
    """Terminal step: the computation returned ``value``."""

    __slots__ = ("value",)

    def __init__(self, value: Any):
        self.value = value

    def __repr__(self) -> str:
        return f"Done({self.value!r})"


class Suspended:
    """Non-terminal step: ``request`` is pending, ``resumption`` continues it."""

    __slots__ = ("request", "resumption")

    def __init__(self, request: Request, resumption: "Resumption"):
        self.request = request
        self.resumption = resumption

    def __repr__(self) -> str:
        return f"Suspended({self.request!r})"


Step = Union[Done, Suspended]

Model = Callable[[], Generator]


class _Node:
    """A shared suspension point in a forked computation.

    Holds the live generator (until handed to the first child), the
    memoized children by response, and everything replay needs to rebuild
    a generator positioned here: the restart thunk, the sample-response
    log (a cons list, leaf-first), and the number of responses consumed.
    """

    __slots__ = ("request", "gen", "thunk", "samples", "n_requests", "children")

    def __init__(self, request, gen, thunk, samples, n_requests):
        self.request = request
        self.gen = gen
        self.thunk = thunk
        self.samples = samples
        self.n_requests = n_requests
        self.children = {}


class _DoneCell:
    """Memoized terminal outcome of a shared node."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


def _send(gen, response):
    """Advance a generator one step; returns (finished, request_or_value)."""
    try:
        return False, gen.send(response)
    except StopIteration as stop:
        return True, stop.value
    except InferKitError:
        # Library errors raised inside model code (InvalidScale and
        # friends) propagate untouched; anything else is the model's own
        # failure and is wrapped so callers see one error type.
        raise
    except Exception as exc:
        raise ModelError(f"model raised {type(exc).__name__}: {exc}") from exc


def _check_request(req) -> None:
    if type(req) not in (Sample, Score, Yield):
        raise ModelError(
            f"model yielded {req!r}; models may only yield Sample, Score, or Yield requests"
        )


class Resumption:
    """Affine handle continuing a suspended computation.

    Exactly one of two backings is active: a privately held generator
    (the common case), or a shared :class:`_Node` once the suspension has
    been forked.
    """

    __slots__ = ("request", "_gen", "_node", "_thunk", "_samples", "_n_requests", "_consumed")

    def __init__(self, request, gen, thunk, samples, n_requests):
        self.request = request
        self._gen = gen
        self._node = None
        self._thunk = thunk
        self._samples = samples
        self._n_requests = n_requests
        self._consumed = False

    @classmethod
    def _at_node(cls, node: _Node) -> "Resumption":
        r = cls.__new__(cls)
        r.request = node.request
        r._gen = None
        r._node = node
        r._thunk = node.thunk
        r._samples = None
        r._n_requests = 0
        r._consumed = False
        return r

    def resume(self, response) -> Step:
        """Continue with ``response``; consumes this handle."""
        if self._consumed:
            raise ResumptionConsumed("this resumption was already resumed or forked away")
        req = self.request
        is_sample = type(req) is Sample
        if is_sample:
            if type(response) is not float or not (0.0 <= response < 1.0):
                raise ResponseTypeMismatch(
                    f"Sample must be resumed with a float in [0, 1), got {response!r}"
                )
        elif response is not None:
            raise ResponseTypeMismatch(
                f"{type(req).__name__} must be resumed with None, got {response!r}"
            )
        self._consumed = True

        node = self._node
        if node is None:
            gen = self._gen
            self._gen = None
            samples = (response, self._samples) if is_sample else self._samples
            finished, out = _send(gen, response)
            if finished:
                return Done(out)
            _check_request(out)
            return Suspended(
                out, Resumption(out, gen, self._thunk, samples, self._n_requests + 1)
            )

        key = response if is_sample else None
        hit = node.children.get(key)
        if hit is not None:
            if type(hit) is _DoneCell:
                return Done(hit.value)
            return Suspended(hit.request, Resumption._at_node(hit))
        gen = node.gen
        node.gen = None
        if gen is None:
            gen = _rebuild(node)
        finished, out = _send(gen, response)
        if finished:
            node.children[key] = _DoneCell(out)
            return Done(out)
        _check_request(out)
        samples = (response, node.samples) if is_sample else node.samples
        child = _Node(out, gen, node.thunk, samples, node.n_requests + 1)
        node.children[key] = child
        return Suspended(out, Resumption._at_node(child))

    def fork(self) -> "Resumption":
        """Independent copy of this suspension; both handles stay usable once each.

        Requires a restartable computation (one started from a model
        thunk); raises :class:`~inferkit.errors.NotRestartable` otherwise.
        """
        if self._consumed:
            raise ResumptionConsumed("cannot fork a consumed resumption")
        node = self._node
        if node is None:
            if self._thunk is None:
                raise NotRestartable(
                    "this computation was started from a bare generator and cannot be forked"
                )
            node = _Node(self.request, self._gen, self._thunk, self._samples, self._n_requests)
            self._gen = None
            self._node = node
        return Resumption._at_node(node)


def _rebuild(node: _Node):
    """Fresh generator positioned at ``node`` by replaying the response log."""
    gen = node.thunk()
    if not isinstance(gen, GeneratorType):
        raise ModelError("a model thunk must return a generator")
    log = []
    cell = node.samples
    while cell is not None:
        log.append(cell[0])
        cell = cell[1]
    log.reverse()
    i = 0
    finished, cur = _send(gen, None)
    for _ in range(node.n_requests):
        if finished:
            raise NondeterministicModel("model finished before reaching its recorded suspension")
        if type(cur) is Sample:
            if i >= len(log):
                raise NondeterministicModel("model requested more draws than were recorded")
            resp = log[i]
            i += 1
        else:
            resp = None
        finished, cur = _send(gen, resp)
    if finished or i != len(log) or not _same_request(cur, node.request):
        raise NondeterministicModel("replayed request stream diverged from the recorded one")
    return gen


def _same_request(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if type(a) is Score:
        return a.weight.log_value == b.weight.log_value
    return True


def start(model: Model) -> Step:
    """Begin running a model; returns its first step.

    The model callable is kept as a restart thunk, so every suspension
    reached from here can be forked.
    """
    if not callable(model):
        raise ModelError(f"a model must be callable, got {type(model).__name__}")
    gen = model()
    if not isinstance(gen, GeneratorType):
        raise ModelError("a model must return a generator when called")
    return _begin(gen, model)


def start_gen(gen: Generator) -> Step:
    """Begin running a bare generator (no restart thunk, so no forking).

    This is how interpreter wrappers become suspendable computations
    themselves.
    """
    if not isinstance(gen, GeneratorType):
        raise ModelError(f"start_gen expects a generator, got {type(gen).__name__}")
    return _begin(gen, None)


def _begin(gen, thunk) -> Step:
    finished, out = _send(gen, None)
    if finished:
        return Done(out)
    _check_request(out)
    return Suspended(out, Resumption(out, gen, thunk, None, 0))


def resume(resumption: Resumption, response) -> Step:
    """Function form of :meth:`Resumption.resume`."""
    return resumption.resume(response)


def fork(resumption: Resumption) -> Resumption:
    """Function form of :meth:`Resumption.fork`."""
    return resumption.fork()


def result_of(step: Step):
    """Value of a terminal step; raises if any request escaped unhandled."""
    if type(step) is Done:
        return step.value
    raise UnhandledRequest(
        f"a {type(step.request).__name__} request escaped the interpreter stack"
    )
