"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Callable, Iterator

import pytest

from inferkit import (
    ONE,
    Done,
    LogWeight,
    RngState,
    Sample,
    Score,
    Step,
    Yield,
    lw_mul,
    start,
)

TESTS_DIR = Path(__file__).parent
GOLDEN_DIR = TESTS_DIR / "golden"
FIXTURES_DIR = TESTS_DIR / "fixtures"


@pytest.fixture
def rng() -> RngState:
    """A fresh deterministic RNG stream."""
    return RngState(42)


@pytest.fixture
def climate_csv() -> Path:
    path = FIXTURES_DIR / "temperature_monthly.csv"
    assert path.exists(), "climate fixture missing; run tools/make_climate_fixture.py"
    return path


@pytest.fixture
def rng_golden() -> Path:
    path = GOLDEN_DIR / "rng_seed42.txt"
    assert path.exists(), "RNG golden file missing; run tools/make_rng_golden.py"
    return path


def drive(
    step: Step,
    respond: Callable[[Sample], float] | None = None,
) -> tuple[Any, dict[str, int], LogWeight]:
    """Run a suspended model to completion, counting requests.

    Sample requests are answered by ``respond`` (default: constant 0.5).
    Returns (result, counts, total_score) where counts has keys
    "sample", "score", "yield".
    """
    counts = {"sample": 0, "score": 0, "yield": 0}
    total = ONE
    while not isinstance(step, Done):
        req = step.request
        if isinstance(req, Sample):
            counts["sample"] += 1
            answer = 0.5 if respond is None else respond(req)
            step = step.resumption.resume(answer)
        elif isinstance(req, Score):
            counts["score"] += 1
            total = lw_mul(total, req.weight)
            step = step.resumption.resume(None)
        elif isinstance(req, Yield):
            counts["yield"] += 1
            step = step.resumption.resume(None)
        else:  # pragma: no cover - defensive
            raise AssertionError(f"unexpected request {req!r}")
    return step.value, counts, total


def drive_model(
    model: Callable[[], Iterator[Any]],
    respond: Callable[[Sample], float] | None = None,
) -> tuple[Any, dict[str, int], LogWeight]:
    """Convenience wrapper: start ``model`` and drive it to completion."""
    return drive(start(model), respond)


def assert_logweight_close(a: LogWeight, b: LogWeight, rel: float = 1e-12) -> None:
    """Assert two log-weights agree to relative tolerance in log space."""
    la, lb = a.log(), b.log()
    if math.isinf(la) or math.isinf(lb):
        assert la == lb, f"log weights differ: {la} vs {lb}"
        return
    scale = max(abs(la), abs(lb), 1.0)
    assert abs(la - lb) <= rel * scale, f"log weights differ: {la} vs {lb}"
