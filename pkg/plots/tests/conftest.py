"""Shared fixtures: hand-written histogram files in the public schema."""

import math
import random
from pathlib import Path

import matplotlib.pyplot as plt
import pytest


def write_histogram_csv(path: Path, metadata: dict, entries) -> Path:
    """Write (value, weight) pairs in the CSV contract the renderer reads.

    Weights are linear and need not be normalized; log_weight is derived.
    """
    lines = [f"# {k}={v}" for k, v in metadata.items()]
    lines.append("value,log_weight,weight")
    for value, weight in entries:
        lw = math.log(weight) if weight > 0 else float("-inf")
        lines.append(f"{value!r},{lw!r},{weight!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


def gaussian_entries(seed: int, mean: float, n: int = 200):
    """Deterministic weighted draws concentrating around ``mean``."""
    rng = random.Random(seed)
    entries = []
    for _ in range(n):
        v = rng.gauss(0.0, 3.0)
        w = math.exp(-((v - mean) ** 2) / 2.0)
        entries.append((v, w + 1e-12))
    return entries


@pytest.fixture
def block_files(tmp_path):
    """Thirteen block histograms, block b centered near b."""
    paths = []
    for b in range(13):
        path = tmp_path / f"run_block{b:02d}.csv"
        meta = {"algorithm": "smc", "model": "climate", "month": "7",
                "quantity": f"block{b:02d}", "seed": "42"}
        write_histogram_csv(path, meta, gaussian_entries(100 + b, float(b)))
        paths.append(path)
    return paths


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")
