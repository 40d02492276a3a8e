#!/usr/bin/env python3
"""Batch renderer for weighted-histogram result files.

Reads the histogram files the inference CLI writes -- CSV with ``#
key=value`` metadata comments and ``value,log_weight,weight`` rows, or
the equivalent JSON document -- and renders them to raster images.
Three figure kinds:

- ``histogram_grid``: one weighted histogram panel per input file,
  arranged in a grid (one panel per posterior block, for example).
- ``trend_line``: one point per input file (its weighted mean) joined
  by a line, with a +/-1 weighted-std spread band.
- ``prior_vs_posterior``: overlaid densities.  With a single input the
  raw values (the prior draws) are overlaid with the weighted values
  (the posterior); with two inputs the first is drawn as the prior and
  the second as the posterior.

Weights are always honored: panels show probability mass, not raw draw
counts.  Rendering is read-only and deterministic -- the same inputs
and flags produce a byte-identical image.

This module deliberately knows nothing about the inference library; it
consumes only the public file contract, so either side can be used or
deleted without the other.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

KINDS = ("histogram_grid", "trend_line", "prior_vs_posterior")
CSV_HEADER = ["value", "log_weight", "weight"]


class PlotInputError(Exception):
    """An input file does not follow the histogram schema."""

    def __init__(self, path: Path, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


@dataclass(frozen=True)
class HistogramData:
    """One parsed input: metadata plus aligned value/weight arrays."""

    path: Path
    metadata: Dict[str, str]
    values: np.ndarray
    weights: np.ndarray  # normalized to sum to 1


@dataclass(frozen=True)
class PlotSpec:
    """Everything one render needs: inputs, kind, output, and labels."""

    inputs: Tuple[Path, ...]
    kind: str
    out: Path
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None
    bins: int = 40
    cols: int = 4
    dpi: int = 100


def _parse_rows(path: Path, rows: List[Tuple[str, str, str]]) -> Tuple[np.ndarray, np.ndarray]:
    values, weights = [], []
    for value_s, _log_weight_s, weight_s in rows:
        try:
            values.append(float(value_s))
            weights.append(float(weight_s))
        except ValueError:
            raise PlotInputError(
                path, f"non-numeric row ({value_s!r}, {weight_s!r})"
            ) from None
    if not values:
        raise PlotInputError(path, "no data rows")
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(v)) or not np.all(np.isfinite(w)) or np.any(w < 0):
        raise PlotInputError(path, "values and weights must be finite, weights non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise PlotInputError(path, "all weights are zero")
    return v, w / total


def _read_csv(path: Path, text: str) -> HistogramData:
    metadata: Dict[str, str] = {}
    body: List[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                metadata[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise PlotInputError(path, "missing header row")
    reader = csv.reader(body)
    header = next(reader)
    if header != CSV_HEADER:
        raise PlotInputError(path, f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
    rows = []
    for row in reader:
        if len(row) != 3:
            raise PlotInputError(path, f"expected 3 fields, got {len(row)}")
        rows.append((row[0], row[1], row[2]))
    values, weights = _parse_rows(path, rows)
    return HistogramData(path, metadata, values, weights)


def _read_json(path: Path, text: str) -> HistogramData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlotInputError(path, f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise PlotInputError(path, "expected an object with 'entries'")
    metadata = {str(k): str(v) for k, v in dict(doc.get("metadata", {})).items()}
    rows = []
    for entry in doc["entries"]:
        if not isinstance(entry, dict) or "value" not in entry or "weight" not in entry:
            raise PlotInputError(path, "entries need 'value' and 'weight' fields")
        rows.append((str(entry["value"]), str(entry.get("log_weight", "0")), str(entry["weight"])))
    values, weights = _parse_rows(path, rows)
    return HistogramData(path, metadata, values, weights)


def read_histogram_file(path: Path) -> HistogramData:
    """Parse one histogram file (CSV or JSON, by suffix)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PlotInputError(path, f"cannot read: {exc}") from None
    if path.suffix.lower() == ".json":
        return _read_json(path, text)
    return _read_csv(path, text)


def weighted_mean_std(values: np.ndarray, weights: np.ndarray) -> Tuple[float, float]:
    """Self-normalized mean and standard deviation."""
    mean = float(np.average(values, weights=weights))
    var = float(np.average((values - mean) ** 2, weights=weights))
    return mean, math.sqrt(max(var, 0.0))


def _panel_title(data: HistogramData) -> str:
    return data.metadata.get("quantity", data.path.stem)


def _figure_title(spec: PlotSpec, inputs: Sequence[HistogramData]) -> Optional[str]:
    if spec.title:
        return spec.title
    parts = []
    for key in ("algorithm", "model", "month"):
        values = {d.metadata.get(key) for d in inputs}
        if len(values) == 1 and None not in values:
            value = values.pop()
            parts.append(f"{key} {value}" if key == "month" else value)
    return " / ".join(parts) if parts else None


_BLOCK_RE = re.compile(r"^block(\d+)$")


def _block_positions(inputs: Sequence[HistogramData]) -> Optional[List[int]]:
    """Block indices parsed from quantity metadata, if every input has one."""
    positions = []
    for data in inputs:
        m = _BLOCK_RE.match(data.metadata.get("quantity", ""))
        if not m:
            return None
        positions.append(int(m.group(1)))
    return positions


def _build_histogram_grid(spec: PlotSpec, inputs: Sequence[HistogramData]):
    n = len(inputs)
    cols = min(spec.cols, n)
    rows = math.ceil(n / cols)
    fig = plt.figure(figsize=(3.0 * cols, 2.4 * rows))
    for i, data in enumerate(inputs):
        ax = fig.add_subplot(rows, cols, i + 1)
        ax.hist(data.values, bins=spec.bins, weights=data.weights, color="#4878cf")
        ax.set_title(_panel_title(data), fontsize=9)
        ax.tick_params(labelsize=7)
        if spec.xlabel and i // cols == rows - 1:
            ax.set_xlabel(spec.xlabel, fontsize=8)
        if spec.ylabel and i % cols == 0:
            ax.set_ylabel(spec.ylabel, fontsize=8)
    title = _figure_title(spec, inputs)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def _build_trend_line(spec: PlotSpec, inputs: Sequence[HistogramData]):
    stats = [weighted_mean_std(d.values, d.weights) for d in inputs]
    positions = _block_positions(inputs)
    if positions is None:
        positions = list(range(len(inputs)))
    order = np.argsort(positions)
    xs = np.asarray(positions, dtype=float)[order]
    means = np.asarray([s[0] for s in stats])[order]
    stds = np.asarray([s[1] for s in stats])[order]

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.fill_between(xs, means - stds, means + stds, alpha=0.25, color="#4878cf",
                    linewidth=0, label="+/- 1 std")
    ax.plot(xs, means, marker="o", color="#4878cf", label="weighted mean")
    ax.set_xlabel(spec.xlabel or "block")
    ax.set_ylabel(spec.ylabel or "value")
    ax.legend(fontsize=8)
    title = _figure_title(spec, inputs)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def _density_label(data: HistogramData, fallback: str) -> str:
    return data.metadata.get("quantity", fallback)


def _build_prior_vs_posterior(spec: PlotSpec, inputs: Sequence[HistogramData]):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if len(inputs) == 1:
        data = inputs[0]
        # The values are the proposal's draws; rendering them unweighted
        # shows the prior, reweighting them shows the posterior.
        ax.hist(data.values, bins=spec.bins, density=True, histtype="step",
                color="#999999", label="prior")
        ax.hist(data.values, bins=spec.bins, weights=data.weights, density=True,
                histtype="step", color="#c0392b", label="posterior")
    else:
        prior, posterior = inputs
        ax.hist(prior.values, bins=spec.bins, weights=prior.weights, density=True,
                histtype="step", color="#999999",
                label=_density_label(prior, "prior"))
        ax.hist(posterior.values, bins=spec.bins, weights=posterior.weights,
                density=True, histtype="step", color="#c0392b",
                label=_density_label(posterior, "posterior"))
    ax.set_xlabel(spec.xlabel or "value")
    ax.set_ylabel(spec.ylabel or "density")
    ax.legend(fontsize=8)
    title = _figure_title(spec, inputs)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def build_figure(spec: PlotSpec):
    """Parse the spec's inputs and build (but do not save) its figure."""
    if not spec.inputs:
        raise PlotInputError(Path("-"), "at least one input file is required")
    if spec.kind == "prior_vs_posterior" and len(spec.inputs) not in (1, 2):
        raise PlotInputError(spec.inputs[0], "prior_vs_posterior takes one or two inputs")
    if spec.kind not in KINDS:
        raise ValueError(f"unknown kind {spec.kind!r}")
    inputs = [read_histogram_file(p) for p in spec.inputs]
    if spec.kind == "histogram_grid":
        return _build_histogram_grid(spec, inputs)
    if spec.kind == "trend_line":
        return _build_trend_line(spec, inputs)
    return _build_prior_vs_posterior(spec, inputs)


def render(spec: PlotSpec) -> Path:
    """Render the spec to its output path and return that path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return spec.out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render weighted-histogram result files to images.",
    )
    parser.add_argument("inputs", nargs="*", type=Path,
                        help="histogram CSV/JSON files, in panel order")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure style to render")
    parser.add_argument("--out", required=True, type=Path,
                        help="output image path (PNG recommended)")
    parser.add_argument("--title", help="figure title (default: from file metadata)")
    parser.add_argument("--xlabel", help="x axis label")
    parser.add_argument("--ylabel", help="y axis label")
    parser.add_argument("--bins", type=int, default=40, help="histogram bin count")
    parser.add_argument("--cols", type=int, default=4, help="grid columns")
    parser.add_argument("--dpi", type=int, default=100, help="output resolution")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.inputs:
        parser.error("at least one input file is required")
    if args.kind == "prior_vs_posterior" and len(args.inputs) not in (1, 2):
        parser.error("prior_vs_posterior takes one or two inputs")
    if args.bins < 1 or args.cols < 1 or args.dpi < 1:
        parser.error("--bins, --cols, and --dpi must be positive")
    spec = PlotSpec(
        inputs=tuple(args.inputs),
        kind=args.kind,
        out=args.out,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        bins=args.bins,
        cols=args.cols,
        dpi=args.dpi,
    )
    try:
        out = render(spec)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
