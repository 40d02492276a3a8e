"""Batch command line: run any algorithm over any bundled model.

One subcommand per algorithm (``is``, ``smc``, ``tmcmc``, ``rmsmc``,
``pmmh``) plus ``oracle`` for the closed-form checkers.  Every run is
fully determined by its flags and seed: output files are byte-identical
across repeat runs (wall-clock time appears only in the stdout summary,
never in files).

Seed resolution: ``--seed`` flag, else the ``INFERKIT_SEED`` environment
variable, else 42.

Exit codes: 0 success; 2 configuration error; 3 inference degeneracy
(all weights zero); 4 input/output error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple

from .dataio import load_temperature_csv, slice_blocks, write_histogram
from .errors import (
    DataFormatError,
    DegenerateHistogram,
    InferKitError,
    ParticleDegeneracy,
)
from .inference import (
    Histogram,
    effective_sample_size,
    estimate_mean_std,
    importance_sampling,
    normalise,
    pmmh,
    rmsmc,
    smc,
    tmcmc,
)
from .logweight import ONE
from .models import (
    climate_month_model,
    hyperparams_for,
    logistic_regression_model,
    markov_chain_model,
    pmmh_decomposition,
    synthetic_logreg_data,
)
from .oracles import (
    enumerate_discrete_posterior,
    gaussian_grid_histogram,
    kalman_filter_exact,
)
from .randomness import RngState

__all__ = ["RunConfig", "run", "main"]

DEFAULT_SEED = 42
ENV_SEED = "INFERKIT_SEED"

ALGORITHMS = ("is", "smc", "tmcmc", "rmsmc", "pmmh")
MODELS = ("chain", "logreg", "climate")

# Checkpoint counts of the bundled models: the natural --steps default
# for checkpointed algorithms is "one resampling round per score".
_MODEL_CHECKPOINTS = {"chain": 6, "logreg": 50, "climate": 260}


@dataclass(slots=True)
class RunConfig:
    """Everything one inference run depends on."""

    algorithm: str
    model: str
    particles: int
    steps: int
    step_size: int
    mh_steps: int
    burnin: int
    seed: int
    data: Optional[str]
    month: Optional[int]
    out: Optional[str]
    format: Optional[str]
    json_summary: bool = False
    threads: int = 1


def _resolve_seed(flag_value: Optional[int]) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    algorithm = args.command
    model = args.model
    particles = args.particles
    if particles is None:
        particles = 10 if algorithm == "pmmh" else 2000
    steps = getattr(args, "steps", None)
    if steps is None:
        if algorithm == "tmcmc":
            steps = 100000
        elif algorithm == "pmmh":
            steps = 10
        elif algorithm == "is":
            steps = 0
        else:
            steps = _MODEL_CHECKPOINTS[model]
    burnin = getattr(args, "burnin", None)
    if burnin is None:
        burnin = steps * 4 // 5 if algorithm == "tmcmc" else 0
    mh_steps = getattr(args, "mh_steps", None)
    if mh_steps is None:
        mh_steps = 10 if algorithm == "pmmh" else (1 if algorithm == "rmsmc" else 0)
    cfg = RunConfig(
        algorithm=algorithm,
        model=model,
        particles=particles,
        steps=steps,
        step_size=getattr(args, "step_size", 1),
        mh_steps=mh_steps,
        burnin=burnin,
        seed=_resolve_seed(args.seed),
        data=getattr(args, "data", None),
        month=getattr(args, "month", None),
        out=args.out,
        format=args.format,
        json_summary=args.json_summary,
        threads=args.threads,
    )
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    for name, value in (
        ("--particles", cfg.particles),
        ("--step-size", cfg.step_size),
    ):
        if value < 1:
            raise ValueError(f"{name} must be at least 1, got {value}")
    for name, value in (
        ("--steps", cfg.steps),
        ("--mh-steps", cfg.mh_steps),
        ("--burnin", cfg.burnin),
    ):
        if value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    if cfg.threads < 1:
        raise ValueError(f"--threads must be at least 1, got {cfg.threads}")
    if cfg.model == "climate":
        if cfg.data is None:
            raise ValueError("--data is required for the climate model")
        if cfg.month is None:
            raise ValueError("--month is required for the climate model")
        if not 1 <= cfg.month <= 12:
            raise ValueError(f"--month must be in 1..12, got {cfg.month}")
    if cfg.algorithm == "tmcmc" and cfg.steps <= cfg.burnin:
        raise ValueError(
            f"--steps ({cfg.steps}) must exceed --burnin ({cfg.burnin}) to keep any samples"
        )
    if cfg.algorithm == "pmmh" and cfg.mh_steps <= cfg.burnin:
        raise ValueError(
            f"--mh-steps ({cfg.mh_steps}) must exceed --burnin ({cfg.burnin}) to keep any samples"
        )
    if cfg.format is not None and cfg.format not in ("csv", "json"):
        raise ValueError(f"--format must be csv or json, got {cfg.format!r}")


# ---------------------------------------------------------------------------
# Model wiring


def _quantities(model_name: str) -> List[Tuple[str, str, Callable]]:
    """(file suffix, quantity name, extractor) per reported quantity.

    The first entry is the run's primary quantity, the one summarised on
    stdout.
    """
    if model_name == "chain":
        return [("", "value", float)]
    if model_name == "logreg":
        return [
            ("slope", "slope", lambda v: float(v[0])),
            ("intercept", "intercept", lambda v: float(v[1])),
        ]
    # climate: the primary quantity is the final block's latent (the
    # filtered state); every block still gets its own output file.
    qs = [(f"block{b:02d}", f"block{b:02d}", (lambda b: lambda v: float(v[b]))(b)) for b in range(13)]
    return [qs[-1]] + qs[:-1]


def _pmmh_quantities(model_name: str) -> List[Tuple[str, str, Callable]]:
    if model_name == "logreg":
        return [
            ("slope", "slope", lambda v: float(v[0])),
            ("intercept", "intercept", lambda v: float(v[1])),
        ]
    # chain and climate: the parameter is the (scalar) starting state.
    return [("", "x0", float)]


def _build_model(cfg: RunConfig):
    """Returns (model, pmmh_pair, quantities) for the configured model."""
    if cfg.model == "chain":
        model = markov_chain_model
        pmmh_pair = pmmh_decomposition("chain") if cfg.algorithm == "pmmh" else None
    elif cfg.model == "logreg":
        data = synthetic_logreg_data()
        model = logistic_regression_model(data)
        pmmh_pair = pmmh_decomposition("logreg", data=data) if cfg.algorithm == "pmmh" else None
    else:
        records = load_temperature_csv(cfg.data)
        series = slice_blocks(records)[cfg.month - 1]
        hp = hyperparams_for(series.blocks)
        model = climate_month_model(series.blocks, hp)
        pmmh_pair = (
            pmmh_decomposition("climate", blocks=series.blocks, hp=hp)
            if cfg.algorithm == "pmmh"
            else None
        )
    quantities = _pmmh_quantities(cfg.model) if cfg.algorithm == "pmmh" else _quantities(cfg.model)
    return model, pmmh_pair, quantities


# ---------------------------------------------------------------------------
# Running and reporting


def _out_path(base: str, suffix: str) -> Path:
    p = Path(base)
    if not suffix:
        return p
    return p.with_name(f"{p.stem}_{suffix}{p.suffix}")


def _metadata(cfg: RunConfig, quantity: str) -> dict:
    meta = {
        "algorithm": cfg.algorithm,
        "model": cfg.model,
        "quantity": quantity,
        "seed": cfg.seed,
        "particles": cfg.particles,
        "steps": cfg.steps,
        "step_size": cfg.step_size,
        "mh_steps": cfg.mh_steps,
        "burnin": cfg.burnin,
    }
    if cfg.model == "climate":
        meta["month"] = cfg.month
        meta["data"] = cfg.data
    return meta


def run(cfg: RunConfig) -> int:
    """Execute one configured run; returns the process exit code."""
    if cfg.threads > 1:
        print(
            f"note: --threads {cfg.threads} requested; the deterministic "
            "single-stream contract runs sequentially",
            file=sys.stderr,
        )
    model, pmmh_pair, quantities = _build_model(cfg)
    rng = RngState(cfg.seed)
    t0 = time.perf_counter()
    if cfg.algorithm == "is":
        hist = importance_sampling(model, rng, k=cfg.particles)
    elif cfg.algorithm == "smc":
        hist = smc(cfg.particles, cfg.steps, cfg.step_size, model, True, rng)
    elif cfg.algorithm == "rmsmc":
        hist = rmsmc(model, cfg.particles, cfg.steps, cfg.step_size, cfg.mh_steps, rng)
    elif cfg.algorithm == "tmcmc":
        samples, _ = tmcmc(model, cfg.steps, ONE, cfg.burnin, rng)
        hist = normalise(Histogram([(ONE, result) for _, result in samples]))
    else:
        samples, _ = pmmh(
            pmmh_pair[0],
            pmmh_pair[1],
            n_particles=cfg.particles,
            smc_steps=cfg.steps,
            mh_steps=cfg.mh_steps,
            rng=rng,
        )
        kept = samples[cfg.burnin :]
        hist = normalise(Histogram([(ONE, result) for _, result in kept]))
    runtime = time.perf_counter() - t0

    outputs = []
    if cfg.out is not None:
        for suffix, quantity, extract in quantities:
            path = _out_path(cfg.out, suffix)
            scalar = Histogram([(w, extract(v)) for w, v in hist.entries])
            write_histogram(scalar, path, _metadata(cfg, quantity), cfg.format)
            outputs.append(str(path))

    _, primary_name, primary = quantities[0]
    mean, std = estimate_mean_std(hist, primary)
    ess = (
        effective_sample_size(hist.weights())
        if cfg.algorithm in ("is", "smc", "rmsmc")
        else None
    )

    if cfg.json_summary:
        summary = {
            "algorithm": cfg.algorithm,
            "model": cfg.model,
            "seed": cfg.seed,
            "particles": cfg.particles,
            "steps": cfg.steps,
            "step_size": cfg.step_size,
            "mh_steps": cfg.mh_steps,
            "burnin": cfg.burnin,
            "month": cfg.month,
            "n_entries": len(hist),
            "quantity": primary_name,
            "mean": mean,
            "std": std,
            "ess": ess,
            "runtime_sec": runtime,
            "outputs": outputs,
        }
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"algorithm={cfg.algorithm} model={cfg.model} seed={cfg.seed} entries={len(hist)}")
        if ess is not None:
            print(f"ess={ess:.6g}")
        print(f"{primary_name}_mean={mean:.10g}")
        print(f"{primary_name}_std={std:.10g}")
        print(f"runtime_sec={runtime:.3f}")
        for path in outputs:
            print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# Oracle subcommands


def _run_oracle_kalman(args: argparse.Namespace) -> int:
    means, variances = kalman_filter_exact(
        trans=args.trans,
        obs_coeff=args.obs_coeff,
        process_noise=args.process_noise,
        obs_noise=args.obs_noise,
        observations=args.obs,
        prior_mean=args.prior_mean,
        prior_var=args.prior_var,
    )
    final_mean = means[-1]
    final_std = variances[-1] ** 0.5
    if args.out is not None:
        hist = gaussian_grid_histogram(final_mean, final_std, args.grid_points, args.span)
        meta = {
            "algorithm": "oracle-kalman",
            "quantity": "filtered_state",
            "grid_points": args.grid_points,
            "span": args.span,
        }
        write_histogram(hist, Path(args.out), meta, args.format)
        print(f"wrote {args.out}")
    for t, (m, v) in enumerate(zip(means, variances)):
        print(f"t={t} mean={m:.10g} var={v:.10g}")
    print(f"filtered_mean={final_mean:.10g}")
    print(f"filtered_std={final_std:.10g}")
    return 0


def _run_oracle_enumerate(args: argparse.Namespace) -> int:
    if args.model == "chain":
        model = markov_chain_model
        extract = float
        quantity = "value"
    else:
        model = logistic_regression_model(synthetic_logreg_data())

        def extract(v):
            return float(v[0])

        quantity = "slope"
    hist = enumerate_discrete_posterior(model, args.resolution, value_fn=extract)
    mean, std = estimate_mean_std(hist)
    if args.out is not None:
        meta = {
            "algorithm": "oracle-enumerate",
            "model": args.model,
            "quantity": quantity,
            "resolution": args.resolution,
        }
        write_histogram(hist, Path(args.out), meta, args.format)
        print(f"wrote {args.out}")
    print(f"{quantity}_mean={mean:.10g}")
    print(f"{quantity}_std={std:.10g}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _float_list(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_run_flags(sp: argparse.ArgumentParser, algorithm: str) -> None:
    sp.add_argument("--model", choices=MODELS, required=True, help="bundled model to run")
    sp.add_argument(
        "--particles",
        type=int,
        default=None,
        help="particle count (default: 2000; pmmh inner runs: 10)",
    )
    if algorithm in ("smc", "rmsmc"):
        sp.add_argument(
            "--steps",
            type=int,
            default=None,
            help="resampling rounds (default: one per model checkpoint)",
        )
        sp.add_argument(
            "--step-size", dest="step_size", type=int, default=1,
            help="checkpoints advanced per round (default 1)",
        )
    elif algorithm == "tmcmc":
        sp.add_argument("--steps", type=int, default=None, help="MH steps (default 100000)")
    elif algorithm == "pmmh":
        sp.add_argument(
            "--steps", type=int, default=None, help="inner smc resampling rounds (default 10)"
        )
    if algorithm == "rmsmc":
        sp.add_argument(
            "--mh-steps", dest="mh_steps", type=int, default=None,
            help="trace-MH rejuvenation steps per round (default 1)",
        )
    if algorithm == "pmmh":
        sp.add_argument(
            "--mh-steps", dest="mh_steps", type=int, default=None,
            help="outer MH steps (default 10)",
        )
    if algorithm in ("tmcmc", "pmmh"):
        sp.add_argument(
            "--burnin", type=int, default=None,
            help="initial samples discarded (tmcmc default: 4/5 of --steps; pmmh default: 0)",
        )
    sp.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${ENV_SEED} or 42)")
    sp.add_argument("--data", default=None, help="temperature CSV path (climate model)")
    sp.add_argument("--month", type=int, default=None, help="calendar month 1..12 (climate model)")
    sp.add_argument("--out", default=None, help="histogram output path (derived per quantity)")
    sp.add_argument("--format", choices=("csv", "json"), default=None,
                    help="output format (default: from --out extension)")
    sp.add_argument("--json-summary", action="store_true", help="print summary as one JSON object")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker threads (>1 falls back to sequential deterministic mode)")
    sp.add_argument("-v", "--verbose", action="store_true",
                    help="log per-round effective sample sizes to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inferkit",
        description="Composable Bayesian inference over suspendable models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "is": "importance sampling",
        "smc": "sequential Monte Carlo with multinomial resampling",
        "tmcmc": "Metropolis-Hastings over the model's trace",
        "rmsmc": "resample-move SMC with trace-MH rejuvenation",
        "pmmh": "particle marginal Metropolis-Hastings",
    }
    for algorithm in ALGORITHMS:
        sp = sub.add_parser(algorithm, help=descriptions[algorithm])
        _add_run_flags(sp, algorithm)

    oracle = sub.add_parser("oracle", help="closed-form reference answers")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)

    ok = osub.add_parser("kalman", help="exact scalar linear-Gaussian filter")
    ok.add_argument("--obs", type=_float_list, required=True, help="observations y0,y1,...")
    ok.add_argument("--obs-coeff", dest="obs_coeff", type=_float_list, required=True,
                    help="observation coefficients, one per observation")
    ok.add_argument("--obs-noise", dest="obs_noise", type=_float_list, required=True,
                    help="observation noise variances, one per observation")
    ok.add_argument("--trans", type=_float_list, default=[],
                    help="transition coefficients, one per step (n-1 values)")
    ok.add_argument("--process-noise", dest="process_noise", type=float, default=0.0,
                    help="transition noise variance")
    ok.add_argument("--prior-mean", dest="prior_mean", type=float, required=True)
    ok.add_argument("--prior-var", dest="prior_var", type=float, required=True)
    ok.add_argument("--grid-points", dest="grid_points", type=int, default=1001,
                    help="grid resolution of the emitted posterior (default 1001)")
    ok.add_argument("--span", type=float, default=5.0,
                    help="grid half-width in posterior standard deviations (default 5)")
    ok.add_argument("--out", default=None, help="write the filtered posterior grid here")
    ok.add_argument("--format", choices=("csv", "json"), default=None)

    oe = osub.add_parser("enumerate", help="exhaustive grid integration of a model")
    oe.add_argument("--model", choices=("chain", "logreg"), required=True)
    oe.add_argument("--resolution", type=int, required=True,
                    help="grid cells per unit-interval draw")
    oe.add_argument("--out", default=None, help="write the normalised posterior here")
    oe.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        stream=sys.stderr,
        format="%(name)s %(levelname)s %(message)s",
    )
    try:
        if args.command == "oracle":
            if args.oracle_command == "kalman":
                return _run_oracle_kalman(args)
            return _run_oracle_enumerate(args)
        return run(_config_from_args(args))
    except (DegenerateHistogram, ParticleDegeneracy) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, InferKitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
