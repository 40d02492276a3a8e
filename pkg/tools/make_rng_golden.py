"""Regenerate tests/golden/rng_seed42.txt.

Writes the first 64 unit uniforms of seed 42, one ``repr`` per line.
Before writing, the sequence is recomputed with an independent numpy
uint64 implementation of the same published generator and the two are
required to agree bit for bit -- so the golden file never just mirrors
the code under test.

Usage: python3 tools/make_rng_golden.py [out_path]
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from inferkit.randomness import RngState  # noqa: E402

SEED = 42
N = 64


def splitmix64_uniforms_numpy(seed: int, n: int) -> list:
    """SplitMix64 unit uniforms via numpy uint64 wraparound arithmetic."""
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    state = np.uint64(seed)
    out = []
    with np.errstate(over="ignore"):
        for _ in range(n):
            state = state + gamma
            z = state
            z = (z ^ (z >> np.uint64(30))) * m1
            z = (z ^ (z >> np.uint64(27))) * m2
            z = z ^ (z >> np.uint64(31))
            out.append(float(z >> np.uint64(11)) * 2.0**-53)
    return out


def main() -> None:
    out_path = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "tests" / "golden" / "rng_seed42.txt"
    )
    independent = splitmix64_uniforms_numpy(SEED, N)
    rng = RngState(SEED)
    package = [rng.next_unit_uniform() for _ in range(N)]
    if independent != package:
        for i, (a, b) in enumerate(zip(independent, package)):
            if a != b:
                raise SystemExit(f"mismatch at draw {i}: numpy={a!r} package={b!r}")
        raise SystemExit("length mismatch")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("".join(f"{u!r}\n" for u in package), encoding="utf-8")
    print(f"wrote {out_path} ({N} draws, cross-checked)")


if __name__ == "__main__":
    main()
