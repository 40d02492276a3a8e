"""Regenerate tests/fixtures/temperature_monthly.csv.

A synthetic monthly temperature series from 1750-01 through 2016-12
(3204 rows): a fixed seasonal cycle plus a slow warming trend plus
seeded noise, with per-row CI95 widths.  The loader's 1756-2015 window
keeps 3120 of these rows (13 blocks x 20 years x 12 months) and drops
the other 84, which is exactly what the loader tests expect.

Usage: python3 tools/make_climate_fixture.py [out_path]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from inferkit.randomness import RngState, normal  # noqa: E402

FIRST_YEAR = 1750
LAST_YEAR = 2016
SEED = 0x5EED

# A mid-latitude seasonal profile, degrees Celsius.
SEASONAL = [-3.1, -2.8, 0.2, 4.6, 9.8, 14.3, 16.9, 15.8, 11.2, 6.3, 1.4, -1.9]
TREND_TOTAL = 0.9  # degrees of warming across the whole span
NOISE_STD = 1.5


def main() -> None:
    out_path = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "temperature_monthly.csv"
    )
    rng = RngState(SEED)
    span = LAST_YEAR - FIRST_YEAR
    lines = ["date,avg_temp,ci95"]
    for year in range(FIRST_YEAR, LAST_YEAR + 1):
        for month in range(1, 13):
            trend = TREND_TOTAL * (year - FIRST_YEAR) / span
            temp = SEASONAL[month - 1] + trend + normal(rng, 0.0, NOISE_STD)
            ci95 = 0.6 + 0.4 * rng.next_unit_uniform()
            lines.append(f"{year:04d}-{month:02d}-01,{temp:.2f},{ci95:.2f}")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_path} ({len(lines) - 1} rows)")


if __name__ == "__main__":
    main()
