"""Tests for the batch histogram renderer."""

import json
import math
import re
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

import plots
from plots import (
    HistogramData,
    PlotInputError,
    PlotSpec,
    build_figure,
    main,
    read_histogram_file,
    render,
    weighted_mean_std,
)

from conftest import gaussian_entries, write_histogram_csv

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class TestReadHistogramFile:
    def test_parses_metadata_and_rows(self, tmp_path):
        path = write_histogram_csv(
            tmp_path / "h.csv",
            {"algorithm": "is", "seed": "7"},
            [(1.5, 0.25), (2.5, 0.75)],
        )
        data = read_histogram_file(path)
        assert data.metadata == {"algorithm": "is", "seed": "7"}
        assert list(data.values) == [1.5, 2.5]
        assert list(data.weights) == [0.25, 0.75]

    def test_normalizes_weights(self, tmp_path):
        path = write_histogram_csv(tmp_path / "h.csv", {}, [(0.0, 2.0), (1.0, 6.0)])
        data = read_histogram_file(path)
        assert list(data.weights) == [0.25, 0.75]

    def test_reads_json(self, tmp_path):
        doc = {
            "metadata": {"quantity": "slope"},
            "entries": [
                {"value": 0.5, "log_weight": -1.0, "weight": 0.5},
                {"value": 1.5, "log_weight": -1.0, "weight": 0.5},
            ],
        }
        path = tmp_path / "h.json"
        path.write_text(json.dumps(doc))
        data = read_histogram_file(path)
        assert data.metadata == {"quantity": "slope"}
        assert list(data.values) == [0.5, 1.5]

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlotInputError, match="cannot read"):
            read_histogram_file(tmp_path / "absent.csv")

    def test_wrong_header_names_file(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(PlotInputError, match="bad.csv.*expected header"):
            read_histogram_file(path)

    def test_non_numeric_value(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("value,log_weight,weight\nhello,0.0,1.0\n")
        with pytest.raises(PlotInputError, match="non-numeric"):
            read_histogram_file(path)

    def test_no_rows(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("value,log_weight,weight\n")
        with pytest.raises(PlotInputError, match="no data rows"):
            read_histogram_file(path)

    def test_all_zero_weights(self, tmp_path):
        path = write_histogram_csv(tmp_path / "z.csv", {}, [(1.0, 0.0), (2.0, 0.0)])
        with pytest.raises(PlotInputError, match="all weights are zero"):
            read_histogram_file(path)

    def test_broken_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(PlotInputError, match="invalid JSON"):
            read_histogram_file(path)


class TestWeightedStats:
    def test_two_point_mean_and_std(self):
        import numpy as np

        mean, std = weighted_mean_std(np.array([0.0, 4.0]), np.array([0.75, 0.25]))
        assert mean == 1.0
        assert std == pytest.approx(math.sqrt(0.75 * 1.0 + 0.25 * 9.0))


class TestHistogramGrid:
    def test_thirteen_panels(self, block_files):
        spec = PlotSpec(inputs=tuple(block_files), kind="histogram_grid",
                        out=Path("unused.png"))
        fig = build_figure(spec)
        assert len(fig.axes) == 13
        titles = [ax.get_title() for ax in fig.axes]
        assert titles == [f"block{b:02d}" for b in range(13)]

    def test_weights_drive_bar_mass_not_counts(self, tmp_path):
        # Three draws at 0 carry 3% of the mass; one draw at 5 carries 97%.
        path = write_histogram_csv(
            tmp_path / "w.csv", {},
            [(0.0, 0.01), (0.0, 0.01), (0.0, 0.01), (5.0, 0.97)],
        )
        spec = PlotSpec(inputs=(path,), kind="histogram_grid",
                        out=Path("unused.png"), bins=2)
        fig = build_figure(spec)
        bars = fig.axes[0].patches
        tallest = max(bars, key=lambda b: b.get_height())
        assert tallest.get_x() + tallest.get_width() / 2 > 2.5
        assert tallest.get_height() == pytest.approx(0.97)

    def test_suptitle_from_common_metadata(self, block_files):
        spec = PlotSpec(inputs=tuple(block_files), kind="histogram_grid",
                        out=Path("unused.png"))
        fig = build_figure(spec)
        assert fig.get_suptitle() == "smc / climate / month 7"

    def test_explicit_title_wins(self, block_files):
        spec = PlotSpec(inputs=tuple(block_files), kind="histogram_grid",
                        out=Path("unused.png"), title="July posteriors")
        fig = build_figure(spec)
        assert fig.get_suptitle() == "July posteriors"


class TestTrendLine:
    def test_one_line_one_band_ordered_by_block(self, block_files, tmp_path):
        shuffled = [block_files[i] for i in (7, 0, 12, 3, 1, 11, 2, 10, 4, 9, 5, 8, 6)]
        spec = PlotSpec(inputs=tuple(shuffled), kind="trend_line",
                        out=Path("unused.png"))
        fig = build_figure(spec)
        ax = fig.axes[0]
        assert len(ax.lines) == 1
        assert len(ax.collections) == 1  # the spread band
        xs = list(ax.lines[0].get_xdata())
        assert xs == [float(b) for b in range(13)]
        # Block b is centered near b, so means must trend upward overall.
        ys = list(ax.lines[0].get_ydata())
        assert ys[12] > ys[0]

    def test_inputs_without_block_metadata_keep_given_order(self, tmp_path):
        paths = [
            write_histogram_csv(tmp_path / f"run{i}.csv", {}, gaussian_entries(i, float(i)))
            for i in range(3)
        ]
        spec = PlotSpec(inputs=tuple(paths), kind="trend_line", out=Path("unused.png"))
        fig = build_figure(spec)
        assert list(fig.axes[0].lines[0].get_xdata()) == [0.0, 1.0, 2.0]


class TestPriorVsPosterior:
    def test_single_input_overlays_prior_and_posterior(self, tmp_path):
        path = write_histogram_csv(tmp_path / "h.csv", {"quantity": "value"},
                                   gaussian_entries(5, 2.0))
        spec = PlotSpec(inputs=(path,), kind="prior_vs_posterior",
                        out=Path("unused.png"))
        fig = build_figure(spec)
        ax = fig.axes[0]
        labels = [t.get_text() for t in ax.get_legend().get_texts()]
        assert labels == ["prior", "posterior"]

    def test_posterior_overlay_shifts_mass_toward_target(self, tmp_path):
        # Unweighted draws center at 0; the weights pull mass toward 2.
        path = write_histogram_csv(tmp_path / "h.csv", {}, gaussian_entries(5, 2.0))
        data = read_histogram_file(path)
        import numpy as np

        raw_mean = float(np.mean(data.values))
        weighted_mean, _ = weighted_mean_std(data.values, data.weights)
        assert weighted_mean > raw_mean + 0.5

    def test_two_inputs_labeled_from_metadata(self, tmp_path):
        a = write_histogram_csv(tmp_path / "a.csv", {"quantity": "before"},
                                gaussian_entries(1, 0.0))
        b = write_histogram_csv(tmp_path / "b.csv", {"quantity": "after"},
                                gaussian_entries(2, 1.0))
        spec = PlotSpec(inputs=(a, b), kind="prior_vs_posterior",
                        out=Path("unused.png"))
        fig = build_figure(spec)
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert labels == ["before", "after"]

    def test_three_inputs_rejected(self, tmp_path):
        paths = tuple(
            write_histogram_csv(tmp_path / f"{i}.csv", {}, [(0.0, 1.0)])
            for i in range(3)
        )
        spec = PlotSpec(inputs=paths, kind="prior_vs_posterior", out=Path("u.png"))
        with pytest.raises(PlotInputError, match="one or two inputs"):
            build_figure(spec)


class TestCli:
    def test_grid_writes_png(self, block_files, tmp_path, capsys):
        out = tmp_path / "grid.png"
        code = main([str(p) for p in block_files]
                    + ["--kind", "histogram_grid", "--out", str(out)])
        assert code == 0
        assert out.read_bytes().startswith(PNG_MAGIC)
        assert f"wrote {out}" in capsys.readouterr().out

    def test_prior_vs_posterior_writes_png(self, tmp_path):
        path = write_histogram_csv(tmp_path / "h.csv", {}, gaussian_entries(3, 1.0))
        out = tmp_path / "overlay.png"
        assert main([str(path), "--kind", "prior_vs_posterior", "--out", str(out)]) == 0
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_trend_line_writes_png(self, block_files, tmp_path):
        out = tmp_path / "trend.png"
        args = [str(p) for p in block_files] + ["--kind", "trend_line", "--out", str(out)]
        assert main(args) == 0
        assert out.read_bytes().startswith(PNG_MAGIC)

    def test_empty_input_list_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--kind", "histogram_grid", "--out", str(tmp_path / "x.png")])
        assert exc.value.code == 2
        assert "at least one input" in capsys.readouterr().err

    def test_unknown_kind_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["in.csv", "--kind", "pie", "--out", str(tmp_path / "x.png")])
        assert exc.value.code == 2

    def test_overlay_arity_is_usage_error(self, tmp_path):
        paths = [
            str(write_histogram_csv(tmp_path / f"{i}.csv", {}, [(0.0, 1.0)]))
            for i in range(3)
        ]
        with pytest.raises(SystemExit) as exc:
            main(paths + ["--kind", "prior_vs_posterior", "--out", str(tmp_path / "x.png")])
        assert exc.value.code == 2

    def test_schema_mismatch_exits_nonzero_naming_file(self, tmp_path, capsys):
        bad = tmp_path / "broken.csv"
        bad.write_text("wrong,header\n1,2\n")
        out = tmp_path / "x.png"
        code = main([str(bad), "--kind", "histogram_grid", "--out", str(out)])
        assert code == 1
        assert "broken.csv" in capsys.readouterr().err
        assert not out.exists()

    def test_rerender_is_byte_identical(self, block_files, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        args = [str(p) for p in block_files] + ["--kind", "histogram_grid"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_input_renders(self, tmp_path):
        doc = {"metadata": {"quantity": "value"},
               "entries": [{"value": float(i), "log_weight": 0.0, "weight": 1.0}
                           for i in range(10)]}
        path = tmp_path / "h.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "h.png"
        assert main([str(path), "--kind", "histogram_grid", "--out", str(out)]) == 0
        assert out.read_bytes().startswith(PNG_MAGIC)


class TestIndependence:
    def test_renderer_source_never_imports_the_inference_package(self):
        source = Path(plots.__file__).read_text()
        assert not re.search(r"^\s*(import|from)\s+inferkit\b", source, re.MULTILINE)

    def test_fresh_interpreter_import_pulls_no_inference_modules(self):
        code = (
            "import sys, plots; "
            "bad = [m for m in sys.modules if m.startswith('inferkit')]; "
            "assert not bad, bad; print('clean')"
        )
        proc = subprocess.run([sys.executable, "-c", code],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "clean"


@pytest.mark.skipif(shutil.which("inferkit") is None,
                    reason="inference CLI not on PATH")
class TestEndToEnd:
    def test_renders_files_written_by_the_inference_cli(self, tmp_path):
        hist = tmp_path / "chain.csv"
        proc = subprocess.run(
            ["inferkit", "smc", "--model", "chain", "--particles", "200",
             "--steps", "3", "--seed", "1", "--out", str(hist)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        out = tmp_path / "chain.png"
        assert main([str(hist), "--kind", "prior_vs_posterior", "--out", str(out)]) == 0
        assert out.read_bytes().startswith(PNG_MAGIC)
