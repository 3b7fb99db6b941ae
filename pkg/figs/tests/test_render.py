"""Tests for the figure scripts against the committed golden CSVs.

These never invoke the computing package: inputs are the files under
``figs/golden``, and the checks compare plotted arrays to the raw CSV.
"""

import csv
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from render import FigureSpec, cut_along_ray, load_disk, load_heatmap, main, render_disk_and_cut, render_heatmap

GOLDEN = Path(__file__).resolve().parents[1] / "golden"
FIG2 = GOLDEN / "fig2_small.csv"
FT_DISK = GOLDEN / "ft_disk_small.csv"
RP_DISK = GOLDEN / "rp_disk_small.csv"


def csv_values(path, value_column):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows, value_column


class TestHeatmap:
    def test_plotted_array_matches_csv(self, tmp_path):
        spec = FigureSpec(str(FIG2), str(tmp_path / "fig2.png"))
        grid = render_heatmap(spec)
        rows, col = csv_values(FIG2, "ln_var_T")
        xs = sorted({float(r["nu1_hz"]) for r in rows})
        ys = sorted({float(r["nu2_hz"]) for r in rows})
        for r in rows:
            ix = xs.index(float(r["nu1_hz"]))
            iy = ys.index(float(r["nu2_hz"]))
            if r[col] == "":
                assert math.isnan(grid[iy, ix])
            else:
                assert grid[iy, ix] == float(r[col])
        assert (tmp_path / "fig2.png").stat().st_size > 0

    def test_byte_stable(self, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render_heatmap(FigureSpec(str(FIG2), str(a)))
        render_heatmap(FigureSpec(str(FIG2), str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_columns_fail_loudly(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\r\n1,2\r\n")
        with pytest.raises(ValueError, match="columns"):
            render_heatmap(FigureSpec(str(bad), str(tmp_path / "x.png")))

    def test_empty_input_fails(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert main(["--kind", "heatmap", "--input", str(empty), "--out", str(tmp_path / "x.png")]) == 1


class TestDisk:
    @pytest.mark.parametrize("path", [FT_DISK, RP_DISK])
    def test_plotted_array_matches_csv(self, tmp_path, path):
        grid = render_disk_and_cut(FigureSpec(str(path), str(tmp_path / "disk.png")))
        rows, col = csv_values(path, "ratio")
        xs = sorted({float(r["gamma_cos"]) for r in rows})
        for r in rows:
            ix = xs.index(float(r["gamma_cos"]))
            iy = xs.index(float(r["gamma_sin"]))
            if r[col] == "":
                assert math.isnan(grid[iy, ix])
            else:
                assert grid[iy, ix] == float(r[col])

    def test_cut_reuses_grid_cells(self):
        xs, ys, grid = load_disk(str(FT_DISK))
        gammas, values = cut_along_ray(xs, ys, grid, 0.0)
        row = grid[list(ys).index(0.0)]
        positives = [row[list(xs).index(x)] for x in xs if x > 0.0]
        assert np.array_equal(values, np.array(positives), equal_nan=True)

    def test_byte_stable(self, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render_disk_and_cut(FigureSpec(str(FT_DISK), str(a)), cut_phi=0.3)
        render_disk_and_cut(FigureSpec(str(FT_DISK), str(b)), cut_phi=0.3)
        assert a.read_bytes() == b.read_bytes()


class TestCommandLine:
    def test_script_invocation(self, tmp_path):
        script = Path(__file__).resolve().parents[1] / "render.py"
        out = tmp_path / "cli.png"
        proc = subprocess.run(
            [
                sys.executable,
                str(script),
                "--kind",
                "disk",
                "--input",
                str(RP_DISK),
                "--out",
                str(out),
                "--cut-phi",
                "0.0",
                "--dpi",
                "90",
            ],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.stat().st_size > 0
