#!/usr/bin/env python3
"""Render result figures from the CLI's CSV/JSON outputs.

Display only: this script applies no physics, it maps committed numbers to
pixels.  Two layouts are supported:

* ``heatmap``  -- log-variance over a frequency-pair grid, with the located
                  minimum overlaid as a white cross (read from the
                  ``<input>.summary.json`` sidecar when present);
* ``disk``     -- a scheme map over (|gamma| cos phi, |gamma| sin phi) plus a
                  one-dimensional cut along a fixed-angle ray, taken from the
                  exact grid cells (no resampling).

Usage:
    figs/render.py --kind heatmap --input fig2.csv --out fig2.png
    figs/render.py --kind disk --input ft.csv --out ft.png --cut-phi 0.0
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


@dataclass(frozen=True)
class FigureSpec:
    input_path: str
    out_path: str
    dpi: int = 150
    cmap: str = "viridis"
    vmin: float | None = None
    vmax: float | None = None


def _read_table(path: str, columns: tuple) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")
    header = tuple(rows[0])
    if header != columns:
        raise ValueError(f"{path}: expected columns {columns}, found {header}")
    if len(rows) == 1:
        raise ValueError(f"{path}: no data rows")
    table = {c: [] for c in columns}
    for row in rows[1:]:
        for c, cell in zip(columns, row):
            table[c].append(math.nan if cell == "" else float(cell))
    return table


def _gridify(x, y, v):
    xs = np.unique(np.asarray(x))
    ys = np.unique(np.asarray(y))
    grid = np.full((ys.size, xs.size), math.nan)
    xi = {val: i for i, val in enumerate(xs)}
    yi = {val: i for i, val in enumerate(ys)}
    for xv, yv, vv in zip(x, y, v):
        grid[yi[yv], xi[xv]] = vv
    return xs, ys, grid


def load_heatmap(path: str):
    table = _read_table(path, ("nu1_hz", "nu2_hz", "ln_var_T"))
    return _gridify(table["nu1_hz"], table["nu2_hz"], table["ln_var_T"])


def load_disk(path: str):
    table = _read_table(path, ("gamma_cos", "gamma_sin", "ratio"))
    return _gridify(table["gamma_cos"], table["gamma_sin"], table["ratio"])


def render_heatmap(spec: FigureSpec) -> np.ndarray:
    """Frequency-pair variance map; returns the plotted array."""
    xs, ys, grid = load_heatmap(spec.input_path)
    masked = np.ma.masked_invalid(grid)
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    mesh = ax.pcolormesh(
        xs / 1e15, ys / 1e15, masked, cmap=spec.cmap, vmin=spec.vmin, vmax=spec.vmax,
        shading="nearest",
    )
    ax.set_xlabel(r"frequency of mode 1 ($\times 10^{15}$ Hz)")
    ax.set_ylabel(r"frequency of mode 2 ($\times 10^{15}$ Hz)")
    fig.colorbar(mesh, ax=ax, label="ln variance")
    summary_path = Path(f"{spec.input_path}.summary.json")
    if summary_path.exists():
        summary = json.loads(summary_path.read_text())
        nu1, nu2 = summary["min"]["nu1_hz"], summary["min"]["nu2_hz"]
        for a, b in ((nu1, nu2), (nu2, nu1)):
            ax.plot(a / 1e15, b / 1e15, marker="x", color="white", markersize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=spec.dpi, metadata={"Software": None})
    plt.close(fig)
    return grid


def cut_along_ray(xs, ys, grid, cut_phi: float):
    """Exact grid cells nearest the ray at angle cut_phi; no interpolation."""
    radii = xs[xs >= 0.0]
    gammas, values = [], []
    for r in radii:
        if r == 0.0:
            continue
        gx, gy = r * math.cos(cut_phi), r * math.sin(cut_phi)
        ix = int(np.argmin(np.abs(xs - gx)))
        iy = int(np.argmin(np.abs(ys - gy)))
        gammas.append(math.hypot(xs[ix], ys[iy]))
        values.append(grid[iy, ix])
    return np.array(gammas), np.array(values)


def render_disk_and_cut(spec: FigureSpec, cut_phi: float = 0.0) -> np.ndarray:
    """Scheme-map disk with a fixed-angle cut; returns the plotted array."""
    xs, ys, grid = load_disk(spec.input_path)
    masked = np.ma.masked_invalid(grid)
    fig, (ax_disk, ax_cut) = plt.subplots(
        2, 1, figsize=(5.0, 8.0), gridspec_kw={"height_ratios": [1.2, 1.0]}
    )
    mesh = ax_disk.pcolormesh(
        xs, ys, masked, cmap=spec.cmap, vmin=spec.vmin, vmax=spec.vmax, shading="nearest"
    )
    ax_disk.set_xlabel(r"$|\gamma|\,\cos\phi$")
    ax_disk.set_ylabel(r"$|\gamma|\,\sin\phi$")
    ax_disk.set_aspect("equal")
    ax_disk.plot(
        [0.0, math.cos(cut_phi)], [0.0, math.sin(cut_phi)], linestyle="--", color="black", lw=1.0
    )
    fig.colorbar(mesh, ax=ax_disk)
    gammas, values = cut_along_ray(xs, ys, grid, cut_phi)
    keep = np.isfinite(values)
    ax_cut.plot(gammas[keep], values[keep], marker="o", ms=3.0)
    ax_cut.set_xlabel(r"$|\gamma|$")
    ax_cut.set_ylabel("ratio")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=spec.dpi, metadata={"Software": None})
    plt.close(fig)
    return grid


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render figures from committed CSVs.")
    parser.add_argument("--kind", choices=("heatmap", "disk"), required=True)
    parser.add_argument("--input", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--cut-phi", type=float, default=0.0)
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--vmin", type=float, default=None)
    parser.add_argument("--vmax", type=float, default=None)
    args = parser.parse_args(argv)
    spec = FigureSpec(args.input, args.out, dpi=args.dpi, vmin=args.vmin, vmax=args.vmax)
    try:
        if args.kind == "heatmap":
            render_heatmap(spec)
        else:
            render_disk_and_cut(spec, cut_phi=args.cut_phi)
    except (OSError, ValueError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
