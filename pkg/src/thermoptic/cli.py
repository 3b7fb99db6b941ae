"""Command-line interface: every computation as a reproducible, file-emitting run.

Each subcommand writes its outputs plus a ``<out>.manifest.json`` sidecar
recording the subcommand, the full parameter set, the seed, the tool version
and SHA-256 digests of every file written; re-running with the same
parameters reproduces the files bit for bit.

Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical failure (diagnostic JSON
on stderr).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__, bench, blackbody, povm, spatial, verify
from .gaussian import SpatialParams

_FIG2_NU_MIN = 1e13
_FIG2_NU_MAX = 3e15


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_path: str, subcommand: str, parameters: dict, seed, outputs: list[str]):
    manifest = {
        "subcommand": subcommand,
        "parameters": parameters,
        "seed": seed,
        "version": __version__,
        "outputs": {p: _digest(p) for p in outputs},
    }
    _write_json(f"{out_path}.manifest.json", manifest)


def _fmt(value: float) -> str:
    return repr(float(value))


def cmd_temp_variance(args) -> int:
    scene = blackbody.BlackbodyScene(args.temp, args.kappa)
    grid = np.linspace(args.nu_min, args.nu_max, args.grid)
    best = (math.inf, None, None)
    rows = []
    for nu2 in grid:
        for nu1 in grid:
            if nu1 == nu2:
                rows.append((nu1, nu2, None))
                continue
            var = blackbody.variance_bound_cofactor(sorted((nu1, nu2)), scene, 0)
            if not (math.isfinite(var) and var > 0.0):
                rows.append((nu1, nu2, None))
                continue
            ln_var = math.log(var)
            rows.append((nu1, nu2, ln_var))
            if ln_var < best[0]:
                best = (ln_var, min(nu1, nu2), max(nu1, nu2))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu1_hz", "nu2_hz", "ln_var_T"])
        for nu1, nu2, val in rows:
            writer.writerow([_fmt(nu1), _fmt(nu2), "" if val is None else _fmt(val)])
    summary_path = f"{args.out}.summary.json"
    _write_json(
        summary_path,
        {
            "temp_kelvin": args.temp,
            "kappa_s2": args.kappa,
            "grid": args.grid,
            "min": {"nu1_hz": best[1], "nu2_hz": best[2], "ln_var_T": best[0]},
        },
    )
    _write_manifest(
        args.out,
        "temp-variance",
        {
            "temp": args.temp,
            "kappa": args.kappa,
            "nu_min": args.nu_min,
            "nu_max": args.nu_max,
            "grid": args.grid,
            "out": args.out,
        },
        None,
        [args.out, summary_path],
    )
    return 0


def cmd_opt_freq(args) -> int:
    rows = []
    for temp in args.temp:
        scene = blackbody.BlackbodyScene(temp, args.kappa)
        nu1, nu2 = blackbody.optimal_frequencies(scene)
        rows.append(
            {
                "T": temp,
                "nu1": nu1,
                "nu2": nu2,
                "nu1_over_T": nu1 / temp,
                "nu2_over_T": nu2 / temp,
            }
        )
    _write_json(args.out, {"kappa_s2": args.kappa, "rows": rows})
    _write_manifest(
        args.out,
        "opt-freq",
        {"temp": list(args.temp), "kappa": args.kappa, "out": args.out},
        None,
        [args.out],
    )
    return 0


def cmd_spatial_map(args) -> int:
    result = bench.ratio_map(
        args.scheme,
        grid_n=args.grid,
        n_mean=args.n_mean,
        seed=args.seed,
        n_phases=args.n_phases,
        n_trials=args.n_trials,
    )
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma_cos", "gamma_sin", "ratio"])
        for iy, gy in enumerate(result.axis):
            for ix, gx in enumerate(result.axis):
                val = result.values[iy, ix]
                writer.writerow(
                    [_fmt(gx), _fmt(gy), "" if not math.isfinite(val) else _fmt(val)]
                )
    meta_path = f"{args.out}.meta.json"
    _write_json(meta_path, {"scheme": args.scheme, "grid": args.grid, **result.metadata})
    _write_manifest(
        args.out,
        "spatial-map",
        {
            "scheme": args.scheme,
            "n_mean": args.n_mean,
            "grid": args.grid,
            "n_phases": args.n_phases,
            "n_trials": args.n_trials,
            "out": args.out,
        },
        args.seed,
        [args.out, meta_path],
    )
    return 0


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite, seed=args.seed)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    failed = sum(not c.ok for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 3


def cmd_povm_search(args) -> int:
    params = SpatialParams(args.n_mean, args.gamma, args.phi)
    result = povm.optimize_povm(params, restarts=args.restarts, seed=args.seed)
    weighted = spatial.weighted_scheme(params).cost_star
    payload = {
        "params": {"n_mean": args.n_mean, "gamma": args.gamma, "phi": args.phi},
        "best_cost": result.best_cost,
        "weighted_cost": weighted,
        "gap": result.best_cost / weighted - 1.0,
        "povm": {
            "u1_coefficients": list(result.best_vector[0:8]),
            "u2_coefficients": list(result.best_vector[8:16]),
            "p": float(np.clip(result.best_vector[16], 1e-3, 1.0 - 1e-3)),
        },
        "restarts": args.restarts,
    }
    _write_json(args.out, payload)
    _write_manifest(
        args.out,
        "povm-search",
        {
            "n_mean": args.n_mean,
            "gamma": args.gamma,
            "phi": args.phi,
            "restarts": args.restarts,
            "out": args.out,
        },
        args.seed,
        [args.out],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermoptic", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("temp-variance", help="single-shot temperature-variance map over frequency pairs")
    p.add_argument("--temp", type=float, default=1e4, help="source temperature [K]")
    p.add_argument("--kappa", type=float, default=1e-32, help="geometry bundle [s^2]")
    p.add_argument("--nu-min", type=float, default=_FIG2_NU_MIN)
    p.add_argument("--nu-max", type=float, default=_FIG2_NU_MAX)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_temp_variance)

    p = sub.add_parser("opt-freq", help="optimal counting frequencies per temperature")
    p.add_argument("--temp", type=float, action="append", required=True)
    p.add_argument("--kappa", type=float, default=1e-32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_opt_freq)

    p = sub.add_parser("spatial-map", help="scheme performance over the coherence disk")
    p.add_argument("--scheme", choices=("ft", "rp", "weighted"), required=True)
    p.add_argument("--n-mean", type=float, default=0.01)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-phases", type=int, default=1000)
    p.add_argument("--n-trials", type=int, default=400)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spatial_map)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--suite", choices=("core", "oracle", "all"), default="core")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("povm-search", help="six-element POVM optimisation at one parameter point")
    p.add_argument("--n-mean", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--phi", type=float, default=math.pi / 4)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_povm_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "grid", 8) < 8:
            parser.error("--grid must be at least 8")
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"thermoptic: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
