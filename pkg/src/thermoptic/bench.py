"""Comparative evaluation of counting schemes over the coherence disk.

``V_op`` is the weighted-scheme cost (the optimal separable benchmark);
ratios V_op / V_scheme quantify how much of that optimum a fixed
Fourier-transform measurement or a random-phase measurement recovers.
Cells are independent work items; each derives its own random stream from
(seed, cell index) so results do not depend on execution order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .counting import count_fisher
from .fisher import cost, mixture
from .gaussian import SpatialParams
from .spatial import qfi_spatial, weighted_scheme

GAMMA_EDGE = 0.995
RATIO_SLACK = 1e-6


def worker_count() -> int:
    """Parallel width, capped by the THERMOPTIC_THREADS environment variable."""
    cap = os.environ.get("THERMOPTIC_THREADS")
    workers = os.cpu_count() or 1
    if cap is not None:
        try:
            cap_val = int(cap)
        except ValueError as exc:
            raise ValueError(f"THERMOPTIC_THREADS must be a positive integer, got {cap!r}") from exc
        if cap_val < 1:
            raise ValueError(f"THERMOPTIC_THREADS must be a positive integer, got {cap!r}")
        workers = min(workers, cap_val)
    return workers


def ft_scheme_cost(params: SpatialParams, cutoff=None) -> float:
    """Cost of the fixed Fourier-transform-plus-counting scheme."""
    return cost(qfi_spatial(params), count_fisher(params, scheme="ft", cutoff=cutoff))


def random_phase_trials(
    params: SpatialParams,
    n_phases: int = 1000,
    n_trials: int = 400,
    seed: int = 0,
    cutoff=None,
) -> np.ndarray:
    """Per-trial costs of the random-phase scheme (uniform phase draws)."""
    if n_phases < 1 or n_trials < 1:
        raise ValueError("n_phases and n_trials must be positive")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    iq = qfi_spatial(params)
    out = np.empty(n_trials)
    for t in range(n_trials):
        phases = rng.uniform(0.0, 2.0 * math.pi, size=n_phases)
        fms = [count_fisher(params, scheme="bs", phase=p, cutoff=cutoff) for p in phases]
        out[t] = cost(iq, mixture(fms))
    return out


def random_phase_cost(
    params: SpatialParams,
    n_phases: int = 1000,
    n_trials: int = 400,
    seed: int = 0,
    cutoff=None,
) -> float:
    """Trial-averaged cost of the random-phase scheme."""
    return float(random_phase_trials(params, n_phases, n_trials, seed, cutoff).mean())


@dataclass(frozen=True)
class SchemeRatioMap:
    """Grid of V_op / V_scheme over (|gamma| cos phi, |gamma| sin phi).

    ``values`` holds NaN for absent cells (the singular loci |gamma| = 0 and
    |gamma| > GAMMA_EDGE).  For the ``weighted`` scheme the cells hold the
    optimal cost itself rather than a ratio.
    """

    scheme: str
    axis: np.ndarray
    values: np.ndarray
    metadata: dict

    def __post_init__(self):
        vals = self.values[np.isfinite(self.values)]
        if self.scheme in ("ft", "rp") and vals.size:
            if vals.min() < 0.0 or vals.max() > 1.0 + RATIO_SLACK:
                raise ValueError("scheme ratios must lie in [0, 1]")
        self.axis.setflags(write=False)
        self.values.setflags(write=False)


def _cell_value(job) -> tuple[int, float]:
    flat_idx, scheme, n_mean, gx, gy, seed, n_phases, n_trials = job
    gamma = math.hypot(gx, gy)
    if gamma <= 0.0 or gamma > GAMMA_EDGE:
        return flat_idx, math.nan
    phi = math.atan2(gy, gx) % (2.0 * math.pi)
    params = SpatialParams(n_mean, gamma, phi)
    v_op = weighted_scheme(params).cost_star
    if scheme == "weighted":
        return flat_idx, v_op
    if scheme == "ft":
        v_scheme = ft_scheme_cost(params)
    elif scheme == "rp":
        cell_seed = np.random.SeedSequence(seed, spawn_key=(flat_idx,))
        v_scheme = _rp_cost_seeded(params, n_phases, n_trials, cell_seed)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not math.isfinite(v_scheme) or v_scheme <= 0.0:
        return flat_idx, math.nan
    return flat_idx, min(v_op / v_scheme, 1.0 + RATIO_SLACK)


def _rp_cost_seeded(params, n_phases, n_trials, seed_seq) -> float:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    iq = qfi_spatial(params)
    total = 0.0
    for _ in range(n_trials):
        phases = rng.uniform(0.0, 2.0 * math.pi, size=n_phases)
        fms = [count_fisher(params, scheme="bs", phase=p) for p in phases]
        total += cost(iq, mixture(fms))
    return total / n_trials


def ratio_map(
    scheme: str,
    grid_n: int = 41,
    n_mean: float = 0.01,
    seed: int = 0,
    n_phases: int = 1000,
    n_trials: int = 400,
    workers: int | None = None,
) -> SchemeRatioMap:
    """Evaluate a scheme over a grid_n x grid_n grid on the coherence disk."""
    if scheme not in ("ft", "rp", "weighted"):
        raise ValueError(f"unknown scheme {scheme!r}")
    axis = np.linspace(-1.0, 1.0, grid_n)
    jobs = []
    for iy, gy in enumerate(axis):
        for ix, gx in enumerate(axis):
            jobs.append(
                (iy * grid_n + ix, scheme, n_mean, float(gx), float(gy), seed, n_phases, n_trials)
            )
    values = np.full(grid_n * grid_n, math.nan)
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 8:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for flat_idx, val in pool.map(_cell_value, jobs, chunksize=16):
                    values[flat_idx] = val
        except (OSError, RuntimeError):
            for job in jobs:
                flat_idx, val = _cell_value(job)
                values[flat_idx] = val
    else:
        for job in jobs:
            flat_idx, val = _cell_value(job)
            values[flat_idx] = val
    return SchemeRatioMap(
        scheme,
        axis,
        values.reshape(grid_n, grid_n),
        {
            "n_mean": n_mean,
            "n_phases": n_phases if scheme == "rp" else 0,
            "n_trials": n_trials if scheme == "rp" else 0,
            "seed": seed,
        },
    )
