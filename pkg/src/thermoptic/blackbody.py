"""Planck-law spectral statistics and optimal frequency design.

Each narrow spectral mode of far-field thermal radiation is an independent
thermal state with mean occupation

    n_nu = nu^2 * kappa / (exp(h nu / k_B T) - 1),

where kappa bundles the source/detector geometry.  A single mode yields a
rank-one information matrix in (T, kappa), so both parameters need counts at
two or more frequencies; the routines here evaluate the resulting variance
floors and search for the frequency pairs that minimise them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .fisher import FisherMatrix, crb_bound
from .gaussian import GaussianState, thermal_spectral_covariance

# Exact SI-2019 values; pinned so goldens are bit-reproducible.
PLANCK_H = 6.62607015e-34
BOLTZMANN_K = 1.380649e-23
SPEED_OF_LIGHT = 299792458.0

# Dimensional prefactors of the single-mode and far-field validity checks.
SINGLE_MODE_THRESHOLD = 1e-3
ALPHA_SECONDS = 1e-14
EPSILON_PER_KELVIN = 1e-3
_FARFIELD_MARGIN = 10.0

_SCAN_POINTS = 64
_SCAN_WINDOW = (1e-3, 10.0)
_MAX_EVALS = 10_000


@dataclass(frozen=True)
class SceneGeometry:
    source_area: float
    detector_area: float
    distance: float
    observation_time: float

    def kappa(self) -> float:
        return self.source_area * self.detector_area / (
            2.0 * math.pi * SPEED_OF_LIGHT**2 * self.distance**2
        )

    def spectral_width(self) -> float:
        return 1.0 / self.observation_time


@dataclass(frozen=True)
class BlackbodyScene:
    """Temperature plus the geometry bundle kappa (units s^2)."""

    temperature: float
    kappa: float
    geometry: SceneGeometry | None = None

    def __post_init__(self):
        if not (self.temperature > 0.0 and np.isfinite(self.temperature)):
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not (self.kappa > 0.0 and np.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.geometry is not None:
            derived = self.geometry.kappa()
            if abs(derived - self.kappa) > 1e-10 * self.kappa:
                raise ValueError(
                    f"geometry-derived kappa {derived!r} disagrees with stored {self.kappa!r}"
                )

    @classmethod
    def from_geometry(cls, temperature: float, geometry: SceneGeometry) -> "BlackbodyScene":
        return cls(temperature, geometry.kappa(), geometry)

    def beta_h(self) -> float:
        """h / (k_B T): multiply by a frequency to get the Planck exponent."""
        return PLANCK_H / (BOLTZMANN_K * self.temperature)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive frequencies of the counted spectral modes."""

    frequencies: tuple

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if not freqs:
            raise ValueError("frequency grid must be non-empty")
        if any(not (f > 0.0 and np.isfinite(f)) for f in freqs):
            raise ValueError("frequencies must be positive and finite")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", freqs)

    def __iter__(self):
        return iter(self.frequencies)

    def __len__(self):
        return len(self.frequencies)


def _freq_list(grid) -> list[float]:
    if isinstance(grid, FrequencyGrid):
        return list(grid.frequencies)
    return [float(f) for f in grid]


def mean_photon_number(nu: float, scene: BlackbodyScene) -> float:
    """Mean occupation of the spectral mode at nu; overflow-safe."""
    if not (nu > 0.0 and np.isfinite(nu)):
        raise ValueError(f"frequency must be positive, got {nu}")
    x = scene.beta_h() * nu
    if x > 700.0:
        return nu * nu * scene.kappa * math.exp(-x)
    return nu * nu * scene.kappa / math.expm1(x)


def mean_photon_gradient(nu: float, scene: BlackbodyScene) -> np.ndarray:
    """(d/dT, d/dkappa) of the mean occupation; both strictly positive."""
    x = scene.beta_h() * nu
    if x > 700.0:
        n_th = math.exp(-x)
        bose = n_th  # n_th (1 + n_th) to leading order
    else:
        n_th = 1.0 / math.expm1(x)
        bose = n_th * (1.0 + n_th)
    nu2k = nu * nu * scene.kappa
    d_t = nu2k * (x / scene.temperature) * bose
    d_kappa = nu * nu * n_th
    return np.array([d_t, d_kappa])


def spectral_mode_state(nu: float, scene: BlackbodyScene) -> GaussianState:
    return thermal_spectral_covariance(mean_photon_number(nu, scene))


def spectral_qfi(nu: float, scene: BlackbodyScene) -> FisherMatrix:
    """Rank-one (T, kappa) information matrix of a single spectral mode."""
    n = mean_photon_number(nu, scene)
    grad = mean_photon_gradient(nu, scene)
    m = np.outer(grad, grad) / (n + n * n)
    return FisherMatrix(2, m, "quantum")


def multimode_qfi(grid, scene: BlackbodyScene) -> FisherMatrix:
    """Sum of single-mode information matrices; invertible once M >= 2."""
    freqs = _freq_list(grid)
    if not freqs:
        raise ValueError("frequency grid must be non-empty")
    total = sum(spectral_qfi(nu, scene).m for nu in freqs)
    return FisherMatrix(2, total, "quantum")


def variance_bound_cofactor(grid, scene: BlackbodyScene, i: int) -> float:
    """Single-shot variance floor for parameter ``i`` via the cofactor ratio.

    Literal evaluation: the numerator sums the i-th diagonal cofactor of
    each single-mode matrix, the denominator the pairwise antisymmetric
    combination of their entries (the determinant of the summed matrix).
    """
    freqs = _freq_list(grid)
    if len(freqs) < 2:
        raise ValueError("need at least two spectral modes")
    if i not in (0, 1):
        raise ValueError(f"parameter index must be 0 (T) or 1 (kappa), got {i}")
    mats = [spectral_qfi(nu, scene).m for nu in freqs]
    numerator = sum(m[1 - i, 1 - i] for m in mats)
    denominator = 0.0
    for ml in mats:
        for mk in mats:
            denominator += ml[0, 0] * mk[1, 1] - ml[0, 1] * mk[1, 0]
    scale = max(abs(ml[0, 0] * mk[1, 1]) for ml in mats for mk in mats)
    # The antisymmetric combination cancels exactly for coincident
    # frequencies; anything at rounding level is treated as singular.
    if denominator <= 1e-12 * max(scale, 1e-300):
        return math.inf
    return numerator / denominator


def _log_variance_t(log_nu: np.ndarray, scene: BlackbodyScene) -> float:
    freqs = np.exp(log_nu)
    if len(set(freqs)) < len(freqs):
        return math.inf
    v = variance_bound_cofactor(sorted(freqs), scene, 0)
    return math.log(v) if v > 0.0 and math.isfinite(v) else math.inf


def optimal_frequencies(scene: BlackbodyScene) -> tuple[float, float]:
    """Frequency pair minimising the temperature variance with kappa unknown.

    Coarse log-spaced scan over (1e-3 .. 10) k_B T / h per axis, then
    Nelder--Mead refinement in log-frequency space.  The result scales
    linearly with T and is independent of kappa.
    """
    nu_scale = BOLTZMANN_K * scene.temperature / PLANCK_H
    axis = np.log(np.geomspace(_SCAN_WINDOW[0] * nu_scale, _SCAN_WINDOW[1] * nu_scale, _SCAN_POINTS))
    best, best_pair = math.inf, None
    for a_idx in range(_SCAN_POINTS):
        for b_idx in range(a_idx + 1, _SCAN_POINTS):
            val = _log_variance_t(np.array([axis[a_idx], axis[b_idx]]), scene)
            if val < best:
                best, best_pair = val, (axis[a_idx], axis[b_idx])
    result = optimize.minimize(
        _log_variance_t,
        np.array(best_pair),
        args=(scene,),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-10, "maxfev": _MAX_EVALS},
    )
    if not result.success:
        raise RuntimeError(
            f"frequency optimisation did not converge; best so far {np.exp(result.x)}"
        )
    nu = np.sort(np.exp(result.x))
    return float(nu[0]), float(nu[1])


@dataclass(frozen=True)
class PriorTable:
    """Quadrature nodes/weights of a prior over T (optionally (T, kappa))."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape[0] != weights.shape[0]:
            raise ValueError("nodes and weights must have equal length")
        if abs(weights.sum() - 1.0) > 1e-6:
            raise ValueError(f"prior weights must sum to 1, got {weights.sum()!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        nodes.setflags(write=False)
        weights.setflags(write=False)

    def scenes(self, kappa: float | None) -> list[BlackbodyScene]:
        out = []
        for node in self.nodes:
            if np.ndim(node) == 0:
                if kappa is None:
                    raise ValueError("kappa required for a temperature-only prior")
                out.append(BlackbodyScene(float(node), kappa))
            else:
                out.append(BlackbodyScene(float(node[0]), float(node[1])))
        return out


def prior_averaged_design(
    prior: PriorTable, g: np.ndarray, m_modes: int, kappa: float | None = None
) -> FrequencyGrid:
    """Frequency grid minimising the prior-averaged weighted variance floor."""
    if m_modes < 2:
        raise ValueError("need at least two spectral modes")
    scenes = prior.scenes(kappa)
    weights = prior.weights

    def objective(log_nu: np.ndarray) -> float:
        freqs = np.exp(log_nu)
        if len(set(freqs)) < len(freqs):
            return math.inf
        total = 0.0
        for w, scene in zip(weights, scenes):
            val = crb_bound(multimode_qfi(sorted(freqs), scene), g)
            if not math.isfinite(val):
                return math.inf
            total += w * val
        return math.log(total)

    t_mean = float(
        sum(w * (n if np.ndim(n) == 0 else n[0]) for w, n in zip(weights, prior.nodes))
    )
    nu_scale = BOLTZMANN_K * t_mean / PLANCK_H
    points = _SCAN_POINTS if m_modes == 2 else 16
    axis = np.log(np.geomspace(_SCAN_WINDOW[0] * nu_scale, _SCAN_WINDOW[1] * nu_scale, points))
    best, best_tuple = math.inf, None
    from itertools import combinations

    for combo in combinations(range(points), m_modes):
        val = objective(axis[list(combo)])
        if val < best:
            best, best_tuple = val, axis[list(combo)]
    if best_tuple is None:
        raise RuntimeError("coarse scan found no finite objective")
    result = optimize.minimize(
        objective,
        best_tuple,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-10, "maxfev": _MAX_EVALS},
    )
    if not result.success:
        raise RuntimeError(
            f"design optimisation did not converge; best so far {np.exp(result.x)}"
        )
    return FrequencyGrid(tuple(np.sort(np.exp(result.x))))


@dataclass(frozen=True)
class RegimeReport:
    """Validity flags for the single-mode and far-field approximations."""

    single_mode_ok: bool
    farfield_ok: bool
    values: dict


def regime_check(scene: BlackbodyScene, nu: float, angular_size: float) -> RegimeReport:
    """Report (never enforce) the modelling-regime checks at one frequency."""
    occupancy = nu * nu * scene.kappa
    cot = 1.0 / math.tan(angular_size) if math.tan(angular_size) != 0.0 else math.inf
    cot = max(cot, 0.0)
    ratio_alpha = cot / (ALPHA_SECONDS * nu)
    ratio_eps = cot / (EPSILON_PER_KELVIN * scene.temperature)
    return RegimeReport(
        single_mode_ok=bool(occupancy < SINGLE_MODE_THRESHOLD),
        farfield_ok=bool(
            ratio_alpha > _FARFIELD_MARGIN and ratio_eps > _FARFIELD_MARGIN
        ),
        values={
            "mode_occupancy": occupancy,
            "cot_over_alpha_nu": ratio_alpha,
            "cot_over_eps_T": ratio_eps,
        },
    )
