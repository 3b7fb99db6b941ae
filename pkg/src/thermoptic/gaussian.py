"""Zero-mean Gaussian states of n bosonic modes in the ladder ordering.

The mode-operator vector is fixed package-wide as

    (a_1, a_1^dag, a_2, a_2^dag, ..., a_n, a_n^dag),

so index ``2*i`` is the annihilation operator of mode ``i`` and ``2*i + 1``
its creation operator.  Second moments are stored in the symmetrised form

    sigma[ab] = (<x_a x_b> + <x_b x_a>) / 2,

which makes ``sigma`` a complex *symmetric* (not Hermitian) matrix.  Thermal
and far-field states have zero first moments, so ``mu`` is pinned to zero
and the constructor rejects anything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Symplectic eigenvalues of any physical sigma must be >= 1/2; the slack
# absorbs rounding accumulated in chained W @ sigma @ W.T transforms.
PHYSICALITY_TOL = 1e-12
UNITARITY_TOL = 1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """Direct sum of n copies of [[0, 1], [-1, 0]] in the ladder ordering."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be positive, got {n_modes}")
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    return omega


@dataclass(frozen=True)
class SymplecticForm:
    """Commutator table of the ladder vector, omega[ab] = [x_a, x_b]."""

    n_modes: int
    omega: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "omega", symplectic_form(self.n_modes))
        self.omega.setflags(write=False)


@dataclass(frozen=True)
class TwoModeUnitary:
    """A 2x2 unitary acting on the mode space of a two-mode state."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
        residual = np.abs(u @ u.conj().T - np.eye(2)).max()
        if residual > PHYSICALITY_TOL:
            raise ValueError(f"matrix is not unitary: residual {residual:.3e}")
        object.__setattr__(self, "u", u)
        u.setflags(write=False)


@dataclass(frozen=True)
class SpatialParams:
    """Parameter triple (n_mean, |gamma|, phi) of the two-spatial-mode state.

    ``n_mean`` is the mean photon number per spatial mode (equal in both
    modes), ``gamma_abs`` the magnitude of the complex degree of coherence
    and ``phi`` its phase, normalised into [0, 2*pi) on construction.
    """

    n_mean: float
    gamma_abs: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.n_mean) and self.n_mean >= 0.0):
            raise ValueError(f"n_mean must be finite and >= 0, got {self.n_mean}")
        if not (0.0 <= self.gamma_abs <= 1.0):
            raise ValueError(f"gamma_abs must lie in [0, 1], got {self.gamma_abs}")
        if not np.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi}")
        wrapped = float(self.phi) % (2.0 * math.pi)
        if wrapped >= 2.0 * math.pi:  # tiny negative inputs round up to 2*pi
            wrapped = 0.0
        object.__setattr__(self, "phi", wrapped)


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean n-mode Gaussian state: symmetrised second moments only."""

    n_modes: int
    sigma: np.ndarray
    mu: np.ndarray | None = None

    def __post_init__(self):
        n = self.n_modes
        if n < 1:
            raise ValueError(f"n_modes must be positive, got {n}")
        sigma = np.asarray(self.sigma, dtype=complex)
        if sigma.shape != (2 * n, 2 * n):
            raise ValueError(f"sigma must be {2 * n}x{2 * n}, got {sigma.shape}")
        scale = max(1.0, np.abs(sigma).max())
        if np.abs(sigma - sigma.T).max() > 1e-10 * scale:
            raise ValueError("sigma must be symmetric in the symmetrised-moment sense")
        mu = np.zeros(2 * n, dtype=complex) if self.mu is None else np.asarray(self.mu, dtype=complex)
        if mu.shape != (2 * n,) or np.abs(mu).max() > 0.0:
            raise ValueError("first moments are pinned to zero for thermal states")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "mu", mu)
        sigma.setflags(write=False)
        mu.setflags(write=False)
        nu_min = physicality_check(self).min()
        if nu_min < 0.5 - PHYSICALITY_TOL:
            raise ValueError(
                f"unphysical covariance: smallest symplectic eigenvalue {nu_min!r} < 1/2"
            )

    @property
    def omega(self) -> np.ndarray:
        return symplectic_form(self.n_modes)


def physicality_check(state: GaussianState) -> np.ndarray:
    """Symplectic eigenvalues of the state, ascending (one per mode).

    These are the magnitudes of the eigenvalues of i*Omega*Sigma, which come
    in equal pairs; the vacuum saturates the physicality bound at 1/2.
    """
    omega = symplectic_form(state.n_modes)
    eigs = np.linalg.eigvals(1j * omega @ state.sigma)
    mags = np.sort(np.abs(eigs))
    return mags[::2].copy()


def thermal_spectral_covariance(n_mean: float) -> GaussianState:
    """Single thermal mode with mean occupation ``n_mean``.

    The symmetrised covariance is (n_mean + 1/2) * sigma_x in the ladder
    ordering: the diagonal <a a>, <a^dag a^dag> moments vanish.
    """
    if not (np.isfinite(n_mean) and n_mean >= 0.0):
        raise ValueError(f"n_mean must be finite and >= 0, got {n_mean}")
    s = n_mean + 0.5
    sigma = np.array([[0.0, s], [s, 0.0]], dtype=complex)
    return GaussianState(1, sigma)


def two_spatial_covariance(params: SpatialParams) -> GaussianState:
    """Two spatial modes with equal occupation and coherence gamma.

    Off-diagonal moments are b = <a_2^dag a_1> = n_mean * |gamma| * e^{-i phi}
    and its conjugate b* = <a_1^dag a_2>; the per-mode entries are
    c = n_mean + 1/2.  The same state is obtained by applying the
    phase-plus-beamsplitter unitary U(phi) (see ``counting.u_phase_bs``) to a
    diagonal two-mode thermal state with occupations n_mean*(1 -+ |gamma|).
    """
    n, g, phi = params.n_mean, params.gamma_abs, params.phi
    c = n + 0.5
    b = n * g * np.exp(-1j * phi)
    sigma = np.array(
        [
            [0.0, c, 0.0, b],
            [c, 0.0, np.conj(b), 0.0],
            [0.0, np.conj(b), 0.0, c],
            [b, 0.0, c, 0.0],
        ],
        dtype=complex,
    )
    return GaussianState(2, sigma)


def mode_matrix_to_ladder(u: np.ndarray) -> np.ndarray:
    """Interleave an n x n mode unitary into its 2n x 2n ladder action W.

    Annihilation components transform with u and creation components with
    conj(u); sigma then maps as W @ sigma @ W.T (plain transpose).
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    w = np.zeros((2 * n, 2 * n), dtype=complex)
    w[0::2, 0::2] = u
    w[1::2, 1::2] = np.conj(u)
    return w


def apply_mode_unitary(state: GaussianState, u: np.ndarray) -> GaussianState:
    """Transform the state by a passive mode unitary a_i -> sum_j u_ij a_j."""
    u = np.asarray(u, dtype=complex)
    n = state.n_modes
    if u.shape != (n, n):
        raise ValueError(f"mode unitary must be {n}x{n}, got {u.shape}")
    residual = np.abs(u @ u.conj().T - np.eye(n)).max()
    if residual > UNITARITY_TOL:
        raise ValueError(f"mode matrix is not unitary: residual {residual:.3e}")
    w = mode_matrix_to_ladder(u)
    return GaussianState(n, w @ state.sigma @ w.T)


def total_mean_photons(state: GaussianState) -> float:
    """Sum over modes of <a_i^dag a_i>, read off the symmetrised moments."""
    total = 0.0
    for i in range(state.n_modes):
        total += float(np.real(state.sigma[2 * i, 2 * i + 1])) - 0.5
    return total
