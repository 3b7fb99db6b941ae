"""Brute-force Fock-space oracles for the Gaussian-model machinery.

Everything here follows an independent route from the production code:
states are dense truncated density matrices, derivatives are central finite
differences, and information quantities come from eigendecompositions.
The production formulas are validated against these oracles in the test and
verification suites.
"""

from __future__ import annotations

import numpy as np

from .counting import DiagThermalParams, default_cutoff, lift_two_mode_unitary, p_in, u_phase_bs
from .gaussian import SpatialParams
from .operators import FockCutoff, QuadraticObservable, qo_fock_matrix
from .spatial import sld_spatial, spatial_sigma_derivs

FD_SCALE = 1e-5


def fock_density_matrix(params: SpatialParams, cutoff: FockCutoff | None = None) -> np.ndarray:
    """Dense truncated density matrix of the two-spatial-mode state."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    diag = p_in(x, cutoff).as_array()
    w = lift_two_mode_unitary(u_phase_bs(params.phi).u, cutoff.max_total_photons)
    return (w * diag[None, :]) @ w.conj().T


def fd_density_derivatives(
    params: SpatialParams, cutoff: FockCutoff, scale: float = FD_SCALE
) -> list[np.ndarray]:
    """Central-difference d rho / d(n_mean, gamma_abs, phi)."""
    theta = np.array([params.n_mean, params.gamma_abs, params.phi])
    out = []
    for j in range(3):
        step = scale * max(1.0, abs(theta[j]))
        hi, lo = theta.copy(), theta.copy()
        hi[j] += step
        lo[j] -= step
        rho_hi = fock_density_matrix(SpatialParams(*hi), cutoff)
        rho_lo = fock_density_matrix(SpatialParams(*lo), cutoff)
        out.append((rho_hi - rho_lo) / (2.0 * step))
    return out


def qfi_fock_eig(params: SpatialParams, cutoff: FockCutoff | None = None) -> np.ndarray:
    """QFI by eigendecomposition: 2 Re sum_jk drho_jk drho_kj / (l_j + l_k)."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    rho = fock_density_matrix(params, cutoff)
    derivs = fd_density_derivatives(params, cutoff)
    lam, vec = np.linalg.eigh(rho)
    d_rot = [vec.conj().T @ d @ vec for d in derivs]
    denom = lam[:, None] + lam[None, :]
    mask = denom > 1e-18
    iq = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            terms = np.where(mask, d_rot[i] * d_rot[j].T / np.where(mask, denom, 1.0), 0.0)
            iq[i, j] = iq[j, i] = 2.0 * float(np.real(terms.sum()))
    return iq


def sld_defining_residual(
    params: SpatialParams, j, cutoff: FockCutoff | None = None
) -> float:
    """Frobenius residual of d rho = (rho L + L rho) / 2 for parameter j."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    idx = j if isinstance(j, int) else ("n_mean", "gamma_abs", "phi").index(j)
    rho = fock_density_matrix(params, cutoff)
    d_rho = fd_density_derivatives(params, cutoff)[idx]
    l_fock = qo_fock_matrix(sld_spatial(idx, params), cutoff)
    return float(np.linalg.norm(d_rho - 0.5 * (rho @ l_fock + l_fock @ rho)))


def sigma_fd_derivatives(params: SpatialParams, scale: float = FD_SCALE) -> list[np.ndarray]:
    """Finite-difference check companion for the analytic sigma derivatives."""
    from .gaussian import two_spatial_covariance

    theta = np.array([params.n_mean, params.gamma_abs, params.phi])
    out = []
    for j in range(3):
        step = scale * max(1.0, abs(theta[j]))
        hi, lo = theta.copy(), theta.copy()
        hi[j] += step
        lo[j] -= step
        out.append(
            (two_spatial_covariance(SpatialParams(*hi)).sigma
             - two_spatial_covariance(SpatialParams(*lo)).sigma) / (2.0 * step)
        )
    return out


def random_spatial_params(rng: np.random.Generator, n_cap: float = 0.1) -> SpatialParams:
    """Parameter draw kept away from the |gamma| in {0, 1} and n = 0 poles."""
    return SpatialParams(
        float(rng.uniform(0.2, 1.0) * n_cap),
        float(rng.uniform(0.05, 0.95)),
        float(rng.uniform(0.0, 2.0 * np.pi)),
    )


def wick_vs_fock_expectation(
    obs: QuadraticObservable, params: SpatialParams, cutoff: FockCutoff | None = None
) -> tuple[complex, complex]:
    """Expectation of an observable by Wick algebra and by dense trace."""
    from .gaussian import two_spatial_covariance
    from .operators import qo_expectation

    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    analytic = qo_expectation(obs, two_spatial_covariance(params))
    rho = fock_density_matrix(params, cutoff)
    dense = complex(np.trace(rho @ qo_fock_matrix(obs, cutoff)))
    return analytic, dense
