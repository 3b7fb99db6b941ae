"""Six-element mixture POVMs on the zero/one-photon truncation.

At small occupation the two-mode state lives almost entirely in the span of
(|0,0>, |0,1>, |1,0>).  Projecting onto that D = 3 space (without
renormalising; the lost mass is reported as ``trace_deficit``) turns the
measurement search into a seventeen-parameter optimisation: two 3x3
unitaries, each parameterised by eight generator coefficients over the
traceless Hermitian basis, plus a mixing probability.  The Gill--Massar
inequalities bracket what any such measurement can achieve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.linalg import logm

from .counting import DiagThermalParams, geometric_pmf, u_phase_bs
from .fisher import FisherMatrix, classical_fisher, cost
from .gaussian import SpatialParams
from .spatial import qfi_spatial

COMPLETENESS_TOL = 1e-10
DEFICIT_LIMIT = 1e-2
_FD_STEP = 1e-6


@dataclass(frozen=True)
class TruncatedState:
    """3x3 density block on (|0,0>, |0,1>, |1,0>), plus the dropped mass."""

    rho: np.ndarray
    trace_deficit: float

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (3, 3):
            raise ValueError("truncated state must be 3x3")
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise ValueError("truncated state must be Hermitian")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValueError("truncated state must be PSD")
        if abs(float(np.real(np.trace(rho))) + self.trace_deficit - 1.0) > 1e-12:
            raise ValueError("trace plus deficit must equal 1")
        object.__setattr__(self, "rho", rho)
        rho.setflags(write=False)


def truncated_state(params: SpatialParams) -> TruncatedState:
    """Project the two-mode thermal state onto the 0/1-photon basis.

    The mode unitary conserves total photon number, so the projection is
    exactly the vacuum probability plus the rotated one-photon block of the
    diagonal thermal state; nothing is renormalised.
    """
    if params.n_mean > 0.1:
        raise ValueError(
            f"truncation to one photon is not justified at n_mean = {params.n_mean}"
        )
    x = DiagThermalParams.from_spatial(params)
    p00 = geometric_pmf(0, x.x1) * geometric_pmf(0, x.x2)
    p01 = geometric_pmf(0, x.x1) * geometric_pmf(1, x.x2)
    p10 = geometric_pmf(1, x.x1) * geometric_pmf(0, x.x2)
    u = u_phase_bs(params.phi).u
    # One-photon block in basis (|0,1>, |1,0>): |0,1> = a2^dag|0>.
    b = np.array([[u[1, 1], u[1, 0]], [u[0, 1], u[0, 0]]])
    block = b @ np.diag([p01, p10]) @ b.conj().T
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = p00
    rho[1:, 1:] = block
    deficit = 1.0 - (p00 + p01 + p10)
    if deficit > DEFICIT_LIMIT:
        raise ValueError(f"truncation deficit {deficit!r} exceeds {DEFICIT_LIMIT}")
    return TruncatedState(rho, deficit)


def _gellmann_basis() -> list[np.ndarray]:
    """The eight traceless Hermitian generators of the 3x3 unitaries."""
    lam = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        m = np.zeros((3, 3), dtype=complex)
        m[i, j] = m[j, i] = 1.0
        lam.append(m)
        m = np.zeros((3, 3), dtype=complex)
        m[i, j] = -1j
        m[j, i] = 1j
        lam.append(m)
    lam.append(np.diag([1.0, -1.0, 0.0]).astype(complex))
    lam.append(np.diag([1.0, 1.0, -2.0]).astype(complex) / math.sqrt(3.0))
    return lam


_GELLMANN = _gellmann_basis()


def unitary_from_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """exp(i sum_k c_k G_k) over the traceless Hermitian basis."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (8,):
        raise ValueError("expected eight generator coefficients")
    h = sum(c * g for c, g in zip(coeffs, _GELLMANN))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def coefficients_from_unitary(u: np.ndarray) -> np.ndarray:
    """Generator coefficients reproducing ``u`` up to a global phase."""
    h = -1j * logm(np.asarray(u, dtype=complex))
    h = h - (np.trace(h) / 3.0) * np.eye(3)
    h = 0.5 * (h + h.conj().T)
    return np.array([float(np.real(np.trace(h @ g))) / 2.0 for g in _GELLMANN])


@dataclass(frozen=True)
class MixturePovm:
    """p-weighted union of two orthonormal-basis measurements."""

    u1: np.ndarray
    u2: np.ndarray
    p: float
    elements: tuple

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("mixing probability must lie in [0, 1]")
        total = sum(self.elements)
        if np.abs(total - np.eye(3)).max() > COMPLETENESS_TOL:
            raise ValueError("POVM elements do not resolve the identity")


def build_mixture_povm(u1: np.ndarray, u2: np.ndarray, p: float) -> MixturePovm:
    elements = []
    for weight, u in ((p, u1), (1.0 - p, u2)):
        for k in range(3):
            col = u[:, k]
            elements.append(weight * np.outer(col, col.conj()))
    return MixturePovm(u1, u2, p, tuple(elements))


def povm_outcome_probs(povm: MixturePovm, state: TruncatedState) -> np.ndarray:
    return np.array(
        [float(np.real(np.trace(state.rho @ e))) for e in povm.elements]
    )


def _augmented_state(params: SpatialParams) -> np.ndarray:
    """Truncated block plus a classical overflow flag; a valid 4x4 density.

    The flag carries the two-or-more-photon mass, which is what a counting
    detector actually reports when the state leaves the truncation.
    """
    ts = truncated_state(params)
    rho = np.zeros((4, 4), dtype=complex)
    rho[:3, :3] = ts.rho
    rho[3, 3] = ts.trace_deficit
    return rho


def _augmented_derivatives(params: SpatialParams) -> list[np.ndarray]:
    theta = np.array([params.n_mean, params.gamma_abs, params.phi])
    out = []
    for j in range(3):
        step = _FD_STEP * max(1.0, abs(theta[j]))
        lo, hi = theta.copy(), theta.copy()
        lo[j] -= step
        hi[j] += step
        out.append(
            (_augmented_state(SpatialParams(*hi)) - _augmented_state(SpatialParams(*lo)))
            / (2.0 * step)
        )
    return out


def truncated_family_qfi(params: SpatialParams) -> FisherMatrix:
    """QFI of the truncated model itself (state block plus overflow flag).

    This is the fair optimality benchmark for measurements confined to the
    truncation: comparing them against the full-state QFI would charge the
    measurement for information the truncation already discarded.
    """
    rho = _augmented_state(params)
    derivs = _augmented_derivatives(params)
    lam, vec = np.linalg.eigh(rho)
    d_rot = [vec.conj().T @ d @ vec for d in derivs]
    denom = lam[:, None] + lam[None, :]
    mask = denom > 1e-18
    iq = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            terms = np.where(mask, d_rot[i] * d_rot[j].T / np.where(mask, denom, 1.0), 0.0)
            iq[i, j] = iq[j, i] = 2.0 * float(np.real(terms.sum()))
    return FisherMatrix(3, iq, "quantum")


def _fisher_from_elements(elements, rho, d_rho, overflow=None) -> FisherMatrix:
    probs = [float(np.real(np.trace(rho @ e))) for e in elements]
    grads = [[float(np.real(np.trace(d @ e))) for d in d_rho] for e in elements]
    if overflow is not None:
        probs.append(overflow[0])
        grads.append(list(overflow[1]))
    return classical_fisher(np.maximum(np.array(probs), 0.0), np.array(grads))


def povm_fisher(povm: MixturePovm, params: SpatialParams) -> FisherMatrix:
    """Classical Fisher matrix of the six-outcome measurement.

    Parameter gradients of the truncated state are taken by central finite
    differences; the truncated family is smooth and the searches only need
    gradient accuracy well below the percent level.
    """
    rho = truncated_state(params).rho
    d_rho = [d[:3, :3] for d in _augmented_derivatives(params)]
    return _fisher_from_elements(povm.elements, rho, d_rho)


@dataclass(frozen=True)
class PovmSearchResult:
    best_cost: float
    best_povm: MixturePovm
    best_vector: np.ndarray
    restarts: int
    seed: int


def _povm_from_vector(vec: np.ndarray) -> MixturePovm:
    u1 = unitary_from_coefficients(vec[0:8])
    u2 = unitary_from_coefficients(vec[8:16])
    p = float(np.clip(vec[16], 1e-3, 1.0 - 1e-3))
    return build_mixture_povm(u1, u2, p)


def matched_basis_start(params: SpatialParams) -> np.ndarray:
    """Search vector seeded from the two matched counting bases.

    The one-photon blocks are the eigenmode pairs of the coherence and phase
    observables (measurement phases phi and phi - pi/2); this is the
    weighted measurement scheme written as a mixture POVM.
    """
    coeffs = []
    for shift in (0.0, -0.5 * math.pi):
        u_mode = u_phase_bs(params.phi + shift).u
        basis = np.eye(3, dtype=complex)
        basis[1:, 1:] = np.array(
            [[u_mode[1, 1], u_mode[1, 0]], [u_mode[0, 1], u_mode[0, 0]]]
        )
        coeffs.append(coefficients_from_unitary(basis))
    return np.concatenate(coeffs + [[0.5]])


def optimize_povm(
    params: SpatialParams, restarts: int = 32, seed: int = 0
) -> PovmSearchResult:
    """Nelder--Mead search over six-element mixture POVMs.

    The objective is the truncated-model cost: classical Fisher information
    of the six outcomes plus the overflow flag, benchmarked against
    ``truncated_family_qfi``.  Restart 0 starts from the matched counting
    bases, the rest from random generator coefficients; restart ``k`` draws
    from the (seed, k) substream, so the best cost is non-increasing as
    restarts grow and runs replay exactly.
    """
    iq = truncated_family_qfi(params)
    rho = truncated_state(params).rho
    derivs = _augmented_derivatives(params)
    d_rho = [d[:3, :3] for d in derivs]
    overflow = (
        truncated_state(params).trace_deficit,
        np.array([float(np.real(d[3, 3])) for d in derivs]),
    )

    def objective(vec: np.ndarray) -> float:
        u1 = unitary_from_coefficients(vec[0:8])
        u2 = unitary_from_coefficients(vec[8:16])
        p = float(np.clip(vec[16], 1e-3, 1.0 - 1e-3))
        elements = [p * np.outer(u1[:, k], u1[:, k].conj()) for k in range(3)]
        elements += [(1.0 - p) * np.outer(u2[:, k], u2[:, k].conj()) for k in range(3)]
        try:
            val = cost(iq, _fisher_from_elements(elements, rho, d_rho, overflow))
        except ValueError:
            return 1e12
        return val if math.isfinite(val) else 1e12

    best = None
    for k in range(restarts):
        if k == 0:
            x0 = matched_basis_start(params)
        else:
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,)))
            )
            x0 = np.concatenate([rng.normal(0.0, 0.8, size=16), [rng.uniform(0.3, 0.7)]])
        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": 4000, "xatol": 1e-8, "fatol": 1e-10},
        )
        if best is None or res.fun < best[0]:
            best = (float(res.fun), res.x.copy())
    if best is None or not math.isfinite(best[0]) or best[0] >= 1e12:
        raise RuntimeError("every restart diverged; no finite POVM cost found")
    vec = best[1]
    return PovmSearchResult(best[0], _povm_from_vector(vec), vec, restarts, seed)


def gill_massar_bounds(d: int, dim: int) -> dict:
    """Cost bracket for separable measurements: lower d^2/(D-1), upper d^2."""
    if d < 1:
        raise ValueError("parameter count must be at least 1")
    if dim < 2:
        raise ValueError("Hilbert-space dimension must be at least 2")
    return {"lower": d * d / (dim - 1), "upper_scheme": float(d * d)}
