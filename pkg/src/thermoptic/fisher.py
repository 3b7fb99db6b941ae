"""Quantum and classical Fisher information for zero-mean Gaussian models.

The quantum side follows the Gao--Lee closed form: with row-major pair
flattening (a, b) -> 2n*a + b, the tensor M = kron(Sigma, Sigma)
+ kron(Omega, Omega)/4 maps symmetric matrices to symmetric matrices and

    vec(d_i Sigma) = 2 M vec(L_i),        I_Q[i, j] = vec(d_i Sigma)^T vec(L_j),

where L_i is the quadratic coefficient matrix of the i-th symmetric
logarithmic derivative.  M is solved, never inverted: it degenerates exactly
when a symplectic eigenvalue reaches the vacuum value 1/2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState, physicality_check, symplectic_form
from .operators import QuadraticObservable

logger = logging.getLogger(__name__)

# Relative eigenvalue threshold separating structural zeros from roundoff.
RANK_TOL = 1e-12
PROB_FLOOR = 1e-30


@dataclass(frozen=True)
class FisherMatrix:
    """d x d real symmetric PSD information matrix, quantum or classical."""

    d: int
    m: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("quantum", "classical"):
            raise ValueError(f"kind must be 'quantum' or 'classical', got {self.kind!r}")
        m = np.asarray(self.m, dtype=float)
        if m.shape != (self.d, self.d):
            raise ValueError(f"matrix must be {self.d}x{self.d}, got {m.shape}")
        scale = max(1.0, np.abs(m).max())
        if np.abs(m - m.T).max() > 1e-10 * scale:
            raise ValueError("Fisher matrix must be symmetric")
        m = 0.5 * (m + m.T)
        eig_min = np.linalg.eigvalsh(m).min()
        if eig_min < -1e-10 * scale:
            raise ValueError(f"Fisher matrix must be PSD; min eigenvalue {eig_min!r}")
        object.__setattr__(self, "m", m)
        m.setflags(write=False)


def mixture(mats: list[FisherMatrix], weights=None) -> FisherMatrix:
    """Convex combination of classical Fisher matrices (independent runs)."""
    if not mats:
        raise ValueError("need at least one Fisher matrix")
    w = np.full(len(mats), 1.0 / len(mats)) if weights is None else np.asarray(weights, float)
    acc = sum(wi * fm.m for wi, fm in zip(w, mats))
    return FisherMatrix(mats[0].d, acc, "classical")


def _gao_lee_tensor(state: GaussianState) -> np.ndarray:
    sigma = state.sigma
    omega = symplectic_form(state.n_modes)
    return np.kron(sigma, sigma) + 0.25 * np.kron(omega, omega)


def _require_mixed(state: GaussianState):
    nus = physicality_check(state)
    nu_min = float(nus.min())
    if nu_min - 0.5 < 1e-10:
        raise ValueError(
            "Gao-Lee tensor is singular: symplectic eigenvalue "
            f"{nu_min!r} sits at the pure-state value 1/2"
        )


def _solve_sld_coeffs(state: GaussianState, derivs: list[np.ndarray]) -> list[np.ndarray]:
    _require_mixed(state)
    m = _gao_lee_tensor(state)
    dim = m.shape[0]
    rhs = np.stack([np.asarray(d, dtype=complex).ravel() for d in derivs], axis=1)
    sols = np.linalg.solve(m, rhs)
    return [0.5 * sols[:, k].reshape(int(math.isqrt(dim)), -1) for k in range(rhs.shape[1])]


def qfi_gaussian(state: GaussianState, derivs: list[np.ndarray]) -> FisherMatrix:
    """Quantum Fisher information matrix from sigma and its derivatives."""
    two_n = 2 * state.n_modes
    for d in derivs:
        if np.asarray(d).shape != (two_n, two_n):
            raise ValueError("derivative shape does not match sigma")
    coeffs = _solve_sld_coeffs(state, derivs)
    d = len(derivs)
    iq = np.empty((d, d))
    for i in range(d):
        vi = np.asarray(derivs[i], dtype=complex).ravel()
        for j in range(d):
            iq[i, j] = float(np.real(vi @ coeffs[j].ravel()))
    iq = 0.5 * (iq + iq.T)
    return FisherMatrix(d, iq, "quantum")


def sld_gaussian(state: GaussianState, deriv: np.ndarray) -> QuadraticObservable:
    """Symmetric logarithmic derivative for one parameter, as an observable.

    Returns L with quadratic coefficients (1/2) M^{-1} vec(d Sigma) and the
    scalar part fixed by <L> = 0.
    """
    coeff = _solve_sld_coeffs(state, [deriv])[0]
    c0 = -complex(np.sum(coeff * state.sigma))
    return QuadraticObservable(state.n_modes, c0, coeff)


def classical_fisher(
    probs: np.ndarray, grads: np.ndarray, p_floor: float = PROB_FLOOR
) -> FisherMatrix:
    """Classical Fisher matrix sum_x grad(x) grad(x)^T / p(x).

    Outcomes with p below ``p_floor`` are skipped to avoid 0/0; probabilities
    more negative than -1e-12 indicate corrupted input and raise.
    """
    p = np.asarray(probs, dtype=float)
    g = np.asarray(grads, dtype=float)
    if g.ndim != 2 or g.shape[0] != p.shape[0]:
        raise ValueError("gradient table must be (n_outcomes, d)")
    if p.min() < -1e-12:
        raise ValueError(f"negative outcome probability {p.min()!r}")
    keep = p >= p_floor
    gk = g[keep]
    ic = gk.T @ (gk / p[keep, None])
    ic = 0.5 * (ic + ic.T)
    return FisherMatrix(g.shape[1], ic, "classical")


def _eig_split(m: np.ndarray, rel_tol: float = RANK_TOL):
    """Eigendecomposition split into regular and (near-)null subspaces."""
    w, v = np.linalg.eigh(m)
    thresh = rel_tol * max(w.max(initial=0.0), 0.0)
    null = w <= thresh
    return w, v, null


def cost(iq: FisherMatrix, ic: FisherMatrix) -> float:
    """State-estimation cost tr(I_Q I_C^{-1}), +inf when I_C misses a direction.

    A direction is "missed" when I_C is (numerically) singular along it while
    I_Q carries weight there; the structural zeros of idealised measurement
    matrices are separated from roundoff by a relative rank threshold.
    """
    if iq.d != ic.d:
        raise ValueError("dimension mismatch between I_Q and I_C")
    w, v, null = _eig_split(ic.m)
    if null.any():
        iq_scale = np.linalg.eigvalsh(iq.m).max()
        v_null = v[:, null]
        weight = np.abs(v_null.T @ iq.m @ v_null).max()
        if weight > RANK_TOL * max(iq_scale, 1e-300):
            return math.inf
    v_reg = v[:, ~null]
    w_reg = w[~null]
    quad = np.einsum("ki,kl,li->i", v_reg, iq.m, v_reg)
    return float(np.sum(quad / w_reg))


def crb_bound(iq: FisherMatrix, g: np.ndarray) -> float:
    """Weighted Cramer-Rao floor tr(G I^{-1}) with Jacobi equilibration.

    Returns +inf for a singular information matrix whenever G weights the
    null space; the offending direction is logged.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (iq.d, iq.d):
        raise ValueError("weight matrix shape mismatch")
    if np.abs(g - g.T).max() > 1e-10 * max(1.0, np.abs(g).max()):
        raise ValueError("weight matrix must be symmetric")
    g_eigs = np.linalg.eigvalsh(g)
    if g_eigs.min() < -1e-12 * max(1.0, abs(g_eigs.max())):
        raise ValueError("weight matrix must be positive semi-definite")

    # Equilibrate: information entries can span ~70 decades when frequency
    # and geometry parameters mix, which would defeat an unscaled solve.
    diag = np.diag(iq.m).copy()
    diag[diag <= 0.0] = 1.0
    scale = 1.0 / np.sqrt(diag)
    m_eq = iq.m * scale[:, None] * scale[None, :]
    g_eq = g * scale[:, None] * scale[None, :]

    w, v, null = _eig_split(m_eq)
    if null.any():
        v_null = v[:, null]
        weight = np.abs(v_null.T @ g_eq @ v_null).max()
        if weight > RANK_TOL * max(np.abs(g_eq).max(), 1e-300):
            logger.warning(
                "singular information matrix; null direction(s) %s", v_null.T
            )
            return math.inf
    v_reg = v[:, ~null]
    w_reg = w[~null]
    quad = np.einsum("ki,kl,li->i", v_reg, g_eq, v_reg)
    return float(np.sum(quad / w_reg))
