"""Quadratic observables over the ladder ordering and their Fock realisation.

An observable is stored as c0 * 1 + sum_{ab} c[a, b] * x_a x_b over the
ladder vector (a_1, a_1^dag, ...), with products kept in written order.  The
representation is not unique: reordering a product shifts a commutator
c-number into the scalar part.  ``canonical`` fixes the gauge by symmetrising
the coefficient matrix, which makes equality and Hermiticity tests
well defined.  Expectation values use Wick contractions with the ordered
two-point function G = Sigma + Omega/2, and ``qo_fock_matrix`` realises any
observable as a dense matrix on a total-photon-truncated Fock basis for
brute-force cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gaussian import GaussianState, symplectic_form

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class FockCutoff:
    """Truncation keeping all occupations with total photon number <= N_max."""

    max_total_photons: int

    def __post_init__(self):
        if self.max_total_photons < 0:
            raise ValueError("max_total_photons must be non-negative")


@lru_cache(maxsize=None)
def fock_basis(n_modes: int, n_max: int) -> tuple[tuple[int, ...], ...]:
    """All occupation tuples with total <= n_max, lexicographically ordered."""

    def extend(prefix, remaining_modes, budget):
        if remaining_modes == 0:
            yield prefix
            return
        for k in range(budget + 1):
            yield from extend(prefix + (k,), remaining_modes - 1, budget - k)

    states = list(extend((), n_modes, n_max))
    states.sort()
    return tuple(states)


@lru_cache(maxsize=None)
def _basis_index(n_modes: int, n_max: int) -> dict:
    return {s: i for i, s in enumerate(fock_basis(n_modes, n_max))}


@lru_cache(maxsize=None)
def ladder_fock_matrices(n_modes: int, n_max: int) -> tuple[np.ndarray, ...]:
    """Dense matrices of (a_1, a_1^dag, ...) on the truncated basis."""
    basis = fock_basis(n_modes, n_max)
    index = _basis_index(n_modes, n_max)
    dim = len(basis)
    mats = [np.zeros((dim, dim), dtype=complex) for _ in range(2 * n_modes)]
    for col, occ in enumerate(basis):
        for i in range(n_modes):
            n_i = occ[i]
            if n_i > 0:
                lowered = occ[:i] + (n_i - 1,) + occ[i + 1 :]
                mats[2 * i][index[lowered], col] = math.sqrt(n_i)
            raised = occ[:i] + (n_i + 1,) + occ[i + 1 :]
            if sum(raised) <= n_max:
                mats[2 * i + 1][index[raised], col] = math.sqrt(n_i + 1)
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


@dataclass(frozen=True)
class QuadraticObservable:
    """c0 * identity + sum_{ab} c[a, b] x_a x_b in the ladder ordering."""

    n_modes: int
    c0: complex
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if c.shape != (2 * self.n_modes, 2 * self.n_modes):
            raise ValueError(f"coefficient matrix must be {2 * self.n_modes}x{2 * self.n_modes}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c0", complex(self.c0))
        c.setflags(write=False)

    def canonical(self) -> "QuadraticObservable":
        """Equivalent observable with a symmetric coefficient matrix.

        The antisymmetric part of c is a pure commutator c-number,
        sum_ab A[a,b] x_a x_b = (1/2) sum_ab A[a,b] Omega[a,b].
        """
        omega = symplectic_form(self.n_modes)
        sym = 0.5 * (self.c + self.c.T)
        anti = 0.5 * (self.c - self.c.T)
        shift = 0.5 * np.sum(anti * omega)
        return QuadraticObservable(self.n_modes, self.c0 + shift, sym)

    def dagger(self) -> "QuadraticObservable":
        swap = _dagger_permutation(self.n_modes)
        c_adj = np.conj(self.c[np.ix_(swap, swap)].T)
        return QuadraticObservable(self.n_modes, np.conj(self.c0), c_adj)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        diff = qo_sub(self, self.dagger()).canonical()
        scale = max(1.0, np.abs(self.c).max(), abs(self.c0))
        return np.abs(diff.c).max() <= tol * scale and abs(diff.c0) <= tol * scale

    def is_number_conserving(self, tol: float = HERMITICITY_TOL) -> bool:
        """True when the canonical form has no a a or a^dag a^dag support."""
        c = self.canonical().c
        return (
            np.abs(c[0::2, 0::2]).max() <= tol and np.abs(c[1::2, 1::2]).max() <= tol
        )


def _dagger_permutation(n_modes: int) -> np.ndarray:
    swap = np.arange(2 * n_modes)
    swap[0::2] += 1
    swap[1::2] -= 1
    return swap


def _check_modes(a: QuadraticObservable, b: QuadraticObservable):
    if a.n_modes != b.n_modes:
        raise ValueError(f"mode-count mismatch: {a.n_modes} vs {b.n_modes}")


def qo_add(a: QuadraticObservable, b: QuadraticObservable) -> QuadraticObservable:
    _check_modes(a, b)
    return QuadraticObservable(a.n_modes, a.c0 + b.c0, a.c + b.c)


def qo_sub(a: QuadraticObservable, b: QuadraticObservable) -> QuadraticObservable:
    _check_modes(a, b)
    return QuadraticObservable(a.n_modes, a.c0 - b.c0, a.c - b.c)


def qo_scale(z: complex, a: QuadraticObservable) -> QuadraticObservable:
    return QuadraticObservable(a.n_modes, z * a.c0, z * a.c)


def qo_commutator(a: QuadraticObservable, b: QuadraticObservable) -> QuadraticObservable:
    """Closed-form commutator [a, b], canonically symmetrised.

    Expanding with [x_a, x_b] = Omega[a, b] keeps the result quadratic:
    the four index contractions below place the surviving ordered products,
    and ``canonical`` absorbs any reordering scalar.
    """
    _check_modes(a, b)
    omega = symplectic_form(a.n_modes)
    ca, cb = a.c, b.c
    r = ca @ omega @ cb + ca @ omega @ cb.T - cb.T @ omega @ ca - cb @ omega @ ca
    return QuadraticObservable(a.n_modes, 0.0, r).canonical()


def _ordered_two_point(state: GaussianState) -> np.ndarray:
    # <x_a x_b> = Sigma[a, b] + Omega[a, b] / 2
    return state.sigma + 0.5 * symplectic_form(state.n_modes)


def qo_expectation(obs: QuadraticObservable, state: GaussianState) -> complex:
    """<obs> on a zero-mean Gaussian state, from sigma alone."""
    if obs.n_modes != state.n_modes:
        raise ValueError(f"mode-count mismatch: {obs.n_modes} vs {state.n_modes}")
    return obs.c0 + complex(np.sum(obs.c * _ordered_two_point(state)))


def qo_pair_expectation(
    a: QuadraticObservable, b: QuadraticObservable, state: GaussianState
) -> complex:
    """<a b> on a zero-mean Gaussian state via Wick contraction.

    The quartic part reduces to <a><b> plus the two cross contractions
    through G = Sigma + Omega/2; operator order matters, so <[a, b]> is
    available as qo_pair_expectation(a, b) - qo_pair_expectation(b, a).
    """
    _check_modes(a, b)
    if a.n_modes != state.n_modes:
        raise ValueError("state mode count does not match the observables")
    g = _ordered_two_point(state)
    mean_a = qo_expectation(a, state)
    mean_b = qo_expectation(b, state)
    cross = np.sum(a.c * (g @ (b.c + b.c.T) @ g.T))
    return mean_a * mean_b + complex(cross)


def qo_covariance(
    a: QuadraticObservable, b: QuadraticObservable, state: GaussianState
) -> complex:
    """Symmetrised covariance <ab + ba>/2 - <a><b>."""
    fwd = qo_pair_expectation(a, b, state)
    bwd = qo_pair_expectation(b, a, state)
    return 0.5 * (fwd + bwd) - qo_expectation(a, state) * qo_expectation(b, state)


def qo_fock_matrix(obs: QuadraticObservable, cutoff: FockCutoff) -> np.ndarray:
    """Dense matrix of the observable on the truncated Fock basis.

    Products are evaluated on a basis enlarged by two photons so that
    intermediate states (a quadratic term moves at most one photon per
    factor) never fall off the truncation, then restricted back.
    """
    n, n_max = obs.n_modes, cutoff.max_total_photons
    big = ladder_fock_matrices(n, n_max + 2)
    dim_big = big[0].shape[0]
    m = np.asarray(obs.c0) * np.eye(dim_big, dtype=complex)
    for alpha in range(2 * n):
        row = obs.c[alpha]
        if not np.any(row):
            continue
        acc = np.zeros_like(m)
        for beta in range(2 * n):
            if row[beta] != 0.0:
                acc += row[beta] * big[beta]
        m += big[alpha] @ acc
    keep = [
        _basis_index(n, n_max + 2)[s] for s in fock_basis(n, n_max)
    ]
    return m[np.ix_(keep, keep)]


# Convenience constructors -------------------------------------------------

def identity_obs(n_modes: int, value: complex = 1.0) -> QuadraticObservable:
    return QuadraticObservable(n_modes, value, np.zeros((2 * n_modes, 2 * n_modes)))


def number_op(mode: int, n_modes: int) -> QuadraticObservable:
    """a_mode^dag a_mode."""
    c = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    c[2 * mode + 1, 2 * mode] = 1.0
    return QuadraticObservable(n_modes, 0.0, c)


def total_number_op(n_modes: int) -> QuadraticObservable:
    c = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    for i in range(n_modes):
        c[2 * i + 1, 2 * i] = 1.0
    return QuadraticObservable(n_modes, 0.0, c)


def mode_hop(create: int, annihilate: int, n_modes: int) -> QuadraticObservable:
    """a_create^dag a_annihilate."""
    c = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    c[2 * create + 1, 2 * annihilate] = 1.0
    return QuadraticObservable(n_modes, 0.0, c)


def ops_allclose(
    a: QuadraticObservable, b: QuadraticObservable, tol: float = 1e-10
) -> bool:
    """Operator equality, insensitive to the ordering gauge."""
    diff = qo_sub(a.canonical(), b.canonical())
    scale = max(
        1.0, np.abs(a.canonical().c).max(), np.abs(b.canonical().c).max()
    )
    return np.abs(diff.c).max() <= tol * scale and abs(diff.c0) <= tol * scale


def proportionality(
    a: QuadraticObservable, b: QuadraticObservable, tol: float = 1e-10
) -> complex | None:
    """Return z with a = z * b (as operators), or None if not proportional."""
    ca, cb = a.canonical(), b.canonical()
    flat_b = np.concatenate([cb.c.ravel(), [cb.c0]])
    flat_a = np.concatenate([ca.c.ravel(), [ca.c0]])
    k = np.argmax(np.abs(flat_b))
    if abs(flat_b[k]) == 0.0:
        return None
    z = flat_a[k] / flat_b[k]
    scale = max(1.0, np.abs(flat_a).max(), np.abs(flat_b).max())
    if np.abs(flat_a - z * flat_b).max() <= tol * scale:
        return complex(z)
    return None
