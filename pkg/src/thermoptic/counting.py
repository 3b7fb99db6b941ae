"""Photon-count statistics of the two-spatial-mode thermal state.

The state with coherence (n_mean, |gamma|, phi) equals the image of a
diagonal two-mode thermal state, occupations x1 = n(1-|gamma|) and
x2 = n(1+|gamma|), under the phase-plus-beamsplitter unitary U(phi).
Counting photons therefore reduces to a product of geometric distributions
pushed through a passive-transformation kernel:

* ``p_in``      counts on the diagonal modes (two independent geometrics),
* ``p_out_bs``  counts directly on the spatial modes (phi drops out),
* ``p_out_ft``  counts after the discrete Fourier transform U(0), where the
                interference terms (1 +- e^{-i phi}) carry phase information.

``fock_oracle`` is the independent brute force: it lifts the 2x2 mode
unitary to a total-photon-truncated Fock basis through its action on
creation operators and conjugates the diagonal state, with no reference to
the closed-form kernels above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fisher import FisherMatrix, classical_fisher
from .gaussian import SpatialParams, TwoModeUnitary
from .operators import FockCutoff, fock_basis

TAIL_TOL = 1e-14
CUTOFF_FLOOR = 6


@dataclass(frozen=True)
class DiagThermalParams:
    """Occupations of the two diagonal (pre-beamsplitter) thermal modes."""

    x1: float
    x2: float

    def __post_init__(self):
        if self.x1 < 0.0 or self.x2 < 0.0:
            raise ValueError("thermal occupations must be non-negative")

    @classmethod
    def from_spatial(cls, params: SpatialParams) -> "DiagThermalParams":
        return cls(
            params.n_mean * (1.0 - params.gamma_abs),
            params.n_mean * (1.0 + params.gamma_abs),
        )


@dataclass(frozen=True)
class CountDistribution:
    """Truncated joint count distribution over outcomes m1 + m2 <= N_max."""

    cutoff: FockCutoff
    probs: dict
    tail_bound: float

    def __post_init__(self):
        vals = np.array(list(self.probs.values()), dtype=float)
        if vals.size and (vals.min() < -1e-14 or vals.max() > 1.0 + 1e-12):
            raise ValueError("count probabilities outside [-1e-14, 1]")
        if vals.sum() > 1.0 + 1e-12:
            raise ValueError("count probabilities sum above 1")

    def as_array(self) -> np.ndarray:
        """Probabilities aligned with the lexicographic two-mode basis."""
        basis = fock_basis(2, self.cutoff.max_total_photons)
        return np.array([self.probs.get(s, 0.0) for s in basis])

    def total(self) -> float:
        return float(sum(self.probs.values()))


def u_phase_bs(phase: float) -> TwoModeUnitary:
    """Phase shift on mode 1 followed by the balanced beamsplitter.

    U(phase) = (1/sqrt(2)) [[-e^{-i phase}, e^{-i phase}], [1, 1]];
    U(0) is the discrete two-mode Fourier transform.
    """
    e = np.exp(-1j * phase)
    u = np.array([[-e, e], [1.0, 1.0]], dtype=complex) / math.sqrt(2.0)
    return TwoModeUnitary(u)


def geometric_pmf(k: int, x: float) -> float:
    """P(k) = x^k / (1+x)^(k+1), the single thermal-mode count law."""
    return x**k / (1.0 + x) ** (k + 1)


def _geometric_dpmf(k: int, x: float) -> float:
    # d/dx of the geometric pmf, finite at x = 0.
    if x == 0.0:
        return -1.0 if k == 0 else (1.0 if k == 1 else 0.0)
    return (k * x ** (k - 1) * (1.0 + x) - (k + 1) * x**k) / (1.0 + x) ** (k + 2)


def tail_bound(x: DiagThermalParams, n_max: int) -> float:
    q1 = x.x1 / (1.0 + x.x1)
    q2 = x.x2 / (1.0 + x.x2)
    return 1.0 - (1.0 - q1 ** (n_max + 1)) * (1.0 - q2 ** (n_max + 1))


def default_cutoff(x: DiagThermalParams, tol: float = TAIL_TOL) -> FockCutoff:
    """Smallest truncation with geometric tail mass below ``tol`` (floor 6)."""
    n = CUTOFF_FLOOR
    while tail_bound(x, n) >= tol:
        n += 1
        if n > 512:
            raise ValueError("occupations too large for a practical truncation")
    return FockCutoff(n)


def p_in(x: DiagThermalParams, cutoff: FockCutoff | None = None) -> CountDistribution:
    """Counts on the diagonal thermal modes: product of geometrics."""
    cutoff = cutoff or default_cutoff(x)
    n_max = cutoff.max_total_photons
    probs = {}
    for n1 in range(n_max + 1):
        g1 = geometric_pmf(n1, x.x1)
        for n2 in range(n_max + 1 - n1):
            probs[(n1, n2)] = g1 * geometric_pmf(n2, x.x2)
    return CountDistribution(cutoff, probs, tail_bound(x, n_max))


# Passive-transformation kernels -------------------------------------------
#
# K[(m1, m2), (n1, n2)] = |<m1, m2| W |n1, n2>|^2 for the lifted mode
# unitary W; both closed forms below follow from expanding the transformed
# creation operators with the binomial theorem ("n choose j" with j > n or
# j < 0 is zero).  Kernels conserve total photon number.


@lru_cache(maxsize=None)
def _kernel_terms(n_max: int):
    """Flattened index tables shared by the closed-form kernels.

    Terms of every (m, n) interference sum are concatenated into flat arrays
    so a kernel evaluation is a handful of vectorised power/segment-sum
    operations rather than a Python loop.
    """
    basis = fock_basis(2, n_max)
    index = {s: i for i, s in enumerate(basis)}
    binom, parity, e1, e2 = [], [], [], []
    row_start, row_m, row_n, row_scale2, row_scale4 = [], [], [], [], []
    for total in range(n_max + 1):
        for m1 in range(total + 1):
            m2 = total - m1
            for n1 in range(total + 1):
                n2 = total - n1
                js = [j for j in range(0, m1 + 1) if j <= n1 and 0 <= m1 - j <= n2]
                if not js:
                    continue
                row_start.append(len(binom))
                row_m.append(index[(m1, m2)])
                row_n.append(index[(n1, n2)])
                pref = (
                    math.factorial(m1)
                    * math.factorial(m2)
                    / (math.factorial(n1) * math.factorial(n2))
                )
                row_scale2.append(pref / 2.0**total)
                row_scale4.append(pref / 4.0**total)
                for j in js:
                    binom.append(math.comb(n1, j) * math.comb(n2, m1 - j))
                    parity.append((-1.0) ** j)
                    e1.append(m1 + n1 - 2 * j)
                    e2.append(n2 - m1 + 2 * j)
    return {
        "dim": len(basis),
        "binom": np.array(binom, dtype=float),
        "parity": np.array(parity),
        "e1": np.array(e1, dtype=np.int64),
        "e1_safe": np.maximum(np.array(e1, dtype=np.int64) - 1, 0),
        "e2": np.array(e2, dtype=np.int64),
        "e2_safe": np.maximum(np.array(e2, dtype=np.int64) - 1, 0),
        "row_start": np.array(row_start, dtype=np.intp),
        "row_m": np.array(row_m, dtype=np.intp),
        "row_n": np.array(row_n, dtype=np.intp),
        "row_scale2": np.array(row_scale2),
        "row_scale4": np.array(row_scale4),
    }


@lru_cache(maxsize=None)
def bs_kernel(n_max: int) -> np.ndarray:
    """Counting the spatial modes of U(phase) @ diagonal state; phase-free.

    K = m1! m2! / (n1! n2! 2^N) |sum_j (-1)^j C(n1, j) C(n2, m1 - j)|^2.
    """
    t = _kernel_terms(n_max)
    s = np.add.reduceat(t["binom"] * t["parity"], t["row_start"])
    kern = np.zeros((t["dim"], t["dim"]))
    kern[t["row_m"], t["row_n"]] = t["row_scale2"] * s * s
    return kern


def ft_kernel(delta: float, n_max: int, with_grad: bool = False):
    """Kernel after the composed transform U(0) U(delta), and d/d delta.

    The interference sum carries factors (1 - e^{-i delta})^(m1 + n1 - 2j)
    (1 + e^{-i delta})^(n2 - m1 + 2j); both exponents are non-negative
    wherever the binomial coefficients survive, so the sum is regular on the
    whole phase circle (delta = 0 reduces it to the identity kernel and
    delta = pi to the mode swap).
    """
    t = _kernel_terms(n_max)
    e = np.exp(-1j * delta)
    z1 = 1.0 - e
    z2 = 1.0 + e
    pw1 = _int_power(z1, t["e1"])
    pw2 = _int_power(z2, t["e2"])
    s = np.add.reduceat(t["binom"] * pw1 * pw2, t["row_start"])
    kern = np.zeros((t["dim"], t["dim"]))
    kern[t["row_m"], t["row_n"]] = t["row_scale4"] * (s.real**2 + s.imag**2)
    if not with_grad:
        return kern
    # d z1 = i e, d z2 = -i e; exponents are masked before powering so
    # vanishing terms never touch a negative power of a zero base.
    d1 = t["e1"] * _int_power(z1, t["e1_safe"]) * (1j * e) * pw2
    d2 = t["e2"] * _int_power(z2, t["e2_safe"]) * (-1j * e) * pw1
    ds = np.add.reduceat(t["binom"] * (d1 + d2), t["row_start"])
    grad = np.zeros((t["dim"], t["dim"]))
    grad[t["row_m"], t["row_n"]] = t["row_scale4"] * 2.0 * np.real(np.conj(s) * ds)
    return kern, grad


def _int_power(z: complex, exps: np.ndarray) -> np.ndarray:
    if abs(z) == 0.0:
        # 0^0 = 1 and 0^positive = 0; exponents here are never negative.
        out = np.zeros(exps.shape, dtype=complex)
        out[exps == 0] = 1.0
        return out
    return np.asarray(z, dtype=complex) ** exps


def lift_two_mode_unitary(u: np.ndarray, n_max: int) -> np.ndarray:
    """Lift a 2x2 mode unitary to the truncated two-mode Fock basis.

    |n1, n2> = (n1! n2!)^{-1/2} (a1^dag)^{n1} (a2^dag)^{n2} |0>, with each
    creation operator transformed through the columns of u; the result is
    block-unitary on every total-photon sector.
    """
    u = np.asarray(u, dtype=complex)
    basis = fock_basis(2, n_max)
    index = {s: i for i, s in enumerate(basis)}
    dim = len(basis)
    w = np.zeros((dim, dim), dtype=complex)
    for col, (n1, n2) in enumerate(basis):
        for m1 in range(n1 + n2 + 1):
            m2 = n1 + n2 - m1
            amp = 0.0 + 0.0j
            for k in range(max(0, m1 - n2), min(n1, m1) + 1):
                amp += (
                    math.comb(n1, k)
                    * math.comb(n2, m1 - k)
                    * u[0, 0] ** k
                    * u[1, 0] ** (n1 - k)
                    * u[0, 1] ** (m1 - k)
                    * u[1, 1] ** (n2 - m1 + k)
                )
            norm = math.sqrt(
                math.factorial(m1) * math.factorial(m2)
                / (math.factorial(n1) * math.factorial(n2))
            )
            w[index[(m1, m2)], col] = norm * amp
    return w


def fock_oracle(
    params: SpatialParams, u: TwoModeUnitary, cutoff: FockCutoff | None = None
) -> CountDistribution:
    """Brute-force count distribution: conjugate the diagonal state by u."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    basis = fock_basis(2, cutoff.max_total_photons)
    diag = p_in(x, cutoff).as_array()
    w = lift_two_mode_unitary(u.u, cutoff.max_total_photons)
    out = (np.abs(w) ** 2) @ diag
    probs = {s: float(out[i]) for i, s in enumerate(basis)}
    return CountDistribution(cutoff, probs, tail_bound(x, cutoff.max_total_photons))


def _push_through_kernel(
    x: DiagThermalParams, kern: np.ndarray, cutoff: FockCutoff
) -> CountDistribution:
    basis = fock_basis(2, cutoff.max_total_photons)
    diag = p_in(x, cutoff).as_array()
    out = kern @ diag
    probs = {s: float(out[i]) for i, s in enumerate(basis)}
    return CountDistribution(cutoff, probs, tail_bound(x, cutoff.max_total_photons))


def p_out_bs(params: SpatialParams, cutoff: FockCutoff | None = None) -> CountDistribution:
    """Counts on the spatial modes themselves; independent of phi."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    return _push_through_kernel(x, bs_kernel(cutoff.max_total_photons), cutoff)


def p_out_ft(params: SpatialParams, cutoff: FockCutoff | None = None) -> CountDistribution:
    """Counts after the Fourier transform U(0); phase-sensitive."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    kern = ft_kernel(params.phi, cutoff.max_total_photons)
    return _push_through_kernel(x, kern, cutoff)


def _count_probability_model(
    params: SpatialParams, scheme: str, phase: float | None, cutoff: FockCutoff | None
):
    """Outcome probabilities and analytic (n, gamma, phi) gradients."""
    x = DiagThermalParams.from_spatial(params)
    cutoff = cutoff or default_cutoff(x)
    n_max = cutoff.max_total_photons
    basis = fock_basis(2, n_max)

    diag = np.array([geometric_pmf(n1, x.x1) * geometric_pmf(n2, x.x2) for n1, n2 in basis])
    d1 = np.array([_geometric_dpmf(n1, x.x1) * geometric_pmf(n2, x.x2) for n1, n2 in basis])
    d2 = np.array([geometric_pmf(n1, x.x1) * _geometric_dpmf(n2, x.x2) for n1, n2 in basis])

    if scheme == "direct":
        kern = bs_kernel(n_max)
        dkern = None
    elif scheme == "ft":
        kern, dkern = ft_kernel(params.phi, n_max, with_grad=True)
    elif scheme == "bs":
        if phase is None:
            raise ValueError("scheme 'bs' needs the measurement phase")
        kern, dkern = ft_kernel(params.phi - phase, n_max, with_grad=True)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    p = kern @ diag
    dp_dx1 = kern @ d1
    dp_dx2 = kern @ d2
    dp_dphi = dkern @ diag if dkern is not None else np.zeros_like(p)

    g = params.gamma_abs
    n = params.n_mean
    grads = np.stack(
        [
            dp_dx1 * (1.0 - g) + dp_dx2 * (1.0 + g),
            dp_dx1 * (-n) + dp_dx2 * n,
            dp_dphi,
        ],
        axis=1,
    )
    return cutoff, basis, p, grads


def count_fisher(
    params: SpatialParams,
    scheme: str = "bs",
    phase: float | None = None,
    cutoff: FockCutoff | None = None,
) -> FisherMatrix:
    """Classical Fisher matrix of a counting scheme, parameters (n, |gamma|, phi).

    Schemes: ``bs`` counts after a phase shift ``phase`` and a balanced
    beamsplitter (the matched choice phase = phi measures the coherence
    eigenmodes, phase = phi - pi/2 the conjugate pair); ``ft`` is the fixed
    Fourier-transform scheme (phase 0); ``direct`` counts the spatial modes
    with no optics and carries no phase information.
    """
    _, _, p, grads = _count_probability_model(params, scheme, phase, cutoff)
    return classical_fisher(np.maximum(p, 0.0), grads)
