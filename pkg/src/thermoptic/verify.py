"""Self-check suites behind the ``thermoptic verify`` subcommand.

``core`` covers the fast structural identities (commutator claims, matched
measurement structure, bound arithmetic); ``oracle`` runs the dense
Fock-space cross-checks.  Every check returns a ``CheckResult`` so the CLI
can print one line per check and exit non-zero on any failure.  The
``tol_scale`` knob exists for harness tests that need to provoke failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import blackbody, counting, oracles, povm, spatial
from .fisher import FisherMatrix, cost
from .gaussian import SpatialParams, two_spatial_covariance
from .operators import (
    number_op,
    ops_allclose,
    proportionality,
    qo_commutator,
    qo_pair_expectation,
    qo_sub,
    total_number_op,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _result(name: str, value: float, bound: float) -> CheckResult:
    return CheckResult(name, bool(value <= bound), f"{value:.3e} <= {bound:.3e}")


_PARAMS = SpatialParams(0.01, 0.5, math.pi / 4)


def core_suite(seed: int = 0, tol_scale: float = 1.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    checks: list[CheckResult] = []

    slds = [spatial.sld_spatial(j, _PARAMS) for j in range(3)]
    n_diff = qo_sub(number_op(0, 2), number_op(1, 2))

    comm_ng = qo_commutator(slds[0], slds[1])
    checks.append(
        _result("commutator [L_n, L_gamma] vanishes", np.abs(comm_ng.c).max() + abs(comm_ng.c0), 1e-10 * tol_scale)
    )
    for label, idx in (("n", 0), ("gamma", 1)):
        comm = qo_commutator(slds[idx], slds[2])
        z = proportionality(comm, n_diff, tol=1e-10 * tol_scale)
        checks.append(
            CheckResult(
                f"commutator [L_{label}, L_phi] proportional to n1 - n2",
                z is not None,
                f"ratio {z}",
            )
        )

    xs = spatial.x_operators(_PARAMS)
    for (i, j), expect_zero in (((0, 1), True), ((0, 2), True), ((1, 2), False)):
        comm = qo_commutator(xs[i], xs[j])
        mag = np.abs(comm.canonical().c).max()
        if expect_zero:
            checks.append(_result(f"commutator [X_{i + 1}, X_{j + 1}] vanishes", mag, 1e-10 * tol_scale))
        else:
            z = proportionality(comm, n_diff, tol=1e-8 * tol_scale)
            checks.append(
                CheckResult("commutator [X_2, X_3] proportional to n1 - n2", z is not None and mag > 0, f"ratio {z}")
            )

    state = two_spatial_covariance(_PARAMS)
    worst = 0.0
    for i in range(3):
        for j in range(3):
            fwd = qo_pair_expectation(slds[i], slds[j], state)
            bwd = qo_pair_expectation(slds[j], slds[i], state)
            worst = max(worst, abs(fwd - bwd))
    checks.append(_result("expected SLD commutators vanish on the state", worst, 1e-8 * tol_scale))

    phase = spatial.pqr_gao_lee(2, _PARAMS)
    n, g = _PARAMS.n_mean, _PARAMS.gamma_abs
    q_expected = -1j * g * np.exp(-1j * _PARAMS.phi) / (1.0 + n * (1.0 - g * g))
    err = max(abs(phase.p), abs(phase.r), abs(phase.q - q_expected))
    checks.append(
        _result("phase SLD is a pure thermal-weighted interference term", err, 1e-9 * tol_scale)
    )

    ws = spatial.weighted_scheme(_PARAMS, use_delta_zero=True)
    err = max(abs(ws.cost_star - 5.0), abs(ws.p_star - 0.5))
    checks.append(_result("idealised weighted scheme: cost 5 at p = 1/2", err, 1e-6 * tol_scale))

    ws_full = spatial.weighted_scheme(_PARAMS)
    ok = ws_full.cost_star < 5.0 and ws_full.p_star < 0.5 and ws_full.cost_star >= 4.5
    checks.append(
        CheckResult(
            "weighted scheme with measured deltas lands just below 5",
            bool(ok and tol_scale <= 1.0),
            f"cost {ws_full.cost_star:.6f} at p {ws_full.p_star:.6f}",
        )
    )

    gm = povm.gill_massar_bounds(3, 3)
    checks.append(
        CheckResult(
            "Gill-Massar numbers for d = 3, D = 3",
            gm["lower"] == 4.5 and gm["upper_scheme"] == 9.0,
            str(gm),
        )
    )

    iq = spatial.qfi_spatial(_PARAM_DRAW(rng))
    checks.append(_result("cost(I, I) = d", abs(cost(iq, FisherMatrix(3, iq.m, "classical")) - 3.0), 1e-9 * tol_scale))

    jac = rng.normal(size=(3, 3))
    ic = spatial.weighted_scheme(_PARAMS).ic_mixture
    iq0 = spatial.qfi_spatial(_PARAMS)
    base = cost(iq0, ic)
    mapped = cost(
        FisherMatrix(3, jac.T @ iq0.m @ jac, "quantum"),
        FisherMatrix(3, jac.T @ ic.m @ jac, "classical"),
    )
    checks.append(_result("cost is reparameterisation invariant", abs(mapped - base), 1e-8 * tol_scale * max(1.0, base)))

    scene = blackbody.BlackbodyScene(1e4, 1e-32)
    single = blackbody.spectral_qfi(3e14, scene).m
    det = single[0, 0] * single[1, 1] - single[0, 1] ** 2
    checks.append(
        _result("single spectral mode is rank deficient", abs(det), 1e-12 * tol_scale * single[0, 0] * single[1, 1])
    )
    return checks


def _PARAM_DRAW(rng: np.random.Generator) -> SpatialParams:
    return oracles.random_spatial_params(rng, n_cap=0.05)


def oracle_suite(seed: int = 0, tol_scale: float = 1.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    checks: list[CheckResult] = []

    worst = 0.0
    for _ in range(5):
        params = oracles.random_spatial_params(rng)
        analytic = counting.p_out_bs(params).as_array()
        dense = counting.fock_oracle(params, counting.u_phase_bs(params.phi)).as_array()
        worst = max(worst, float(np.abs(analytic - dense).max()))
    checks.append(_result("direct-count distribution matches Fock oracle", worst, 1e-10 * tol_scale))

    worst = 0.0
    u0 = counting.u_phase_bs(0.0).u
    for _ in range(5):
        params = oracles.random_spatial_params(rng)
        analytic = counting.p_out_ft(params).as_array()
        combined = counting.TwoModeUnitary(u0 @ counting.u_phase_bs(params.phi).u)
        dense = counting.fock_oracle(params, combined).as_array()
        worst = max(worst, float(np.abs(analytic - dense).max()))
    checks.append(_result("Fourier-count distribution matches Fock oracle", worst, 1e-10 * tol_scale))

    params = _PARAMS
    iq = spatial.qfi_spatial(params).m
    iq_dense = oracles.qfi_fock_eig(params)
    rel = np.abs(iq - iq_dense).max() / np.abs(iq).max()
    checks.append(_result("Gao-Lee QFI matches eigendecomposition QFI", rel, 1e-4 * tol_scale))

    worst = max(oracles.sld_defining_residual(params, j) for j in range(3))
    checks.append(_result("SLD defining-equation residual", worst, 1e-6 * tol_scale))

    worst = 0.0
    for _ in range(3):
        draw = oracles.random_spatial_params(rng)
        analytic, dense = oracles.wick_vs_fock_expectation(total_number_op(2), draw)
        worst = max(worst, abs(analytic - dense))
    checks.append(_result("Wick expectations match dense traces", worst, 1e-8 * tol_scale))

    res = povm.optimize_povm(_PARAMS, restarts=4, seed=seed)
    ic = povm.povm_fisher(res.best_povm, _PARAMS)
    iq_m = spatial.qfi_spatial(_PARAMS)
    gm = float(np.trace(np.linalg.solve(iq_m.m, ic.m)))
    ok = res.best_cost >= 4.5 - 1e-9 and gm <= 2.0 + 1e-9
    checks.append(
        CheckResult(
            "optimised POVM respects both Gill-Massar bounds",
            bool(ok and tol_scale <= 1.0),
            f"cost {res.best_cost:.4f}, tr(IQ^-1 IC) {gm:.4f}",
        )
    )

    ws = spatial.weighted_scheme(_PARAMS)
    diff = np.linalg.eigvalsh(ws.ic_mixture.m - iq_m.m).max()
    checks.append(_result("mixture Fisher matrix never exceeds the QFI", diff, 1e-8 * tol_scale * np.abs(iq_m.m).max()))
    return checks


def run_suite(name: str, seed: int = 0, tol_scale: float = 1.0) -> list[CheckResult]:
    if name == "core":
        return core_suite(seed, tol_scale)
    if name == "oracle":
        return oracle_suite(seed, tol_scale)
    if name == "all":
        return core_suite(seed, tol_scale) + oracle_suite(seed, tol_scale)
    raise ValueError(f"unknown suite {name!r}")
