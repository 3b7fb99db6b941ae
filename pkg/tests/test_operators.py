"""Tests for the quadratic-observable algebra and its Fock realisation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoptic.counting import DiagThermalParams, default_cutoff
from thermoptic.gaussian import SpatialParams, thermal_spectral_covariance, two_spatial_covariance
from thermoptic.operators import (
    FockCutoff,
    QuadraticObservable,
    fock_basis,
    identity_obs,
    mode_hop,
    number_op,
    ops_allclose,
    proportionality,
    qo_add,
    qo_commutator,
    qo_expectation,
    qo_fock_matrix,
    qo_pair_expectation,
    qo_scale,
    qo_sub,
    total_number_op,
)
from thermoptic.oracles import fock_density_matrix, random_spatial_params, wick_vs_fock_expectation
from thermoptic.spatial import sld_spatial


def random_observable(rng, n_modes=2):
    c = rng.normal(size=(2 * n_modes, 2 * n_modes)) + 1j * rng.normal(size=(2 * n_modes, 2 * n_modes))
    return QuadraticObservable(n_modes, complex(rng.normal(), rng.normal()), c)


coeff = st.floats(-2.0, 2.0)


@st.composite
def observables(draw, n_modes=2):
    flat = draw(
        st.lists(st.tuples(coeff, coeff), min_size=(2 * n_modes) ** 2, max_size=(2 * n_modes) ** 2)
    )
    c = np.array([complex(a, b) for a, b in flat]).reshape(2 * n_modes, 2 * n_modes)
    return QuadraticObservable(n_modes, 0.0, c)


class TestCommutator:
    def test_disjoint_numbers_commute(self):
        comm = qo_commutator(number_op(0, 2), number_op(1, 2))
        assert np.abs(comm.c).max() == 0.0
        assert comm.c0 == 0.0

    def test_hopping_pair(self):
        # [a1^dag a2, a2^dag a1] = n1 - n2
        comm = qo_commutator(mode_hop(0, 1, 2), mode_hop(1, 0, 2))
        expected = qo_sub(number_op(0, 2), number_op(1, 2))
        assert ops_allclose(comm, expected)

    @given(a=observables(), b=observables())
    @settings(max_examples=30, deadline=None)
    def test_antisymmetry(self, a, b):
        lhs = qo_commutator(a, b)
        rhs = qo_scale(-1.0, qo_commutator(b, a))
        assert ops_allclose(lhs, rhs)

    def test_jacobi_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(8):
            a, b, c = (random_observable(rng) for _ in range(3))
            total = qo_add(
                qo_commutator(a, qo_commutator(b, c)),
                qo_add(
                    qo_commutator(b, qo_commutator(c, a)),
                    qo_commutator(c, qo_commutator(a, b)),
                ),
            ).canonical()
            scale = max(np.abs(m.c).max() for m in (a, b, c))
            assert np.abs(total.c).max() < 1e-10 * scale**3
            assert abs(total.c0) < 1e-10 * scale**3

    def test_mode_count_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            qo_commutator(number_op(0, 1), number_op(0, 2))


class TestExpectation:
    def test_thermal_number(self):
        state = thermal_spectral_covariance(0.3)
        assert abs(qo_expectation(number_op(0, 1), state) - 0.3) < 1e-14

    def test_identity(self):
        state = thermal_spectral_covariance(0.4)
        assert qo_expectation(identity_obs(1), state) == 1.0

    def test_coherence_convention_pinned_by_fock_trace(self):
        # <a2^dag a1> = n |g| e^{-i phi}, fixed against the dense oracle
        params = SpatialParams(0.01, 0.5, math.pi / 3)
        state = two_spatial_covariance(params)
        hop = mode_hop(1, 0, 2)
        analytic = qo_expectation(hop, state)
        assert abs(analytic - 0.005 * np.exp(-1j * math.pi / 3)) < 1e-15
        cutoff = default_cutoff(DiagThermalParams.from_spatial(params))
        rho = fock_density_matrix(params, cutoff)
        dense = np.trace(rho @ qo_fock_matrix(hop, cutoff))
        assert abs(analytic - dense) < 1e-10

    def test_random_observables_match_dense_traces(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            params = random_spatial_params(rng)
            obs = random_observable(rng)
            analytic, dense = wick_vs_fock_expectation(obs, params)
            assert abs(analytic - dense) < 1e-8

    def test_pair_expectation_matches_dense(self):
        rng = np.random.default_rng(21)
        params = SpatialParams(0.05, 0.4, 1.3)
        state = two_spatial_covariance(params)
        cutoff = default_cutoff(DiagThermalParams.from_spatial(params))
        rho = fock_density_matrix(params, cutoff)
        for _ in range(5):
            a, b = random_observable(rng), random_observable(rng)
            dense = np.trace(rho @ qo_fock_matrix(a, cutoff) @ qo_fock_matrix(b, cutoff))
            assert abs(qo_pair_expectation(a, b, state) - dense) < 1e-8


class TestFockMatrix:
    def test_total_number_small_cutoff(self):
        m = qo_fock_matrix(total_number_op(2), FockCutoff(1))
        assert fock_basis(2, 1) == ((0, 0), (0, 1), (1, 0))
        assert np.allclose(m, np.diag([0.0, 1.0, 1.0]))

    def test_hopping_single_entry(self):
        m = qo_fock_matrix(mode_hop(0, 1, 2), FockCutoff(1))
        expected = np.zeros((3, 3))
        expected[2, 1] = 1.0  # |0,1> -> |1,0>
        assert np.allclose(m, expected)

    def test_reordered_product_exact_at_cutoff_edge(self):
        # a a^dag realised as a matrix product must stay exact on the kept
        # sectors, which needs the enlarged intermediate basis.
        c = np.zeros((2, 2), dtype=complex)
        c[0, 1] = 1.0  # a a^dag
        m = qo_fock_matrix(QuadraticObservable(1, 0.0, c), FockCutoff(3))
        assert np.allclose(np.diag(m), [1.0, 2.0, 3.0, 4.0])

    def test_phase_sld_matrix_structure(self):
        params = SpatialParams(0.01, 0.5, 0.0)
        m = qo_fock_matrix(sld_spatial(2, params), FockCutoff(4))
        assert np.abs(m - m.conj().T).max() < 1e-12
        one_photon = [i for i, s in enumerate(fock_basis(2, 4)) if sum(s) == 1]
        block = m[np.ix_(one_photon, one_photon)]
        assert abs(np.trace(block)) < 1e-12


class TestHermiticity:
    def test_number_operator_hermitian(self):
        assert number_op(0, 2).is_hermitian()

    def test_hopping_not_hermitian(self):
        assert not mode_hop(0, 1, 2).is_hermitian()
        combined = qo_add(mode_hop(0, 1, 2), mode_hop(1, 0, 2))
        assert combined.is_hermitian()

    def test_hermiticity_matches_fock_realisation(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            obs = random_observable(rng)
            sym = qo_scale(0.5, qo_add(obs, obs.dagger()))
            m = qo_fock_matrix(sym, FockCutoff(3))
            assert np.abs(m - m.conj().T).max() < 1e-10
            assert sym.is_hermitian()

    def test_number_conservation_flag(self):
        assert number_op(0, 2).is_number_conserving()
        c = np.zeros((4, 4), dtype=complex)
        c[0, 2] = 1.0  # a1 a2
        assert not QuadraticObservable(2, 0.0, c).is_number_conserving()


class TestSldCommutatorExpectations:
    def test_expected_commutators_vanish(self):
        # tr(rho [L_i, L_j]) = 0, evaluated by Wick algebra and dense trace
        params = SpatialParams(0.01, 0.5, math.pi / 4)
        state = two_spatial_covariance(params)
        cutoff = default_cutoff(DiagThermalParams.from_spatial(params))
        rho = fock_density_matrix(params, cutoff)
        slds = [sld_spatial(j, params) for j in range(3)]
        for i in range(3):
            for j in range(3):
                wick = qo_pair_expectation(slds[i], slds[j], state) - qo_pair_expectation(
                    slds[j], slds[i], state
                )
                assert abs(wick) < 1e-8
                li = qo_fock_matrix(slds[i], cutoff)
                lj = qo_fock_matrix(slds[j], cutoff)
                dense = np.trace(rho @ (li @ lj - lj @ li))
                assert abs(dense) < 1e-8


class TestProportionality:
    def test_detects_scaling(self):
        a = qo_scale(2.5j, number_op(0, 2))
        assert proportionality(a, number_op(0, 2)) == pytest.approx(2.5j)

    def test_rejects_unrelated(self):
        assert proportionality(number_op(0, 2), number_op(1, 2)) is None
