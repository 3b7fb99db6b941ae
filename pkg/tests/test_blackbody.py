"""Tests for Planck-law statistics and optimal frequency design."""

import math

import numpy as np
import pytest

from thermoptic.blackbody import (
    BOLTZMANN_K,
    PLANCK_H,
    BlackbodyScene,
    FrequencyGrid,
    PriorTable,
    SceneGeometry,
    mean_photon_gradient,
    mean_photon_number,
    multimode_qfi,
    optimal_frequencies,
    prior_averaged_design,
    regime_check,
    spectral_qfi,
    variance_bound_cofactor,
)
from thermoptic.fisher import crb_bound, qfi_gaussian
from thermoptic.gaussian import thermal_spectral_covariance

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

FIG2_SCENE = BlackbodyScene(1e4, 1e-32)
# Frozen from this module's own minimiser and the matrix-inverse oracle;
# the variance floor at the optimal pair for the scene above.
FIG2_MIN_LOG_VARIANCE = 25.6295


class TestScene:
    def test_geometry_consistency(self):
        geom = SceneGeometry(1e18, 1e-11, 1e18, 1e-3)
        scene = BlackbodyScene.from_geometry(5e3, geom)
        assert scene.kappa == pytest.approx(geom.kappa(), rel=1e-12)
        assert geom.spectral_width() == pytest.approx(1e3)

    def test_geometry_mismatch_rejected(self):
        geom = SceneGeometry(1e18, 1e-11, 1e18, 1e-3)
        with pytest.raises(ValueError, match="kappa"):
            BlackbodyScene(5e3, geom.kappa() * 1.001, geom)

    @pytest.mark.parametrize("temp,kappa", [(0.0, 1e-32), (-5.0, 1e-32), (1e4, 0.0)])
    def test_positivity(self, temp, kappa):
        with pytest.raises(ValueError):
            BlackbodyScene(temp, kappa)


class TestMeanPhotonNumber:
    def test_ln2_point(self):
        # h nu = k T ln 2 makes the thermal occupation exactly 1
        scene = BlackbodyScene(7.3e3, 2e-33)
        nu = math.log(2.0) * BOLTZMANN_K * scene.temperature / PLANCK_H
        assert mean_photon_number(nu, scene) == pytest.approx(nu * nu * scene.kappa, rel=1e-12)

    def test_fig2_window_occupancy(self):
        values = [mean_photon_number(nu, FIG2_SCENE) for nu in np.linspace(1e13, 3e15, 1500)]
        assert max(values) < 3e-4

    def test_high_frequency_suppression(self):
        assert mean_photon_number(1e18, FIG2_SCENE) == 0.0 or mean_photon_number(1e18, FIG2_SCENE) < 1e-200

    def test_gradients_positive_and_match_fd(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            t = rng.uniform(2e3, 5e4)
            kappa = 10.0 ** rng.uniform(-34, -30)
            nu = 10.0 ** rng.uniform(12.5, 15.5)
            scene = BlackbodyScene(t, kappa)
            grad = mean_photon_gradient(nu, scene)
            assert grad.min() > 0.0
            step_t = 1e-6 * t
            fd_t = (
                mean_photon_number(nu, BlackbodyScene(t + step_t, kappa))
                - mean_photon_number(nu, BlackbodyScene(t - step_t, kappa))
            ) / (2 * step_t)
            step_k = 1e-6 * kappa
            fd_k = (
                mean_photon_number(nu, BlackbodyScene(t, kappa + step_k))
                - mean_photon_number(nu, BlackbodyScene(t, kappa - step_k))
            ) / (2 * step_k)
            assert grad[0] == pytest.approx(fd_t, rel=1e-6)
            assert grad[1] == pytest.approx(fd_k, rel=1e-6)


class TestSpectralQfi:
    def test_rank_deficient_everywhere(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            scene = BlackbodyScene(rng.uniform(1e3, 1e5), 10.0 ** rng.uniform(-34, -30))
            m = spectral_qfi(10.0 ** rng.uniform(13, 15.5), scene).m
            assert abs(m[0, 0] * m[1, 1] - m[0, 1] ** 2) < 1e-10 * m[0, 0] * m[1, 1]

    def test_kappa_entry_closed_form(self):
        nu = 4e14
        n = mean_photon_number(nu, FIG2_SCENE)
        n_th = n / (nu * nu * FIG2_SCENE.kappa)
        m = spectral_qfi(nu, FIG2_SCENE).m
        assert m[1, 1] == pytest.approx(n_th**2 * nu**4 / (n + n * n), rel=1e-12)

    def test_matches_gaussian_engine_via_chain_rule(self):
        nu = 2.5e14
        n = mean_photon_number(nu, FIG2_SCENE)
        grad = mean_photon_gradient(nu, FIG2_SCENE)
        state = thermal_spectral_covariance(n)
        fm = qfi_gaussian(state, [grad[0] * SIGMA_X, grad[1] * SIGMA_X])
        assert np.abs(fm.m - spectral_qfi(nu, FIG2_SCENE).m).max() < 1e-10 * np.abs(fm.m).max()


class TestMultimodeQfi:
    def test_single_mode_singular(self):
        m = multimode_qfi([3e14], FIG2_SCENE).m
        assert abs(np.linalg.det(m)) < 1e-12 * m[0, 0] * m[1, 1]

    def test_duplicated_frequencies_singular(self):
        m = multimode_qfi([3e14, 3e14], FIG2_SCENE).m
        assert abs(np.linalg.det(m)) < 1e-12 * m[0, 0] * m[1, 1]

    def test_two_distinct_invertible(self):
        m = multimode_qfi([1.2e14, 1.1e15], FIG2_SCENE).m
        assert np.linalg.det(m) > 0.0

    def test_monotone_under_grid_extension(self):
        base = multimode_qfi([1.2e14, 6e14], FIG2_SCENE).m
        extended = multimode_qfi([1.2e14, 6e14, 1.5e15], FIG2_SCENE).m
        assert np.diag(extended - base).min() >= 0.0
        assert np.linalg.eigvalsh(extended - base).min() >= -1e-12 * np.abs(extended).max()

    def test_grid_type_validation(self):
        with pytest.raises(ValueError, match="increasing"):
            FrequencyGrid((2e14, 1e14))
        with pytest.raises(ValueError, match="positive"):
            FrequencyGrid((0.0, 1e14))
        assert len(FrequencyGrid((1e14, 2e14))) == 2


class TestVarianceBound:
    def test_matches_inverse_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            scene = BlackbodyScene(rng.uniform(3e3, 3e4), 10.0 ** rng.uniform(-33, -31))
            freqs = sorted(10.0 ** rng.uniform(13.2, 15.4, size=3))
            for i in (0, 1):
                direct = variance_bound_cofactor(freqs, scene, i)
                oracle = np.linalg.inv(multimode_qfi(freqs, scene).m)[i, i]
                assert direct == pytest.approx(oracle, rel=1e-8)

    def test_duplicated_frequencies_diverge(self):
        assert variance_bound_cofactor([3e14, 3e14], FIG2_SCENE, 0) == math.inf

    def test_fig2_optimum_value(self):
        # Derived recomputation at the published optimal pair.  Note: the
        # figure's colorbar ticks span [27, 35] but the recomputed floor sits
        # below the lowest tick; see the acceptance suite.
        var = variance_bound_cofactor((1.188e14, 1.118e15), FIG2_SCENE, 0)
        assert math.log(var) == pytest.approx(FIG2_MIN_LOG_VARIANCE, abs=1e-3)

    def test_needs_two_modes(self):
        with pytest.raises(ValueError, match="two"):
            variance_bound_cofactor([3e14], FIG2_SCENE, 0)

    def test_crb_bound_agrees_with_cofactor_route(self):
        freqs = (1.2e14, 1.1e15)
        bound = crb_bound(multimode_qfi(freqs, FIG2_SCENE), np.diag([1.0, 0.0]))
        assert bound == pytest.approx(variance_bound_cofactor(freqs, FIG2_SCENE, 0), rel=1e-8)


class TestOptimalFrequencies:
    def test_linear_law_and_sorted_output(self):
        nu1, nu2 = optimal_frequencies(FIG2_SCENE)
        assert nu1 < nu2
        assert nu1 / 1e4 == pytest.approx(1.188e10, rel=0.01)
        assert nu2 / 1e4 == pytest.approx(1.118e11, rel=0.01)

    def test_kappa_independence(self):
        pairs = [optimal_frequencies(BlackbodyScene(1e4, k)) for k in (1e-33, 1e-32, 1e-31)]
        nu1s = [p[0] for p in pairs]
        nu2s = [p[1] for p in pairs]
        assert (max(nu1s) - min(nu1s)) / min(nu1s) < 1e-3
        assert (max(nu2s) - min(nu2s)) / min(nu2s) < 1e-3

    def test_temperature_scaling(self):
        base = optimal_frequencies(BlackbodyScene(8e3, 1e-32))
        doubled = optimal_frequencies(BlackbodyScene(1.6e4, 1e-32))
        assert doubled[0] / base[0] == pytest.approx(2.0, rel=5e-3)
        assert doubled[1] / base[1] == pytest.approx(2.0, rel=5e-3)

    def test_scale_covariance(self):
        ratios = []
        for t in (5e3, 1e4, 2e4):
            nu1, _ = optimal_frequencies(BlackbodyScene(t, 1e-32))
            ratios.append(nu1 / t)
        assert (max(ratios) - min(ratios)) / min(ratios) < 5e-3


class TestPriorAveragedDesign:
    def test_degenerate_prior_reduces_to_point_optimum(self):
        prior = PriorTable(np.array([1e4]), np.array([1.0]))
        grid = prior_averaged_design(prior, np.diag([1.0, 0.0]), 2, kappa=1e-32)
        point = optimal_frequencies(FIG2_SCENE)
        assert grid.frequencies[0] == pytest.approx(point[0], rel=1e-3)
        assert grid.frequencies[1] == pytest.approx(point[1], rel=1e-3)

    def test_uniform_prior_beats_point_design(self):
        temps = np.linspace(8e3, 12e3, 5)
        prior = PriorTable(temps, np.full(5, 0.2))
        g = np.diag([1.0, 0.0])
        grid = prior_averaged_design(prior, g, 2, kappa=1e-32)

        def averaged(freqs):
            return sum(
                0.2 * crb_bound(multimode_qfi(freqs, BlackbodyScene(t, 1e-32)), g) for t in temps
            )

        assert averaged(grid.frequencies) <= averaged(optimal_frequencies(FIG2_SCENE)) * (1 + 1e-9)

    def test_more_modes_cannot_hurt(self):
        temps = np.array([9e3, 1.1e4])
        prior = PriorTable(temps, np.array([0.5, 0.5]))
        g = np.diag([1.0, 0.0])

        def averaged(freqs):
            return sum(
                0.5 * crb_bound(multimode_qfi(sorted(freqs), BlackbodyScene(t, 1e-32)), g)
                for t in temps
            )

        two = averaged(prior_averaged_design(prior, g, 2, kappa=1e-32).frequencies)
        three = averaged(prior_averaged_design(prior, g, 3, kappa=1e-32).frequencies)
        assert three <= two * (1 + 1e-6)

    def test_prior_normalisation_enforced(self):
        with pytest.raises(ValueError, match="sum"):
            PriorTable(np.array([1e4, 2e4]), np.array([0.5, 0.6]))


class TestRegimeCheck:
    def test_single_mode_flag(self):
        report = regime_check(FIG2_SCENE, 1.7e14, 1e-6)
        assert report.values["mode_occupancy"] == pytest.approx(2.89e-4, rel=1e-2)
        assert report.single_mode_ok

    def test_farfield_fails_at_right_angle(self):
        report = regime_check(FIG2_SCENE, 1e14, math.pi / 2)
        assert not report.farfield_ok

    def test_farfield_ratio_values(self):
        report = regime_check(FIG2_SCENE, 1.188e14, 1e-6)
        assert report.values["cot_over_eps_T"] == pytest.approx(1e5, rel=1e-4)
        assert report.farfield_ok
