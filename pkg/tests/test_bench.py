"""Tests for scheme benchmarking: FT cost, random-phase cost, ratio maps."""

import math

import numpy as np
import pytest

from thermoptic.bench import (
    ft_scheme_cost,
    random_phase_cost,
    random_phase_trials,
    ratio_map,
    worker_count,
)
from thermoptic.gaussian import SpatialParams
from thermoptic.spatial import weighted_scheme


class TestFtSchemeCost:
    def test_finite_and_positive(self):
        v = ft_scheme_cost(SpatialParams(0.01, 0.5, math.pi / 4))
        assert math.isfinite(v) and v > 0.0

    def test_far_from_optimal(self):
        params = SpatialParams(0.01, 0.5, math.pi / 4)
        ratio = weighted_scheme(params).cost_star / ft_scheme_cost(params)
        assert ratio <= 0.017

    def test_low_coherence_limit_blows_up(self):
        # phase information vanishes with the coherence, so the FT cost grows
        costs = [ft_scheme_cost(SpatialParams(0.01, g, 0.7)) for g in (0.4, 0.1, 0.02)]
        assert costs[0] < costs[1] < costs[2]

    def test_mirror_symmetry_in_phase(self):
        a = ft_scheme_cost(SpatialParams(0.01, 0.6, 1.1))
        b = ft_scheme_cost(SpatialParams(0.01, 0.6, -1.1))
        assert a == pytest.approx(b, rel=1e-8)


class TestRandomPhase:
    def test_seeded_replay(self):
        params = SpatialParams(0.01, 0.5, 0.3)
        a = random_phase_cost(params, n_phases=20, n_trials=4, seed=42)
        b = random_phase_cost(params, n_phases=20, n_trials=4, seed=42)
        assert a == b

    def test_close_to_optimal_at_moderate_coherence(self):
        params = SpatialParams(0.01, 0.5, math.pi / 4)
        ratio = weighted_scheme(params).cost_star / random_phase_cost(
            params, n_phases=60, n_trials=8, seed=0
        )
        assert ratio > 0.9

    def test_trial_scatter_shrinks_with_more_phases(self):
        params = SpatialParams(0.01, 0.5, 0.9)
        few = random_phase_trials(params, n_phases=10, n_trials=16, seed=5).std(ddof=1)
        many = random_phase_trials(params, n_phases=80, n_trials=16, seed=5).std(ddof=1)
        assert many < few

    def test_mean_scatter_shrinks_with_trials(self):
        # variance of the trial mean scales as 1/n_trials; estimate the
        # scatter of batch means from one long run to avoid re-sampling noise
        params = SpatialParams(0.01, 0.5, 0.9)
        trials = random_phase_trials(params, n_phases=8, n_trials=120, seed=7)
        means_2 = trials.reshape(60, 2).mean(axis=1)
        means_8 = trials.reshape(15, 8).mean(axis=1)
        ratio = means_8.var(ddof=1) / means_2.var(ddof=1)
        assert ratio < 0.8  # expected 1/4, generous against sampling noise

    def test_input_validation(self):
        with pytest.raises(ValueError):
            random_phase_trials(SpatialParams(0.01, 0.5, 0.0), n_phases=0, n_trials=1)


class TestRatioMap:
    def test_ft_map_small_grid(self):
        result = ratio_map("ft", grid_n=9, n_mean=0.01, seed=0, workers=1)
        finite = result.values[np.isfinite(result.values)]
        assert finite.size > 0
        assert finite.min() >= 0.0 and finite.max() <= 0.017
        # centre cell (|gamma| = 0) is absent
        assert not math.isfinite(result.values[4, 4])
        # corners (|gamma| > 1) are absent
        assert not math.isfinite(result.values[0, 0])

    def test_ft_map_conjugation_symmetry(self):
        result = ratio_map("ft", grid_n=9, n_mean=0.01, seed=0, workers=1)
        vals = result.values
        for iy in range(9):
            for ix in range(9):
                a, b = vals[iy, ix], vals[8 - iy, ix]
                if math.isfinite(a) and math.isfinite(b):
                    assert a == pytest.approx(b, rel=1e-8)

    def test_weighted_map_bracketed(self):
        result = ratio_map("weighted", grid_n=9, n_mean=0.01, seed=0, workers=1)
        finite = result.values[np.isfinite(result.values)]
        assert finite.min() >= 4.5
        assert finite.max() <= 5.0 + 1e-6

    def test_rp_map_deterministic_and_near_optimal(self):
        kwargs = dict(grid_n=5, n_mean=0.01, seed=3, n_phases=25, n_trials=3, workers=1)
        a = ratio_map("rp", **kwargs)
        b = ratio_map("rp", **kwargs)
        assert np.array_equal(a.values, b.values, equal_nan=True)
        finite = a.values[np.isfinite(a.values)]
        assert (finite > 0.5).any()
        assert a.metadata["n_phases"] == 25 and a.metadata["seed"] == 3

    def test_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme"):
            ratio_map("other", grid_n=5)


class TestWorkerCount:
    def test_cap_respected(self, monkeypatch):
        monkeypatch.setenv("THERMOPTIC_THREADS", "1")
        assert worker_count() == 1

    def test_invalid_cap_rejected(self, monkeypatch):
        monkeypatch.setenv("THERMOPTIC_THREADS", "zero")
        with pytest.raises(ValueError, match="THERMOPTIC_THREADS"):
            worker_count()
        monkeypatch.setenv("THERMOPTIC_THREADS", "0")
        with pytest.raises(ValueError, match="THERMOPTIC_THREADS"):
            worker_count()
