import logging
from collections import Counter

import numpy as np
import pytest

from dspectrum import (
    SirParams,
    ThresholdUndefinedError,
    connected_components,
    infection_rate,
    profile_all_nodes,
    simulate_once,
)
from dspectrum.sir import _stream

from corpus import er_graph, k4, k4_plus_p3, p3, single_edge, star


class TestSimulateOnce:
    def test_p1_is_component_percolation(self):
        g = k4_plus_p3()
        comp = connected_components(g)
        sizes = np.bincount(comp)
        for v in range(g.node_count):
            assert simulate_once(g, v, 1.0, None) == sizes[comp[v]]

    def test_p0_only_source_recovers(self):
        g = k4()
        assert simulate_once(g, 2, 0.0, None) == 1

    def test_rng_required_for_stochastic_p(self):
        with pytest.raises(ValueError):
            simulate_once(k4(), 0, 0.5, None)

    def test_p3_center_exact_distribution(self):
        # two independent fair coins: final sizes 1/2/3 with probs .25/.5/.25
        g = p3()
        counts = Counter(
            simulate_once(g, 1, 0.5, _stream(123, 1, 0, run)) for run in range(2000)
        )
        assert set(counts) <= {1, 2, 3}
        assert counts[1] == pytest.approx(500, abs=65)  # ~3.3 sigma
        assert counts[2] == pytest.approx(1000, abs=75)
        assert counts[3] == pytest.approx(500, abs=65)

    def test_source_validated(self):
        with pytest.raises(IndexError):
            simulate_once(p3(), 7, 1.0, None)

    def test_probability_validated(self):
        with pytest.raises(ValueError):
            simulate_once(p3(), 0, 1.5, None)


class TestInfectionRate:
    def test_p1_exact_component_fraction(self):
        g = k4_plus_p3()
        params = SirParams(runs_per_source=3, seed=1)
        assert infection_rate(g, 0, 1.0, params) == 4 / 7
        assert infection_rate(g, 5, 1.0, params) == 3 / 7

    def test_p0_exact(self):
        params = SirParams(runs_per_source=3, seed=1)
        assert infection_rate(p3(), 0, 0.0, params) == 1 / 3

    def test_p3_center_mean_within_three_sigma(self):
        # exact expectation 2/3; sigma_mean = sqrt((1/18)/1000)
        params = SirParams(runs_per_source=1000, seed=7)
        rate = infection_rate(p3(), 1, 0.5, params)
        assert abs(rate - 2 / 3) < 0.025

    def test_single_edge_expectation(self):
        # source always recovers, partner infected with probability p
        g = single_edge()
        p = 0.3
        params = SirParams(runs_per_source=4000, seed=11)
        expected = (1 + p) / 2
        sigma = np.sqrt(p * (1 - p) / 4 / params.runs_per_source)
        assert abs(infection_rate(g, 0, p, params) - expected) < 3 * sigma

    def test_reproducible(self):
        g = er_graph(20, 0.2, seed=3)
        params = SirParams(runs_per_source=50, seed=99)
        a = infection_rate(g, 0, 0.4, params, h_index=2)
        b = infection_rate(g, 0, 0.4, params, h_index=2)
        assert a == b
        assert a != infection_rate(g, 0, 0.4, SirParams(runs_per_source=50, seed=98), h_index=2)


class TestProfiles:
    def test_k4_clamped_columns_hit_one(self, caplog):
        g = k4()  # beta = 0.5: h = 2 gives p exactly 1, h >= 4 clamps
        params = SirParams(runs_per_source=5, seed=0)
        with caplog.at_level(logging.WARNING, logger="dspectrum.sir"):
            profiles = profile_all_nodes(g, params=params)
        assert "clamped" in caplog.text
        for prof in profiles:
            for idx, h in enumerate((0.1, 0.5, 1, 1.5, 2, 4, 6, 8, 10)):
                if h >= 2:
                    assert prof.rates[idx] == 1.0

    def test_p3_low_multiplier_expectation(self):
        # beta = 2, h = 0.1 -> p = 0.2; center rate expectation (1 + 2p)/3
        params = SirParams(runs_per_source=1000, seed=5)
        profiles = profile_all_nodes(p3(), params=params)
        assert profiles[1].beta == pytest.approx(2.0)
        assert profiles[1].rates[0] == pytest.approx((1 + 2 * 0.2) / 3, abs=0.03)

    def test_rates_within_bounds(self):
        g = er_graph(15, 0.2, seed=9)
        params = SirParams(runs_per_source=20, seed=4)
        for prof in profile_all_nodes(g, params=params):
            assert (prof.rates >= 1 / g.node_count - 1e-12).all()
            assert (prof.rates <= 1.0).all()

    def test_monotone_in_h_with_slack(self):
        g = er_graph(15, 0.25, seed=10)
        params = SirParams(runs_per_source=400, seed=21)
        for prof in profile_all_nodes(g, params=params):
            # adjacent columns may wobble by Monte Carlo noise; allow 2 sigma
            # with the crude bound sigma <= 0.5/sqrt(runs)
            slack = 2 * 0.5 / np.sqrt(params.runs_per_source)
            assert (np.diff(prof.rates) >= -slack).all()

    def test_deterministic_and_worker_independent(self):
        g = er_graph(12, 0.3, seed=2)
        params = SirParams(runs_per_source=40, seed=31)
        serial = profile_all_nodes(g, params=params, workers=1)
        again = profile_all_nodes(g, params=params, workers=1)
        parallel = profile_all_nodes(g, params=params, workers=4)
        for a, b, c in zip(serial, again, parallel):
            assert a.rates.tolist() == b.rates.tolist() == c.rates.tolist()

    def test_threshold_error_propagates(self):
        matching = er_graph(4, 0.0, seed=0)
        with pytest.raises(ThresholdUndefinedError):
            profile_all_nodes(matching, params=SirParams(runs_per_source=2, seed=0))

    def test_custom_h_list_validated(self):
        with pytest.raises(ValueError):
            profile_all_nodes(p3(), h_list=(1.0, 0.5), params=SirParams(runs_per_source=2, seed=0))

    def test_star_profile_shape(self):
        params = SirParams(runs_per_source=10, seed=0)
        profiles = profile_all_nodes(star(), h_list=(0.5, 1.0, 2.0), params=params)
        assert len(profiles) == 4
        assert all(prof.rates.shape == (3,) for prof in profiles)
