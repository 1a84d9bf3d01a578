# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the python bindings: a thin pass over each subsystem,
with the numerics themselves covered by the native test suites."""

import math

import numpy as np
import pytest

import wpsn


@pytest.fixture
def desk():
    layout = wpsn.build_layout(wpsn.ArrayKind.circular, 8, 0.21)
    radio = wpsn.RadioConstants()
    placements = [
        wpsn.NodePlacement(2.0, 0.0),
        wpsn.NodePlacement(2.0, math.pi / 2),
    ]
    channel = wpsn.channel_matrix(layout, placements, radio)
    return layout, radio, placements, channel


def test_layout_and_channel_shapes(desk):
    layout, radio, placements, channel = desk
    assert len(layout) == 8
    assert channel.shape == (2, 8)
    mags = np.abs(channel)
    assert np.allclose(mags, mags[:, :1])  # isotropic: equal per antenna
    expected = radio.wavelength_m / (4 * math.pi * 2.0)
    assert mags[0, 0] == pytest.approx(expected)


def test_beamforming_surface(desk):
    _, _, _, channel = desk
    budget = wpsn.PowerBudget(0.14, 0.56)

    w = wpsn.ts_weights(channel[0], budget)
    assert wpsn.weights_feasible(w, budget)
    powers = wpsn.receive_power(channel, w)
    assert powers.shape == (2,)
    assert powers[0] > powers[1]

    ts = wpsn.ts_solution(channel, budget)
    assert ts.power_matrix.shape == (2, 2)
    assert ts.power_matrix[0, 0] == pytest.approx(powers[0])

    alpha = np.array([0.5, 0.5])
    w_split = wpsn.bs_weights(channel, alpha, budget)
    assert wpsn.weights_feasible(w_split, budget)

    oracle = wpsn.bs_weights_oracle(channel, alpha, budget)
    direct = float(alpha @ wpsn.receive_power(channel, w_split))
    assert oracle.objective >= direct - 1e-9

    samples = wpsn.sample_region(channel, budget, 128, seed=9)
    assert samples.shape == (128, 2)
    assert samples.min() >= 0.0

    gain = wpsn.beam_splitting_gain(channel, budget)
    assert gain >= 1.0 - 1e-9


def test_energy_model_surface():
    params = wpsn.EnergyParams.defaults()
    kv = wpsn.kappa_varphi(0.1, params)
    assert kv.kappa_j == pytest.approx(2.77e-4, rel=5e-3)

    state = wpsn.NodeEnergyState(0.09)
    nxt = wpsn.frame_update(state, 1e-3, 0, params)
    assert 0.0 <= nxt.stored_j <= params.cap.e_max_j

    # A sleeping frame idles throughout; the integrator should land close
    # to the frozen-load discrete update.
    end = wpsn.integrate_frame(0.09, 1e-3, [(wpsn.Mode.idle, params.timing.t_frame_s)], params)
    assert end == pytest.approx(nxt.stored_j, abs=1e-5)


def test_controller_surface(desk):
    _, _, _, channel = desk
    config = wpsn.ControllerConfig()
    assert wpsn.utility(1.0, 0.0) == 0.0
    assert wpsn.awake_ratio(0.1, 2.77e-4, config) == pytest.approx(0.1805, abs=1e-3)

    params = wpsn.EnergyParams.defaults()
    budget = wpsn.PowerBudget()
    decision = wpsn.decide(channel, np.array([0.09, 0.12]), params, budget, config)
    assert decision.awake_ratios.shape == (2,)
    assert wpsn.weights_feasible(decision.weights, budget)

    opt = wpsn.static_optimum(channel, params, budget, config)
    assert opt.feasible
    bound = wpsn.drift_bound(params, budget, channel)
    report = wpsn.performance_bounds(opt.u_star, bound, config)
    assert report.utility_lower_bound <= opt.u_star


def test_simulation_and_config_round_trip(desk):
    layout, radio, placements, _ = desk
    sc = wpsn.Scenario()
    sc.layout = layout
    sc.radio = radio
    sc.placements = placements
    sc.frames = 300
    sc.seed = 5
    sc.add_move_event(150, 1, wpsn.NodePlacement(2.5, math.pi / 2))

    series = wpsn.run(sc)
    assert series.frame_count() == 300
    assert series.node_count() == 2
    assert series.stored_energy_j.shape == (300, 2)
    assert all(series.final_alive)

    again = wpsn.run(sc)
    assert np.array_equal(series.receive_power_w, again.receive_power_w)
    assert np.array_equal(series.activity, again.activity)

    text = wpsn.emit_config(sc)
    parsed = wpsn.parse_config(text)
    assert parsed.frames == sc.frames
    assert parsed.seed == sc.seed
    assert len(parsed.placements) == 2

    with pytest.raises(ValueError) as err:
        wpsn.parse_config("[budget]\np_tot_w = -1\n")
    assert "budget.p_tot_w" in str(err.value)
