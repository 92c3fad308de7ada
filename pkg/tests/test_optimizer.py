"""Alternating trajectory/power optimization loop and its run history."""

import dataclasses

import numpy as np
import pytest

import aerolink.flow as fl
import aerolink.spectral as sp
from aerolink.optimizer import (OptimizerConfig, TerminationReason, replay_flow,
                                run)
from aerolink.trajectory import GradientMode, TrajectoryConfig

from conftest import make_line_scenario


def _small_cfg(**kw):
    kw.setdefault("epsilon", 1e-6)
    kw.setdefault("max_iterations", 25)
    return OptimizerConfig(**kw)


# -------------------------------------------------------------- termination


def test_first_iteration_always_runs():
    # flow sentinels R(-1) = -inf and R(0) = 0 force one real iteration even
    # under an absurdly loose threshold
    s = make_line_scenario(np.random.default_rng(100))
    h = run(s, OptimizerConfig(epsilon=1e15, max_iterations=50))
    assert h.termination is TerminationReason.CONVERGED
    assert h.iterations == 1
    assert len(h.records) == 2


def test_iteration_budget_caps_the_record_count():
    s = make_line_scenario(np.random.default_rng(101))
    h = run(s, OptimizerConfig(epsilon=1e-12, max_iterations=5))
    assert h.termination is TerminationReason.MAX_ITERATIONS
    assert len(h.records) == 6  # the starting snapshot plus one per iteration
    assert h.iterations == 5
    assert [r.iteration for r in h.records] == list(range(6))


def test_overshooting_from_a_summit_stalls():
    s = make_line_scenario(np.random.default_rng(110), n_si=1, chi=1.0)
    warm = run(s, _small_cfg(max_iterations=200))
    rested = s.with_uav_positions(warm.records[-1].uav_positions)
    h = run(rested, OptimizerConfig(
        epsilon=1e-9, max_iterations=10,
        trajectory=TrajectoryConfig(dt=1e6, max_backtracks=0)))
    assert h.termination is TerminationReason.STALLED
    assert h.records[-1].stalled
    assert np.array_equal(h.records[-1].uav_positions,
                          h.records[-2].uav_positions)
    assert h.records[-1].flow_bits_per_s == h.records[-2].flow_bits_per_s


# ------------------------------------------------------------------ records


def test_runs_are_deterministic():
    s = make_line_scenario(np.random.default_rng(102))
    cfg = _small_cfg()
    h1, h2 = run(s, cfg), run(s, cfg)
    assert h1.termination is h2.termination
    assert np.array_equal(h1.flows, h2.flows)
    assert np.array_equal(h1.lambda2s, h2.lambda2s)
    for r1, r2 in zip(h1.records, h2.records):
        assert np.array_equal(r1.uav_positions, r2.uav_positions)
        assert np.array_equal(r1.powers_w, r2.powers_w)


def test_record_zero_is_the_untouched_start():
    s = make_line_scenario(np.random.default_rng(103))
    h = run(s, _small_cfg(max_iterations=3))
    r0 = h.records[0]
    assert np.array_equal(r0.uav_positions, s.uav_positions)
    assert np.array_equal(r0.powers_w, np.full(s.n_primary, s.p_max_w))
    assert np.isnan(r0.eta)
    assert r0.gradient_mode is None
    assert not r0.stalled


def test_solved_records_respect_thresholds():
    rng = np.random.default_rng(104)
    for _ in range(4):
        s = make_line_scenario(rng, n_si=3)
        h = run(s, _small_cfg(max_iterations=10))
        for rec in h.records[1:]:
            assert rec.interference_ok
            assert rec.min_interference_margin_w >= -1e-18
            assert np.isfinite(rec.eta) and rec.eta > 0.0
            assert rec.gradient_mode is GradientMode.ANALYTIC


def test_lambda2_climbs_when_powers_cannot_change():
    # with no sources the caps equal the budget, so powers are constant and
    # backtracking makes the connectivity series monotone
    for seed in (100, 104, 107):
        s = make_line_scenario(np.random.default_rng(seed), n_si=0, chi=1.0)
        h = run(s, _small_cfg(epsilon=1e-9, max_iterations=40))
        assert np.all(np.diff(h.lambda2s) >= 0.0)
        assert h.flows[-1] >= h.flows[0]


def test_final_flow_matches_exhaustive_min_cut():
    rng = np.random.default_rng(106)
    for _ in range(3):
        s = make_line_scenario(rng, n_uavs=int(rng.integers(3, 7)))
        h = run(s, _small_cfg(max_iterations=15))
        last = h.records[-1]
        final = s.with_uav_positions(last.uav_positions).with_node_powers(last.powers_w)
        m = sp.build_matrices(final)
        net = fl.from_adjacency(m, final.source, final.destination)
        brute = fl.brute_force_min_cut(net)
        assert last.flow_bits_per_s == pytest.approx(brute.value, rel=1e-12)


# ------------------------------------------------------------------- replay


def test_replay_reproduces_every_record():
    s = make_line_scenario(np.random.default_rng(107))
    cfg = _small_cfg(max_iterations=8)
    h = run(s, cfg)
    for t in range(len(h.records)):
        assert replay_flow(h, s, cfg, t=t) == h.records[t].flow_bits_per_s
    assert replay_flow(h, s, cfg) == h.records[-1].flow_bits_per_s


def test_replay_detects_a_tampered_scenario():
    s = make_line_scenario(np.random.default_rng(108), n_si=2)
    cfg = _small_cfg(max_iterations=5)
    h = run(s, cfg)
    louder = dataclasses.replace(s, si_powers_w=s.si_powers_w * 4.0)
    assert replay_flow(h, louder, cfg) != h.records[-1].flow_bits_per_s


def test_replay_rejects_out_of_range_indices():
    s = make_line_scenario(np.random.default_rng(109))
    cfg = _small_cfg(max_iterations=3)
    h = run(s, cfg)
    with pytest.raises(IndexError):
        replay_flow(h, s, cfg, t=len(h.records))
    with pytest.raises(IndexError):
        replay_flow(h, s, cfg, t=-len(h.records) - 1)


# --------------------------------------------------------------- validation


def test_config_validation():
    with pytest.raises(ValueError, match="epsilon"):
        OptimizerConfig(epsilon=0.0)
    with pytest.raises(ValueError, match="max_iterations"):
        OptimizerConfig(max_iterations=0)


def test_invalid_scenario_is_rejected():
    s = make_line_scenario(np.random.default_rng(111))
    weights = s.weights.copy()
    weights[0] = 0.5
    bad = dataclasses.replace(s, weights=weights)
    with pytest.raises(ValueError, match="invalid scenario"):
        run(bad, _small_cfg())
