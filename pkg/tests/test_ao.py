"""Tests for the per-slot alternating optimizer.

Oracles used here:
  - closed-form power split shares for the initial state,
  - rank-1 KKT geometry for the single-user transmit subproblem,
  - the quadratic-transform objective recomputed through fp for the
    monotone-step checks,
  - the single-user interference-free capacity log2(1 + P|h|^2 / sigma^2)
    for the degenerate scenario,
  - direct metric recomputation (power, radar SNR, sum rate) for every
    feasibility claim.
"""

import math

import numpy as np
import pytest

from ris_isac import ao, channel, fp, metrics, scenario
from ris_isac.ao import AOOptions, InfeasibleError
from ris_isac.metrics import BeamformerState


def tiny_scenario(seed, **overrides):
    base = dict(m_antennas=3, n_elements=4, k_users=2, l_slots=1, seed=seed)
    base.update(overrides)
    return scenario.default_scenario(**base)


def prepared_instance(seed, **overrides):
    """Channels, initial state, and fresh FP auxiliaries for one slot."""
    cfg = tiny_scenario(seed, **overrides)
    chs = channel.sample_channels(cfg, 0)
    rng = channel.phase_init_rng(cfg.seed, 0)
    opts = AOOptions()
    state = ao.initialize(chs, cfg, rng, opts)
    H = channel.effective_comm_channel(chs, state.v)
    u = channel.target_composite(chs, state.v)
    r = fp.update_r(H, state.W, state.w_s, cfg.sigma_k_w)
    c = fp.update_c(H, state.W, state.w_s, cfg.sigma_k_w, r)
    return cfg, chs, opts, state, H, u, r, c


# ---------------------------------------------------------------------------
# initialize
# ---------------------------------------------------------------------------


def test_initialize_keeps_default_split_when_floor_is_loose():
    # a -200 dB floor is met by any beam, so no power is moved to sensing
    cfg, chs, opts, state, H, u, _, _ = prepared_instance(5, gamma_db=-200.0)
    k = cfg.k_users
    comm_shares = np.sum(np.abs(state.W) ** 2, axis=1)
    want_comm = (1.0 - opts.sensing_fraction) * cfg.p_max_w / k
    assert np.allclose(comm_shares, want_comm, rtol=1e-12, atol=0.0)
    sense_share = float(np.vdot(state.w_s, state.w_s).real)
    assert sense_share == pytest.approx(opts.sensing_fraction * cfg.p_max_w,
                                        rel=1e-12)
    assert np.max(np.abs(np.abs(state.v) - 1.0)) < 1e-12


def test_initialize_is_feasible_on_default_scenario():
    cfg = scenario.default_scenario(l_slots=1, seed=7)
    chs = channel.sample_channels(cfg, 0)
    opts = AOOptions()
    state = ao.initialize(chs, cfg, channel.phase_init_rng(cfg.seed, 0), opts)
    u = channel.target_composite(chs, state.v)
    assert metrics.total_power(state.W, state.w_s) <= cfg.p_max_w * (1 + 1e-12)
    assert metrics.radar_snr(u, state.W, state.w_s,
                             cfg.sigma_t_w) >= cfg.gamma_lin * (1 - 1e-9)


def test_initialize_is_deterministic():
    cfg = tiny_scenario(11)
    chs = channel.sample_channels(cfg, 0)
    opts = AOOptions()
    a = ao.initialize(chs, cfg, channel.phase_init_rng(cfg.seed, 0), opts)
    b = ao.initialize(chs, cfg, channel.phase_init_rng(cfg.seed, 0), opts)
    assert np.array_equal(a.v, b.v)
    assert np.array_equal(a.W, b.W)
    assert np.array_equal(a.w_s, b.w_s)


def test_initialize_raises_when_floor_unreachable():
    cfg = scenario.default_scenario(l_slots=1, gamma_db=60.0)
    chs = channel.sample_channels(cfg, 0)
    rng = channel.phase_init_rng(cfg.seed, 0)
    with pytest.raises(InfeasibleError, match="sensing floor"):
        ao.initialize(chs, cfg, rng, AOOptions())


# ---------------------------------------------------------------------------
# solve_p3
# ---------------------------------------------------------------------------


def test_solve_p3_recovers_matched_filter_direction():
    # K=1, no reflector, vanishing floor: the surrogate is a rank-1
    # quadratic whose stationary set lies in span{h}, so the returned user
    # beam must align with the channel
    cfg, chs, opts, state, H, u, r, c = prepared_instance(
        3, m_antennas=4, n_elements=0, k_users=1, gamma_db=-200.0)
    beams, rep = ao.solve_p3(H, u, state, r, c, cfg, opts)
    assert beams is not None and rep.status == "optimal"
    W_new, _ = beams
    h = H[0]
    cosine = abs(np.vdot(h, W_new[0])) / (
        np.linalg.norm(h) * np.linalg.norm(W_new[0]))
    assert cosine >= 1.0 - 1e-6


def test_solve_p3_incumbent_satisfies_own_linearization():
    from ris_isac.sca import linearized_sensing_w

    for seed in range(10):
        cfg, chs, opts, state, H, u, r, c = prepared_instance(seed)
        con = linearized_sensing_w(u, state.W, state.w_s, cfg.gamma_lin,
                                   cfg.sigma_t_w)
        stacked = np.concatenate([state.W.ravel(), state.w_s])
        snr = metrics.radar_snr(u, state.W, state.w_s, cfg.sigma_t_w)
        want = (snr - cfg.gamma_lin) * cfg.sigma_t_w
        got = con.value(stacked)
        assert got >= -1e-12
        assert got == pytest.approx(want, rel=1e-9, abs=1e-15)


def test_solve_p3_never_decreases_the_surrogate():
    worst = np.inf
    for seed in range(50):
        cfg, chs, opts, state, H, u, r, c = prepared_instance(seed)
        before = fp.quad_objective(H, state.W, state.w_s, cfg.sigma_k_w, r, c)
        beams, _ = ao.solve_p3(H, u, state, r, c, cfg, opts)
        assert beams is not None
        W_new, ws_new = beams
        after = fp.quad_objective(H, W_new, ws_new, cfg.sigma_k_w, r, c)
        worst = min(worst, after - before)
        assert after >= before - 1e-8 * (1.0 + abs(before))
        # the linearized floor under-estimates the true echo power, so the
        # accepted beams satisfy the true constraint as well
        assert metrics.total_power(W_new, ws_new) <= cfg.p_max_w * (1 + 1e-8)
        assert metrics.radar_snr(u, W_new, ws_new, cfg.sigma_t_w) >= (
            cfg.gamma_lin * (1 - 1e-6))
    assert worst > -np.inf


# ---------------------------------------------------------------------------
# solve_p4
# ---------------------------------------------------------------------------


def test_solve_p4_never_decreases_the_surrogate():
    for seed in range(50):
        cfg, chs, opts, state, H, u, r, c = prepared_instance(seed + 100)
        before = fp.quad_objective(H, state.W, state.w_s, cfg.sigma_k_w, r, c)
        v_new, _ = ao.solve_p4(chs, state, r, c, cfg, opts)
        assert v_new is not None
        assert np.max(np.abs(v_new)) <= 1.0 + 1e-9
        H_new = channel.effective_comm_channel(chs, v_new)
        after = fp.quad_objective(H_new, state.W, state.w_s, cfg.sigma_k_w,
                                  r, c)
        assert after >= before - 1e-8 * (1.0 + abs(before))


def test_solve_p4_without_reflector_is_a_noop():
    cfg, chs, opts, state, H, u, r, c = prepared_instance(2, n_elements=0)
    v_new, rep = ao.solve_p4(chs, state, r, c, cfg, opts)
    assert v_new is not None and v_new.shape == (0,)
    assert rep.status == "optimal"


# ---------------------------------------------------------------------------
# finalize
# ---------------------------------------------------------------------------


def test_finalize_keeps_exactly_unit_phases():
    cfg, chs, opts, state, H, u, r, c = prepared_instance(9)
    exact = np.array([1.0 + 0.0j, -1.0 + 0.0j, 1.0j, -1.0j])
    anchored = state.copy()
    anchored.v = exact.copy()
    out = ao.finalize(chs, anchored, cfg, opts)
    assert np.array_equal(out.v, exact)


def test_finalize_restores_feasibility_after_an_interior_phase_step():
    for seed in range(50):
        cfg, chs, opts, state, H, u, r, c = prepared_instance(seed + 300)
        v_new, _ = ao.solve_p4(chs, state, r, c, cfg, opts)
        moved = state.copy()
        if v_new is not None:
            moved.v = v_new
        out = ao.finalize(chs, moved, cfg, opts)
        assert np.all(np.abs(out.v) == 1.0)
        u_fin = channel.target_composite(chs, out.v)
        assert metrics.total_power(out.W, out.w_s) <= cfg.p_max_w * (1 + 1e-8)
        assert metrics.radar_snr(u_fin, out.W, out.w_s, cfg.sigma_t_w) >= (
            cfg.gamma_lin * (1 - 1e-6))


# ---------------------------------------------------------------------------
# run_slot / solve_scenario
# ---------------------------------------------------------------------------


def check_slot_solution(sol, cfg, chs):
    """Shared assertions: monotone trace, per-iterate and final feasibility."""
    for prev, cur in zip(sol.trace, sol.trace[1:]):
        assert cur >= prev - 1e-6 * (1.0 + abs(prev))
    for _, snr_lin, power in sol.trace_detail:
        assert power <= cfg.p_max_w * (1 + 1e-8)
        assert snr_lin >= cfg.gamma_lin * (1 - 1e-6)
    state = sol.state
    assert np.all(np.abs(state.v) == 1.0)
    H = channel.effective_comm_channel(chs, state.v)
    u = channel.target_composite(chs, state.v)
    assert sol.sum_rate == pytest.approx(
        metrics.sum_rate(H, state.W, state.w_s, cfg.sigma_k_w), rel=1e-12)
    assert sol.radar_snr_lin == pytest.approx(
        metrics.radar_snr(u, state.W, state.w_s, cfg.sigma_t_w), rel=1e-12)
    assert sol.power_w == pytest.approx(
        metrics.total_power(state.W, state.w_s), rel=1e-12)
    assert sol.power_w <= cfg.p_max_w * (1 + 1e-8)
    assert sol.radar_snr_lin >= cfg.gamma_lin * (1 - 1e-6)
    # interference-free capacity bound
    cap = cfg.k_users * math.log2(
        1.0 + cfg.p_max_w * np.max(np.sum(np.abs(H) ** 2, axis=1))
        / cfg.sigma_k_w)
    assert sol.sum_rate <= cap


def test_run_slot_converges_on_the_default_scenario():
    cfg = scenario.default_scenario(l_slots=1, seed=0)
    sol = ao.run_slot(cfg, 0)
    assert sol.converged
    assert sol.iterations <= 20
    check_slot_solution(sol, cfg, channel.sample_channels(cfg, 0))


def test_run_slot_is_deterministic():
    cfg = tiny_scenario(4)
    a = ao.run_slot(cfg, 0)
    b = ao.run_slot(cfg, 0)
    assert a.trace == b.trace
    assert np.array_equal(a.state.v, b.state.v)
    assert np.array_equal(a.state.W, b.state.W)
    assert np.array_equal(a.state.w_s, b.state.w_s)


def test_run_slot_accepts_explicit_channels():
    cfg = tiny_scenario(6)
    chs = channel.sample_channels(cfg, 0)
    a = ao.run_slot(cfg, 0, channels=chs)
    b = ao.run_slot(cfg, 0)
    assert a.trace == b.trace
    assert np.array_equal(a.state.v, b.state.v)


def test_run_slot_propagates_unreachable_floor():
    cfg = scenario.default_scenario(l_slots=1, gamma_db=60.0)
    with pytest.raises(InfeasibleError, match="sensing floor"):
        ao.run_slot(cfg, 0)


def test_run_slot_hits_single_user_capacity():
    # K=1, M=1, N=0, vanishing floor: the optimum is the full-power single
    # beam and the sum rate equals log2(1 + P|h|^2 / sigma^2)
    for seed in range(5):
        cfg = scenario.default_scenario(m_antennas=1, n_elements=0,
                                        k_users=1, l_slots=1, seed=seed,
                                        gamma_db=-300.0)
        chs = channel.sample_channels(cfg, 0)
        sol = ao.run_slot(cfg, 0)
        h_sq = float(np.sum(np.abs(chs.h_d[0]) ** 2))
        cap = math.log2(1.0 + cfg.p_max_w * h_sq / cfg.sigma_k_w)
        assert sol.converged
        assert sol.iterations <= 2
        assert sol.sum_rate == pytest.approx(cap, rel=1e-6)


def test_solve_scenario_matches_independent_slot_runs():
    cfg = tiny_scenario(8, l_slots=3)
    sols = ao.solve_scenario(cfg)
    assert len(sols) == 3
    for l, sol in enumerate(sols):
        alone = ao.run_slot(cfg, l)
        assert sol.slot == l
        assert sol.sum_rate == alone.sum_rate
        assert sol.trace == alone.trace
        assert np.array_equal(sol.state.v, alone.state.v)
