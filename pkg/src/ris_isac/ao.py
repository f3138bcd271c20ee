"""Alternating optimization of the joint transmit and reflect design.

One outer iteration holds four blocks: the closed-form ratio update r,
the closed-form quadratic-transform update c, the transmit-beam program
(user beams plus the sensing beam under the power budget and the
linearized sensing floor), and the reflect-phase program (a lifted
surrogate objective under per-element modulus caps with a phase-pull
penalty toward the incumbent). Every block is accepted only when it does
not lower the transformed objective, so the recorded sum-rate trace is
non-decreasing up to solver tolerance. A final projection restores exact
unit modulus and one extra transmit-beam solve restores strict
feasibility of the power and sensing constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import fp
from .channel import (effective_comm_channel, make_effective, phase_init_rng,
                      sample_channels, target_composite)
from .metrics import BeamformerState, radar_snr, sum_rate, total_power
from .qsolver import ConvexQPInstance, SolveOptions, solve
from .sca import AffineConstraint, linearized_sensing_v, linearized_sensing_w
from .scenario import ScenarioConfig

__all__ = [
    "InfeasibleError",
    "AOOptions",
    "SlotSolution",
    "initialize",
    "solve_p3",
    "solve_p4",
    "finalize",
    "run_slot",
    "solve_scenario",
]


class InfeasibleError(RuntimeError):
    """The sensing floor is out of reach even with every watt of the
    budget poured into a beam matched to the echo channel."""


@dataclass
class AOOptions:
    eps: float = 1e-3                 # relative sum-rate increase to stop
    max_outer: int = 50
    penalty_factor: float = 0.5       # phase-pull strength vs gradient scale
    sensing_fraction: float = 0.2     # starting power share of the sensing beam
    inner_rounds: int = 6             # beam/phase sweeps per (r, c) refresh
    phase_passes: int = 4             # re-anchored phase solves per sweep
    inner_tol: float = 1e-5           # relative surrogate gain to end a sweep
    extrap_betas: tuple = (1.0, 3.0, 7.0, 15.0)
    solver: SolveOptions = field(default_factory=SolveOptions)


@dataclass
class SlotSolution:
    slot: int
    state: BeamformerState
    sum_rate: float                   # bit/s/Hz at the finalized state
    radar_snr_lin: float
    power_w: float
    iterations: int                   # outer iterations run
    converged: bool
    trace: tuple                      # sum rate per outer iteration, entry 0 = start
    trace_detail: tuple               # (sum_rate, radar_snr_lin, power_w) triples


def _matched_rows(H: np.ndarray) -> np.ndarray:
    """Unit-power beams aligned with each user channel row."""
    W = np.array(H, dtype=complex, copy=True)
    for k in range(W.shape[0]):
        nrm = float(np.linalg.norm(W[k]))
        if nrm > 0.0:
            W[k] /= nrm
        else:
            W[k] = 0.0
            W[k, 0] = 1.0
    return W


def _power_split(H: np.ndarray, u: np.ndarray, p_max: float, floor: float,
                 t_floor: float):
    """Matched beams with the smallest sensing power share meeting the
    floor. The echo power along the matched ray is linear in the share t,
    so the minimal t solves a scalar linear equation. Raises
    InfeasibleError when even t = 1 falls short."""
    u_norm_sq = float(np.vdot(u, u).real)
    if u_norm_sq <= 0.0 or p_max * u_norm_sq ** 2 < floor:
        raise InfeasibleError(
            "sensing floor unreachable: max echo power "
            f"{p_max * u_norm_sq ** 2:.6g} W falls below the required "
            f"{floor:.6g} W even with full transmit power on the echo beam")
    k_users = H.shape[0]
    w_dir = _matched_rows(H)
    ws_dir = u / math.sqrt(u_norm_sq)
    comm_gain = float(sum(np.abs(np.vdot(u, w_dir[k])) ** 2
                          for k in range(k_users)))
    # echo power at share t: u_norm_sq * ((1-t) p/K * comm_gain + t p u_norm_sq)
    base = u_norm_sq * (p_max / max(k_users, 1)) * comm_gain
    slope = u_norm_sq * p_max * u_norm_sq - base
    target = min(floor * 1.001, p_max * u_norm_sq ** 2)
    if base >= target:
        t = t_floor
    elif slope <= 0.0:
        t = 1.0
    else:
        t = min(1.0, max(t_floor, (target - base) / slope))
    W = math.sqrt((1.0 - t) * p_max / max(k_users, 1)) * w_dir
    w_s = math.sqrt(t * p_max) * ws_dir
    return W, w_s


def initialize(chs, cfg: ScenarioConfig, rng: np.random.Generator,
               opts: AOOptions) -> BeamformerState:
    """Random unit-modulus phases, matched user beams, and a sensing beam
    sized by the smallest power share that clears the floor."""
    n = chs.n_elements
    v = np.exp(2j * math.pi * rng.random(n)) if n else np.zeros(0, dtype=complex)
    H = effective_comm_channel(chs, v)
    u = target_composite(chs, v)
    W, w_s = _power_split(H, u, cfg.p_max_w, cfg.gamma_lin * cfg.sigma_t_w,
                          opts.sensing_fraction)
    return BeamformerState(W=W, w_s=w_s, v=v)


def solve_p3(H: np.ndarray, u: np.ndarray, state: BeamformerState,
             r: np.ndarray, c: np.ndarray, cfg: ScenarioConfig,
             opts: AOOptions):
    """Transmit-beam subproblem at fixed phases and auxiliaries: maximize
    the quadratic-transform objective over the stacked beams under the
    power ball and the linearized sensing floor. Returns ((W, w_s), report)
    or (None, report) when no usable candidate came back."""
    k_users, m = H.shape
    abs_c2 = np.abs(c) ** 2
    q_block = np.einsum("k,km,kn->mn", abs_c2, H, H.conj())
    Q = np.kron(np.eye(k_users + 1), q_block)
    b = np.zeros((k_users + 1) * m, dtype=complex)
    for k in range(k_users):
        b[k * m:(k + 1) * m] = 2.0 * math.sqrt(1.0 + r[k]) * c[k] * H[k]
    con = linearized_sensing_w(u, state.W, state.w_s, cfg.gamma_lin,
                               cfg.sigma_t_w)
    inst = ConvexQPInstance(Q=Q, b=b, affine=(con,), ball=cfg.p_max_w)
    x0 = np.concatenate([state.W.ravel(), state.w_s])
    rep = solve(inst, opts.solver, x0=x0)
    if rep.x is None:
        return None, rep
    W_new = rep.x[:k_users * m].reshape(k_users, m)
    return (W_new, rep.x[k_users * m:]), rep


def solve_p4(chs, state: BeamformerState, r: np.ndarray, c: np.ndarray,
             cfg: ScenarioConfig, opts: AOOptions):
    """Reflect-phase subproblem at fixed beams and auxiliaries, on the
    lifted vector [v; 1] with the trailing coordinate eliminated.

    Hard per-element caps |v_n| <= 1 replace the nonconvex equality; a
    linear pull 2 rho Re{v_hat^H v} scaled to the objective gradient
    keeps iterates near the unit circle. The caller re-checks the true
    objective before accepting, which keeps the outer loop monotone.
    Returns (v, report) or (None, report)."""
    n = chs.n_elements
    eff = make_effective(chs, state.v, state.W, state.w_s)
    abs_c2 = np.abs(c) ** 2
    q_full = np.einsum("k,kja,kjb->ab", abs_c2, eff.Ht, eff.Ht.conj())
    b_full = np.zeros(n + 1, dtype=complex)
    for k in range(chs.k_users):
        b_full += 2.0 * math.sqrt(1.0 + r[k]) * c[k] * eff.Ht[k, k]
    q_v = q_full[:n, :n]
    b_v = b_full[:n] - 2.0 * q_full[:n, n]
    grad_scale = float(np.abs(b_v - 2.0 * (q_v @ state.v)).max(initial=0.0))
    rho = opts.penalty_factor * grad_scale
    b_pen = b_v + 2.0 * rho * state.v

    v_bar = np.concatenate([state.v, [1.0]])
    lifted = linearized_sensing_v(eff.Gt_tilde, state.W, state.w_s, v_bar,
                                  cfg.gamma_lin, cfg.sigma_t_w)
    con = AffineConstraint(a=lifted.a[:n],
                           offset=lifted.offset + float(lifted.a[n].real))
    inst = ConvexQPInstance(Q=q_v, b=b_pen, affine=(con,),
                            caps=tuple((i, 1.0) for i in range(n)))
    rep = solve(inst, opts.solver, x0=state.v)
    if rep.x is None:
        return None, rep
    return rep.x, rep


def _ulp_steps(x: float, radius: int):
    steps = [x]
    up = down = x
    for _ in range(radius):
        up = np.nextafter(up, math.inf)
        down = np.nextafter(down, -math.inf)
        steps += [up, down]
    return steps


def _snap_unit(z: complex, radius: int = 4) -> complex:
    """Nearest float pair to z with np.abs(.) == 1.0 exactly, searched
    over a few-ulp neighborhood of z / |z|. The check must run through
    np.abs because its last-ulp rounding can differ from libm hypot."""
    if z == 0.0:
        return 1.0 + 0.0j
    w = z / abs(z)
    re, im = w.real, w.imag
    cands = np.array([complex(cr, ci)
                      for cr in _ulp_steps(re, radius)
                      for ci in _ulp_steps(im, radius)])
    hits = cands[np.abs(cands) == 1.0]
    if hits.size == 0:
        raise ArithmeticError(f"could not land {z!r} on the unit circle")
    return complex(hits[np.argmin(np.abs(hits - w))])


def _unit_modulus(v: np.ndarray) -> np.ndarray:
    """Project each entry onto the unit circle with |v_n| == 1.0 exactly
    under np.abs."""
    if v.size == 0:
        return v.copy()
    out = np.where(v == 0.0, 1.0 + 0.0j, v)
    out = out / np.abs(out)
    for radius in (2, 4, 8):
        bad = np.nonzero(np.abs(out) != 1.0)[0]
        if bad.size == 0:
            return out
        for i in bad:
            out[i] = _snap_unit(complex(out[i]), radius)
    bad = np.nonzero(np.abs(out) != 1.0)[0]
    if bad.size:
        raise ArithmeticError(f"{bad.size} entries refused the unit circle")
    return out


def finalize(chs, state: BeamformerState, cfg: ScenarioConfig,
             opts: AOOptions) -> BeamformerState:
    """Exact unit-modulus projection of the phases, then one extra
    transmit-beam solve so the returned beams meet the power budget and
    the true sensing floor at the projected phases."""
    sig, st, p = cfg.sigma_k_w, cfg.sigma_t_w, cfg.p_max_w
    v = _unit_modulus(state.v)
    H = effective_comm_channel(chs, v)
    u = target_composite(chs, v)

    def feasible(W, w_s):
        return (total_power(W, w_s) <= p * (1.0 + 1e-8)
                and radar_snr(u, W, w_s, st) >= cfg.gamma_lin * (1.0 - 1e-9))

    anchor = BeamformerState(W=state.W, w_s=state.w_s, v=v)
    r = fp.update_r(H, anchor.W, anchor.w_s, sig)
    c = fp.update_c(H, anchor.W, anchor.w_s, sig, r)
    cand, _ = solve_p3(H, u, anchor, r, c, cfg, opts)
    if cand is not None and feasible(*cand):
        return BeamformerState(W=cand[0], w_s=cand[1], v=v)

    # projection pushed the incumbent outside the surrogate set; rebuild
    # a feasible start and solve once more
    W0, ws0 = _power_split(H, u, p, cfg.gamma_lin * st, opts.sensing_fraction)
    anchor = BeamformerState(W=W0, w_s=ws0, v=v)
    r = fp.update_r(H, W0, ws0, sig)
    c = fp.update_c(H, W0, ws0, sig, r)
    cand, _ = solve_p3(H, u, anchor, r, c, cfg, opts)
    if cand is not None and feasible(*cand):
        return BeamformerState(W=cand[0], w_s=cand[1], v=v)
    return BeamformerState(W=W0, w_s=ws0, v=v)


def _accel_step(chs, cfg: ScenarioConfig, opts: AOOptions,
                state: BeamformerState, prev: BeamformerState | None,
                r: np.ndarray, c: np.ndarray, sr: float,
                update_phases: bool):
    """Candidate long steps: an unanchored phase solve plus geometric
    extrapolations of the last outer move, each screened against the
    true sum rate and the hard constraints. Returns (sum_rate, state)
    for the best improving candidate, or None."""
    cands = []
    phases_free = update_phases and chs.n_elements
    if phases_free:
        v_free, _ = solve_p4(chs, state, r, c, cfg,
                             replace(opts, penalty_factor=0.0))
        if v_free is not None:
            z = np.where(np.abs(v_free) > 0.0, v_free, 1.0)
            cands.append((z / np.abs(z), state.W, state.w_s))
    if prev is not None:
        d_v = state.v - prev.v
        d_w = state.W - prev.W
        d_ws = state.w_s - prev.w_s
        for beta in opts.extrap_betas:
            w_c, ws_c = state.W + beta * d_w, state.w_s + beta * d_ws
            pw = total_power(w_c, ws_c)
            if pw > cfg.p_max_w:
                shrink = math.sqrt(cfg.p_max_w / pw)
                w_c, ws_c = w_c * shrink, ws_c * shrink
            if phases_free:
                z = state.v + beta * d_v
                z = np.where(np.abs(z) > 0.0, z, 1.0)
                v_c = z / np.abs(z)
                cands.append((v_c, state.W, state.w_s))
                cands.append((v_c, w_c, ws_c))
            else:
                cands.append((state.v, w_c, ws_c))
    best = None
    for v_c, w_c, ws_c in cands:
        h_c = effective_comm_channel(chs, v_c)
        sr_c = sum_rate(h_c, w_c, ws_c, cfg.sigma_k_w)
        if sr_c <= (best[0] if best is not None else sr):
            continue
        u_c = target_composite(chs, v_c)
        if (radar_snr(u_c, w_c, ws_c, cfg.sigma_t_w)
                >= cfg.gamma_lin * (1.0 - 1e-9)
                and total_power(w_c, ws_c) <= cfg.p_max_w * (1.0 + 1e-8)):
            best = (sr_c, BeamformerState(W=w_c, w_s=ws_c, v=v_c))
    return best


def run_slot(cfg: ScenarioConfig, slot: int, opts: AOOptions | None = None,
             update_phases: bool = True, channels=None) -> SlotSolution:
    """Full alternating optimization of one slot. update_phases=False
    freezes the initial random phases (beams still optimized); channels
    overrides the sampled ChannelSet when given."""
    opts = opts or AOOptions()
    chs = sample_channels(cfg, slot) if channels is None else channels
    rng = phase_init_rng(cfg.seed, slot)
    state = initialize(chs, cfg, rng, opts)
    sig, st = cfg.sigma_k_w, cfg.sigma_t_w
    H = effective_comm_channel(chs, state.v)
    u = target_composite(chs, state.v)

    trace = [sum_rate(H, state.W, state.w_s, sig)]
    detail = [(trace[0], radar_snr(u, state.W, state.w_s, st),
               total_power(state.W, state.w_s))]
    converged = False
    iterations = 0
    prev = None
    for _ in range(opts.max_outer):
        iterations += 1
        r = fp.update_r(H, state.W, state.w_s, sig)
        c = fp.update_c(H, state.W, state.w_s, sig, r)
        base = fp.quad_objective(H, state.W, state.w_s, sig, r, c)

        # block-coordinate ascent on the quadratic surrogate at fixed
        # (r, c); every accept is checked against the true surrogate
        # value, which keeps the whole outer sequence monotone
        for _round in range(opts.inner_rounds):
            round_start = base

            cand, _ = solve_p3(H, u, state, r, c, cfg, opts)
            if cand is not None:
                W_new, ws_new = cand
                gain = fp.quad_objective(H, W_new, ws_new, sig, r, c)
                if (total_power(W_new, ws_new) <= cfg.p_max_w * (1.0 + 1e-8)
                        and gain >= base - 1e-12 * (1.0 + abs(base))):
                    state = BeamformerState(W=W_new, w_s=ws_new, v=state.v)
                    base = gain

            if update_phases and chs.n_elements:
                for _pass in range(opts.phase_passes):
                    v_new, _ = solve_p4(chs, state, r, c, cfg, opts)
                    if v_new is None:
                        break
                    H_new = effective_comm_channel(chs, v_new)
                    gain = fp.quad_objective(H_new, state.W, state.w_s,
                                             sig, r, c)
                    if gain < base - 1e-12 * (1.0 + abs(base)):
                        break
                    rel_gain = (gain - base) / (1.0 + abs(base))
                    state = BeamformerState(W=state.W, w_s=state.w_s, v=v_new)
                    H = H_new
                    u = target_composite(chs, v_new)
                    base = gain
                    if rel_gain < opts.inner_tol:
                        break

            if base - round_start < opts.inner_tol * (1.0 + abs(base)):
                break

        sr = sum_rate(H, state.W, state.w_s, sig)

        # ridge accelerator: try long steps past the incumbent, judged
        # on the true sum rate under the hard constraints, so rejects
        # are free and accepts keep the trace monotone
        accel = _accel_step(chs, cfg, opts, state, prev, r, c, sr,
                            update_phases)
        if accel is not None:
            sr, state = accel
            H = effective_comm_channel(chs, state.v)
            u = target_composite(chs, state.v)
        prev = state

        # the interference-free capacity of the current channels caps
        # any iterate; a breach can only mean a computation bug
        cap = cfg.k_users * math.log2(
            1.0 + cfg.p_max_w
            * float((np.abs(H) ** 2).sum(axis=1).max(initial=0.0)) / sig)
        if sr > cap * (1.0 + 1e-9):
            raise RuntimeError(
                f"sum rate {sr:.6g} exceeds the interference-free bound "
                f"{cap:.6g} at slot {slot}")
        if sr < trace[-1] - 1e-6 * (1.0 + abs(trace[-1])):
            raise RuntimeError(
                f"objective decreased from {trace[-1]:.9g} to {sr:.9g} "
                f"at slot {slot} iteration {iterations}")
        trace.append(sr)
        detail.append((sr, radar_snr(u, state.W, state.w_s, st),
                       total_power(state.W, state.w_s)))
        if sr - trace[-2] < opts.eps * max(abs(trace[-2]), 1e-12):
            converged = True
            break

    state = finalize(chs, state, cfg, opts)
    H = effective_comm_channel(chs, state.v)
    u = target_composite(chs, state.v)
    return SlotSolution(
        slot=slot,
        state=state,
        sum_rate=sum_rate(H, state.W, state.w_s, sig),
        radar_snr_lin=radar_snr(u, state.W, state.w_s, st),
        power_w=total_power(state.W, state.w_s),
        iterations=iterations,
        converged=converged,
        trace=tuple(trace),
        trace_detail=tuple(detail),
    )


def solve_scenario(cfg: ScenarioConfig, opts: AOOptions | None = None,
                   update_phases: bool = True) -> list:
    """Run every slot of the scenario; slots are independent problems."""
    return [run_slot(cfg, slot, opts=opts, update_phases=update_phases)
            for slot in range(cfg.l_slots)]
