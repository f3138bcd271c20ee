"""Channel synthesis for one scenario episode.

Links: base station to RIS (Rician, N x M), direct base station to user
UAVs (Rician, M), RIS to user UAVs (Rician, N), and pure line-of-sight
sensing legs toward the target UAV. Fading is redrawn independently per
slot; every (slot, link) pair gets its own generator derived from the
master seed so draws do not shift when unrelated dimensions change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import (
    MIN_LINK_DISTANCE_M,
    ScenarioConfig,
    db_to_lin,
    geometry_at_slot,
    link_angle,
)

__all__ = [
    "ChannelSet",
    "EffectiveChannels",
    "steering_vector",
    "path_amplitude",
    "sample_rician",
    "sample_channels",
    "effective_comm_channel",
    "target_composite",
    "reshape_comm",
    "reshape_target",
    "make_effective",
    "phase_init_rng",
    "channel_rows",
]

# substream tags: one independent generator per (slot, link class, node)
_STREAM_G = 0
_STREAM_HD = 1
_STREAM_HR = 2
_STREAM_PHASE_INIT = 3


@dataclass
class ChannelSet:
    """All physical links of one slot. Shapes: G (N, M), h_d (K, M),
    h_r (K, N), g_dt (M,), g_rt (N,)."""

    G: np.ndarray
    h_d: np.ndarray
    h_r: np.ndarray
    g_dt: np.ndarray
    g_rt: np.ndarray

    @property
    def m_antennas(self) -> int:
        return self.g_dt.shape[0]

    @property
    def n_elements(self) -> int:
        return self.g_rt.shape[0]

    @property
    def k_users(self) -> int:
        return self.h_d.shape[0]


@dataclass
class EffectiveChannels:
    """Derived quantities for a fixed phase vector v and beams W, w_s.

    H[k] is the effective user channel (H[k]^H = h_d^H + h_r^H diag(v) G),
    u the composite two-way sensing steering vector, Ht[i][j] the lifted
    per-pair channel over [v; 1], and Gt_tilde the lifted sensing map with
    Gt_tilde @ [v; 1] = u.
    """

    H: np.ndarray         # (K, M)
    u: np.ndarray         # (M,)
    Ht: np.ndarray        # (K, K + 1, N + 1), beam index K is the sensing beam
    Gt_tilde: np.ndarray  # (M, N + 1)


def steering_vector(n: int, theta: float) -> np.ndarray:
    """Half-wavelength ULA response, entry m = exp(-i pi m sin(theta))."""
    if n < 1:
        raise ValueError("steering vector needs at least one element")
    return _steer(n, theta)


def _steer(n: int, theta: float) -> np.ndarray:
    # n = 0 yields an empty response for the no-RIS degenerate case
    return np.exp(-1j * math.pi * np.arange(n) * math.sin(theta))


def path_amplitude(beta0_db: float, d: float, alpha: float) -> float:
    """Amplitude gain sqrt(10^(beta0_db/10) * d^-alpha) of a d-meter link."""
    if d < MIN_LINK_DISTANCE_M:
        raise ValueError(f"link distance {d} m below {MIN_LINK_DISTANCE_M} m")
    return math.sqrt(db_to_lin(beta0_db) * d ** (-alpha))


def sample_rician(rng: np.random.Generator, a_los: np.ndarray, beta: float,
                  kappa: float) -> np.ndarray:
    """One Rician draw beta * (sqrt(k/(1+k)) a_los + sqrt(1/(1+k)) z),
    z i.i.d. unit circularly-symmetric complex Gaussian."""
    if kappa < 0.0:
        raise ValueError("kappa must be >= 0")
    z = (rng.standard_normal(a_los.shape) + 1j * rng.standard_normal(a_los.shape))
    z /= math.sqrt(2.0)
    return beta * (math.sqrt(kappa / (1.0 + kappa)) * a_los
                   + math.sqrt(1.0 / (1.0 + kappa)) * z)


def _stream(seed: int, slot: int, tag: int, idx: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(slot, tag, idx)))


def phase_init_rng(seed: int, slot: int) -> np.random.Generator:
    """Generator reserved for the initial RIS phase draw of a slot."""
    return _stream(seed, slot, _STREAM_PHASE_INIT)


def sample_channels(cfg: ScenarioConfig, slot: int) -> ChannelSet:
    """Draw all links of one slot from the per-(slot, link) substreams."""
    geo = geometry_at_slot(cfg, slot)
    m, n = cfg.m_antennas, cfg.n_elements

    kappa_g = db_to_lin(cfg.kappa_bs_ris_db)
    kappa_d = db_to_lin(cfg.kappa_bs_luav_db)
    kappa_r = db_to_lin(cfg.kappa_ris_luav_db)

    # BS -> RIS: receive steering at the RIS, transmit steering at the BS
    a_ris = _steer(n, link_angle(geo.pos_ris, geo.pos_bs))
    a_bs = _steer(m, link_angle(geo.pos_bs, geo.pos_ris))
    beta_g = path_amplitude(cfg.beta0_db, geo.d_bs_ris, cfg.alpha_bs_ris)
    G = sample_rician(_stream(cfg.seed, slot, _STREAM_G),
                      np.outer(a_ris, a_bs.conj()), beta_g, kappa_g)

    h_d = np.empty((cfg.k_users, m), dtype=complex)
    h_r = np.empty((cfg.k_users, n), dtype=complex)
    for k in range(cfg.k_users):
        beta_d = path_amplitude(cfg.beta0_db, geo.d_bs_luav[k], cfg.alpha_bs_luav)
        a_d = _steer(m, link_angle(geo.pos_bs, geo.luav[k]))
        h_d[k] = sample_rician(_stream(cfg.seed, slot, _STREAM_HD, k), a_d, beta_d, kappa_d)
        beta_r = path_amplitude(cfg.beta0_db, geo.d_ris_luav[k], cfg.alpha_ris_luav)
        a_r = _steer(n, link_angle(geo.pos_ris, geo.luav[k]))
        h_r[k] = sample_rician(_stream(cfg.seed, slot, _STREAM_HR, k), a_r, beta_r, kappa_r)

    # sensing legs are pure line of sight
    beta_dt = path_amplitude(cfg.beta0_db, geo.d_bs_uuav, cfg.alpha_bs_uuav)
    g_dt = beta_dt * _steer(m, link_angle(geo.pos_bs, geo.uuav))
    beta_rt = path_amplitude(cfg.beta0_db, geo.d_ris_uuav, cfg.alpha_ris_uuav)
    g_rt = beta_rt * _steer(n, link_angle(geo.pos_ris, geo.uuav))

    return ChannelSet(G=G, h_d=h_d, h_r=h_r, g_dt=g_dt, g_rt=g_rt)


def effective_comm_channel(chs: ChannelSet, v: np.ndarray) -> np.ndarray:
    """Effective user channels H (K, M) with
    H[k]^H = h_d[k]^H + h_r[k]^H diag(v) G."""
    rows_h = chs.h_d.conj() + (chs.h_r.conj() * v[None, :]) @ chs.G
    return rows_h.conj()


def target_composite(chs: ChannelSet, v: np.ndarray) -> np.ndarray:
    """Composite two-way sensing vector u = g_dt + G^H diag(v) g_rt."""
    return chs.g_dt + chs.G.conj().T @ (v * chs.g_rt)


def reshape_comm(chs: ChannelSet, i: int, w: np.ndarray) -> np.ndarray:
    """Lifted channel Ht of user i under beam w: a length N+1 vector with
    Ht^H @ [v; 1] = H[i]^H @ w for every v."""
    row_h = np.concatenate([
        chs.h_r[i].conj() * (chs.G @ w),
        [chs.h_d[i].conj() @ w],
    ])
    return row_h.conj()


def reshape_target(chs: ChannelSet) -> np.ndarray:
    """Lifted sensing map Gt_tilde = [G^H diag(g_rt) | g_dt], (M, N+1);
    Gt_tilde @ [v; 1] = u."""
    return np.concatenate([chs.G.conj().T * chs.g_rt[None, :],
                           chs.g_dt[:, None]], axis=1)


def make_effective(chs: ChannelSet, v: np.ndarray, W: np.ndarray,
                   w_s: np.ndarray) -> EffectiveChannels:
    """Bundle every derived channel for the current (v, W, w_s)."""
    k_users = chs.k_users
    beams = list(W) + [w_s]
    ht = np.empty((k_users, k_users + 1, chs.n_elements + 1), dtype=complex)
    for i in range(k_users):
        for j, w in enumerate(beams):
            ht[i, j] = reshape_comm(chs, i, w)
    return EffectiveChannels(
        H=effective_comm_channel(chs, v),
        u=target_composite(chs, v),
        Ht=ht,
        Gt_tilde=reshape_target(chs),
    )


def channel_rows(chs: ChannelSet, slot: int):
    """Flatten a ChannelSet into (slot, name, row, col, re, im) records."""
    out = []
    named = [("G", chs.G), ("h_d", chs.h_d), ("h_r", chs.h_r)]
    for name, mat in named:
        for (r, c), val in np.ndenumerate(mat):
            out.append((slot, name, r, c, val.real, val.imag))
    for name, vec in [("g_dt", chs.g_dt), ("g_rt", chs.g_rt)]:
        for r, val in enumerate(vec):
            out.append((slot, name, r, 0, val.real, val.imag))
    return out
