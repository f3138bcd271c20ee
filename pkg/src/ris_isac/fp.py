"""Fractional-programming core: Lagrangian dual transform of the sum of
log-ratios and the quadratic transform of the remaining sum of ratios.

All functions operate on one slot. H holds the effective user channels
as rows (K, M); r and c are the per-user auxiliary variables. Sums over
users are returned unnormalized; callers average over slots.
"""

from __future__ import annotations

import numpy as np

from .metrics import all_sinr

__all__ = ["update_r", "dual_objective", "update_c", "quad_objective"]


def _signal_and_total(H, W, w_s, sigma_w):
    """Per user: the own-beam response H[k]^H w_k and the full received
    power sum_i |H[k]^H w_i|^2 + |H[k]^H w_s|^2 + sigma."""
    beams = np.vstack([W, w_s[None, :]])
    inner = H.conj() @ beams.T                      # (K, K+1)
    ks = np.arange(H.shape[0])
    own = inner[ks, ks]
    total = (np.abs(inner) ** 2).sum(axis=1) + sigma_w
    return own, total


def update_r(H, W, w_s, sigma_w) -> np.ndarray:
    """Optimal ratio auxiliaries: r_k equals the current SINR."""
    return all_sinr(H, W, w_s, sigma_w)


def dual_objective(H, W, w_s, sigma_w, r) -> float:
    """Dual-transform objective for fixed r:
    sum_k log2(1+r_k) - r_k + (1+r_k) |H_k^H w_k|^2 / S_k,
    with S_k the total received power of user k including its own beam.
    Evaluating at r = update_r recovers the plain sum rate exactly.
    """
    own, total = _signal_and_total(H, W, w_s, sigma_w)
    ratio = (1.0 + r) * np.abs(own) ** 2 / total
    return float((np.log2(1.0 + r) - r + ratio).sum())


def update_c(H, W, w_s, sigma_w, r) -> np.ndarray:
    """Optimal quadratic-transform auxiliaries
    c_k = sqrt(1+r_k) H_k^H w_k / S_k."""
    own, total = _signal_and_total(H, W, w_s, sigma_w)
    return np.sqrt(1.0 + r) * own / total


def quad_objective(H, W, w_s, sigma_w, r, c) -> float:
    """Quadratic-transform objective for fixed (r, c):
    sum_k 2 sqrt(1+r_k) Re{conj(c_k) H_k^H w_k} - |c_k|^2 S_k.
    At c = update_c this matches the ratio part of dual_objective.
    """
    own, total = _signal_and_total(H, W, w_s, sigma_w)
    lin = 2.0 * np.sqrt(1.0 + r) * (np.conj(c) * own).real
    return float((lin - np.abs(c) ** 2 * total).sum())
