"""Surrogates for the nonconvex sensing terms.

The echo power through the rank-one target channel is quadratic in the
beams (with PSD kernel ||u||^2 u u^H) and quartic in the lifted phase
vector. Both get affine minorants expanded at the incumbent: the beam
side is a genuine global lower bound, the phase side is the first-order
expansion of a product of two PSD quadratic forms (tight and gradient
matching at the expansion point).

Affine constraints are written as Re{a^H x} + offset >= 0 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AffineConstraint",
    "quad_sensing_value",
    "taylor_lb_quadratic",
    "linearized_sensing_w",
    "quartic_sensing_value",
    "taylor_surrogate_quartic",
    "linearized_sensing_v",
    "linearized_modulus",
]


@dataclass
class AffineConstraint:
    """Re{a^H x} + offset >= 0 over complex x."""

    a: np.ndarray
    offset: float

    def value(self, x: np.ndarray) -> float:
        return float(np.vdot(self.a, x).real + self.offset)


def quad_sensing_value(u: np.ndarray, w: np.ndarray) -> float:
    """Echo power of one beam, I(w) = ||u||^2 |u^H w|^2 = w^H Q w."""
    norm_u = float(np.vdot(u, u).real)
    return norm_u * float(np.abs(np.vdot(u, w)) ** 2)


def taylor_lb_quadratic(u: np.ndarray, w_hat: np.ndarray):
    """Affine global lower bound of I(w) at w_hat:
    2 Re{w_hat^H Q w} - w_hat^H Q w_hat with Q = ||u||^2 u u^H.
    Returns (a, offset) with the bound written Re{a^H w} + offset.
    """
    norm_u = float(np.vdot(u, u).real)
    q_what = norm_u * u * np.vdot(u, w_hat)       # Q @ w_hat
    a = 2.0 * q_what
    offset = -norm_u * float(np.abs(np.vdot(u, w_hat)) ** 2)
    return a, offset


def linearized_sensing_w(u: np.ndarray, W_hat: np.ndarray, ws_hat: np.ndarray,
                         gamma_lin: float, sigma_t_w: float) -> AffineConstraint:
    """Sensing floor over the stacked beams x = [w_1; ...; w_K; w_s]:
    sum of per-beam lower bounds >= gamma * sigma_t^2."""
    blocks = []
    offset = -gamma_lin * sigma_t_w
    for w_hat in list(W_hat) + [ws_hat]:
        a_blk, off_blk = taylor_lb_quadratic(u, w_hat)
        blocks.append(a_blk)
        offset += off_blk
    return AffineConstraint(a=np.concatenate(blocks), offset=offset)


def quartic_sensing_value(v_t: np.ndarray, A: np.ndarray, B: np.ndarray) -> float:
    """Product form (v_t^H A v_t)(v_t^H B v_t) of the echo power in the
    lifted phase vector v_t = [v; 1]."""
    return float(np.vdot(v_t, A @ v_t).real * np.vdot(v_t, B @ v_t).real)


def taylor_surrogate_quartic(A: np.ndarray, B: np.ndarray, v_bar: np.ndarray):
    """First-order surrogate of the PSD quadratic-form product at v_bar:
    2 b0 Re{v_bar^H A v} + 2 a0 Re{v_bar^H B v} - 3 a0 b0,
    a0 = v_bar^H A v_bar, b0 = v_bar^H B v_bar.
    Value and gradient match the product at v_bar. Returns (a, offset).
    """
    a_vbar = A @ v_bar
    b_vbar = B @ v_bar
    a0 = float(np.vdot(v_bar, a_vbar).real)
    b0 = float(np.vdot(v_bar, b_vbar).real)
    a = 2.0 * b0 * a_vbar + 2.0 * a0 * b_vbar
    offset = -3.0 * a0 * b0
    return a, offset


def linearized_sensing_v(gt_tilde: np.ndarray, W_hat: np.ndarray,
                         ws_hat: np.ndarray, v_bar: np.ndarray,
                         gamma_lin: float, sigma_t_w: float) -> AffineConstraint:
    """Sensing floor over the lifted phase vector v_t = [v; 1]:
    sum over beams of the quartic surrogates >= gamma * sigma_t^2.
    A = Gt~^H Gt~ is shared; B differs per beam (rank one)."""
    a_mat = gt_tilde.conj().T @ gt_tilde
    a_vbar = a_mat @ v_bar
    a0 = float(np.vdot(v_bar, a_vbar).real)
    a = np.zeros_like(v_bar)
    offset = -gamma_lin * sigma_t_w
    for w_hat in list(W_hat) + [ws_hat]:
        t = gt_tilde.conj().T @ w_hat             # B = t t^H
        t_vbar = np.vdot(t, v_bar)
        b0 = float(np.abs(t_vbar) ** 2)
        a += 2.0 * b0 * a_vbar + 2.0 * a0 * (t * t_vbar)
        offset += -3.0 * a0 * b0
    return AffineConstraint(a=a, offset=offset)


def linearized_modulus(v_hat_n: complex) -> AffineConstraint:
    """Linearized unit-modulus lower bound at v_hat_n for one coordinate:
    2 Re{conj(v_hat_n) v_n} - |v_hat_n|^2 >= 1."""
    if v_hat_n == 0.0:
        raise ValueError("modulus linearization needs a nonzero expansion point")
    a = np.array([2.0 * v_hat_n], dtype=complex)
    offset = -float(np.abs(v_hat_n) ** 2) - 1.0
    return AffineConstraint(a=a, offset=offset)
