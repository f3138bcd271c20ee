"""Rate, sensing and power metrics.

Everything here works in linear units (watts); dB / dBm conversion
happens only when configs are read or reports written. Noise enters as
a variance term, never as a sampled waveform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import dbm_to_watt, watt_to_dbm, db_to_lin, lin_to_db

__all__ = [
    "BeamformerState",
    "beam_gains",
    "sinr",
    "all_sinr",
    "rate",
    "sum_rate",
    "radar_snr",
    "total_power",
    "dbm_to_watt",
    "watt_to_dbm",
    "db_to_lin",
    "lin_to_db",
]


@dataclass
class BeamformerState:
    """Design variables of one slot: user beams W (K, M) as rows, the
    sensing beam w_s (M,), and the RIS phase vector v (N,)."""

    W: np.ndarray
    w_s: np.ndarray
    v: np.ndarray

    def copy(self) -> "BeamformerState":
        return BeamformerState(self.W.copy(), self.w_s.copy(), self.v.copy())


def beam_gains(H: np.ndarray, W: np.ndarray, w_s: np.ndarray) -> np.ndarray:
    """Received powers |H[k]^H w_j|^2, shape (K, K+1); column K is w_s."""
    beams = np.vstack([W, w_s[None, :]]) if W.size else w_s[None, :]
    inner = H.conj() @ beams.T
    return np.abs(inner) ** 2


def sinr(H: np.ndarray, W: np.ndarray, w_s: np.ndarray, sigma_w: float,
         k: int) -> float:
    """SINR of user k; interference from other users plus the sensing beam."""
    gains = beam_gains(H, W, w_s)
    signal = gains[k, k]
    interference = gains[k].sum() - signal
    return float(signal / (interference + sigma_w))


def all_sinr(H: np.ndarray, W: np.ndarray, w_s: np.ndarray,
             sigma_w: float) -> np.ndarray:
    gains = beam_gains(H, W, w_s)
    ks = np.arange(gains.shape[0])
    signal = gains[ks, ks]
    interference = gains.sum(axis=1) - signal
    return signal / (interference + sigma_w)


def rate(sinr_value: float) -> float:
    """Spectral efficiency log2(1 + sinr) in bit/s/Hz."""
    if sinr_value < 0.0:
        raise ValueError("sinr must be >= 0")
    return float(np.log2(1.0 + sinr_value))


def sum_rate(H: np.ndarray, W: np.ndarray, w_s: np.ndarray,
             sigma_w: float) -> float:
    """Sum of user rates for one slot."""
    return float(np.log2(1.0 + all_sinr(H, W, w_s, sigma_w)).sum())


def radar_snr(u: np.ndarray, W: np.ndarray, w_s: np.ndarray,
              sigma_t_w: float) -> float:
    """Echo SNR ||u||^2 (sum_i |u^H w_i|^2 + |u^H w_s|^2) / sigma_t^2.

    The echo passes the composite target channel twice, hence the
    ||u||^2 factor on top of the beam projections.
    """
    beams = np.vstack([W, w_s[None, :]]) if W.size else w_s[None, :]
    proj = np.abs(beams @ u.conj()) ** 2
    norm_u = float(np.vdot(u, u).real)
    return float(norm_u * proj.sum() / sigma_t_w)


def total_power(W: np.ndarray, w_s: np.ndarray) -> float:
    """Transmit power sum_k ||w_k||^2 + ||w_s||^2 in watts."""
    return float(np.vdot(W, W).real + np.vdot(w_s, w_s).real)
