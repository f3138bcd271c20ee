"""SINR, rate, radar SNR, and power accounting."""

import math

import numpy as np
import pytest

from ris_isac.metrics import (
    BeamformerState,
    all_sinr,
    beam_gains,
    radar_snr,
    rate,
    sinr,
    sum_rate,
    total_power,
)


def _crand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_sinr_zero_beam_is_zero():
    rng = np.random.default_rng(0)
    H = _crand(rng, 2, 3)
    W = _crand(rng, 2, 3)
    W[0] = 0.0
    assert sinr(H, W, _crand(rng, 3), 1.0, 0) == 0.0


def test_sinr_scalar_hand_value():
    H = np.array([[1.0 + 1.0j]])
    W = np.array([[2.0 + 0.0j]])
    w_s = np.zeros(1, complex)
    # |conj(1+i) * 2|^2 / 1 = 8
    assert sinr(H, W, w_s, 1.0, 0) == pytest.approx(8.0, abs=1e-14)


def test_sinr_orthogonal_interference_drops_out():
    H = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
    W = np.array([[2.0, 0.0], [0.0, 5.0]], dtype=complex)
    w_s = np.array([0.0, 1.0], dtype=complex)
    # user 0 sees no energy from w_1 or w_s
    assert sinr(H, W, w_s, 0.5, 0) == pytest.approx(4.0 / 0.5, abs=1e-14)


def test_all_sinr_matches_scalar_calls():
    rng = np.random.default_rng(1)
    H, W = _crand(rng, 3, 4), _crand(rng, 3, 4)
    w_s = _crand(rng, 4)
    vec = all_sinr(H, W, w_s, 0.3)
    for k in range(3):
        assert vec[k] == pytest.approx(sinr(H, W, w_s, 0.3, k), rel=1e-15)


def test_sinr_phase_invariance():
    rng = np.random.default_rng(2)
    H, W = _crand(rng, 2, 3), _crand(rng, 2, 3)
    w_s = _crand(rng, 3)
    base = all_sinr(H, W, w_s, 0.7)
    phase = np.exp(1.3j)
    # a common rotation of every beam leaves the SINR untouched
    assert np.allclose(all_sinr(H, phase * W, phase * w_s, 0.7), base, rtol=1e-12)
    # a global rotation of one user's channel likewise
    H2 = H.copy()
    H2[0] *= np.exp(-0.4j)
    assert all_sinr(H2, W, w_s, 0.7)[0] == pytest.approx(base[0], rel=1e-12)


def test_rate_hand_values():
    assert rate(0.0) == 0.0
    assert rate(1.0) == 1.0
    assert rate(8.0) == pytest.approx(math.log2(9.0), rel=1e-15)
    with pytest.raises(ValueError):
        rate(-0.1)


def test_sum_rate_zero_state():
    rng = np.random.default_rng(3)
    H = _crand(rng, 2, 3)
    assert sum_rate(H, np.zeros((2, 3), complex), np.zeros(3, complex), 1.0) == 0.0


def test_sum_rate_symmetry_doubles_single_user():
    H = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
    W = np.array([[1.5, 0.0], [0.0, 1.5]], dtype=complex)
    w_s = np.zeros(2, complex)
    two = sum_rate(H, W, w_s, 0.4)
    one = sum_rate(H[:1], W[:1], w_s, 0.4)
    assert two == pytest.approx(2.0 * one, rel=1e-14)


def test_sum_rate_against_direct_evaluation():
    rng = np.random.default_rng(4)
    for _ in range(50):
        k, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        H, W = _crand(rng, k, m), _crand(rng, k, m)
        w_s = _crand(rng, m)
        sig = float(rng.uniform(0.1, 2.0))
        expect = 0.0
        for i in range(k):
            own = abs(np.vdot(H[i], W[i])) ** 2
            others = sum(abs(np.vdot(H[i], W[j])) ** 2 for j in range(k) if j != i)
            others += abs(np.vdot(H[i], w_s)) ** 2
            expect += math.log2(1.0 + own / (others + sig))
        assert sum_rate(H, W, w_s, sig) == pytest.approx(expect, rel=1e-12)


def test_sum_rate_improves_when_interferer_is_muted():
    rng = np.random.default_rng(5)
    for _ in range(50):
        H, W = _crand(rng, 3, 4), _crand(rng, 3, 4)
        w_s = _crand(rng, 4)
        quiet = W.copy()
        quiet[1] = 0.0
        full = sum_rate(H, W, w_s, 0.5)
        # removing user 1 entirely must help users 0 and 2
        rates = np.log2(1.0 + all_sinr(H, quiet, w_s, 0.5))
        rates_full = np.log2(1.0 + all_sinr(H, W, w_s, 0.5))
        assert rates[0] >= rates_full[0] - 1e-12
        assert rates[2] >= rates_full[2] - 1e-12
        del full


def test_radar_snr_orthogonal_beams_give_zero():
    u = np.array([1.0, 0.0], dtype=complex)
    W = np.array([[0.0, 1.0]], dtype=complex)
    w_s = np.array([0.0, 2.0], dtype=complex)
    assert radar_snr(u, W, w_s, 1.0) == 0.0


def test_radar_snr_scalar_hand_value():
    u = np.array([2.0 + 0j])
    w_s = np.array([3.0 + 0j])
    W = np.zeros((0, 1), dtype=complex)
    # ||u||^2 |u^H w_s|^2 = 4 * 36 = 144
    assert radar_snr(u, W, w_s, 1.0) == pytest.approx(144.0, abs=1e-12)


def test_radar_snr_quartic_scaling_in_u():
    rng = np.random.default_rng(6)
    u = _crand(rng, 3)
    W, w_s = _crand(rng, 2, 3), _crand(rng, 3)
    base = radar_snr(u, W, w_s, 1.3)
    assert radar_snr(2.0 * u, W, w_s, 1.3) == pytest.approx(16.0 * base, rel=1e-12)


def test_radar_snr_per_beam_phase_invariance():
    rng = np.random.default_rng(7)
    u = _crand(rng, 3)
    W, w_s = _crand(rng, 2, 3), _crand(rng, 3)
    base = radar_snr(u, W, w_s, 1.0)
    W2 = W * np.exp(1j * rng.uniform(0, 2 * math.pi, size=(2, 1)))
    w_s2 = w_s * np.exp(0.9j)
    assert radar_snr(u, W2, w_s2, 1.0) == pytest.approx(base, rel=1e-12)


def test_total_power_values():
    assert total_power(np.zeros((2, 3), complex), np.zeros(3, complex)) == 0.0
    W = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
    assert total_power(W, np.zeros(2, complex)) == pytest.approx(2.0, abs=1e-15)
    rng = np.random.default_rng(8)
    W, w_s = _crand(rng, 3, 4), _crand(rng, 4)
    expect = sum(float(np.sum(np.abs(W[i]) ** 2)) for i in range(3))
    expect += float(np.sum(np.abs(w_s) ** 2))
    assert total_power(W, w_s) == pytest.approx(expect, abs=1e-15 * (1 + expect))


def test_beam_gains_layout():
    rng = np.random.default_rng(9)
    H, W = _crand(rng, 2, 3), _crand(rng, 2, 3)
    w_s = _crand(rng, 3)
    gains = beam_gains(H, W, w_s)
    assert gains.shape == (2, 3)
    assert gains[1, 2] == pytest.approx(abs(np.vdot(H[1], w_s)) ** 2, rel=1e-14)


def test_beamformer_state_copy_is_deep():
    rng = np.random.default_rng(10)
    st = BeamformerState(W=_crand(rng, 2, 3), w_s=_crand(rng, 3), v=_crand(rng, 4))
    dup = st.copy()
    dup.W[0, 0] = 0.0
    dup.v[0] = 0.0
    assert st.W[0, 0] != 0.0
    assert st.v[0] != 0.0
