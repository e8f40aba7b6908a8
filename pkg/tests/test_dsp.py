import numpy as np
import pytest

from lpvoc import dsp
from lpvoc.errors import (
    EmptyFrame,
    FrameTooShort,
    GammaOrderViolation,
    GammaOutOfRange,
    LagTooLarge,
    NonMonotoneLsf,
    SingularAutocorrelation,
)

from conftest import random_stable_predictor
from oracles import dense_toeplitz_solve, naive_autocorrelation, naive_filter


def test_pcm_round_trip_and_saturation():
    x = np.array([0.4, -0.6, 32767.7, -40000.0, 100000.0])
    pcm = dsp.float_to_pcm(x)
    assert pcm.dtype == np.int16
    assert list(pcm) == [0, -1, 32767, -32768, 32767]
    assert np.array_equal(dsp.pcm_to_float(pcm), pcm.astype(np.float64))


def test_autocorrelate_matches_naive():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(64)
    r = dsp.autocorrelate(x, 12)
    assert np.allclose(r, naive_autocorrelation(x, 12), atol=1e-10)


def test_autocorrelate_errors():
    with pytest.raises(EmptyFrame):
        dsp.autocorrelate([], 1)
    with pytest.raises(LagTooLarge):
        dsp.autocorrelate(np.ones(5), 5)


def test_levinson_known_example():
    # AR(1) with coefficient 0.9: r = [1, 0.9, 0.81]
    q, refl, err = dsp.levinson_durbin([1.0, 0.9, 0.81], 2)
    assert np.allclose(q, [0.9, 0.0], atol=1e-12)
    assert np.isclose(refl[0], 0.9)
    assert np.isclose(err, 1.0 - 0.81)


def test_levinson_matches_dense_solve():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        q_true = random_stable_predictor(rng, order=10, kmax=0.9)
        # autocorrelation of the AR process 1/(1 - Q) via its impulse response
        h = naive_filter([1.0], dsp.inverse_filter_coeffs(q_true),
                         np.eye(1, 400, 0).ravel())
        r = naive_autocorrelation(h, 10)
        q, _, _ = dsp.levinson_durbin(r, 10)
        worst = max(worst, np.max(np.abs(q - dense_toeplitz_solve(r, 10))))
    assert worst < 1e-8


def test_levinson_rejects_bad_input():
    with pytest.raises(SingularAutocorrelation):
        dsp.levinson_durbin([0.0, 0.0], 1)
    with pytest.raises(SingularAutocorrelation):
        dsp.levinson_durbin([1.0], 2)


def test_bandwidth_expand_multiplicative():
    rng = np.random.default_rng(2)
    q = rng.standard_normal(10)
    a = dsp.bandwidth_expand(dsp.bandwidth_expand(q, 0.95), 0.8)
    b = dsp.bandwidth_expand(q, 0.95 * 0.8)
    assert np.max(np.abs(a - b)) < 1e-12


def test_bandwidth_expand_rejects_bad_gamma():
    with pytest.raises(GammaOutOfRange):
        dsp.bandwidth_expand(np.ones(3), 1.5)


def test_celp_weighting_gamma_one_is_identity():
    rng = np.random.default_rng(3)
    q = random_stable_predictor(rng, order=10)
    x = rng.standard_normal(10000)
    w = dsp.weighting_filter_celp(q, 1.0)
    assert np.max(np.abs(w.process(x) - x)) < 1e-10


def test_ldcelp_weighting_equal_gammas_is_identity():
    rng = np.random.default_rng(4)
    q = random_stable_predictor(rng, order=20)
    x = rng.standard_normal(10000)
    w = dsp.weighting_filter_ldcelp(q, 0.7, 0.7)
    assert np.max(np.abs(w.process(x) - x)) < 1e-10


def test_ldcelp_weighting_gamma_order():
    with pytest.raises(GammaOrderViolation):
        dsp.weighting_filter_ldcelp(np.zeros(4), 0.6, 0.9)


def test_pole_zero_filter_matches_difference_equation():
    rng = np.random.default_rng(5)
    q = random_stable_predictor(rng, order=6)
    b = rng.standard_normal(7)
    a = dsp.inverse_filter_coeffs(q)
    x = rng.standard_normal(256)
    f = dsp.PoleZeroFilter(b, a)
    assert np.allclose(f.process(x), naive_filter(b, a, x), atol=1e-9)


def test_pole_zero_filter_state_carries_across_blocks():
    rng = np.random.default_rng(6)
    q = random_stable_predictor(rng, order=4)
    a = dsp.inverse_filter_coeffs(q)
    x = rng.standard_normal(200)
    f = dsp.PoleZeroFilter([1.0], a)
    blocks = np.concatenate([f.process(x[i : i + 40]) for i in range(0, 200, 40)])
    assert np.allclose(blocks, naive_filter([1.0], a, x), atol=1e-9)


def test_synthesis_filter_matches_difference_equation():
    rng = np.random.default_rng(7)
    q = random_stable_predictor(rng, order=10)
    e = rng.standard_normal(300)
    y, _ = dsp.synthesis_filter(e, q)
    assert np.allclose(y, naive_filter([1.0], dsp.inverse_filter_coeffs(q), e),
                       atol=1e-9)


def test_synthesis_filter_bibo_stable_over_long_input():
    rng = np.random.default_rng(8)
    q = random_stable_predictor(rng, order=10, kmax=0.9)
    f = dsp.SynthesisFilter(q)
    peak = 0.0
    for _ in range(100):
        y = f.process(rng.uniform(-1.0, 1.0, size=10000))  # 10^6 samples total
        peak = max(peak, float(np.max(np.abs(y))))
    assert np.isfinite(peak)
    assert peak < 1e6


def test_lpc_analysis_is_minimum_phase():
    rng = np.random.default_rng(9)
    for _ in range(20):
        frame = rng.standard_normal(240) * 1000.0
        q = dsp.lpc_analysis(frame)
        assert dsp.is_minimum_phase(q)


def test_lpc_analysis_short_frame():
    with pytest.raises(FrameTooShort):
        dsp.lpc_analysis(np.ones(5))


def test_flat_predictor_lsfs_are_uniform():
    lsf = dsp.lpc_to_lsf(np.zeros(10))
    assert np.allclose(lsf, np.arange(1, 11) * np.pi / 11.0, atol=1e-8)


def test_lsf_round_trip_many_random_stable_filters():
    rng = np.random.default_rng(10)
    for _ in range(1000):
        q = random_stable_predictor(rng, order=10, kmax=0.9)
        lsf = dsp.lpc_to_lsf(q)
        assert np.all(np.diff(lsf) > 0.0)
        assert lsf[0] > 0.0 and lsf[-1] < np.pi
        back = dsp.lsf_to_lpc(lsf)
        assert np.max(np.abs(back - q)) < 1e-6


def test_lsf_to_lpc_rejects_non_monotone():
    with pytest.raises(NonMonotoneLsf):
        dsp.lsf_to_lpc([0.5, 0.4, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3])


def test_estimate_pitch_pulse_train():
    x = np.zeros(400)
    x[::80] = 1000.0
    est = dsp.estimate_pitch(x)
    assert est.period == 80
    assert est.voiced


def test_estimate_pitch_amplitude_invariant():
    rng = np.random.default_rng(11)
    x = np.zeros(320)
    x[::73] = 1.0
    x += 0.01 * rng.standard_normal(320)
    a = dsp.estimate_pitch(x)
    b = dsp.estimate_pitch(417.3 * x)
    assert a.period == b.period
    assert a.voiced == b.voiced


def test_estimate_pitch_silence_and_short_frame():
    est = dsp.estimate_pitch(np.zeros(320))
    assert not est.voiced
    with pytest.raises(FrameTooShort):
        dsp.estimate_pitch(np.zeros(100))
