import numpy as np
import pytest
from scipy.signal import lfilter

from lpvoc import bitstream, celp, dsp
from lpvoc.errors import BadFrameLength, EmptyHistory

from conftest import harmonic_vowel
from oracles import brute_celp_gain_table, brute_search_pairs


def test_stochastic_codebook_is_ternary_and_deterministic():
    cb = celp.stochastic_codebook()
    assert cb.shape == (512, 60)
    assert set(np.unique(cb)) <= {-1.0, 0.0, 1.0}
    # center clipping at 1.2 sigma keeps most entries zero
    zero_frac = np.mean(cb == 0.0)
    assert 0.5 < zero_frac < 0.95
    assert np.array_equal(cb, celp.stochastic_codebook())
    assert not np.array_equal(cb, celp.stochastic_codebook(seed=99))


def test_gain_quantizer_round_trip():
    for mags in (celp.ADAPTIVE_GAIN_MAGS, celp.STOCHASTIC_GAIN_MAGS):
        assert mags[0] == 0.0
        assert 1.0 in mags
        for idx in range(32):
            g = celp.gain_from_index(idx, mags)
            # index 16 aliases 0 with a negative sign; quantizer prefers 0
            back = celp.quantize_gain(g, mags)
            assert celp.gain_from_index(back, mags) == g


def test_gain_quantizer_picks_nearest_level():
    mags = celp.ADAPTIVE_GAIN_MAGS
    table = brute_celp_gain_table(mags)
    rng = np.random.default_rng(0)
    for g in rng.uniform(-5.0, 5.0, size=200):
        idx = celp.quantize_gain(g, mags)
        best = np.min(np.abs(table - g))
        assert abs(celp.gain_from_index(idx, mags) - g) <= best + 1e-12


def test_adaptive_vector_periodic_extension():
    hist = np.arange(147, dtype=np.float64)
    v = celp.adaptive_vector(hist, 25, 60)
    tail = hist[-25:]
    assert np.array_equal(v, np.tile(tail, 3)[:60])
    with pytest.raises(EmptyHistory):
        celp.adaptive_codebook_search(np.zeros(60), np.zeros(10), (20, 147),
                                      np.ones(11))


def _random_weight_den(rng):
    from conftest import random_stable_predictor
    q = random_stable_predictor(rng, order=10, kmax=0.8)
    return dsp.inverse_filter_coeffs(dsp.bandwidth_expand(q, 0.8))


def test_adaptive_search_matches_brute_force():
    rng = np.random.default_rng(1)
    gains = brute_celp_gain_table(celp.ADAPTIVE_GAIN_MAGS)
    for _ in range(10):
        hist = rng.standard_normal(147) * 100.0
        t = rng.standard_normal(60) * 100.0
        a_w = _random_weight_den(rng)
        lag, gidx = celp.adaptive_codebook_search(t, hist, (20, 147), a_w)
        preds = np.stack([celp.adaptive_vector(hist, L, 60) for L in range(20, 148)])
        filtered = lfilter([1.0], a_w, preds, axis=1)
        ci, gi, err = brute_search_pairs(t, filtered, gains)
        assert (lag, gidx) == (20 + ci, gi)


def test_stochastic_search_matches_brute_force():
    rng = np.random.default_rng(2)
    cb = celp.stochastic_codebook()
    gains = brute_celp_gain_table(celp.STOCHASTIC_GAIN_MAGS)
    for _ in range(10):
        t = rng.standard_normal(60) * 50.0
        a_w = _random_weight_den(rng)
        idx, gidx = celp.stochastic_codebook_search(t, cb, a_w)
        filtered = lfilter([1.0], a_w, cb, axis=1)
        ci, gi, err = brute_search_pairs(t, filtered, gains)
        assert (idx, gidx) == (ci, gi)


def test_encoder_reconstruction_matches_decoder(vowel):
    enc = celp.CelpEncoder()
    dec = celp.CelpDecoder()
    x = vowel[:1200]
    for i in range(0, 1200, 240):
        params = enc.encode_frame(x[i : i + 240])
        out = dec.decode_frame(params)
        assert np.array_equal(out, enc.last_reconstruction)


def test_encode_frame_rejects_wrong_length():
    with pytest.raises(BadFrameLength):
        celp.CelpEncoder().encode_frame(np.zeros(100))


def test_encoded_size_and_padding(vowel_pcm):
    units, n = celp.encode_signal(vowel_pcm[:500])
    assert n == 500
    assert len(units) == 3  # ceil(500/240)
    data = bitstream.container_write(units, bitstream.CODEC_CELP, n)
    assert len(data) == 14 + (3 * 144 + 7) // 8
    out = celp.decode_signal(units, n)
    assert out.size == 500


def test_sync_bit_alternates_and_parity_matches(vowel_pcm):
    units, _ = celp.encode_signal(vowel_pcm)
    assert [u.sync_bit for u in units[:4]] == [0, 1, 0, 1]
    for u in units:
        assert u.error_correction == bitstream.celp_pitch_parity(u.pitch_lags)
        assert u.expansion_bit == 0


def test_round_trip_quality(vowel_pcm):
    from lpvoc import analysis

    units, n = celp.encode_signal(vowel_pcm)
    out = celp.decode_signal(units, n)
    snr = analysis.segmental_snr(vowel_pcm, dsp.float_to_pcm(out))
    assert snr > 5.0


def test_halving_amplitude_does_not_raise_output_rms():
    x = dsp.float_to_pcm(harmonic_vowel(duration_s=0.5))
    units_full, n = celp.encode_signal(x)
    units_half, _ = celp.encode_signal(x // 2)
    rms_full = np.sqrt(np.mean(celp.decode_signal(units_full, n) ** 2))
    rms_half = np.sqrt(np.mean(celp.decode_signal(units_half, n) ** 2))
    # allow at most one coarsest quantizer step (a factor of 2)
    assert rms_half <= rms_full * 2.0
