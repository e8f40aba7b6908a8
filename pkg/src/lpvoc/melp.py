"""2.4 kb/s mixed-excitation parametric vocoder.

22.5 ms frames (180 samples).  Analysis classifies each frame as voiced,
unvoiced, or jittery voiced, and transmits quantized LSFs, two
half-frame gains, a log-pitch index, residual-harmonic magnitudes and
per-band voicing for voiced frames, or a parity field for unvoiced
frames.  Synthesis mixes a (possibly jittered) shaped pulse train with
noise, band by band, and drives the LPC synthesis filter.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, lfilter

from . import bitstream, dsp
from .errors import BadFrameLength, IndexOutOfRange, WeightSumViolation
from .params import MelpFrameParams

FRAME_SAMPLES = 180
LPC_ORDER = 10
MIN_LAG = dsp.MIN_PITCH
MAX_LAG = dsp.MAX_PITCH
DEFAULT_SEED = 12345

VOICED_THRESHOLD = 0.6
UNVOICED_THRESHOLD = 0.35
JITTER_FRACTION = 0.25
HARMONIC_COUNT = 10
FOURIER_CODEBOOK_SIZE = 256
LSF_STAGE_BITS = bitstream.MELP_LSF_STAGE_BITS
_LSF_GAP = 0.02

# Half-frame gain: RMS in dB (16-bit PCM units), 16 uniform 6 dB steps.
GAIN_GRID_DB = np.linspace(-10.0, 80.0, 16)

# 6-bit log-spaced pitch table over the search range.
PITCH_TABLE = np.geomspace(MIN_LAG, MAX_LAG, 64)

BAND_EDGES_HZ = ((0, 500), (500, 1000), (1000, 2000), (2000, 3000), (3000, 4000))


def _band_filters():
    nyq = dsp.SAMPLE_RATE / 2
    filters = []
    for lo, hi in BAND_EDGES_HZ:
        if lo == 0:
            ba = butter(6, hi / nyq, btype="low")
        elif hi >= nyq:
            ba = butter(6, lo / nyq, btype="high")
        else:
            ba = butter(6, [lo / nyq, hi / nyq], btype="band")
        filters.append(ba)
    return filters


_BAND_FILTERS = _band_filters()


class VoicingClass(enum.Enum):
    VOICED = "voiced"
    UNVOICED = "unvoiced"
    JITTERY_VOICED = "jittery_voiced"


@dataclass
class MixedExcitationSpec:
    pulse_weights: tuple    # per band, pulse_weight + noise_weight == 1
    noise_weights: tuple
    pitch_period: int
    jitter_fraction: float = 0.0


def _normalized_autocorr(x: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """NCC(k) = sum x[n] x[n-k] / sqrt(E1 E2) for k in lo..hi."""
    n = x.size
    out = np.zeros(hi - lo + 1)
    for k in range(lo, hi + 1):
        a = x[k:]
        b = x[: n - k]
        den = np.sqrt(np.dot(a, a) * np.dot(b, b))
        if den > 0.0:
            out[k - lo] = np.dot(a, b) / den
    return out


def melp_classify(frame, voiced_threshold: float = VOICED_THRESHOLD,
                  unvoiced_threshold: float = UNVOICED_THRESHOLD):
    """Three-way voicing decision plus per-band voicing strengths.

    Returns (VoicingClass, strengths array of 5, pitch lag).  The
    periodicity statistic is the peak mean-removed normalized
    autocorrelation over the pitch range; mid-range peaks (aperiodic but
    not random) map to jittery voiced.
    """
    x = np.asarray(frame, dtype=np.float64)
    if x.size != FRAME_SAMPLES:
        raise BadFrameLength(f"expected {FRAME_SAMPLES} samples, got {x.size}")
    xz = x - np.mean(x)
    ncc = _normalized_autocorr(xz, MIN_LAG, MAX_LAG)
    best = int(np.argmax(ncc))
    lag = MIN_LAG + best
    periodicity = float(np.clip(ncc[best], 0.0, 1.0))
    strengths = np.zeros(len(_BAND_FILTERS))
    for i, (b, a) in enumerate(_BAND_FILTERS):
        band = lfilter(b, a, xz)
        lo = max(MIN_LAG, lag - 2)
        hi = min(MAX_LAG, lag + 2)
        strengths[i] = float(np.clip(_normalized_autocorr(band, lo, hi).max(), 0.0, 1.0))
    if periodicity >= voiced_threshold:
        cls = VoicingClass.VOICED
    elif periodicity < unvoiced_threshold:
        cls = VoicingClass.UNVOICED
    else:
        cls = VoicingClass.JITTERY_VOICED
    return cls, strengths, lag


# --- quantizers ---

def lsf_codebooks(seed: int = DEFAULT_SEED):
    """Four-stage additive LSF codebooks (7+6+6+6 bits), seeded."""
    rng = np.random.default_rng(seed)
    base = np.arange(1, LPC_ORDER + 1) * np.pi / (LPC_ORDER + 1)
    stages = []
    stage1 = np.sort(base + rng.normal(scale=0.18, size=(1 << LSF_STAGE_BITS[0], LPC_ORDER)),
                     axis=1)
    stages.append(stage1)
    for bits, scale in zip(LSF_STAGE_BITS[1:], (0.08, 0.04, 0.02)):
        stages.append(rng.normal(scale=scale, size=(1 << bits, LPC_ORDER)))
    return stages


def quantize_lsf(lsf, codebooks) -> tuple:
    target = np.asarray(lsf, dtype=np.float64)
    approx = np.zeros(LPC_ORDER)
    indices = []
    for cb in codebooks:
        resid = target - approx
        errs = np.sum((cb - resid) ** 2, axis=1)
        idx = int(np.argmin(errs))
        indices.append(idx)
        approx = approx + cb[idx]
    return tuple(indices)


def dequantize_lsf(indices, codebooks) -> np.ndarray:
    w = np.zeros(LPC_ORDER)
    for idx, cb in zip(indices, codebooks):
        w = w + cb[idx]
    w = np.clip(w, _LSF_GAP, np.pi - _LSF_GAP)
    for i in range(1, LPC_ORDER):
        if w[i] <= w[i - 1] + _LSF_GAP:
            w[i] = w[i - 1] + _LSF_GAP
    # keep the tail below pi after the forward clamp
    ceiling = np.pi - _LSF_GAP * (LPC_ORDER - np.arange(LPC_ORDER))
    return np.minimum(w, ceiling)


def fourier_codebook(seed: int = DEFAULT_SEED) -> np.ndarray:
    """256 unit-RMS harmonic-magnitude vectors, seeded."""
    rng = np.random.default_rng(seed + 1)
    mags = np.abs(rng.normal(loc=1.0, scale=0.5,
                             size=(FOURIER_CODEBOOK_SIZE, HARMONIC_COUNT))) + 0.05
    rms = np.sqrt(np.mean(mags * mags, axis=1, keepdims=True))
    return mags / rms


def quantize_gain_db(db: float) -> int:
    return int(np.argmin(np.abs(GAIN_GRID_DB - db)))


def dequantize_gain_db(index: int) -> float:
    if not 0 <= index < GAIN_GRID_DB.size:
        raise IndexOutOfRange(f"gain index {index} out of range")
    return float(GAIN_GRID_DB[index])


def quantize_pitch(lag: int) -> int:
    return int(np.argmin(np.abs(PITCH_TABLE - lag)))


def dequantize_pitch(index: int) -> int:
    if not 0 <= index < PITCH_TABLE.size:
        raise IndexOutOfRange(f"pitch index {index} out of range")
    return int(round(PITCH_TABLE[index]))


def residual_harmonics(frame, q, period: int) -> np.ndarray:
    """Magnitudes of the prediction residual at the first 10 pitch harmonics."""
    x = np.asarray(frame, dtype=np.float64)
    resid = lfilter(dsp.inverse_filter_coeffs(q), [1.0], x)
    spec = np.abs(np.fft.rfft(resid * np.hamming(x.size)))
    mags = np.empty(HARMONIC_COUNT)
    for k in range(1, HARMONIC_COUNT + 1):
        # harmonic k of f0 = fs/period falls at DFT bin k*N/period
        bin_idx = min(int(round(k * x.size / period)), spec.size - 1)
        mags[k - 1] = spec[bin_idx]
    rms = np.sqrt(np.mean(mags * mags))
    return mags / rms if rms > 0 else np.ones(HARMONIC_COUNT)


# --- encoder ---

class MelpEncoder:
    def __init__(self, seed: int = DEFAULT_SEED):
        self.lsf_cb = lsf_codebooks(seed)
        self.fourier_cb = fourier_codebook(seed)
        self.frame_count = 0

    def analyze_frame(self, frame) -> MelpFrameParams:
        x = np.asarray(frame, dtype=np.float64)
        if x.size != FRAME_SAMPLES:
            raise BadFrameLength(f"expected {FRAME_SAMPLES} samples, got {x.size}")
        cls, strengths, lag = melp_classify(x)
        q = dsp.lpc_analysis(x, order=LPC_ORDER)
        lsf = dsp.lpc_to_lsf(q)
        lsf_idx = quantize_lsf(lsf, self.lsf_cb)
        half = FRAME_SAMPLES // 2
        gains = []
        for seg in (x[:half], x[half:]):
            rms = np.sqrt(np.mean(seg * seg))
            db = 20.0 * np.log10(max(rms, 1e-2))
            gains.append(quantize_gain_db(db))
        pitch_idx = quantize_pitch(lag)
        sync = self.frame_count & 1
        self.frame_count += 1
        voiced = cls != VoicingClass.UNVOICED
        if voiced:
            mags = residual_harmonics(x, q, dequantize_pitch(pitch_idx))
            errs = np.sum((self.fourier_cb - mags) ** 2, axis=1)
            fourier_idx = int(np.argmin(errs))
            bp = tuple(1 if s >= 0.5 else 0 for s in strengths[1:5])
            return MelpFrameParams(
                lsf_indices=lsf_idx, gain_indices=tuple(gains), pitch_index=pitch_idx,
                voiced=True, sync_bit=sync, fourier_index=fourier_idx,
                bandpass_voicing=bp,
                aperiodic_flag=1 if cls == VoicingClass.JITTERY_VOICED else 0)
        params = MelpFrameParams(
            lsf_indices=lsf_idx, gain_indices=tuple(gains), pitch_index=pitch_idx,
            voiced=False, sync_bit=sync, error_protection=0)
        return MelpFrameParams(
            lsf_indices=lsf_idx, gain_indices=tuple(gains), pitch_index=pitch_idx,
            voiced=False, sync_bit=sync,
            error_protection=bitstream.melp_error_protection(params))


# --- synthesis ---

def _pulse_shape(magnitudes, period: int) -> np.ndarray:
    """One-period excitation pulse from harmonic magnitudes (zero phase)."""
    n = np.arange(period)
    mags = np.asarray(magnitudes, dtype=np.float64)
    kmax = min(mags.size, period // 2)
    shape = np.zeros(period)
    for k in range(1, kmax + 1):
        shape += mags[k - 1] * np.cos(2.0 * np.pi * k * n / period)
    rms = np.sqrt(np.mean(shape * shape))
    return shape / rms if rms > 0 else shape


def mixed_excitation(spec: MixedExcitationSpec, length: int, noise,
                     rng=None, phase: float = 0.0, pulse_shape=None):
    """Band-weighted sum of a pulse train and noise.

    Returns (excitation, next_phase).  `noise` must be a length-`length`
    array from the caller's seeded source; `phase` is the offset of the
    next pulse relative to the start of this block.
    """
    pw = np.asarray(spec.pulse_weights, dtype=np.float64)
    nw = np.asarray(spec.noise_weights, dtype=np.float64)
    if pw.size != len(_BAND_FILTERS) or nw.size != pw.size:
        raise WeightSumViolation("expected one weight pair per band")
    if not np.allclose(pw + nw, 1.0, atol=1e-9):
        raise WeightSumViolation("pulse and noise weights must sum to 1 per band")
    noise = np.asarray(noise, dtype=np.float64)
    if noise.size != length:
        raise WeightSumViolation("noise block length mismatch")

    period = spec.pitch_period
    train = np.zeros(length)
    pos = phase
    amp = np.sqrt(float(period))  # unit-RMS impulse train
    while pos < length:
        i = int(round(pos))
        if i < length:
            if pulse_shape is None:
                train[i] += amp
            else:
                seg = pulse_shape[: length - i]
                train[i : i + seg.size] += seg
        step = period
        if spec.jitter_fraction > 0.0 and rng is not None:
            step = period * (1.0 + spec.jitter_fraction * rng.uniform(-1.0, 1.0))
        pos += step
    next_phase = pos - length

    exc = np.zeros(length)
    for (b, a), wp, wn in zip(_BAND_FILTERS, pw, nw):
        if wp != 0.0:
            exc += wp * lfilter(b, a, train)
        if wn != 0.0:
            exc += wn * lfilter(b, a, noise)
    return exc, next_phase


class MelpDecoder:
    def __init__(self, seed: int = DEFAULT_SEED):
        self.lsf_cb = lsf_codebooks(seed)
        self.fourier_cb = fourier_codebook(seed)
        self.rng = np.random.default_rng(seed + 2)
        self.synth = dsp.SynthesisFilter(order=LPC_ORDER, check_stability=False)
        self.phase = 0.0
        self.prev_scale = None

    def synthesize_frame(self, params: MelpFrameParams) -> np.ndarray:
        if not 0 <= params.pitch_index < PITCH_TABLE.size:
            raise IndexOutOfRange(f"pitch index {params.pitch_index} out of range")
        w = dequantize_lsf(params.lsf_indices, self.lsf_cb)
        q = dsp.lsf_to_lpc(w)
        period = dequantize_pitch(params.pitch_index)
        noise = self.rng.standard_normal(FRAME_SAMPLES)

        if params.voiced:
            if not 0 <= params.fourier_index < FOURIER_CODEBOOK_SIZE:
                raise IndexOutOfRange(f"fourier index {params.fourier_index} out of range")
            bp = (1,) + tuple(params.bandpass_voicing)
            pw = tuple(1.0 if b else 0.0 for b in bp)
            nw = tuple(1.0 - p for p in pw)
            jitter = JITTER_FRACTION if params.aperiodic_flag else 0.0
            # unit-RMS per period, so the tiled train has unit RMS overall
            shape = _pulse_shape(self.fourier_cb[params.fourier_index], period)
            spec = MixedExcitationSpec(pulse_weights=pw, noise_weights=nw,
                                       pitch_period=period, jitter_fraction=jitter)
            exc, self.phase = mixed_excitation(spec, FRAME_SAMPLES, noise,
                                               rng=self.rng, phase=self.phase,
                                               pulse_shape=shape)
        else:
            spec = MixedExcitationSpec(pulse_weights=(0.0,) * 5, noise_weights=(1.0,) * 5,
                                       pitch_period=period, jitter_fraction=0.0)
            exc, self.phase = mixed_excitation(spec, FRAME_SAMPLES, noise,
                                               rng=self.rng, phase=self.phase)

        self.synth.set_coeffs(q)
        y = self.synth.process(exc)

        half = FRAME_SAMPLES // 2
        out = np.empty(FRAME_SAMPLES)
        scales = []
        for gi, seg in zip(params.gain_indices, (y[:half], y[half:])):
            target = 10.0 ** (dequantize_gain_db(gi) / 20.0)
            actual = np.sqrt(np.mean(seg * seg))
            scales.append(target / max(actual, 1e-9))
        prev = self.prev_scale if self.prev_scale is not None else scales[0]
        ramp0 = np.linspace(prev, scales[0], 20)
        ramp1 = np.linspace(scales[0], scales[1], 20)
        sc = np.empty(FRAME_SAMPLES)
        sc[:20] = ramp0
        sc[20:half] = scales[0]
        sc[half : half + 20] = ramp1
        sc[half + 20 :] = scales[1]
        self.prev_scale = scales[1]
        out = y * sc
        return out


def encode_signal(samples, seed: int = DEFAULT_SEED):
    """Encode a whole signal; the last frame is zero-padded."""
    x = dsp.pcm_to_float(samples)
    n = x.size
    pad = (-n) % FRAME_SAMPLES
    if pad:
        x = np.concatenate((x, np.zeros(pad)))
    enc = MelpEncoder(seed=seed)
    units = [enc.analyze_frame(x[i : i + FRAME_SAMPLES])
             for i in range(0, x.size, FRAME_SAMPLES)]
    return units, n


def decode_signal(units, sample_count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    dec = MelpDecoder(seed=seed)
    if not units:
        return np.empty(0)
    out = np.concatenate([dec.synthesize_frame(p) for p in units])
    return out[:sample_count]
