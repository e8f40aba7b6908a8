"""4.8 kb/s forward-adaptive CELP codec.

30 ms frames (240 samples), four 7.5 ms subframes.  Per subframe the
encoder runs analysis-by-synthesis: an adaptive-codebook (pitch) search
over the past excitation, then an exhaustive stochastic-codebook search,
both minimizing the perceptually weighted squared error.

Bit budget per frame: 34 (LSF) + 28 (pitch) + 20 (adaptive gains)
+ 36 (stochastic indices) + 20 (stochastic gains) + 1 + 4 + 1 = 144.
"""

import numpy as np
from scipy.signal import lfilter

from . import dsp
from .bitstream import CELP_DELTA_BIAS, celp_pitch_parity
from .errors import BadFrameLength, EmptyCodebook, EmptyHistory, IndexOutOfRange
from .params import CelpFrameParams

FRAME_SAMPLES = 240
SUBFRAME_SAMPLES = 60
SUBFRAMES = 4
MIN_LAG = dsp.MIN_PITCH
MAX_LAG = dsp.MAX_PITCH
CODEBOOK_SIZE = 512
WEIGHTING_GAMMA = 0.8
DEFAULT_SEED = 12345

LSF_BITS = (3, 4, 4, 4, 4, 3, 3, 3, 3, 3)
_LSF_GAP = 0.008

# Gain quantizers: 5 bits as sign + 4-bit magnitude on a base-2^(1/3) or
# octave log grid; magnitude index 0 is exactly zero and both grids
# contain 1.0 exactly.
ADAPTIVE_GAIN_MAGS = np.concatenate(([0.0], 2.0 ** ((np.arange(1, 16) - 9) / 3.0)))
STOCHASTIC_GAIN_MAGS = np.concatenate(([0.0], 0.5 * 2.0 ** (np.arange(1, 16) - 1.0)))


def gain_from_index(index: int, mags: np.ndarray) -> float:
    if not 0 <= index < 32:
        raise IndexOutOfRange(f"gain index {index} outside [0, 32)")
    sign = -1.0 if index >= 16 else 1.0
    return sign * mags[index & 15]


def quantize_gain(g: float, mags: np.ndarray) -> int:
    sign = 1 if g < 0.0 else 0
    mag = int(np.argmin(np.abs(mags - abs(g))))
    if mag == 0:
        sign = 0
    return (sign << 4) | mag


def stochastic_codebook(seed: int = DEFAULT_SEED) -> np.ndarray:
    """512 ternary codevectors: seeded unit Gaussians center-clipped at 1.2 sigma."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((CODEBOOK_SIZE, SUBFRAME_SAMPLES))
    return np.where(np.abs(g) > 1.2, np.sign(g), 0.0)


# --- LSF scalar quantizer (34 bits) ---

def _lsf_grids():
    grids = []
    slot = np.pi / 11.0
    for i, bits in enumerate(LSF_BITS):
        center = (i + 1) * slot
        lo = max(_LSF_GAP, center - 1.3 * slot)
        hi = min(np.pi - _LSF_GAP, center + 1.3 * slot)
        grids.append(np.linspace(lo, hi, 1 << bits))
    return grids


_LSF_GRIDS = _lsf_grids()


def quantize_lsf(lsf) -> tuple:
    w = np.asarray(lsf, dtype=np.float64)
    return tuple(int(np.argmin(np.abs(g - w[i]))) for i, g in enumerate(_LSF_GRIDS))


def dequantize_lsf(indices) -> np.ndarray:
    w = np.array([_LSF_GRIDS[i][idx] for i, idx in enumerate(indices)])
    for i in range(1, w.size):
        if w[i] <= w[i - 1] + _LSF_GAP:
            w[i] = w[i - 1] + _LSF_GAP
    return np.minimum(w, np.pi - _LSF_GAP * (len(w) - np.arange(len(w))))


def lpc_from_indices(indices) -> np.ndarray:
    w = dequantize_lsf(indices)
    for i in range(1, w.size):  # re-enforce monotonicity after ceiling clamp
        if w[i] <= w[i - 1]:
            w[i] = w[i - 1] + 1e-4
    return dsp.lsf_to_lpc(w)


# --- codebook searches ---

def adaptive_vector(history: np.ndarray, lag: int, n: int) -> np.ndarray:
    """Past excitation at the given lag, periodically extended to n samples."""
    seg = history[-lag:]
    reps = -(-n // lag)
    return np.tile(seg, reps)[:n]


def _zero_state_filter(weight_den: np.ndarray, x: np.ndarray) -> np.ndarray:
    return lfilter([1.0], weight_den, x, axis=-1)


def adaptive_codebook_search(target, history, lag_range, weight_den):
    """Best (lag, gain index) minimizing ||t - g * H p_lag||^2.

    weight_den is the weighted-synthesis denominator 1 - Q(z/gamma).
    Ties break toward the smallest lag; per-lag gain is the quantizer
    level nearest the optimal scalar gain.
    """
    t = np.asarray(target, dtype=np.float64)
    hist = np.asarray(history, dtype=np.float64)
    lo, hi = lag_range
    if hist.size < hi:
        raise EmptyHistory(f"history of {hist.size} samples shorter than max lag {hi}")
    lags = np.arange(lo, hi + 1)
    preds = np.stack([adaptive_vector(hist, lag, t.size) for lag in lags])
    filtered = _zero_state_filter(weight_den, preds)
    energy = np.sum(filtered * filtered, axis=1)
    cross = filtered @ t
    g_opt = np.divide(cross, energy, out=np.zeros_like(cross), where=energy > 0.0)
    idxs = np.array([quantize_gain(g, ADAPTIVE_GAIN_MAGS) for g in g_opt])
    gq = np.array([gain_from_index(i, ADAPTIVE_GAIN_MAGS) for i in idxs])
    errs = np.sum((t[None, :] - gq[:, None] * filtered) ** 2, axis=1)
    best = int(np.argmin(errs))
    return int(lags[best]), int(idxs[best])


def stochastic_codebook_search(target_residual, codebook, weight_den):
    """Exhaustive best (index, gain index) over the stochastic codebook."""
    t = np.asarray(target_residual, dtype=np.float64)
    cb = np.asarray(codebook, dtype=np.float64)
    if cb.size == 0:
        raise EmptyCodebook("stochastic codebook is empty")
    filtered = _zero_state_filter(weight_den, cb)
    energy = np.sum(filtered * filtered, axis=1)
    cross = filtered @ t
    g_opt = np.divide(cross, energy, out=np.zeros_like(cross), where=energy > 0.0)
    idxs = np.array([quantize_gain(g, STOCHASTIC_GAIN_MAGS) for g in g_opt])
    gq = np.array([gain_from_index(i, STOCHASTIC_GAIN_MAGS) for i in idxs])
    errs = np.sum((t[None, :] - gq[:, None] * filtered) ** 2, axis=1)
    best = int(np.argmin(errs))
    return best, int(idxs[best])


# --- shared reconstruction state ---

class _CelpState:
    def __init__(self):
        self.exc_history = np.zeros(MAX_LAG)
        self.synth = dsp.SynthesisFilter(order=dsp.DEFAULT_ORDER, check_stability=False)
        self.frame_count = 0

    def synthesize_subframe(self, lag, adaptive_gain_idx, stoch_idx, stoch_gain_idx,
                            q, codebook):
        if not 0 <= stoch_idx < codebook.shape[0]:
            raise IndexOutOfRange(f"stochastic index {stoch_idx} out of range")
        if not MIN_LAG <= lag <= MAX_LAG:
            raise IndexOutOfRange(f"pitch lag {lag} out of range")
        ag = gain_from_index(adaptive_gain_idx, ADAPTIVE_GAIN_MAGS)
        sg = gain_from_index(stoch_gain_idx, STOCHASTIC_GAIN_MAGS)
        e = ag * adaptive_vector(self.exc_history, lag, SUBFRAME_SAMPLES) \
            + sg * codebook[stoch_idx]
        self.synth.set_coeffs(q)
        y = self.synth.process(e)
        self.exc_history = np.concatenate((self.exc_history, e))[-MAX_LAG:]
        return e, y


class CelpDecoder:
    def __init__(self, seed: int = DEFAULT_SEED):
        self.codebook = stochastic_codebook(seed)
        self.state = _CelpState()

    def decode_frame(self, params: CelpFrameParams) -> np.ndarray:
        q = lpc_from_indices(params.lsf_indices)
        out = np.empty(FRAME_SAMPLES)
        for s in range(SUBFRAMES):
            _, y = self.state.synthesize_subframe(
                params.pitch_lags[s], params.adaptive_gain_indices[s],
                params.stochastic_indices[s], params.stochastic_gain_indices[s],
                q, self.codebook)
            out[s * SUBFRAME_SAMPLES : (s + 1) * SUBFRAME_SAMPLES] = y
        return out


class CelpEncoder:
    """Analysis-by-synthesis encoder with an embedded local decoder state."""

    def __init__(self, seed: int = DEFAULT_SEED, gamma: float = WEIGHTING_GAMMA,
                 collect_diagnostics: bool = False):
        self.codebook = stochastic_codebook(seed)
        self.gamma = gamma
        self.state = _CelpState()
        self._weight_zi = np.zeros(dsp.DEFAULT_ORDER)
        self._hw_zi = np.zeros(dsp.DEFAULT_ORDER)
        self.collect_diagnostics = collect_diagnostics
        self.diagnostics = []
        self.last_reconstruction = None

    def encode_frame(self, frame) -> CelpFrameParams:
        x = np.asarray(frame, dtype=np.float64)
        if x.size != FRAME_SAMPLES:
            raise BadFrameLength(f"expected {FRAME_SAMPLES} samples, got {x.size}")

        q_raw = dsp.lpc_analysis(x)
        lsf = dsp.lpc_to_lsf(q_raw)
        lsf_indices = quantize_lsf(lsf)
        q = lpc_from_indices(lsf_indices)
        a = dsp.inverse_filter_coeffs(q)
        a_w = dsp.inverse_filter_coeffs(dsp.bandwidth_expand(q, self.gamma))

        lags = []
        again = []
        sidx = []
        sgain = []
        recon = np.empty(FRAME_SAMPLES)
        for s in range(SUBFRAMES):
            sub = x[s * SUBFRAME_SAMPLES : (s + 1) * SUBFRAME_SAMPLES]
            sw, self._weight_zi = lfilter(a, a_w, sub, zi=self._weight_zi)
            zir, _ = lfilter([1.0], a_w, np.zeros(SUBFRAME_SAMPLES), zi=self._hw_zi)
            t = sw - zir
            if s % 2 == 0:
                lag_range = (MIN_LAG, MAX_LAG)
            else:
                lag_range = (max(MIN_LAG, lags[-1] - CELP_DELTA_BIAS),
                             min(MAX_LAG, lags[-1] + CELP_DELTA_BIAS - 1))
            lag, ag_idx = adaptive_codebook_search(t, self.state.exc_history,
                                                   lag_range, a_w)
            ag = gain_from_index(ag_idx, ADAPTIVE_GAIN_MAGS)
            pred = adaptive_vector(self.state.exc_history, lag, SUBFRAME_SAMPLES)
            t2 = t - ag * _zero_state_filter(a_w, pred)
            st_idx, sg_idx = stochastic_codebook_search(t2, self.codebook, a_w)
            if self.collect_diagnostics:
                self.diagnostics.append({
                    "target": t.copy(), "residual_target": t2.copy(),
                    "weight_den": a_w.copy(), "history": self.state.exc_history.copy(),
                    "lag_range": lag_range,
                    "chosen": (lag, ag_idx, st_idx, sg_idx),
                })
            e, y = self.state.synthesize_subframe(lag, ag_idx, st_idx, sg_idx,
                                                  q, self.codebook)
            _, self._hw_zi = lfilter([1.0], a_w, e, zi=self._hw_zi)
            recon[s * SUBFRAME_SAMPLES : (s + 1) * SUBFRAME_SAMPLES] = y
            lags.append(lag)
            again.append(ag_idx)
            sidx.append(st_idx)
            sgain.append(sg_idx)

        self.last_reconstruction = recon
        sync = self.state.frame_count & 1
        self.state.frame_count += 1
        return CelpFrameParams(
            lsf_indices=lsf_indices, pitch_lags=tuple(lags),
            adaptive_gain_indices=tuple(again), stochastic_indices=tuple(sidx),
            stochastic_gain_indices=tuple(sgain), sync_bit=sync,
            error_correction=celp_pitch_parity(lags))


def encode_signal(samples, seed: int = DEFAULT_SEED):
    """Encode a whole signal; the last frame is zero-padded.

    Returns (params list, original sample count).
    """
    x = dsp.pcm_to_float(samples)
    n = x.size
    pad = (-n) % FRAME_SAMPLES
    if pad:
        x = np.concatenate((x, np.zeros(pad)))
    enc = CelpEncoder(seed=seed)
    units = [enc.encode_frame(x[i : i + FRAME_SAMPLES])
             for i in range(0, x.size, FRAME_SAMPLES)]
    return units, n


def decode_signal(units, sample_count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    dec = CelpDecoder(seed=seed)
    out = np.concatenate([dec.decode_frame(p) for p in units]) if units else np.empty(0)
    return out[:sample_count]
