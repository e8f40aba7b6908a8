"""16 kb/s low-delay CELP codec.

5-sample excitation vectors; only a 10-bit (shape, gain) index tuple is
transmitted.  The synthesis predictor and the excitation gain are both
backward-adapted from previously quantized speech, so encoder and
decoder stay in lockstep without side information.
"""

import numpy as np
from scipy.signal import lfilter

from . import dsp
from .errors import BadFrameLength, IndexOutOfRange, SingularAutocorrelation
from .params import LdcelpVectorParams

VECTOR_SAMPLES = 5
SHAPE_COUNT = 128
DEFAULT_SEED = 12345
PREDICTOR_ORDER = 20
ADAPT_INTERVAL = 4          # vectors between backward adaptations
HISTORY_SAMPLES = 100       # rectangular analysis window on quantized speech
PREDICTOR_EXPANSION = 0.98
GAMMA1 = 0.9
GAMMA2 = 0.6
GAIN_LAMBDA = 0.85          # log-gain predictor leakage
SIGMA_MIN = 1e-2
SIGMA_MAX = 1e5

# Magnitudes 0.5 * 2^k for the 2-bit gain field; sign is the third bit.
GAIN_MAGNITUDES = 0.5 * 2.0 ** np.arange(4)
# Candidate order used by the search (and mirrored by test oracles):
# magnitude ascending, positive sign before negative.
GAIN_CANDIDATES = np.stack([(m, s) for m in range(4) for s in range(2)])
GAIN_VALUES = np.array([GAIN_MAGNITUDES[m] * (-1.0 if s else 1.0)
                        for m, s in GAIN_CANDIDATES])


def shape_codebook(seed: int = DEFAULT_SEED) -> np.ndarray:
    """128 unit-RMS Gaussian shape vectors from a fixed seed."""
    rng = np.random.default_rng(seed)
    shapes = rng.standard_normal((SHAPE_COUNT, VECTOR_SAMPLES))
    rms = np.sqrt(np.mean(shapes * shapes, axis=1, keepdims=True))
    return shapes / rms


class BackwardState:
    """Everything both sides derive from the quantized signal."""

    def __init__(self, order: int = PREDICTOR_ORDER):
        self.order = order
        self.q = np.zeros(order)
        self.synth_zi = np.zeros(order)
        self.sigma = 1.0
        self.speech_hist = np.zeros(HISTORY_SAMPLES)
        self.vector_count = 0

    def copy(self):
        c = BackwardState(self.order)
        c.q = self.q.copy()
        c.synth_zi = self.synth_zi.copy()
        c.sigma = self.sigma
        c.speech_hist = self.speech_hist.copy()
        c.vector_count = self.vector_count
        return c


def backward_adapt(state: BackwardState) -> BackwardState:
    """Refit the synthesis predictor from the quantized-speech history.

    Falls back to the previous coefficients when the autocorrelation is
    singular.  Mutates and returns the state.
    """
    r = dsp.autocorrelate(state.speech_hist, state.order)
    if r[0] > 0.0:
        r = r.copy()
        r[0] *= 1.0 + 1e-6
        try:
            q, _, _ = dsp.levinson_durbin(r, state.order)
        except SingularAutocorrelation:
            return state
        state.q = dsp.bandwidth_expand(q, PREDICTOR_EXPANSION)
    return state


class _LdcelpCoder:
    """Shared advance path: identical arithmetic on both sides."""

    def __init__(self, seed: int = DEFAULT_SEED, order: int = PREDICTOR_ORDER):
        self.shapes = shape_codebook(seed)
        self.state = BackwardState(order)

    def _gain_value(self, magnitude: int, sign: int) -> float:
        if not 0 <= magnitude < 4 or sign not in (0, 1):
            raise IndexOutOfRange(f"gain index ({magnitude}, {sign}) out of range")
        return self.state.sigma * GAIN_MAGNITUDES[magnitude] * (-1.0 if sign else 1.0)

    def _advance(self, params: LdcelpVectorParams) -> np.ndarray:
        if not 0 <= params.shape_index < SHAPE_COUNT:
            raise IndexOutOfRange(f"shape index {params.shape_index} out of range")
        st = self.state
        g = self._gain_value(params.gain_magnitude, params.gain_sign)
        e = g * self.shapes[params.shape_index]
        a = dsp.inverse_filter_coeffs(st.q)
        y, st.synth_zi = lfilter([1.0], a, e, zi=st.synth_zi)
        st.speech_hist = np.concatenate((st.speech_hist, y))[-HISTORY_SAMPLES:]
        log_e = np.log(np.sqrt(np.mean(e * e)))
        log_sigma = GAIN_LAMBDA * np.log(st.sigma) + (1.0 - GAIN_LAMBDA) * log_e
        st.sigma = float(np.clip(np.exp(log_sigma), SIGMA_MIN, SIGMA_MAX))
        st.vector_count += 1
        if st.vector_count % ADAPT_INTERVAL == 0:
            backward_adapt(st)
        return y


class LdcelpDecoder(_LdcelpCoder):
    def decode_vector(self, params: LdcelpVectorParams) -> np.ndarray:
        return self._advance(params)


class LdcelpEncoder(_LdcelpCoder):
    def __init__(self, seed: int = DEFAULT_SEED, order: int = PREDICTOR_ORDER,
                 gamma1: float = GAMMA1, gamma2: float = GAMMA2,
                 collect_diagnostics: bool = False):
        super().__init__(seed, order)
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self._weight_zi = np.zeros(order)       # weighting of input speech
        self._wrecon_zi = np.zeros(order)       # weighting of reconstruction
        self.collect_diagnostics = collect_diagnostics
        self.diagnostics = []
        self.last_reconstruction = None

    def encode_vector(self, vector) -> LdcelpVectorParams:
        x = np.asarray(vector, dtype=np.float64)
        if x.size != VECTOR_SAMPLES:
            raise BadFrameLength(f"expected {VECTOR_SAMPLES} samples, got {x.size}")
        st = self.state
        a = dsp.inverse_filter_coeffs(st.q)
        num_w = dsp.inverse_filter_coeffs(dsp.bandwidth_expand(st.q, self.gamma1))
        den_w = dsp.inverse_filter_coeffs(dsp.bandwidth_expand(st.q, self.gamma2))

        sw, self._weight_zi = lfilter(num_w, den_w, x, zi=self._weight_zi)
        # Zero-input response of the weighted synthesis cascade.
        zeros = np.zeros(VECTOR_SAMPLES)
        zir_y, _ = lfilter([1.0], a, zeros, zi=st.synth_zi)
        zir, _ = lfilter(num_w, den_w, zir_y, zi=self._wrecon_zi)
        t = sw - zir

        # Zero-state responses of all shapes through the same cascade.
        y1 = lfilter([1.0], a, self.shapes, axis=1)
        ys = lfilter(num_w, den_w, y1, axis=1)
        scaled = st.sigma * GAIN_VALUES                      # (8,)
        # errs[j, k] for shape j, gain candidate k
        diff = t[None, None, :] - scaled[None, :, None] * ys[:, None, :]
        errs = np.sum(diff * diff, axis=2)
        flat = int(np.argmin(errs))
        shape_idx, cand = divmod(flat, GAIN_VALUES.size)
        mag, sign = (int(v) for v in GAIN_CANDIDATES[cand])
        params = LdcelpVectorParams(shape_index=shape_idx, gain_magnitude=mag,
                                    gain_sign=sign)
        if self.collect_diagnostics:
            self.diagnostics.append({
                "target": t.copy(), "sigma": st.sigma, "a": a.copy(),
                "num_w": num_w.copy(), "den_w": den_w.copy(),
                "chosen": (shape_idx, mag, sign),
            })
        y = self._advance(params)
        _, self._wrecon_zi = lfilter(num_w, den_w, y, zi=self._wrecon_zi)
        self.last_reconstruction = y
        return params


def encode_signal(samples, seed: int = DEFAULT_SEED):
    """Encode a whole signal; returns (params list, sample count, reconstruction)."""
    x = dsp.pcm_to_float(samples)
    n = x.size
    pad = (-n) % VECTOR_SAMPLES
    if pad:
        x = np.concatenate((x, np.zeros(pad)))
    enc = LdcelpEncoder(seed=seed)
    units = []
    recon = np.empty(x.size)
    for i in range(0, x.size, VECTOR_SAMPLES):
        units.append(enc.encode_vector(x[i : i + VECTOR_SAMPLES]))
        recon[i : i + VECTOR_SAMPLES] = enc.last_reconstruction
    return units, n, recon[:n]


def decode_signal(units, sample_count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    dec = LdcelpDecoder(seed=seed)
    if not units:
        return np.empty(0)
    out = np.concatenate([dec.decode_vector(p) for p in units])
    return out[:sample_count]
