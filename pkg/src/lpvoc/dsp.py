"""Shared signal-processing primitives.

All filters use the predictor convention: a predictor polynomial with
coefficients q_1..q_M models x[n] ~ sum_i q_i * x[n-i].  The inverse
(analysis) filter is A(z) = 1 - sum_i q_i z^-i and the synthesis filter
is 1/A(z).  Internal samples are floats in 16-bit PCM units; conversion
back to integer PCM saturates instead of wrapping.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import (
    EmptyFrame,
    FrameTooShort,
    GammaOrderViolation,
    GammaOutOfRange,
    LagTooLarge,
    NonMinimumPhase,
    NonMonotoneLsf,
    SingularAutocorrelation,
    UnstableDenominator,
    UnstableFilter,
)

SAMPLE_RATE = 8000
MIN_PITCH = 20
MAX_PITCH = 147
VOICING_THRESHOLD = 0.5
DEFAULT_ORDER = 10

# 15 Hz bandwidth expansion at 8 kHz: exp(-2*pi*15/8000) ~ 0.9883,
# conventionally rounded to 0.994 for a gentler expansion.
ANALYSIS_EXPANSION = 0.994


@dataclass
class PitchEstimate:
    period: int
    voiced: bool
    strength: float


def pcm_to_float(samples) -> np.ndarray:
    return np.asarray(samples, dtype=np.float64)


def float_to_pcm(samples) -> np.ndarray:
    """Round to 16-bit integers, saturating at the rails."""
    x = np.rint(np.asarray(samples, dtype=np.float64))
    return np.clip(x, -32768, 32767).astype(np.int16)


def autocorrelate(frame, max_lag: int) -> np.ndarray:
    """r_k = sum_n x[n] x[n-k] for k = 0..max_lag."""
    x = np.asarray(frame, dtype=np.float64)
    if x.size == 0:
        raise EmptyFrame("autocorrelation of empty frame")
    if max_lag >= x.size:
        raise LagTooLarge(f"max_lag {max_lag} >= frame length {x.size}")
    full = np.correlate(x, x, mode="full")
    return full[x.size - 1 : x.size + max_lag]


def levinson_durbin(autocorr, order: int):
    """Solve the Toeplitz normal equations by Levinson-Durbin recursion.

    Returns (coeffs, reflection, error) where coeffs are predictor
    coefficients q_1..q_order (positive sign convention).
    """
    r = np.asarray(autocorr, dtype=np.float64)
    if r.size < order + 1:
        raise SingularAutocorrelation("autocorrelation shorter than order+1")
    if r[0] <= 0.0:
        raise SingularAutocorrelation("r_0 must be positive")
    q = np.zeros(order)
    refl = np.zeros(order)
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] - np.dot(q[: i - 1], r[1:i][::-1])
        if err <= 0.0:
            raise SingularAutocorrelation("non-positive-definite sequence")
        k = acc / err
        refl[i - 1] = k
        prev = q[: i - 1].copy()
        q[: i - 1] = prev - k * prev[::-1]
        q[i - 1] = k
        err *= 1.0 - k * k
    if err < 0.0:
        raise SingularAutocorrelation("negative prediction error")
    return q, refl, err


def bandwidth_expand(coeffs, gamma: float) -> np.ndarray:
    """Scale coefficient i by gamma**i, moving poles/zeros inward."""
    if not 0.0 <= gamma <= 1.0:
        raise GammaOutOfRange(f"gamma {gamma} outside [0, 1]")
    q = np.asarray(coeffs, dtype=np.float64)
    return q * gamma ** np.arange(1, q.size + 1)


def inverse_filter_coeffs(q) -> np.ndarray:
    """A(z) = 1 - sum q_i z^-i as a polynomial coefficient vector."""
    q = np.asarray(q, dtype=np.float64)
    return np.concatenate(([1.0], -q))


def is_minimum_phase(q, tol: float = 1e-9) -> bool:
    a = inverse_filter_coeffs(q)
    if a.size == 1:
        return True
    roots = np.roots(a)
    return bool(np.all(np.abs(roots) < 1.0 + tol))


class PoleZeroFilter:
    """Direct-form IIR filter b(z)/a(z) with state carried across calls."""

    def __init__(self, b, a):
        self.b = np.asarray(b, dtype=np.float64)
        self.a = np.asarray(a, dtype=np.float64)
        n = max(self.b.size, self.a.size) - 1
        self.zi = np.zeros(n)

    def process(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.size == 0:
            return x.copy()
        y, self.zi = lfilter(self.b, self.a, x, zi=self.zi)
        return y

    def set_coeffs(self, b, a):
        """Swap coefficients, keeping the state vector (orders must match)."""
        self.b = np.asarray(b, dtype=np.float64)
        self.a = np.asarray(a, dtype=np.float64)


def weighting_filter_celp(q, gamma: float, check_stability: bool = True) -> PoleZeroFilter:
    """W(z) = (1 - Q(z)) / (1 - Q(z/gamma))."""
    if not 0.0 < gamma <= 1.0:
        raise GammaOutOfRange(f"gamma {gamma} outside (0, 1]")
    q = np.asarray(q, dtype=np.float64)
    den_q = bandwidth_expand(q, gamma)
    if check_stability and not is_minimum_phase(den_q):
        raise UnstableDenominator("weighting denominator is not minimum-phase")
    return PoleZeroFilter(inverse_filter_coeffs(q), inverse_filter_coeffs(den_q))


def weighting_filter_ldcelp(q, gamma1: float, gamma2: float,
                            check_stability: bool = True,
                            allow_equal: bool = True) -> PoleZeroFilter:
    """W(z) = (1 - Q(z/gamma1)) / (1 - Q(z/gamma2)), 0 < gamma2 < gamma1 <= 1."""
    if not 0.0 < gamma1 <= 1.0 or gamma2 < 0.0:
        raise GammaOutOfRange(f"gammas ({gamma1}, {gamma2}) out of range")
    if gamma2 > gamma1 or (gamma2 == gamma1 and not allow_equal):
        raise GammaOrderViolation(f"require gamma2 < gamma1, got ({gamma1}, {gamma2})")
    q = np.asarray(q, dtype=np.float64)
    num_q = bandwidth_expand(q, gamma1)
    den_q = bandwidth_expand(q, gamma2)
    if check_stability and not is_minimum_phase(den_q):
        raise UnstableDenominator("weighting denominator is not minimum-phase")
    return PoleZeroFilter(inverse_filter_coeffs(num_q), inverse_filter_coeffs(den_q))


class SynthesisFilter:
    """All-pole synthesis filter 1/(1 - Q(z)): y[n] = e[n] + sum q_i y[n-i]."""

    def __init__(self, q=None, order: int = DEFAULT_ORDER, check_stability: bool = True):
        if q is None:
            q = np.zeros(order)
        q = np.asarray(q, dtype=np.float64)
        if check_stability and not is_minimum_phase(q):
            raise UnstableFilter("synthesis predictor is not minimum-phase")
        self.q = q
        self.zi = np.zeros(q.size)

    def set_coeffs(self, q, check_stability: bool = False):
        q = np.asarray(q, dtype=np.float64)
        if q.size != self.q.size:
            raise UnstableFilter("predictor order change not supported mid-stream")
        if check_stability and not is_minimum_phase(q):
            raise UnstableFilter("synthesis predictor is not minimum-phase")
        self.q = q

    def process(self, excitation) -> np.ndarray:
        e = np.asarray(excitation, dtype=np.float64)
        if e.size == 0:
            return e.copy()
        y, self.zi = lfilter([1.0], inverse_filter_coeffs(self.q), e, zi=self.zi)
        return y


def synthesis_filter(excitation, q, state=None):
    """One-shot synthesis; returns (output, final_state)."""
    f = SynthesisFilter(q)
    if state is not None:
        f.zi = np.asarray(state, dtype=np.float64).copy()
    y = f.process(excitation)
    return y, f.zi


def lpc_analysis(frame, order: int = DEFAULT_ORDER, expansion: float = ANALYSIS_EXPANSION):
    """Autocorrelation-method LPC with a Hamming window and bandwidth expansion."""
    x = np.asarray(frame, dtype=np.float64)
    if x.size <= order:
        raise FrameTooShort(f"frame of {x.size} samples too short for order {order}")
    w = x * np.hamming(x.size)
    r = autocorrelate(w, order)
    if r[0] <= 0.0:
        return np.zeros(order)
    r = r.copy()
    r[0] *= 1.0 + 1e-6  # white-noise correction for conditioning
    q, _, _ = levinson_durbin(r, order)
    return bandwidth_expand(q, expansion)


# --- line spectral frequencies ---

def _symmetric_eval(c: np.ndarray, omega: np.ndarray) -> np.ndarray:
    # c is a symmetric polynomial of even order 2m; value on the unit
    # circle (up to a phase factor) is c_m + 2 sum_{k<m} c_k cos((m-k) w).
    m = (c.size - 1) // 2
    ks = np.arange(m, 0, -1)
    return c[m] + 2.0 * np.cos(np.outer(omega, ks)) @ c[:m]


def _deflate(poly: np.ndarray, root_coeff: float) -> np.ndarray:
    # Divide poly by (1 + root_coeff * z^-1); root_coeff is +1 or -1.
    out = np.empty(poly.size - 1)
    acc = 0.0
    for i in range(poly.size - 1):
        acc = poly[i] - root_coeff * acc
        out[i] = acc
    return out


def _refine_root(c: np.ndarray, lo: float, hi: float, tol: float = 1e-10) -> float:
    flo = _symmetric_eval(c, np.array([lo]))[0]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = _symmetric_eval(c, np.array([mid]))[0]
        if flo * fmid <= 0.0:
            hi = mid
        else:
            lo = mid
            flo = fmid
    return 0.5 * (lo + hi)


def _grid_roots(c: np.ndarray, count: int, grid_size: int = 512):
    omega = np.linspace(0.0, np.pi, grid_size + 1)[1:-1]
    vals = _symmetric_eval(c, omega)
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    roots = [_refine_root(c, omega[i], omega[i + 1]) for i in idx]
    if len(roots) != count and grid_size < 8192:
        return _grid_roots(c, count, grid_size * 4)
    return roots


def lpc_to_lsf(q) -> np.ndarray:
    """Convert predictor coefficients to line spectral frequencies.

    Chebyshev-grid sign-change search on the symmetric/antisymmetric
    polynomials, refined by bisection.  Requires even order.
    """
    q = np.asarray(q, dtype=np.float64)
    order = q.size
    if order % 2 != 0:
        raise NonMinimumPhase("LSF conversion requires even order")
    a = np.concatenate((inverse_filter_coeffs(q), [0.0]))
    p = a + a[::-1]     # symmetric, root at omega = pi
    s = a - a[::-1]     # antisymmetric, root at omega = 0
    p = _deflate(p, 1.0)
    s = _deflate(s, -1.0)
    p_roots = _grid_roots(p, order // 2)
    s_roots = _grid_roots(s, order // 2)
    if len(p_roots) != order // 2 or len(s_roots) != order // 2:
        raise NonMinimumPhase("could not locate all LSF roots; predictor unstable?")
    lsf = np.empty(order)
    lsf[0::2] = p_roots
    lsf[1::2] = s_roots
    if not np.all(np.diff(lsf) > 0.0):
        raise NonMinimumPhase("LSF roots do not interlace; predictor unstable?")
    return lsf


def lsf_to_lpc(lsf) -> np.ndarray:
    """Inverse of lpc_to_lsf."""
    w = np.asarray(lsf, dtype=np.float64)
    if w.size % 2 != 0:
        raise NonMonotoneLsf("LSF vector must have even length")
    if not (np.all(np.diff(w) > 0.0) and w[0] > 0.0 and w[-1] < np.pi):
        raise NonMonotoneLsf("LSFs must be strictly increasing in (0, pi)")
    p = np.array([1.0])
    for om in w[0::2]:
        p = np.convolve(p, [1.0, -2.0 * np.cos(om), 1.0])
    s = np.array([1.0])
    for om in w[1::2]:
        s = np.convolve(s, [1.0, -2.0 * np.cos(om), 1.0])
    p = np.convolve(p, [1.0, 1.0])
    s = np.convolve(s, [1.0, -1.0])
    a = 0.5 * (p + s)[: w.size + 1]
    return -a[1:]


def estimate_pitch(frame, min_lag: int = MIN_PITCH, max_lag: int = MAX_PITCH,
                   threshold: float = VOICING_THRESHOLD) -> PitchEstimate:
    """Pitch by normalized autocorrelation peak over integer lags."""
    x = np.asarray(frame, dtype=np.float64)
    if x.size < 2 * max_lag:
        raise FrameTooShort(f"need >= {2 * max_lag} samples, got {x.size}")
    r = autocorrelate(x, max_lag)
    if r[0] <= 0.0:
        return PitchEstimate(period=min_lag, voiced=False, strength=0.0)
    norm = r[min_lag : max_lag + 1] / r[0]
    best = int(np.argmax(norm))
    strength = float(np.clip(norm[best], 0.0, 1.0))
    return PitchEstimate(period=min_lag + best, voiced=strength >= threshold,
                         strength=strength)
