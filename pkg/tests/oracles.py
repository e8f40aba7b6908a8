"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way on purpose: direct
difference equations, dense matrix solves, exhaustive searches.  Keep it
free of imports from lpvoc internals beyond plain constants.
"""

import numpy as np


def naive_filter(b, a, x, zi=None):
    """Direct-form difference equation, one sample at a time.

    a[0] is assumed 1.  Returns the output only (state handling is the
    caller's problem; start from rest unless zi-style history is baked
    into x).
    """
    b = np.asarray(b, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = np.zeros(x.size)
    for n in range(x.size):
        acc = 0.0
        for i in range(b.size):
            if n - i >= 0:
                acc += b[i] * x[n - i]
        for j in range(1, a.size):
            if n - j >= 0:
                acc -= a[j] * y[n - j]
        y[n] = acc
    return y


def dense_toeplitz_solve(r, order):
    """Predictor coefficients by brute-force normal equations.

    Builds the full Toeplitz matrix and solves it with a dense solver;
    same sign convention as levinson_durbin (predictor coefficients q
    with x_hat[n] = sum q_i x[n-i]).
    """
    r = np.asarray(r, dtype=np.float64)
    T = np.empty((order, order))
    for i in range(order):
        for j in range(order):
            T[i, j] = r[abs(i - j)]
    return np.linalg.solve(T, r[1 : order + 1])


def naive_autocorrelation(x, max_lag):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(max_lag + 1)
    for k in range(max_lag + 1):
        s = 0.0
        for n in range(k, x.size):
            s += x[n] * x[n - k]
        out[k] = s
    return out


def reflection_from_predictor(q):
    """Step-down recursion: predictor coefficients -> reflection coeffs."""
    a = np.asarray(q, dtype=np.float64).copy()
    order = a.size
    refl = np.zeros(order)
    for i in range(order, 0, -1):
        k = a[i - 1]
        refl[i - 1] = k
        if abs(k) >= 1.0:
            # unstable; report as-is, caller asserts on magnitudes
            a = a[: i - 1]
            continue
        prev = a[: i - 1]
        a = (prev + k * prev[::-1]) / (1.0 - k * k)
    return refl


def predictor_from_reflection(refl):
    """Step-up recursion; always yields a minimum-phase predictor when
    every reflection coefficient has magnitude < 1."""
    q = np.zeros(0)
    for k in refl:
        q = np.concatenate((q - k * q[::-1], [k]))
    return q


def brute_celp_gain_table(mags):
    """All 32 (index, value) pairs of a sign+magnitude gain quantizer,
    in index order."""
    vals = []
    for idx in range(32):
        sign = -1.0 if idx >= 16 else 1.0
        vals.append(sign * mags[idx & 15])
    return np.array(vals)


def brute_search_pairs(target, candidates, gain_values):
    """Exhaustive (candidate, gain index) argmin of ||t - g*y||^2.

    candidates: (N, n) matrix of already-filtered codebook responses.
    Enumeration is candidate-major, gain index ascending; the first
    strictly-smallest error wins, matching a plain double loop.
    """
    t = np.asarray(target, dtype=np.float64)
    errs = np.sum((t[None, None, :]
                   - gain_values[None, :, None] * candidates[:, None, :]) ** 2,
                  axis=2)
    flat = int(np.argmin(errs))
    ci, gi = divmod(flat, gain_values.size)
    return ci, gi, errs[ci, gi]


def spectral_flatness(x, segment=120, segments=None):
    """Geometric over arithmetic mean of the averaged power spectrum.

    Averaging periodograms over segments keeps estimator variance from
    dragging the geometric mean down (a raw single periodogram of white
    noise only scores about 0.56)."""
    x = np.asarray(x, dtype=np.float64)
    if segments is None:
        segments = x.size // segment
    p = np.zeros(segment // 2 + 1)
    for i in range(segments):
        seg = x[i * segment : (i + 1) * segment]
        p += np.abs(np.fft.rfft(seg)) ** 2
    p = np.maximum(p[1:] / segments, 1e-30)  # drop DC
    return float(np.exp(np.mean(np.log(p))) / np.mean(p))


def naive_segmental_snr(ref, deg, segment, lo=-10.0, hi=35.0):
    ref = np.asarray(ref, dtype=np.float64)
    deg = np.asarray(deg, dtype=np.float64)
    vals = []
    for s in range(0, ref.size - segment + 1, segment):
        r = ref[s : s + segment]
        d = deg[s : s + segment]
        sig = float(np.sum(r * r))
        if sig <= 0.0:
            continue
        err = float(np.sum((r - d) ** 2))
        if err <= 0.0:
            vals.append(hi)
        else:
            vals.append(min(max(10.0 * np.log10(sig / err), lo), hi))
    return sum(vals) / len(vals)
