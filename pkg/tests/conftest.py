import numpy as np
import pytest

from lpvoc import dsp


def harmonic_vowel(duration_s=1.0, f0=100.0, peak=8000.0, seed=7):
    """Sustained vowel-like signal: harmonics of f0 shaped by three
    formant bumps.  Stationary envelope, so it is a fair test input for
    both forward- and backward-adaptive coders."""
    n = int(duration_s * dsp.SAMPLE_RATE)
    t = np.arange(n) / dsp.SAMPLE_RATE
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    formants = ((500.0, 80.0), (1500.0, 120.0), (2500.0, 180.0))
    for h in range(1, int(4000.0 / f0)):
        f = h * f0
        amp = sum(np.exp(-(((f - fc) / bw) ** 2)) for fc, bw in formants) + 0.02
        x += amp * np.sin(2.0 * np.pi * f * t + rng.uniform(0.0, 2.0 * np.pi))
    return x / np.max(np.abs(x)) * peak


@pytest.fixture(scope="session")
def vowel():
    return harmonic_vowel()


@pytest.fixture(scope="session")
def vowel_pcm(vowel):
    return dsp.float_to_pcm(vowel)


def random_stable_predictor(rng, order=10, kmax=0.95):
    """Minimum-phase predictor from random reflection coefficients."""
    refl = rng.uniform(-kmax, kmax, size=order)
    q = np.zeros(0)
    for k in refl:
        q = np.concatenate((q - k * q[::-1], [k]))
    return q
