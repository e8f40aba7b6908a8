"""Waveform measurements: spectrogram, pitch/intensity contours, segmental SNR.

Defaults follow common phonetic-analysis conventions: 25 ms Hamming
window, 10 ms hop, 512-point FFT, -100 dB magnitude floor.  Contours and
spectrogram frames can be exported as CSV for plotting elsewhere.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import dsp
from .errors import (
    AllSegmentsSilent,
    BadWindowConfig,
    LengthMismatch,
    SignalTooShort,
)

SAMPLE_RATE = 8000
DEFAULT_WINDOW = 200     # 25 ms
DEFAULT_HOP = 80         # 10 ms
DEFAULT_FFT = 512
DEFAULT_FLOOR_DB = -100.0
FULL_SCALE = 32768.0

SEGSNR_MIN_DB = -10.0
SEGSNR_MAX_DB = 35.0


@dataclass
class SpectrogramData:
    times: np.ndarray        # seconds, frame centers
    frequencies: np.ndarray  # Hz
    magnitudes: np.ndarray   # dB, shape (frames, bins), floor-clamped


@dataclass
class Contour:
    times: np.ndarray
    values: np.ndarray
    voiced: np.ndarray | None = None  # pitch contours only


def spectrogram(signal, window: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP,
                fft_size: int = DEFAULT_FFT,
                floor_db: float = DEFAULT_FLOOR_DB) -> SpectrogramData:
    x = dsp.pcm_to_float(signal)
    if window > fft_size or hop < 1 or window < 1:
        raise BadWindowConfig(f"window {window}, hop {hop}, fft {fft_size}")
    if x.size < window:
        raise SignalTooShort(f"signal of {x.size} samples shorter than window")
    win = np.hamming(window)
    starts = range(0, x.size - window + 1, hop)
    mags = np.empty((len(starts), fft_size // 2 + 1))
    for i, s in enumerate(starts):
        frame = x[s : s + window] * win
        mags[i] = np.abs(np.fft.rfft(frame, fft_size))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mags)
    db = np.maximum(db, floor_db)
    times = (np.array(starts) + window / 2.0) / SAMPLE_RATE
    freqs = np.arange(fft_size // 2 + 1) * SAMPLE_RATE / fft_size
    return SpectrogramData(times=times, frequencies=freqs, magnitudes=db)


def pitch_contour(signal, frame: int = 320, hop: int = DEFAULT_HOP,
                  threshold: float = dsp.VOICING_THRESHOLD) -> Contour:
    x = dsp.pcm_to_float(signal)
    if frame < 2 * dsp.MAX_PITCH:
        raise BadWindowConfig(f"frame of {frame} samples below pitch-analysis minimum")
    if x.size < frame:
        raise SignalTooShort(f"signal of {x.size} samples shorter than frame")
    starts = range(0, x.size - frame + 1, hop)
    times = (np.array(starts) + frame / 2.0) / SAMPLE_RATE
    values = np.zeros(len(starts))
    voiced = np.zeros(len(starts), dtype=bool)
    for i, s in enumerate(starts):
        est = dsp.estimate_pitch(x[s : s + frame], threshold=threshold)
        voiced[i] = est.voiced
        if est.voiced:
            values[i] = SAMPLE_RATE / est.period
    return Contour(times=times, values=values, voiced=voiced)


def intensity_contour(signal, frame: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP,
                      floor_db: float = DEFAULT_FLOOR_DB) -> Contour:
    x = dsp.pcm_to_float(signal)
    if x.size < frame:
        raise SignalTooShort(f"signal of {x.size} samples shorter than frame")
    starts = range(0, x.size - frame + 1, hop)
    times = (np.array(starts) + frame / 2.0) / SAMPLE_RATE
    values = np.empty(len(starts))
    for i, s in enumerate(starts):
        rms = np.sqrt(np.mean(x[s : s + frame] ** 2))
        if rms <= 0.0:
            values[i] = floor_db
        else:
            values[i] = max(20.0 * np.log10(rms / FULL_SCALE), floor_db)
    return Contour(times=times, values=values)


def segmental_snr(reference, degraded, segment: int = 240) -> float:
    """Mean of per-segment SNRs in dB, each clamped to [-10, 35].

    Segments where the reference is silent are excluded.
    """
    ref = dsp.pcm_to_float(reference)
    deg = dsp.pcm_to_float(degraded)
    if ref.size != deg.size:
        raise LengthMismatch(f"lengths {ref.size} != {deg.size}")
    if segment < 1:
        raise LengthMismatch("segment length must be >= 1")
    snrs = []
    for s in range(0, ref.size - segment + 1, segment):
        r = ref[s : s + segment]
        d = deg[s : s + segment]
        sig = np.sum(r * r)
        if sig <= 0.0:
            continue
        err = np.sum((r - d) ** 2)
        if err <= 0.0:
            snrs.append(SEGSNR_MAX_DB)
        else:
            snrs.append(float(np.clip(10.0 * np.log10(sig / err),
                                      SEGSNR_MIN_DB, SEGSNR_MAX_DB)))
    if not snrs:
        raise AllSegmentsSilent("reference has no non-silent segments")
    return float(np.mean(snrs))


def export_contour_csv(contour: Contour, path, value_name: str = "value"):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        if contour.voiced is not None:
            writer.writerow(["time_s", value_name, "voiced"])
            for t, v, voiced in zip(contour.times, contour.values, contour.voiced):
                writer.writerow([f"{t:.6f}", f"{v:.6f}", int(voiced)])
        else:
            writer.writerow(["time_s", value_name])
            for t, v in zip(contour.times, contour.values):
                writer.writerow([f"{t:.6f}", f"{v:.6f}"])


def export_spectrogram_csv(data: SpectrogramData, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["time_s"] + [f"{fr:.1f}Hz" for fr in data.frequencies])
        for t, row in zip(data.times, data.magnitudes):
            writer.writerow([f"{t:.6f}"] + [f"{v:.6f}" for v in row])
