"""WAV and raw PCM reading/writing.

Only 8 kHz / mono / 16-bit signed little-endian PCM is accepted; files
in any other format are rejected rather than resampled.  Unknown RIFF
chunks are skipped.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    NotRiff,
    OddByteCount,
    UnsupportedChannels,
    UnsupportedDepth,
    UnsupportedRate,
)

SAMPLE_RATE = 8000
CHANNELS = 1
BIT_DEPTH = 16


@dataclass
class AudioSignal:
    samples: np.ndarray  # int16
    sample_rate: int = SAMPLE_RATE

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def read_wav(path) -> AudioSignal:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotRiff(f"{path} is not a RIFF/WAVE file")
    pos = 12
    fmt = None
    pcm = None
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        size = struct.unpack("<I", data[pos + 4 : pos + 8])[0]
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise NotRiff("truncated fmt chunk")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif cid == b"data":
            pcm = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or pcm is None:
        raise NotRiff("missing fmt or data chunk")
    audio_format, channels, rate, _byte_rate, _align, depth = fmt
    if audio_format != 1:
        raise UnsupportedDepth(f"not integer PCM (format tag {audio_format})")
    if rate != SAMPLE_RATE:
        raise UnsupportedRate(f"sample rate {rate}, need {SAMPLE_RATE}")
    if channels != CHANNELS:
        raise UnsupportedChannels(f"{channels} channels, need {CHANNELS}")
    if depth != BIT_DEPTH:
        raise UnsupportedDepth(f"{depth}-bit samples, need {BIT_DEPTH}")
    samples = np.frombuffer(pcm[: len(pcm) - (len(pcm) % 2)], dtype="<i2")
    return AudioSignal(samples=samples.astype(np.int16))


def write_wav(signal: AudioSignal, path):
    samples = np.asarray(signal.samples, dtype="<i2")
    body = samples.tobytes()
    byte_rate = SAMPLE_RATE * CHANNELS * BIT_DEPTH // 8
    block_align = CHANNELS * BIT_DEPTH // 8
    fmt = struct.pack("<HHIIHH", 1, CHANNELS, SAMPLE_RATE, byte_rate,
                      block_align, BIT_DEPTH)
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt \
        + b"data" + struct.pack("<I", len(body)) + body
    with open(path, "wb") as f:
        f.write(b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks)


def raw_import(path) -> AudioSignal:
    """Headerless 16-bit signed little-endian PCM at 8 kHz."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) % 2:
        raise OddByteCount(f"{path} has odd byte count {len(data)}")
    return AudioSignal(samples=np.frombuffer(data, dtype="<i2").astype(np.int16))


def raw_export(signal: AudioSignal, path):
    with open(path, "wb") as f:
        f.write(np.asarray(signal.samples, dtype="<i2").tobytes())
