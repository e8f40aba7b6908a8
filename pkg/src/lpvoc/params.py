"""Coded-unit parameter records for the three codecs.

These are the only objects exchanged between the codec modules and the
bitstream packer.  Field validation (range checks) lives with the
bitstream layout definitions.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class CelpFrameParams:
    """One 30 ms CELP frame: 144 bits when packed."""

    lsf_indices: tuple            # 10 scalar indices, 3/4 bits each (34 total)
    pitch_lags: tuple             # 4 absolute lags; subframes 2 and 4 delta-coded
    adaptive_gain_indices: tuple  # 4 x 5-bit sign+magnitude indices
    stochastic_indices: tuple     # 4 x 9-bit codebook indices
    stochastic_gain_indices: tuple  # 4 x 5-bit sign+magnitude indices
    sync_bit: int
    error_correction: int         # 4-bit parity over the pitch bits
    expansion_bit: int = 0


@dataclass(frozen=True)
class LdcelpVectorParams:
    """One 5-sample LD-CELP vector: 10 bits when packed."""

    shape_index: int      # 7 bits
    gain_magnitude: int   # 2 bits
    gain_sign: int        # 1 bit, 0 = positive


@dataclass(frozen=True)
class MelpFrameParams:
    """One 22.5 ms MELP frame: 54 bits in both voiced and unvoiced layouts."""

    lsf_indices: tuple        # 4 stage indices, 7+6+6+6 bits
    gain_indices: tuple       # 2 half-frame gains, 4 bits each
    pitch_index: int          # 6 bits (log-pitch table)
    voiced: bool              # overall voicing bit
    sync_bit: int
    fourier_index: int | None = None        # 8 bits, voiced only
    bandpass_voicing: tuple | None = None   # 4 bits (bands 2-5), voiced only
    aperiodic_flag: int | None = None       # 1 bit, voiced only
    error_protection: int | None = None     # 13 bits, unvoiced only
