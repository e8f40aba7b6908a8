"""Bit-exact packing of codec parameters and the .lpvc file container.

Bit order is big-endian within bytes (MSB first).  Packed unit sizes are
fixed: 144 bits per CELP frame, 10 bits per LD-CELP vector, 54 bits per
MELP frame.

Container layout (header is 14 bytes):

    offset  size  field
    0       4     magic "LPVC"
    4       1     format version (1)
    5       1     codec id (1 = CELP, 2 = LD-CELP, 3 = MELP)
    6       8     original sample count, little-endian
    14      ...   packed units, concatenated bitwise, final byte zero-padded
"""

import struct

from .errors import (
    BadMagic,
    FieldOutOfRange,
    TruncatedBitstream,
    UnknownCodec,
    UnsupportedVersion,
)
from .params import CelpFrameParams, LdcelpVectorParams, MelpFrameParams

MAGIC = b"LPVC"
VERSION = 1

CODEC_CELP = 1
CODEC_LDCELP = 2
CODEC_MELP = 3

CELP_FRAME_BITS = 144
LDCELP_VECTOR_BITS = 10
MELP_FRAME_BITS = 54

CELP_FRAME_SAMPLES = 240
LDCELP_VECTOR_SAMPLES = 5
MELP_FRAME_SAMPLES = 180

_UNIT_BITS = {CODEC_CELP: CELP_FRAME_BITS, CODEC_LDCELP: LDCELP_VECTOR_BITS,
              CODEC_MELP: MELP_FRAME_BITS}
_UNIT_SAMPLES = {CODEC_CELP: CELP_FRAME_SAMPLES, CODEC_LDCELP: LDCELP_VECTOR_SAMPLES,
                 CODEC_MELP: MELP_FRAME_SAMPLES}

# CELP field widths
CELP_LSF_BITS = (3, 4, 4, 4, 4, 3, 3, 3, 3, 3)   # 34 bits
CELP_MIN_LAG = 20
CELP_MAX_LAG = 147
CELP_DELTA_BIAS = 32  # 6-bit delta on subframes 2 and 4: lag - prev + 32


def bitrate_of(codec_id: int) -> int:
    """Bits per second for a codec id."""
    if codec_id == CODEC_CELP:
        return CELP_FRAME_BITS * 1000 // 30          # 144 bits / 30 ms
    if codec_id == CODEC_LDCELP:
        return LDCELP_VECTOR_BITS * 8000 // 5        # 10 bits / 0.625 ms
    if codec_id == CODEC_MELP:
        return MELP_FRAME_BITS * 10000 // 225        # 54 bits / 22.5 ms
    raise UnknownCodec(f"unknown codec id {codec_id}")


def unit_bits(codec_id: int) -> int:
    try:
        return _UNIT_BITS[codec_id]
    except KeyError:
        raise UnknownCodec(f"unknown codec id {codec_id}") from None


def unit_samples(codec_id: int) -> int:
    try:
        return _UNIT_SAMPLES[codec_id]
    except KeyError:
        raise UnknownCodec(f"unknown codec id {codec_id}") from None


class BitWriter:
    def __init__(self):
        self._bits = []

    def write(self, value: int, width: int, name: str = "field"):
        if not 0 <= value < (1 << width):
            raise FieldOutOfRange(f"{name} value {value} does not fit in {width} bits")
        for i in range(width - 1, -1, -1):
            self._bits.append((value >> i) & 1)

    @property
    def bit_length(self) -> int:
        return len(self._bits)

    def bits(self):
        return tuple(self._bits)

    def append_bits(self, bits):
        self._bits.extend(bits)

    def to_bytes(self) -> bytes:
        out = bytearray()
        acc = 0
        n = 0
        for b in self._bits:
            acc = (acc << 1) | b
            n += 1
            if n == 8:
                out.append(acc)
                acc = n = 0
        if n:
            out.append(acc << (8 - n))
        return bytes(out)


class BitReader:
    def __init__(self, data, bit_length: int | None = None):
        if isinstance(data, (bytes, bytearray)):
            self._bits = [(byte >> i) & 1 for byte in data for i in range(7, -1, -1)]
        else:
            self._bits = list(data)
        if bit_length is not None:
            if bit_length > len(self._bits):
                raise TruncatedBitstream("fewer bits than declared")
            self._bits = self._bits[:bit_length]
        self._pos = 0

    def read(self, width: int) -> int:
        if self._pos + width > len(self._bits):
            raise TruncatedBitstream("read past end of bitstream")
        value = 0
        for _ in range(width):
            value = (value << 1) | self._bits[self._pos]
            self._pos += 1
        return value

    @property
    def remaining(self) -> int:
        return len(self._bits) - self._pos


# --- CELP ---

def _celp_pitch_fields(lags) -> tuple:
    """Map four absolute lags to the packed (8, 6, 8, 6)-bit field values."""
    if len(lags) != 4:
        raise FieldOutOfRange("expected 4 pitch lags")
    fields = []
    for s, lag in enumerate(lags):
        if not CELP_MIN_LAG <= lag <= CELP_MAX_LAG:
            raise FieldOutOfRange(f"pitch lag {lag} outside [{CELP_MIN_LAG}, {CELP_MAX_LAG}]")
        if s % 2 == 0:
            fields.append(lag - CELP_MIN_LAG)
        else:
            delta = lag - lags[s - 1] + CELP_DELTA_BIAS
            if not 0 <= delta < 64:
                raise FieldOutOfRange(f"pitch delta for subframe {s + 1} not codable: {delta - CELP_DELTA_BIAS}")
            fields.append(delta)
    return tuple(fields)


def celp_pitch_parity(lags) -> int:
    """4-bit XOR fold of the 28 packed pitch bits (the error-correction field)."""
    f = _celp_pitch_fields(lags)
    word = (f[0] << 20) | (f[1] << 14) | (f[2] << 6) | f[3]
    parity = 0
    while word:
        parity ^= word & 0xF
        word >>= 4
    return parity


def pack_celp(params: CelpFrameParams) -> BitWriter:
    w = BitWriter()
    if len(params.lsf_indices) != len(CELP_LSF_BITS):
        raise FieldOutOfRange("expected 10 LSF indices")
    for idx, bits in zip(params.lsf_indices, CELP_LSF_BITS):
        w.write(idx, bits, "lsf index")
    fields = _celp_pitch_fields(params.pitch_lags)
    for s, f in enumerate(fields):
        w.write(f, 8 if s % 2 == 0 else 6, "pitch")
    for g in params.adaptive_gain_indices:
        w.write(g, 5, "adaptive gain")
    for i in params.stochastic_indices:
        w.write(i, 9, "stochastic index")
    for g in params.stochastic_gain_indices:
        w.write(g, 5, "stochastic gain")
    w.write(params.sync_bit, 1, "sync")
    w.write(params.error_correction, 4, "error correction")
    w.write(params.expansion_bit, 1, "expansion")
    assert w.bit_length == CELP_FRAME_BITS
    return w


def unpack_celp(r: BitReader) -> CelpFrameParams:
    lsf = tuple(r.read(bits) for bits in CELP_LSF_BITS)
    lags = []
    for s in range(4):
        if s % 2 == 0:
            lags.append(r.read(8) + CELP_MIN_LAG)
        else:
            lags.append(lags[s - 1] + r.read(6) - CELP_DELTA_BIAS)
    for lag in lags:
        if not CELP_MIN_LAG <= lag <= CELP_MAX_LAG:
            raise FieldOutOfRange(f"decoded pitch lag {lag} out of range")
    again = tuple(r.read(5) for _ in range(4))
    sidx = tuple(r.read(9) for _ in range(4))
    sgain = tuple(r.read(5) for _ in range(4))
    sync = r.read(1)
    ec = r.read(4)
    exp = r.read(1)
    return CelpFrameParams(lsf_indices=lsf, pitch_lags=tuple(lags),
                           adaptive_gain_indices=again, stochastic_indices=sidx,
                           stochastic_gain_indices=sgain, sync_bit=sync,
                           error_correction=ec, expansion_bit=exp)


# --- LD-CELP ---

def pack_ldcelp(params: LdcelpVectorParams) -> BitWriter:
    w = BitWriter()
    w.write(params.shape_index, 7, "shape index")
    w.write(params.gain_magnitude, 2, "gain magnitude")
    w.write(params.gain_sign, 1, "gain sign")
    assert w.bit_length == LDCELP_VECTOR_BITS
    return w


def unpack_ldcelp(r: BitReader) -> LdcelpVectorParams:
    return LdcelpVectorParams(shape_index=r.read(7), gain_magnitude=r.read(2),
                              gain_sign=r.read(1))


# --- MELP ---
#
# Common fields first so that the overall-voicing bit sits at a fixed
# offset (bit 33); the voiced/unvoiced tails can then be parsed without
# out-of-band information.  Both layouts are exactly 54 bits.

MELP_LSF_STAGE_BITS = (7, 6, 6, 6)   # 25 bits


def _melp_payload_bits(params: MelpFrameParams) -> list:
    """The 33 protected bits (LSF + gains) as a list, MSB first."""
    w = BitWriter()
    for idx, bits in zip(params.lsf_indices, MELP_LSF_STAGE_BITS):
        w.write(idx, bits, "lsf stage index")
    for g in params.gain_indices:
        w.write(g, 4, "gain index")
    return list(w.bits())


def melp_error_protection(params: MelpFrameParams) -> int:
    """13 parity bits over the LSF and gain fields.

    Parity word is the XOR of (j + 1) over set payload bit positions j,
    so a single payload bit flip yields its own position as syndrome.
    """
    word = 0
    for j, bit in enumerate(_melp_payload_bits(params)):
        if bit:
            word ^= j + 1
    return word & 0x1FFF


def pack_melp(params: MelpFrameParams) -> BitWriter:
    w = BitWriter()
    if len(params.lsf_indices) != 4 or len(params.gain_indices) != 2:
        raise FieldOutOfRange("expected 4 LSF stage indices and 2 gain indices")
    for idx, bits in zip(params.lsf_indices, MELP_LSF_STAGE_BITS):
        w.write(idx, bits, "lsf stage index")
    for g in params.gain_indices:
        w.write(g, 4, "gain index")
    w.write(1 if params.voiced else 0, 1, "overall voicing")
    w.write(params.pitch_index, 6, "pitch index")
    if params.voiced:
        if params.fourier_index is None or params.bandpass_voicing is None \
                or params.aperiodic_flag is None:
            raise FieldOutOfRange("voiced frame missing voiced-only fields")
        w.write(params.fourier_index, 8, "fourier index")
        if len(params.bandpass_voicing) != 4:
            raise FieldOutOfRange("expected 4 bandpass voicing bits")
        for b in params.bandpass_voicing:
            w.write(b, 1, "bandpass voicing")
        w.write(params.aperiodic_flag, 1, "aperiodic flag")
    else:
        if params.error_protection is None:
            raise FieldOutOfRange("unvoiced frame missing error protection field")
        w.write(params.error_protection, 13, "error protection")
    w.write(params.sync_bit, 1, "sync")
    assert w.bit_length == MELP_FRAME_BITS
    return w


def unpack_melp(r: BitReader) -> MelpFrameParams:
    lsf = tuple(r.read(bits) for bits in MELP_LSF_STAGE_BITS)
    gains = tuple(r.read(4) for _ in range(2))
    voiced = bool(r.read(1))
    pitch = r.read(6)
    if voiced:
        fourier = r.read(8)
        bp = tuple(r.read(1) for _ in range(4))
        aper = r.read(1)
        sync = r.read(1)
        return MelpFrameParams(lsf_indices=lsf, gain_indices=gains, pitch_index=pitch,
                               voiced=True, sync_bit=sync, fourier_index=fourier,
                               bandpass_voicing=bp, aperiodic_flag=aper)
    ec = r.read(13)
    sync = r.read(1)
    return MelpFrameParams(lsf_indices=lsf, gain_indices=gains, pitch_index=pitch,
                           voiced=False, sync_bit=sync, error_protection=ec)


# --- generic pack / unpack ---

_PACKERS = {CODEC_CELP: pack_celp, CODEC_LDCELP: pack_ldcelp, CODEC_MELP: pack_melp}
_UNPACKERS = {CODEC_CELP: unpack_celp, CODEC_LDCELP: unpack_ldcelp, CODEC_MELP: unpack_melp}


def pack(params) -> tuple:
    """Pack one parameter unit to a bit tuple (type selects the codec)."""
    if isinstance(params, CelpFrameParams):
        return pack_celp(params).bits()
    if isinstance(params, LdcelpVectorParams):
        return pack_ldcelp(params).bits()
    if isinstance(params, MelpFrameParams):
        return pack_melp(params).bits()
    raise UnknownCodec(f"unknown parameter type {type(params).__name__}")


def unpack(bits, codec_id: int):
    """Inverse of pack for a single unit."""
    reader = bits if isinstance(bits, BitReader) else BitReader(bits)
    try:
        unpacker = _UNPACKERS[codec_id]
    except KeyError:
        raise UnknownCodec(f"unknown codec id {codec_id}") from None
    return unpacker(reader)


# --- container ---

def container_write(units, codec_id: int, sample_count: int) -> bytes:
    bits = unit_bits(codec_id)
    w = BitWriter()
    packer = _PACKERS[codec_id]
    count = 0
    for params in units:
        w.append_bits(packer(params).bits())
        count += 1
    per_unit = unit_samples(codec_id)
    if sample_count < 0 or sample_count > count * per_unit:
        raise FieldOutOfRange("sample count exceeds coded capacity")
    if -(-sample_count // per_unit) != count:
        raise FieldOutOfRange("unit count inconsistent with sample count")
    assert w.bit_length == count * bits
    header = MAGIC + struct.pack("<BBQ", VERSION, codec_id, sample_count)
    return header + w.to_bytes()


def container_read(data: bytes):
    """Returns (codec_id, list of params, sample_count)."""
    if len(data) < 14:
        raise TruncatedBitstream("container shorter than header")
    if data[:4] != MAGIC:
        raise BadMagic(f"bad magic {data[:4]!r}")
    version, codec_id, sample_count = struct.unpack("<BBQ", data[4:14])
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported version {version}")
    bits = unit_bits(codec_id)
    per_unit = unit_samples(codec_id)
    unit_count = -(-sample_count // per_unit)  # ceil
    expected_bytes = (unit_count * bits + 7) // 8
    payload = data[14:]
    if len(payload) < expected_bytes:
        raise TruncatedBitstream(f"payload {len(payload)} bytes, expected {expected_bytes}")
    if len(payload) > expected_bytes:
        raise TruncatedBitstream("trailing bytes after declared payload")
    reader = BitReader(payload, bit_length=unit_count * bits)
    unpacker = _UNPACKERS[codec_id]
    units = [unpacker(reader) for _ in range(unit_count)]
    return codec_id, units, sample_count
