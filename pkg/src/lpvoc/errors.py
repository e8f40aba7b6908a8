"""Exception hierarchy shared across the package."""


class LpvocError(Exception):
    """Base class for all lpvoc errors."""


# --- signal processing ---

class EmptyFrame(LpvocError):
    pass


class LagTooLarge(LpvocError):
    pass


class SingularAutocorrelation(LpvocError):
    pass


class GammaOutOfRange(LpvocError):
    pass


class GammaOrderViolation(LpvocError):
    pass


class UnstableDenominator(LpvocError):
    pass


class UnstableFilter(LpvocError):
    pass


class NonMinimumPhase(LpvocError):
    pass


class NonMonotoneLsf(LpvocError):
    pass


class FrameTooShort(LpvocError):
    pass


# --- codecs ---

class BadFrameLength(LpvocError):
    pass


class IndexOutOfRange(LpvocError):
    pass


class EmptyHistory(LpvocError):
    pass


class EmptyCodebook(LpvocError):
    pass


class WeightSumViolation(LpvocError):
    pass


# --- bitstream / container ---

class FieldOutOfRange(LpvocError):
    pass


class TruncatedBitstream(LpvocError):
    pass


class UnknownCodec(LpvocError):
    pass


class BadMagic(LpvocError):
    pass


class UnsupportedVersion(LpvocError):
    pass


# --- audio I/O ---

class NotRiff(LpvocError):
    pass


class UnsupportedRate(LpvocError):
    pass


class UnsupportedChannels(LpvocError):
    pass


class UnsupportedDepth(LpvocError):
    pass


class OddByteCount(LpvocError):
    pass


class IoFailure(LpvocError):
    pass


# --- analysis ---

class BadWindowConfig(LpvocError):
    pass


class SignalTooShort(LpvocError):
    pass


class LengthMismatch(LpvocError):
    pass


class AllSegmentsSilent(LpvocError):
    pass


# --- MOS service ---

class ScoreOutOfRange(LpvocError):
    pass


class UnknownSample(LpvocError):
    pass


class NoSamples(LpvocError):
    pass
