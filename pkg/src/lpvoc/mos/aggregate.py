"""MOS records and report aggregation.

The per-codec average is the unweighted mean of that codec's per-file
means, reported to 3 decimals.
"""

from dataclasses import dataclass

from ..errors import ScoreOutOfRange

SCORE_LABELS = {5: "Excellent", 4: "Good", 3: "Fair", 2: "Poor", 1: "Bad"}


@dataclass(frozen=True)
class MosScore:
    value: int

    def __post_init__(self):
        if self.value not in SCORE_LABELS:
            raise ScoreOutOfRange(f"score {self.value} outside 1..5")

    @property
    def label(self) -> str:
        return SCORE_LABELS[self.value]


@dataclass(frozen=True)
class MosRecord:
    listener_id: str
    sample_id: str
    codec_id: str        # hidden from listeners
    source_file: str
    score: MosScore
    timestamp: str       # ISO-8601


@dataclass
class MosReport:
    file_means: dict     # (source_file, codec_id) -> mean score
    codec_averages: dict  # codec_id -> unweighted mean of its file means
    listener_count: int


def aggregate_mos(records) -> MosReport:
    """Aggregate records into per-file means and per-codec averages.

    Only the latest record per (listener, sample) is kept.
    """
    latest = {}
    for rec in records:
        latest[(rec.listener_id, rec.sample_id)] = rec
    by_file = {}
    listeners = set()
    for rec in latest.values():
        by_file.setdefault((rec.source_file, rec.codec_id), []).append(rec.score.value)
        listeners.add(rec.listener_id)
    file_means = {key: sum(vals) / len(vals) for key, vals in by_file.items()}
    by_codec = {}
    for (_, codec), mean in file_means.items():
        by_codec.setdefault(codec, []).append(mean)
    codec_averages = {codec: round(sum(means) / len(means), 3)
                      for codec, means in by_codec.items()}
    return MosReport(file_means=file_means, codec_averages=codec_averages,
                     listener_count=len(listeners))
