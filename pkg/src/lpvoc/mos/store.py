"""Append-only JSON-lines score log.

One record per line; the full log is replayed on startup, and reports
always use the latest record per (listener, sample).  Appends are
serialized through a lock so concurrent request handlers cannot
interleave partial lines.
"""

import json
import threading
from datetime import datetime, timezone
from pathlib import Path

from .aggregate import MosRecord, MosReport, MosScore, aggregate_mos


class ScoreStore:
    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records = []
        if self.path.exists():
            with open(self.path) as f:
                for line in f:
                    line = line.strip()
                    if line:
                        self._records.append(self._from_json(json.loads(line)))

    @staticmethod
    def _from_json(obj) -> MosRecord:
        return MosRecord(listener_id=obj["listener_id"], sample_id=obj["sample_id"],
                         codec_id=obj["codec_id"], source_file=obj["source_file"],
                         score=MosScore(obj["score"]), timestamp=obj["timestamp"])

    def submit(self, listener_id: str, sample_id: str, codec_id: str,
               source_file: str, value: int) -> MosRecord:
        rec = MosRecord(listener_id=listener_id, sample_id=sample_id,
                        codec_id=codec_id, source_file=source_file,
                        score=MosScore(value),
                        timestamp=datetime.now(timezone.utc).isoformat())
        line = json.dumps({
            "listener_id": rec.listener_id, "sample_id": rec.sample_id,
            "codec_id": rec.codec_id, "source_file": rec.source_file,
            "score": rec.score.value, "timestamp": rec.timestamp,
        })
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as f:
                f.write(line + "\n")
                f.flush()
            self._records.append(rec)
        return rec

    def records(self) -> list:
        with self._lock:
            return list(self._records)

    def report(self) -> MosReport:
        return aggregate_mos(self.records())
