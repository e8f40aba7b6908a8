from .aggregate import MosRecord, MosReport, MosScore, aggregate_mos
from .sessions import create_session
from .store import ScoreStore

__all__ = ["MosRecord", "MosReport", "MosScore", "aggregate_mos",
           "create_session", "ScoreStore"]
