"""HTTP service for the blinded MOS listening test.

Listener-facing endpoints (session, audio) never expose codec identity;
the results endpoint is for the experimenter and reports per-file and
per-codec aggregates.
"""

import json
import secrets
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .sessions import create_session
from .store import ScoreStore

DEFAULT_SESSION_SEED = 20140401


class SampleMeta(BaseModel):
    sample_id: str
    file: str
    codec: str
    source: str


class SessionResponse(BaseModel):
    session_id: str
    samples: list[str]


class ScoreSubmission(BaseModel):
    session_id: str
    listener_id: str
    sample_id: str
    value: int


class ScoreResponse(BaseModel):
    listener_id: str
    sample_id: str
    value: int
    label: str
    timestamp: str


class FileMean(BaseModel):
    source: str
    codec: str
    mean: float


class ResultsResponse(BaseModel):
    files: list[FileMean]
    codec_averages: dict[str, float]
    listener_count: int


def load_manifest(samples_dir) -> dict:
    samples_dir = Path(samples_dir)
    with open(samples_dir / "manifest.json") as f:
        entries = json.load(f)
    manifest = {}
    for obj in entries:
        meta = SampleMeta(**obj)
        manifest[meta.sample_id] = (meta, samples_dir / meta.file)
    return manifest


def create_app(samples_dir, scores_path, seed: int = DEFAULT_SESSION_SEED,
               static_dir=None) -> FastAPI:
    manifest = load_manifest(samples_dir)
    store = ScoreStore(scores_path)
    sessions: dict[str, list[str]] = {}

    app = FastAPI(title="lpvoc MOS listening test")
    app.state.store = store
    app.state.manifest = manifest

    @app.get("/api/session", response_model=SessionResponse)
    def get_session(seed_override: int | None = None):
        order = create_session(sorted(manifest), seed_override if seed_override is not None else seed)
        session_id = secrets.token_hex(8)
        sessions[session_id] = order
        return SessionResponse(session_id=session_id, samples=order)

    @app.get("/api/audio/{sample_id}")
    def get_audio(sample_id: str):
        if sample_id not in manifest:
            raise HTTPException(status_code=404, detail="unknown sample")
        _, path = manifest[sample_id]
        return FileResponse(path, media_type="audio/wav")

    @app.post("/api/scores", response_model=ScoreResponse, status_code=201)
    def post_score(submission: ScoreSubmission):
        if submission.session_id not in sessions:
            raise HTTPException(status_code=409, detail="session expired")
        if submission.sample_id not in manifest:
            raise HTTPException(status_code=404, detail="unknown sample")
        if not 1 <= submission.value <= 5:
            raise HTTPException(status_code=400, detail="score outside 1..5")
        meta, _ = manifest[submission.sample_id]
        rec = store.submit(submission.listener_id, submission.sample_id,
                           meta.codec, meta.source, submission.value)
        return ScoreResponse(listener_id=rec.listener_id, sample_id=rec.sample_id,
                             value=rec.score.value, label=rec.score.label,
                             timestamp=rec.timestamp)

    @app.get("/api/results", response_model=ResultsResponse)
    def get_results():
        report = store.report()
        files = [FileMean(source=source, codec=codec, mean=mean)
                 for (source, codec), mean in sorted(report.file_means.items())]
        return ResultsResponse(files=files, codec_averages=report.codec_averages,
                               listener_count=report.listener_count)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
