"""HTTP service for live recommendations and feedback capture.

The read path never fails on bad code: the live client sends half-typed
cells on every update, so recommendation errors degrade to empty lists with
a warning. HTTP errors are reserved for protocol misuse (malformed JSON,
unknown verdicts) and for a missing model.
"""
from __future__ import annotations

import datetime
import json
import logging
import threading
import uuid
from functools import partial
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .altrec import recommend_alternative, summarize_heuristic, summarize_remote
from .complement import Recommendation, recommend_complementary
from .corpus import extract_imports
from .errors import NoKnownImportsError, SummarizerUnavailableError
from .model_store import ModelBundle

logger = logging.getLogger(__name__)

VERDICTS = ("yes", "relevant_not_required", "not_relevant")


class RecommendRequest(BaseModel):
    code: str
    top_k_complementary: int = Field(default=5, ge=1)
    top_k_alternative: int = Field(default=5, ge=1)


class FeedbackBody(BaseModel):
    request_id: str
    package: str
    verdict: Literal["yes", "relevant_not_required", "not_relevant"]


def _rec_payload(rec: Recommendation) -> dict:
    return {
        "package": rec.package,
        "score": rec.score,
        "kind": rec.kind,
        "rank": rec.rank,
        "already_imported": rec.already_imported,
    }


def create_app(bundle: ModelBundle | None, feedback_log: str | Path,
               summarizer_url: str | None = None,
               summarizer_fallback: bool = True,
               filter_imported: bool = True,
               cors_origins: tuple[str, ...] = ("*",),
               latency_budget_s: float = 2.0) -> FastAPI:
    """Build the service around an immutable model bundle.

    The bundle is swappable at runtime via ``app.state.bundle = new_bundle``
    (a plain attribute assignment, atomic between requests).
    """
    app = FastAPI(title="librec", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.bundle = bundle
    app.state.feedback_log = Path(feedback_log)
    app.state.feedback_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    def _validation_to_400(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def _summarize(code: str, warnings: list[str]):
        if summarizer_url is None:
            return summarize_heuristic(code)
        try:
            return summarize_remote(code, summarizer_url,
                                    timeout=min(10.0, latency_budget_s))
        except SummarizerUnavailableError as exc:
            if not summarizer_fallback:
                raise
            warnings.append(f"summarizer unavailable, used heuristic: {exc}")
            return summarize_heuristic(code)

    @app.post("/v1/recommend")
    def recommend(body: RecommendRequest):
        current: ModelBundle | None = app.state.bundle
        if current is None:
            return JSONResponse(status_code=503, content={"detail": "model not loaded"})
        warnings: list[str] = []
        imports = extract_imports(body.code)

        complementary: list[Recommendation] = []
        try:
            complementary = recommend_complementary(imports, current.model,
                                                    k=body.top_k_complementary)
        except NoKnownImportsError:
            warnings.append("no known imports detected; complementary list is empty")

        alternative: list[Recommendation] = []
        if current.index is None:
            warnings.append("no description index loaded; alternative list is empty")
        else:
            try:
                k = body.top_k_alternative
                fetch_k = k + len(imports) if filter_imported else k
                alternative = recommend_alternative(
                    body.code, current.index,
                    summarizer=partial(_summarize, warnings=warnings), k=fetch_k)
                if filter_imported:
                    alternative = [r for r in alternative if not r.already_imported][:k]
                    for rank, rec in enumerate(alternative, start=1):
                        rec.rank = rank
            except SummarizerUnavailableError as exc:
                return JSONResponse(status_code=503,
                                    content={"detail": f"summarizer unavailable: {exc}"})

        return {
            "request_id": uuid.uuid4().hex,
            "imports_detected": sorted(imports),
            "complementary": [_rec_payload(r) for r in complementary],
            "alternative": [_rec_payload(r) for r in alternative],
            "warnings": warnings,
        }

    @app.post("/v1/feedback", status_code=204)
    def feedback(body: FeedbackBody):
        event = {
            "request_id": body.request_id,
            "package": body.package,
            "verdict": body.verdict,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        line = json.dumps(event, sort_keys=True) + "\n"
        # One serialized writer; a full line per write keeps the log torn-free.
        with app.state.feedback_lock:
            with open(app.state.feedback_log, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
        return Response(status_code=204)

    @app.get("/v1/health")
    def health():
        current: ModelBundle | None = app.state.bundle
        return {
            "status": "ok",
            "model_version": current.format_version if current else None,
        }

    return app


def summarize_feedback_log(path: str | Path) -> dict:
    """Aggregate verdict counts and shares from a feedback JSON-lines log."""
    counts = {v: 0 for v in VERDICTS}
    total = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
            verdict = event.get("verdict")
            if verdict in counts:
                counts[verdict] += 1
                total += 1
    shares = {v: (counts[v] / total if total else 0.0) for v in VERDICTS}
    return {"counts": counts, "shares": shares, "total": total}
