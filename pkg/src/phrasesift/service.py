"""HTTP/JSON service exposing corpora, summaries, snapshots, and run history.

All request and response bodies are UTF-8 JSON; errors use the envelope
``{"error": {"code": ..., "message": ...}}``.  The service never mutates
a corpus: besides corpus uploads, all state is the append-only run log,
and resubmitting an identical configuration returns the cached run.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import PhraseSiftError
from .labeling import LabelingRule, QuerySet
from .pipeline import kwic, near_duplicates
from .corpus import segment
from .select import SelectorConfig
from .store import RunStore, summary_config


class QueryBody(BaseModel):
    topic: str = ""
    terms: list[str]
    ban: list[str] = Field(default_factory=list)


class RuleBody(BaseModel):
    kind: Literal["count", "hcount"] = "count"
    k: int = 1


class SelectorBody(BaseModel):
    method: Literal["cooccurrence", "correlation", "lasso", "l1lr"] = "lasso"
    k: int = 15
    solver_tol: float = 1e-7
    max_sweeps: int = 10_000
    bisection_depth: int = 30


class SummaryRequest(BaseModel):
    query: QueryBody
    rule: RuleBody = Field(default_factory=RuleBody)
    unit_kind: Literal["article", "paragraph", "headline"] = "article"
    scheme: Literal["raw", "stopword", "l2", "tfidf"] = "l2"
    selector: SelectorBody = Field(default_factory=SelectorBody)
    ngram_range: tuple[int, int] = (1, 3)
    min_df: int | None = None


class WindowBody(BaseModel):
    name: str
    start: str
    end: str


class SnapshotRequest(SummaryRequest):
    windows: list[WindowBody]


class CorpusUpload(BaseModel):
    name: str
    jsonl: str


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(store_path: str, ui_dir: str | None = None) -> FastAPI:
    store = RunStore(store_path)
    app = FastAPI(title="phrasesift", version="0.1.0")
    app.state.store = store

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(PhraseSiftError)
    async def on_domain_error(request: Request, exc: PhraseSiftError):
        return _error(400, type(exc).__name__, str(exc))

    @app.exception_handler(ValueError)
    async def on_bad_value(request: Request, exc: ValueError):
        return _error(400, "ValueError", str(exc))

    @app.exception_handler(KeyError)
    async def on_missing(request: Request, exc: KeyError):
        return _error(404, "NotFound", f"unknown resource {exc.args[0]!r}")

    @app.exception_handler(RequestValidationError)
    async def on_validation(request: Request, exc: RequestValidationError):
        return _error(400, "ValidationError", str(exc.errors()))

    @app.get("/corpora")
    def list_corpora():
        return store.list_corpora()

    @app.post("/corpora", status_code=201)
    def upload_corpus(body: CorpusUpload):
        return store.add_corpus(body.name, body.jsonl)

    @app.get("/corpora/{name}/stats")
    def corpus_stats(name: str):
        return store.corpus_stats(name)

    def _submit(name: str, config: dict):
        record, cached = store.submit(name, config)
        return JSONResponse(status_code=200 if cached else 201, content=record.to_dict())

    @app.post("/corpora/{name}/summaries")
    def submit_summary(name: str, body: SummaryRequest):
        config = summary_config(
            QuerySet.from_dict(body.query.model_dump()),
            LabelingRule(kind=body.rule.kind, k=body.rule.k),
            body.unit_kind,
            body.scheme,
            SelectorConfig.from_dict(body.selector.model_dump()),
            tuple(body.ngram_range),
            body.min_df,
        )
        return _submit(name, config)

    @app.post("/corpora/{name}/snapshots")
    def submit_snapshot(name: str, body: SnapshotRequest):
        config = summary_config(
            QuerySet.from_dict(body.query.model_dump()),
            LabelingRule(kind=body.rule.kind, k=body.rule.k),
            body.unit_kind,
            body.scheme,
            SelectorConfig.from_dict(body.selector.model_dump()),
            tuple(body.ngram_range),
            body.min_df,
        )
        config["kind"] = "snapshot"
        config["windows"] = [w.model_dump() for w in body.windows]
        return _submit(name, config)

    @app.get("/runs")
    def list_runs():
        return store.list_runs()

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return store.get_run(run_id).to_dict()

    @app.get("/corpora/{name}/kwic")
    def corpus_kwic(
        name: str,
        phrase: str,
        limit: int = 10,
        window: int = 8,
        seed: int = 0,
        unit_kind: str = "article",
    ):
        corpus = store.load_corpus(name)
        units = segment(corpus, unit_kind)
        snippets = kwic(units, phrase, max_samples=limit, window_tokens=window, seed=seed)
        return {
            "phrase": phrase,
            "snippets": [
                {
                    "unit_id": s.unit_id,
                    "text": s.text,
                    "match_start": s.match_start,
                    "match_end": s.match_end,
                    "highlighted": s.highlighted(),
                }
                for s in snippets
            ],
        }

    @app.get("/corpora/{name}/dupes")
    def corpus_dupes(
        name: str,
        threshold: float = 0.95,
        unit_kind: str = "article",
        limit: int = 1000,
    ):
        counts = store.count_matrix(name, unit_kind, (1, 1), 1)
        pairs = near_duplicates(counts, threshold)
        corpus = store.load_corpus(name)
        units = segment(corpus, unit_kind)
        return {
            "threshold": threshold,
            "n_pairs": len(pairs),
            "pairs": [
                {"unit_a": units[i].unit_id, "unit_b": units[j].unit_id, "cosine": c}
                for i, j, c in pairs[:limit]
            ],
        }

    return app
