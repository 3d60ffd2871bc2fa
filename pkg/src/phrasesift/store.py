"""Directory-backed persistence for corpora and analysis runs.

Layout under the store root:

    corpora/<name>.jsonl        raw corpus, exactly as uploaded
    corpora/<name>.meta.json    content hash and counts
    cache/<fingerprint>.npz     cached (vocabulary, matrix) pairs
    runs/<run_id>.json          immutable run records

A run is a pure function of (corpus content hash, configuration), so
``run_id`` is a hash of both: resubmitting the identical configuration
hits the cache and returns the stored record.  Run files are append
only; writes are serialized through a single lock.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .corpus import Corpus, ingest_jsonl, segment
from .errors import PhraseSiftError
from .labeling import LabelingRule, QuerySet
from .pipeline import SnapshotSpec, build_matrix, run_summary, snapshot_series
from .select import SelectorConfig
from .vectorize import CountMatrix, load_count_matrix, save_count_matrix, units_fingerprint


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


@dataclass
class RunRecord:
    """Immutable record of one analysis run, sufficient to reproduce it."""

    run_id: str
    created_at: str
    corpus_name: str
    corpus_hash: str
    kind: str  # "summary" | "snapshot"
    config: dict
    status: str = "ok"
    messages: list[str] = field(default_factory=list)
    result: dict | None = None

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "corpus": {"name": self.corpus_name, "hash": self.corpus_hash},
            "kind": self.kind,
            "config": self.config,
            "status": self.status,
            "messages": self.messages,
            "result": self.result,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RunRecord":
        return cls(
            run_id=payload["run_id"],
            created_at=payload["created_at"],
            corpus_name=payload["corpus"]["name"],
            corpus_hash=payload["corpus"]["hash"],
            kind=payload["kind"],
            config=payload["config"],
            status=payload.get("status", "ok"),
            messages=payload.get("messages", []),
            result=payload.get("result"),
        )


def summary_config(
    query: QuerySet,
    rule: LabelingRule,
    unit_kind: str,
    scheme: str,
    selector: SelectorConfig,
    ngram_range: tuple[int, int] = (1, 3),
    min_df: int | None = None,
) -> dict:
    return {
        "kind": "summary",
        "query": query.to_dict(),
        "rule": {"kind": rule.kind, "k": rule.k},
        "unit_kind": unit_kind,
        "scheme": scheme,
        "selector": selector.to_dict(),
        "ngram_range": list(ngram_range),
        "min_df": min_df,
    }


class RunStore:
    """Filesystem store for corpora and their run history."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "corpora").mkdir(parents=True, exist_ok=True)
        (self.root / "cache").mkdir(parents=True, exist_ok=True)
        (self.root / "runs").mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._corpora: dict[str, Corpus] = {}

    # -- corpora ----------------------------------------------------------

    def corpus_path(self, name: str) -> Path:
        return self.root / "corpora" / f"{name}.jsonl"

    def add_corpus(self, name: str, jsonl_text: str) -> dict:
        if not name or "/" in name or name.startswith("."):
            raise PhraseSiftError(f"invalid corpus name {name!r}")
        content_hash = hashlib.sha256(jsonl_text.encode("utf-8")).hexdigest()
        path = self.corpus_path(name)
        if path.exists():
            # Corpora are immutable: runs reference their content hash.
            existing = self.corpus_meta(name)
            if existing["hash"] == content_hash:
                return existing
            raise PhraseSiftError(
                f"corpus {name!r} already exists with different content; pick a new name"
            )
        corpus = ingest_jsonl(jsonl_text.splitlines(), name=name)
        with self._write_lock:
            path.write_text(jsonl_text, encoding="utf-8")
            meta = {
                "name": name,
                "hash": content_hash,
                "n_documents": len(corpus),
                "n_ingest_errors": corpus.provenance.get("n_errors", 0),
                "created_at": datetime.now(timezone.utc).isoformat(),
            }
            (self.root / "corpora" / f"{name}.meta.json").write_text(
                json.dumps(meta, indent=2), encoding="utf-8"
            )
        self._corpora.pop(name, None)
        return meta

    def list_corpora(self) -> list[dict]:
        out = []
        for meta_path in sorted((self.root / "corpora").glob("*.meta.json")):
            out.append(json.loads(meta_path.read_text(encoding="utf-8")))
        return out

    def corpus_meta(self, name: str) -> dict:
        meta_path = self.root / "corpora" / f"{name}.meta.json"
        if not meta_path.exists():
            raise KeyError(name)
        return json.loads(meta_path.read_text(encoding="utf-8"))

    def load_corpus(self, name: str) -> Corpus:
        if name not in self._corpora:
            path = self.corpus_path(name)
            if not path.exists():
                raise KeyError(name)
            self._corpora[name] = ingest_jsonl(path, name=name)
        return self._corpora[name]

    def corpus_stats(self, name: str) -> dict:
        corpus = self.load_corpus(name)
        meta = self.corpus_meta(name)
        dates = corpus.date_range()
        return {
            "name": name,
            "hash": meta["hash"],
            "n_documents": len(corpus),
            "sources": corpus.sources(),
            "date_range": [d.isoformat() for d in dates] if dates else None,
        }

    # -- cached matrices ---------------------------------------------------

    def count_matrix(
        self, name: str, unit_kind: str, ngram_range: tuple[int, int], min_df: int | None
    ) -> CountMatrix:
        corpus = self.load_corpus(name)
        units = segment(corpus, unit_kind)
        fingerprint = units_fingerprint(units, ngram_range, min_df if min_df is not None else -1)
        cache_path = self.root / "cache" / f"{fingerprint}.npz"
        if cache_path.exists():
            return load_count_matrix(cache_path)
        counts = build_matrix(units, ngram_range, min_df, unit_kind)
        with self._write_lock:
            if not cache_path.exists():
                save_count_matrix(cache_path, counts)
        return counts

    # -- runs ---------------------------------------------------------------

    def run_path(self, run_id: str) -> Path:
        return self.root / "runs" / f"{run_id}.json"

    def get_run(self, run_id: str) -> RunRecord:
        path = self.run_path(run_id)
        if not path.exists():
            raise KeyError(run_id)
        return RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_runs(self) -> list[dict]:
        runs = []
        for path in (self.root / "runs").glob("*.json"):
            record = json.loads(path.read_text(encoding="utf-8"))
            runs.append(
                {
                    "run_id": record["run_id"],
                    "created_at": record["created_at"],
                    "corpus": record["corpus"],
                    "kind": record["kind"],
                    "status": record["status"],
                }
            )
        runs.sort(key=lambda r: r["created_at"])
        return runs

    def _save_run(self, record: RunRecord) -> None:
        with self._write_lock:
            path = self.run_path(record.run_id)
            if not path.exists():
                path.write_text(json.dumps(record.to_dict(), indent=2), encoding="utf-8")

    def _run_id(self, corpus_hash: str, config: dict) -> str:
        return config_hash({"corpus": corpus_hash, "config": config})[:16]

    def _execute(self, corpus_name: str, config: dict) -> tuple[str, list[str], dict]:
        kind = config["kind"]
        query = QuerySet.from_dict(config["query"])
        selector = SelectorConfig.from_dict(config["selector"])
        ngram_range = tuple(config.get("ngram_range", (1, 3)))
        min_df = config.get("min_df")
        if kind == "summary":
            counts = self.count_matrix(
                corpus_name, config["unit_kind"], ngram_range, min_df
            )
            summary = run_summary(
                counts,
                query,
                LabelingRule(**config["rule"]),
                config["scheme"],
                selector,
                unit_kind=config["unit_kind"],
            )
            status = "warning" if summary.warning else "ok"
            messages = [summary.warning] if summary.warning else []
            return status, messages, {"summary": summary.to_dict()}
        if kind == "snapshot":
            spec = SnapshotSpec.from_dict(config)
            corpus = self.load_corpus(corpus_name)
            results = snapshot_series(corpus, spec)
            errors = [r.error for r in results if r.error]
            status = "warning" if errors else "ok"
            return status, errors, {"snapshots": [r.to_dict() for r in results]}
        raise PhraseSiftError(f"unknown run kind {kind!r}")

    def submit(self, corpus_name: str, config: dict) -> tuple[RunRecord, bool]:
        """Run (or fetch) the configuration; returns (record, cache_hit)."""
        meta = self.corpus_meta(corpus_name)
        run_id = self._run_id(meta["hash"], config)
        path = self.run_path(run_id)
        if path.exists():
            return self.get_run(run_id), True
        try:
            status, messages, result = self._execute(corpus_name, config)
        except PhraseSiftError as exc:
            record = RunRecord(
                run_id=run_id,
                created_at=datetime.now(timezone.utc).isoformat(),
                corpus_name=corpus_name,
                corpus_hash=meta["hash"],
                kind=config.get("kind", "summary"),
                config=config,
                status="error",
                messages=[str(exc)],
                result=None,
            )
            self._save_run(record)
            return record, False
        record = RunRecord(
            run_id=run_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            corpus_name=corpus_name,
            corpus_hash=meta["hash"],
            kind=config["kind"],
            config=config,
            status=status,
            messages=messages,
            result=result,
        )
        self._save_run(record)
        return record, False

    def replay(self, run_id: str) -> RunRecord:
        """Re-execute a stored run's configuration from scratch (no cache)."""
        record = self.get_run(run_id)
        meta = self.corpus_meta(record.corpus_name)
        if meta["hash"] != record.corpus_hash:
            raise PhraseSiftError(
                f"corpus {record.corpus_name!r} changed since run {run_id} was recorded"
            )
        status, messages, result = self._execute(record.corpus_name, record.config)
        return RunRecord(
            run_id=record.run_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            corpus_name=record.corpus_name,
            corpus_hash=record.corpus_hash,
            kind=record.kind,
            config=record.config,
            status=status,
            messages=messages,
            result=result,
        )
