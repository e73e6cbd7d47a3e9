"""HTTP API over projects: transcripts, insertions, recommendations, search.

Each project persists as one JSON document in the data directory, written
via temp-file-plus-rename before the mutation is acknowledged, so a
restarted service always loads the last acknowledged state. Mutations carry
the caller's expected revision and fail with a conflict when stale
(compare-and-set; per-project lock serializes writers). Model, feature
space and expert-corpus artifacts reload automatically when their files
change; recommendation payloads are cached per (project, source, artifact
digest).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .agreement import probability_track, read_edit_sets
from .classifier import LinearModel
from .errors import (
    ConfigError,
    CutawayError,
    NotFoundError,
    RevisionConflictError,
    SourceUnconfiguredError,
)
from .features import FeatureSpace, load_sentiment_lexicon
from .providers import (
    ProviderRegistry,
    SearchRequest,
    fixture_providers_from_catalog,
)
from .recommend import (
    SOURCES,
    normalize,
    recommend_algorithmic,
    recommend_expert,
    recommend_interval,
)
from .session import BRollAsset, BRollInsertion, EditSession
from .transcript import (
    TimedTranscript,
    load_stopwords,
    parse_transcript,
    serialize_transcript,
)

PROJECT_FORMAT = "cutaway-project"
PROJECT_VERSION = 1

_STATUS_BY_CODE = {
    "bad_transcript": 422,
    "bad_editset": 422,
    "bad_artifact": 422,
    "time_out_of_range": 422,
    "stopword_input": 422,
    "dimension_mismatch": 409,
    "overlap": 409,
    "revision_conflict": 409,
    "bad_config": 409,
    "source_unconfigured": 409,
    "unknown_insertion": 404,
    "not_found": 404,
    "provider_error": 502,
    "provider_unreachable": 502,
    "provider_auth": 502,
}


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: str
    catalog_path: Optional[str] = None
    model_path: Optional[str] = None
    space_path: Optional[str] = None
    corpus_path: Optional[str] = None
    stopwords_path: Optional[str] = None
    sentiment_path: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8571

    _ENV = {
        "data_dir": "CUTAWAY_DATA_DIR",
        "catalog_path": "CUTAWAY_CATALOG",
        "model_path": "CUTAWAY_MODEL",
        "space_path": "CUTAWAY_SPACE",
        "corpus_path": "CUTAWAY_CORPUS",
        "stopwords_path": "CUTAWAY_STOPWORDS",
        "sentiment_path": "CUTAWAY_SENTIMENT",
        "host": "CUTAWAY_HOST",
        "port": "CUTAWAY_PORT",
    }

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "ServiceConfig":
        """Config file values, overridden by CUTAWAY_* environment vars."""
        doc: dict = {}
        if config_path:
            try:
                with open(config_path, encoding="utf-8") as fh:
                    doc = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {config_path!r}: {exc}") from exc
        values: dict = {}
        for name, env in cls._ENV.items():
            if name in doc:
                values[name] = doc[name]
            if env in os.environ:
                values[name] = os.environ[env]
        if "port" in values:
            values["port"] = int(values["port"])
        if "data_dir" not in values:
            raise ConfigError("data_dir is required (config file or CUTAWAY_DATA_DIR)")
        unknown = set(doc) - set(cls._ENV)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:12]


@dataclass
class Project:
    project_id: str
    media_url: str
    transcript: TimedTranscript
    session: EditSession
    created_at: str
    updated_at: str
    queries: list = field(default_factory=list)
    rec_cache: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "project_id": self.project_id,
            "media_url": self.media_url,
            "video_id": self.transcript.video_id,
            "duration_s": self.transcript.duration_s,
            "revision": self.session.revision,
            "transcript": serialize_transcript(self.transcript),
            "insertions": [ins.to_dict() for ins in self.session.insertions],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "query_count": len(self.queries),
        }

    def to_document(self) -> dict:
        return {
            "format": PROJECT_FORMAT,
            "version": PROJECT_VERSION,
            "project_id": self.project_id,
            "media_url": self.media_url,
            "transcript": serialize_transcript(self.transcript),
            "session": {
                "revision": self.session.revision,
                "next_seq": self.session._next_seq,
                "insertions": [ins.to_dict() for ins in self.session.insertions],
            },
            "queries": self.queries,
            "rec_cache": self.rec_cache,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "Project":
        transcript = parse_transcript(doc["transcript"])
        sess_doc = doc["session"]
        session = EditSession(
            video_id=transcript.video_id,
            duration_s=transcript.duration_s,
            session_id=doc["project_id"],
            revision=int(sess_doc["revision"]),
            next_seq=int(sess_doc["next_seq"]),
        )
        session.insertions = sorted(
            (BRollInsertion.from_dict(d) for d in sess_doc["insertions"]),
            key=lambda i: i.start_s,
        )
        return cls(
            project_id=doc["project_id"],
            media_url=doc.get("media_url", ""),
            transcript=transcript,
            session=session,
            created_at=doc.get("created_at", _now()),
            updated_at=doc.get("updated_at", _now()),
            queries=list(doc.get("queries", [])),
            rec_cache=dict(doc.get("rec_cache", {})),
        )


class ProjectStore:
    """Disk-backed project registry; one writer at a time per project."""

    def __init__(self, data_dir):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.data_dir.glob("*.json")):
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
            if doc.get("format") != PROJECT_FORMAT:
                continue
            project = Project.from_document(doc)
            self._projects[project.project_id] = project
            self._locks[project.project_id] = threading.Lock()

    def _path(self, project_id: str) -> Path:
        return self.data_dir / f"{project_id}.json"

    def _persist(self, project: Project):
        project.updated_at = _now()
        path = self._path(project.project_id)
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(project.to_document(), fh)
        os.replace(tmp, path)

    def create(self, transcript_doc, media_url: str = "") -> Project:
        transcript = parse_transcript(transcript_doc)
        with self._registry_lock:
            n = 1 + max(
                (int(pid.split("-")[1]) for pid in self._projects
                 if pid.startswith("p-")),
                default=0,
            )
            project_id = f"p-{n:04d}"
            session = EditSession(transcript.video_id, transcript.duration_s,
                                  session_id=project_id)
            project = Project(
                project_id=project_id, media_url=media_url,
                transcript=transcript, session=session,
                created_at=_now(), updated_at=_now(),
            )
            self._projects[project_id] = project
            self._locks[project_id] = threading.Lock()
        self._persist(project)
        return project

    def get(self, project_id: str) -> Project:
        project = self._projects.get(project_id)
        if project is None:
            raise NotFoundError(f"no project {project_id!r}")
        return project

    def mutate(self, project_id: str, expected_revision: int,
               op: Callable[[Project], object]):
        """Compare-and-set mutation: persist before acknowledging."""
        project = self.get(project_id)
        with self._locks[project_id]:
            if project.session.revision != expected_revision:
                raise RevisionConflictError(
                    f"expected revision {expected_revision}, "
                    f"project is at {project.session.revision}"
                )
            result = op(project)
            self._persist(project)
            return result, project.session.revision

    def annotate(self, project_id: str, op: Callable[[Project], object]):
        """Persist a non-revision change (analytics, caches)."""
        project = self.get(project_id)
        with self._locks[project_id]:
            result = op(project)
            self._persist(project)
            return result


class _ArtifactCache:
    """Reload-on-change file snapshot; value and digest swap atomically."""

    def __init__(self, loader: Callable[[str], object]):
        self._loader = loader
        self._lock = threading.Lock()
        self._path: Optional[str] = None
        self._mtime: Optional[float] = None
        self._value: object = None
        self._digest: str = ""

    def get(self, path: str) -> tuple[object, str]:
        mtime = os.stat(path).st_mtime_ns
        with self._lock:
            if path != self._path or mtime != self._mtime:
                self._value = self._loader(path)
                self._digest = _digest(path)
                self._path, self._mtime = path, mtime
            return self._value, self._digest


class CreateProjectBody(BaseModel):
    transcript: dict
    media_url: str = ""


class InsertBody(BaseModel):
    asset: dict
    expected_revision: int
    at_s: Optional[float] = None
    word_index: Optional[int] = None
    origin: str = "manual"


class PatchInsertionBody(BaseModel):
    expected_revision: int
    start_s: Optional[float] = None
    duration_s: Optional[float] = None


def create_app(config: ServiceConfig) -> FastAPI:
    store = ProjectStore(config.data_dir)
    stops = load_stopwords(config.stopwords_path)
    sentiment = load_sentiment_lexicon(config.sentiment_path)
    registry = ProviderRegistry()
    if config.catalog_path:
        for provider in fixture_providers_from_catalog(config.catalog_path):
            registry.register(provider)
    model_cache = _ArtifactCache(LinearModel.load)
    space_cache = _ArtifactCache(FeatureSpace.load)
    corpus_cache = _ArtifactCache(read_edit_sets)

    app = FastAPI(title="cutaway", version="0.1.0")
    app.state.store = store

    @app.exception_handler(CutawayError)
    async def _cutaway_error(_req: Request, exc: CutawayError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=exc.to_payload())

    @app.exception_handler(ValueError)
    async def _value_error(_req: Request, exc: ValueError):
        return JSONResponse(status_code=400,
                            content={"code": "bad_request", "message": str(exc)})

    def _rec_key(source: str) -> str:
        """Cache key: the digest of the artifacts the source depends on."""
        if source == "interval":
            return "interval-v1"
        if source == "algorithmic":
            if not (config.model_path and config.space_path):
                raise SourceUnconfiguredError(
                    "algorithmic recommendations need model_path and space_path"
                )
            _, model_digest = model_cache.get(config.model_path)
            _, space_digest = space_cache.get(config.space_path)
            return f"{model_digest}-{space_digest}"
        if source == "expert":
            if not config.corpus_path:
                raise SourceUnconfiguredError(
                    "expert recommendations need corpus_path"
                )
            _, corpus_digest = corpus_cache.get(config.corpus_path)
            return corpus_digest
        raise ValueError(f"source must be one of {SOURCES}")

    def _rec_compute(project: Project, source: str) -> list:
        doc = project.transcript
        if source == "interval":
            return recommend_interval(doc)
        if source == "algorithmic":
            model, _ = model_cache.get(config.model_path)
            space, _ = space_cache.get(config.space_path)
            return recommend_algorithmic(model, doc, space, sentiment, stops)
        edits, _ = corpus_cache.get(config.corpus_path)
        edits = [es for es in edits if es.video_id == doc.video_id]
        if not edits:
            raise SourceUnconfiguredError(
                f"expert corpus has no edits for video {doc.video_id!r}"
            )
        track = probability_track(edits, doc.duration_s)
        return recommend_expert(track, edits, doc)

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody):
        project = store.create(body.transcript, body.media_url)
        return project.to_payload()

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return store.get(project_id).to_payload()

    @app.get("/projects/{project_id}/recommendations")
    def get_recommendations(project_id: str, source: str,
                            limit: Optional[int] = Query(default=None, ge=1)):
        project = store.get(project_id)
        key = _rec_key(source)
        entry = project.rec_cache.get(source)
        if entry and entry.get("key") == key:
            items = entry["items"]
        else:
            recs = _rec_compute(project, source)
            items = [r.to_dict() for r in
                     normalize(recs, project.transcript.duration_s)]

            def _cache(p: Project):
                p.rec_cache[source] = {"key": key, "items": items}

            store.annotate(project_id, _cache)
        if limit is not None:
            items = items[:limit]
        return {"source": source, "items": items}

    @app.get("/projects/{project_id}/search")
    def search(project_id: str, q: str, style: str = "both",
               limit: int = Query(default=10, ge=1)):
        project = store.get(project_id)
        req = SearchRequest(query=q, style=style, limit=limit)
        result = registry.search(req)

        def _record(p: Project):
            p.queries.append({"q": q, "style": style, "at": _now()})

        store.annotate(project_id, _record)
        return {"query": q, "results": result.to_dict()}

    @app.post("/projects/{project_id}/insertions", status_code=201)
    def add_insertion(project_id: str, body: InsertBody):
        asset = BRollAsset.from_dict(body.asset)

        def _op(p: Project) -> str:
            if body.word_index is not None:
                return p.session.insert_at_word(asset, p.transcript,
                                                body.word_index, body.origin)
            if body.at_s is None:
                raise ValueError("need at_s or word_index")
            return p.session.insert(asset, body.at_s, body.origin)

        insertion_id, revision = store.mutate(project_id,
                                              body.expected_revision, _op)
        return {"insertion_id": insertion_id, "revision": revision}

    @app.patch("/projects/{project_id}/insertions/{insertion_id}")
    def patch_insertion(project_id: str, insertion_id: str,
                        body: PatchInsertionBody):
        if body.start_s is None and body.duration_s is None:
            raise ValueError("need start_s and/or duration_s")

        def _op(p: Project):
            if body.start_s is not None:
                p.session.move(insertion_id, body.start_s)
            if body.duration_s is not None:
                p.session.resize(insertion_id, body.duration_s)
            return p.session.get(insertion_id)

        insertion, revision = store.mutate(project_id,
                                           body.expected_revision, _op)
        return {"insertion": insertion.to_dict(), "revision": revision}

    @app.delete("/projects/{project_id}/insertions/{insertion_id}")
    def delete_insertion(project_id: str, insertion_id: str,
                         expected_revision: int):
        _, revision = store.mutate(
            project_id, expected_revision,
            lambda p: p.session.remove(insertion_id),
        )
        return {"revision": revision}

    @app.get("/projects/{project_id}/plan")
    def get_plan(project_id: str):
        return store.get(project_id).session.playback_plan().to_dict()

    @app.get("/projects/{project_id}/export")
    def export(project_id: str, format: str = "edl-json"):
        project = store.get(project_id)
        if format == "edl-json":
            return JSONResponse(content=project.session.to_edl())
        if format == "csv":
            return PlainTextResponse(content=project.session.to_csv(),
                                     media_type="text/csv")
        raise ValueError("format must be edl-json or csv")

    return app


def serve(config: ServiceConfig):  # pragma: no cover - thin uvicorn wrapper
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
