"""HTTP surface: the oracle wire protocol on one port.

Response payloads carry exactly the fields the protocol fixtures pin down;
anything extra (checkpoint ids, readiness) lives in GET /health.
"""
from __future__ import annotations

import logging

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServerConfig, dummy_config
from .engines import build_engine
from .prefixes import build_prompt

log = logging.getLogger("proofsmith_sidecar")


class GenerateRequest(BaseModel):
    mode: str
    inputs: list[str] = Field(min_length=1, max_length=2)
    beam: int = 10
    num_return: int = 10


class EmbedRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class JudgePair(BaseModel):
    premise: str
    hypothesis: str


class JudgeRequest(BaseModel):
    pairs: list[JudgePair] = Field(min_length=1)


class TagRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def load_roles(app: FastAPI):
    """Build every configured engine; any failure aborts with a role tag."""
    for role, entry in app.state.config.roles.items():
        app.state.engines[role] = build_engine(role, entry)
        log.info("loaded %s engine %s", role, getattr(app.state.engines[role],
                                                      "checkpoint_id", "?"))


def create_app(config: ServerConfig | None = None, preload: bool = True) -> FastAPI:
    config = config or dummy_config()
    app = FastAPI(title="proofsmith-sidecar")
    app.state.config = config
    app.state.engines = {}
    if preload:
        load_roles(app)

    def engine_for(role: str):
        return app.state.engines.get(role)

    @app.get("/health")
    def health():
        roles = {}
        for role, entry in config.roles.items():
            engine = engine_for(role)
            roles[role] = {
                "ready": engine is not None,
                "checkpoint": getattr(engine, "checkpoint_id", None)
                if engine is not None else entry.get("checkpoint"),
            }
        ready = all(info["ready"] for info in roles.values()) if roles else False
        return {"status": "ready" if ready else "loading", "roles": roles}

    @app.post("/v1/generate")
    def generate(request: GenerateRequest):
        role = "composer" if request.mode == "conclude" and engine_for("composer") \
            else "generator"
        engine = engine_for(role)
        if engine is None:
            return _error(503, f"{role} not ready")
        if request.beam < 1 or request.num_return < 1 or request.num_return > request.beam:
            return _error(400, "need 1 <= num_return <= beam")
        try:
            prompt = build_prompt(request.mode, request.inputs)
        except ValueError as exc:
            return _error(400, str(exc))
        candidates = engine.generate(prompt, request.beam, request.num_return)
        return {"candidates": [{"text": text, "score": score}
                               for text, score in candidates[: request.num_return]]}

    @app.post("/v1/embed")
    def embed(request: EmbedRequest):
        engine = engine_for("embedder")
        if engine is None:
            return _error(503, "embedder not ready")
        if len(request.texts) > config.max_batch:
            return _error(413, f"batch of {len(request.texts)} exceeds max "
                               f"{config.max_batch}")
        rows = np.asarray(engine.embed(request.texts), dtype=float)
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        rows = rows / norms
        if not np.allclose(np.linalg.norm(rows, axis=1), 1.0, atol=1e-6):
            return _error(500, "embedder produced non-unit vectors")
        return {"dim": int(rows.shape[1]), "vectors": rows.tolist()}

    @app.post("/v1/judge")
    def judge(request: JudgeRequest):
        engine = engine_for("judge")
        if engine is None:
            return _error(503, "judge not ready")
        if len(request.pairs) > config.max_batch:
            return _error(413, f"batch of {len(request.pairs)} exceeds max "
                               f"{config.max_batch}")
        triples = engine.judge([(p.premise, p.hypothesis) for p in request.pairs])
        return {"judgments": [
            {"p_entail": pe, "p_neutral": pn, "p_contradict": pc}
            for pe, pn, pc in triples
        ]}

    @app.post("/v1/tag")
    def tag(request: TagRequest):
        engine = engine_for("tagger")
        if engine is None:
            return _error(503, "tagger not ready")
        if len(request.texts) > config.max_batch:
            return _error(413, f"batch of {len(request.texts)} exceeds max "
                               f"{config.max_batch}")
        return {"tags": engine.tag(request.texts)}

    return app
