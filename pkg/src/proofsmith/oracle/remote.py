"""HTTP client for a model sidecar speaking the wire protocol."""
from __future__ import annotations

import logging
import os
import time

import numpy as np
import requests

from ..errors import InvalidInputError, OracleUnavailableError, WireProtocolError
from ..textops import Sentence, as_text, normalized_text
from .base import Oracle, PairJudgment
from .modes import coerce_mode
from . import wire

log = logging.getLogger(__name__)

ORACLE_URL_ENV = "PROOFSMITH_ORACLE_URL"

DEFAULT_TIMEOUT = 60.0
RETRY_BACKOFF = 1.0


def resolve_url(explicit: str | None = None) -> str:
    url = explicit or os.environ.get(ORACLE_URL_ENV)
    if not url:
        raise InvalidInputError(
            f"no oracle URL: pass one explicitly or set {ORACLE_URL_ENV}"
        )
    return url.rstrip("/")


class RemoteOracle(Oracle):
    """Stateless JSON-over-HTTP client with one retry per request."""

    def __init__(self, base_url: str | None = None, timeout: float = DEFAULT_TIMEOUT,
                 default_beam: int = 10):
        self.base_url = resolve_url(base_url)
        self.timeout = timeout
        self.default_beam = default_beam
        self.backend_id = f"remote:{self.base_url}"
        self._session = requests.Session()
        self.embedding_dim = 0  # learned from the first embed reply

    def _post(self, path: str, payload: dict) -> dict:
        url = self.base_url + path
        last_error: Exception | None = None
        for attempt in range(2):
            if attempt:
                time.sleep(RETRY_BACKOFF * (2 ** (attempt - 1)))
            try:
                reply = self._session.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                log.warning("oracle call %s failed (attempt %d): %s", path, attempt + 1, exc)
                continue
            if reply.status_code >= 500:
                last_error = OracleUnavailableError(f"{url} -> {reply.status_code}")
                continue
            if reply.status_code != 200:
                raise WireProtocolError(f"{url} -> {reply.status_code}: {reply.text[:200]}")
            try:
                return reply.json()
            except ValueError as exc:
                raise WireProtocolError(f"{url} returned non-JSON body") from exc
        raise OracleUnavailableError(f"backend unreachable at {url}: {last_error}")

    def generate(self, mode, inputs, k):
        mode = coerce_mode(mode)
        if k < 1:
            raise InvalidInputError("k must be >= 1")
        beam = max(self.default_beam, k)
        payload = wire.generate_request(mode, [as_text(s) for s in inputs], beam, k)
        candidates = wire.parse_generate_reply(self._post(wire.GENERATE_PATH, payload))
        candidates.sort(key=lambda pair: -pair[1])
        seen: set[str] = set()
        out: list[Sentence] = []
        for text, _ in candidates:
            if not text.strip():
                continue
            key = normalized_text(text)
            if key not in seen:
                seen.add(key)
                out.append(Sentence(text))
            if len(out) == k:
                break
        return out

    def embed(self, texts):
        if not texts:
            raise InvalidInputError("embed requires a non-empty list of texts")
        payload = wire.embed_request([as_text(t) for t in texts])
        dim, vectors = wire.parse_embed_reply(self._post(wire.EMBED_PATH, payload))
        self.embedding_dim = dim
        rows = np.asarray(vectors, dtype=float)
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise WireProtocolError("backend returned a zero embedding")
        return rows / norms

    def judge_many(self, pairs) -> list[PairJudgment]:
        pairs = [(as_text(p), as_text(h)) for p, h in pairs]
        payload = wire.judge_request(pairs)
        triples = wire.parse_judge_reply(self._post(wire.JUDGE_PATH, payload))
        if len(triples) != len(pairs):
            raise WireProtocolError("judge reply length does not match request")
        out = []
        for (premise, hypothesis), (pe, pn, pc) in zip(pairs, triples):
            try:
                out.append(PairJudgment(premise, hypothesis, pe, pn, pc))
            except InvalidInputError as exc:
                raise WireProtocolError(str(exc)) from exc
        return out

    def tag(self, texts):
        payload = wire.tag_request(list(texts))
        return wire.parse_tag_reply(self._post(wire.TAG_PATH, payload))
