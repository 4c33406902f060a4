"""Knowledge-base ingestion, exact cosine index, and pair-driven retrieval.

Fact files are UTF-8 text with one sentence per line; lines starting with
'#' are ignored. A file whose first data line contains a tab is read as
the TSV variant `kb_id<TAB>source<TAB>text`. The index is an exact
full-scan cosine index: desk-scale KBs make brute-force equivalence tests
cheap, so no approximate structure is used.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import EmptyKBError, InvalidInputError
from .textops import as_text, cosine

log = logging.getLogger(__name__)

CACHE_MAGIC = "proofsmith-kb-cache"
CACHE_VERSION = 1

KNOWN_SOURCES = ("OMCS", "GenericsKB", "other")


@dataclass(frozen=True)
class Fact:
    text: str
    source: str
    kb_id: str
    score: float = 0.0
    rank: int = 0


@dataclass(frozen=True)
class KeywordGroups:
    groups: tuple[tuple[str, ...], ...]

    def queries(self) -> list[str]:
        return [" ".join(group) for group in self.groups]


class KBIndex:
    """Immutable store of facts plus their unit-norm embedding rows."""

    def __init__(self, facts: list[Fact], embeddings: np.ndarray, embedder_id: str,
                 source_digest: str):
        if len(facts) != embeddings.shape[0]:
            raise InvalidInputError("fact count does not match embedding rows")
        norms = np.linalg.norm(embeddings, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-6):
            raise InvalidInputError("index rows must be unit-norm")
        self._facts = tuple(facts)
        self._embeddings = embeddings
        self._embeddings.setflags(write=False)
        self.embedder_id = embedder_id
        self.source_digest = source_digest

    def __len__(self) -> int:
        return len(self._facts)

    @property
    def facts(self) -> tuple[Fact, ...]:
        return self._facts

    @property
    def embeddings(self) -> np.ndarray:
        return self._embeddings

    @property
    def dimension(self) -> int:
        return int(self._embeddings.shape[1])


def _read_fact_lines(path: Path) -> list[tuple[str, str, str | None]]:
    """-> [(text, source, kb_id or None)] preserving file order."""
    lines = path.read_text(encoding="utf-8").splitlines()
    data = [ln.strip() for ln in lines]
    data = [ln for ln in data if ln and not ln.startswith("#")]
    if not data:
        return []
    out: list[tuple[str, str, str | None]] = []
    if "\t" in data[0]:
        for ln in data:
            parts = ln.split("\t")
            if len(parts) != 3:
                raise InvalidInputError(f"{path}: TSV fact lines need 3 fields, got {len(parts)}")
            kb_id, source, text = (p.strip() for p in parts)
            out.append((text, source if source in KNOWN_SOURCES else "other", kb_id))
    else:
        for ln in data:
            out.append((ln, "other", None))
    return out


def files_digest(paths: list[Path | str]) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
        digest.update(b"\x00")
    return digest.hexdigest()


def build_index(fact_files, embedder, cache_path: str | Path | None = None) -> KBIndex:
    """Load, deduplicate, and embed fact files into an index.

    Duplicate fact texts are dropped (first occurrence wins, so the first
    file's source/id are kept). When `cache_path` exists and matches the
    (file digest, embedder id) key, embeddings are loaded from it instead
    of calling the embedder; otherwise the cache is (re)written.
    """
    paths = [Path(p) for p in fact_files]
    for path in paths:
        if not path.is_file():
            raise FileNotFoundError(f"fact file not found: {path}")
    digest = files_digest(paths)

    facts: list[Fact] = []
    seen: set[str] = set()
    for path in paths:
        for position, (text, source, kb_id) in enumerate(_read_fact_lines(path)):
            if text in seen:
                continue
            seen.add(text)
            if kb_id is None:
                kb_id = f"{path.stem}-{position:06d}"
            facts.append(Fact(text=text, source=source, kb_id=kb_id))
    if not facts:
        raise EmptyKBError(f"no facts found in {', '.join(str(p) for p in paths)}")
    ids = [f.kb_id for f in facts]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("kb_id values must be unique across fact files")

    if cache_path is not None:
        cached = _load_cache(Path(cache_path), digest, getattr(embedder, "backend_id", "?"))
        if cached is not None:
            return KBIndex(facts, cached, getattr(embedder, "backend_id", "?"), digest)

    embeddings = np.asarray(embedder.embed([f.text for f in facts]), dtype=float)
    index = KBIndex(facts, embeddings, getattr(embedder, "backend_id", "?"), digest)
    if cache_path is not None:
        save_cache(index, Path(cache_path))
    return index


def save_cache(index: KBIndex, path: Path):
    meta = {
        "magic": CACHE_MAGIC,
        "version": CACHE_VERSION,
        "digest": index.source_digest,
        "embedder_id": index.embedder_id,
        "dim": index.dimension,
        "facts": [[f.kb_id, f.source, f.text] for f in index.facts],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.savez_compressed(fh, embeddings=index.embeddings, meta=np.array(json.dumps(meta)))
    log.info("wrote KB cache %s (%d facts)", path, len(index))


def _load_cache(path: Path, digest: str, embedder_id: str) -> np.ndarray | None:
    if not path.is_file():
        return None
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            if (meta.get("magic") != CACHE_MAGIC or meta.get("version") != CACHE_VERSION
                    or meta.get("digest") != digest or meta.get("embedder_id") != embedder_id):
                log.info("KB cache %s is stale, re-embedding", path)
                return None
            return np.asarray(data["embeddings"], dtype=float)
    except Exception as exc:  # corrupt cache is not fatal
        log.warning("ignoring unreadable KB cache %s: %s", path, exc)
        return None


def load_cached_index(path: str | Path) -> KBIndex:
    """Rebuild a full index from a cache file alone (texts are stored too)."""
    path = Path(path)
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("magic") != CACHE_MAGIC or meta.get("version") != CACHE_VERSION:
            raise InvalidInputError(f"{path} is not a KB cache file")
        facts = [Fact(text=text, source=source, kb_id=kb_id)
                 for kb_id, source, text in meta["facts"]]
        embeddings = np.asarray(data["embeddings"], dtype=float)
    return KBIndex(facts, embeddings, meta["embedder_id"], meta["digest"])


def extract_keywords(premise, hypothesis, tagger) -> tuple[list[str], list[str]]:
    """Noun tokens of each sentence, order-preserving and deduplicated."""
    return tagger.nouns(as_text(premise)), tagger.nouns(as_text(hypothesis))


def cluster_keywords(tokens: list[str], embedder, threshold: float = 0.45) -> KeywordGroups:
    """Greedy agglomerative grouping of keyword tokens.

    Tokens are scanned in order; each joins the first existing group whose
    centroid cosine reaches `threshold`, else opens a new group. The output
    always partitions the input tokens.
    """
    if not tokens:
        raise InvalidInputError("cluster_keywords requires at least one token")
    vectors = np.asarray(embedder.embed(list(tokens)), dtype=float)
    groups: list[list[str]] = []
    centroids: list[np.ndarray] = []
    members: list[list[np.ndarray]] = []
    for tok, vec in zip(tokens, vectors):
        placed = False
        for gi, centroid in enumerate(centroids):
            if cosine(vec, centroid) >= threshold:
                groups[gi].append(tok)
                members[gi].append(vec)
                centroids[gi] = np.mean(members[gi], axis=0)
                placed = True
                break
        if not placed:
            groups.append([tok])
            members.append([vec])
            centroids.append(vec.copy())
    return KeywordGroups(tuple(tuple(g) for g in groups))


def retrieve(index: KBIndex, query_text: str, k: int, embedder) -> list[Fact]:
    """Top-k facts by cosine to the query; ties break on kb_id ascending."""
    if len(index) == 0:
        raise EmptyKBError("cannot retrieve from an empty index")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    query = np.asarray(embedder.embed([query_text]), dtype=float)[0]
    query = query / np.linalg.norm(query)
    # Per-row dots keep tie scores bit-identical to any per-row recomputation.
    scores = [float(np.dot(row, query)) for row in index.embeddings]
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.facts[i].kb_id))
    out = []
    for rank, i in enumerate(order[:k], start=1):
        out.append(replace(index.facts[i], score=float(scores[i]), rank=rank))
    return out


def retrieve_for_pair(index: KBIndex, premise, hypothesis, k: int, embedder, tagger,
                      cluster_threshold: float = 0.45) -> list[Fact]:
    """Merge keyword retrieval and clustered-keyword retrieval.

    Strategy A queries with all premise+hypothesis nouns joined; strategy B
    issues one query per keyword cluster. Each query retrieves k facts; the
    union keeps the max score per fact and is re-ranked and cut to k. When
    no nouns are found at all, the full premise text is the fallback query.
    """
    n_p, n_h = extract_keywords(premise, hypothesis, tagger)
    keywords = n_p + [t for t in n_h if t not in n_p]
    if keywords:
        queries = [" ".join(keywords)]
        queries += cluster_keywords(keywords, embedder, cluster_threshold).queries()
    else:
        queries = [as_text(premise)]

    best: dict[str, Fact] = {}
    for query in queries:
        for fact in retrieve(index, query, k, embedder):
            prev = best.get(fact.kb_id)
            if prev is None or fact.score > prev.score:
                best[fact.kb_id] = fact
    merged = sorted(best.values(), key=lambda f: (-f.score, f.kb_id))[:k]
    return [replace(fact, rank=rank) for rank, fact in enumerate(merged, start=1)]
