"""Wire-level payloads for the model sidecar.

Field names and shapes are normative and golden-file tested; change them
only together with the fixtures under tests/data/wire/.
"""
from __future__ import annotations

from ..errors import InvalidInputError, WireProtocolError
from .modes import GenerationMode, coerce_mode, expected_arity

GENERATE_PATH = "/v1/generate"
EMBED_PATH = "/v1/embed"
JUDGE_PATH = "/v1/judge"
TAG_PATH = "/v1/tag"
HEALTH_PATH = "/health"


def generate_request(mode: GenerationMode | str, inputs: list[str], beam: int, num_return: int) -> dict:
    mode = coerce_mode(mode)
    if beam < 1 or num_return < 1 or num_return > beam:
        raise InvalidInputError("need 1 <= num_return <= beam")
    if len(inputs) != expected_arity(mode):
        raise InvalidInputError(
            f"mode {mode.value} expects {expected_arity(mode)} input(s), got {len(inputs)}"
        )
    return {"mode": mode.value, "inputs": list(inputs), "beam": beam, "num_return": num_return}


def embed_request(texts: list[str]) -> dict:
    if not texts:
        raise InvalidInputError("embed requires at least one text")
    return {"texts": list(texts)}


def judge_request(pairs: list[tuple[str, str]]) -> dict:
    if not pairs:
        raise InvalidInputError("judge requires at least one pair")
    return {"pairs": [{"premise": p, "hypothesis": h} for p, h in pairs]}


def tag_request(texts: list[str]) -> dict:
    if not texts:
        raise InvalidInputError("tag requires at least one text")
    return {"texts": list(texts)}


def _require(payload: dict, key: str, kind: type):
    if not isinstance(payload, dict) or key not in payload:
        raise WireProtocolError(f"reply missing field {key!r}: {payload!r}")
    value = payload[key]
    if not isinstance(value, kind):
        raise WireProtocolError(f"field {key!r} has wrong type: {value!r}")
    return value


def parse_generate_reply(payload: dict) -> list[tuple[str, float]]:
    """-> [(text, score), ...] in reply order."""
    candidates = _require(payload, "candidates", list)
    out = []
    for item in candidates:
        text = _require(item, "text", str)
        score = _require(item, "score", (int, float))
        out.append((text, float(score)))
    return out


def parse_embed_reply(payload: dict) -> tuple[int, list[list[float]]]:
    dim = _require(payload, "dim", int)
    vectors = _require(payload, "vectors", list)
    for vec in vectors:
        if not isinstance(vec, list) or len(vec) != dim:
            raise WireProtocolError(f"embedding row does not match dim={dim}")
    return dim, vectors


def parse_judge_reply(payload: dict) -> list[tuple[float, float, float]]:
    judgments = _require(payload, "judgments", list)
    out = []
    for item in judgments:
        triple = tuple(_require(item, key, (int, float))
                       for key in ("p_entail", "p_neutral", "p_contradict"))
        out.append(triple)
    return out


def parse_tag_reply(payload: dict) -> list[list[tuple[str, str]]]:
    tags = _require(payload, "tags", list)
    out = []
    for sentence_tags in tags:
        if not isinstance(sentence_tags, list):
            raise WireProtocolError("tags entries must be lists")
        pairs = []
        for pair in sentence_tags:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise WireProtocolError(f"bad tag pair: {pair!r}")
            pairs.append((str(pair[0]), str(pair[1])))
        out.append(pairs)
    return out
