"""Inference engines behind the HTTP endpoints.

Each role (generator, composer, embedder, judge, tagger) is served by one
engine object. The `dummy` engines are deterministic stand-ins that let
the server run hermetically (wire-conformance tests, local development);
checkpoint-backed engines live in hf.py and are loaded lazily.
"""
from __future__ import annotations

import hashlib
import re

import numpy as np

from .prefixes import PREFIXES, SEPARATOR, TWO_INPUT_MODES

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class DummyGenerator:
    """Rule-based seq2seq stand-in: pure function of the prompt."""

    def __init__(self, checkpoint: str = "dummy-generator"):
        self.checkpoint_id = checkpoint

    def _strip(self, prompt: str) -> tuple[str, list[str]]:
        for mode, prefix in PREFIXES.items():
            if prompt.startswith(prefix):
                rest = prompt[len(prefix):]
                parts = [p.strip() for p in rest.split(SEPARATOR)]
                return mode, parts
        return "entail", [prompt]

    def generate(self, prompt: str, beam: int, num_return: int) -> list[tuple[str, float]]:
        mode, parts = self._strip(prompt)
        text = parts[0]
        if mode in ("entail", "monotonic"):
            outs = [f"it follows that {text}", f"{text} for sure"]
        elif mode == "contradict":
            outs = [f"it is not the case that {text}"]
        elif mode == "neutral":
            outs = [f"{text} perhaps", f"{text} somewhere"]
        elif mode in TWO_INPUT_MODES and len(parts) == 2:
            outs = [f"{parts[0]} and so {parts[1]}"]
        else:
            outs = [text]
        outs = outs[: min(beam, num_return)]
        return [(out, -0.1 * (i + 1)) for i, out in enumerate(outs)]


class DummyEmbedder:
    """Hashed bag-of-words embedder, L2-normalized."""

    def __init__(self, checkpoint: str = "dummy-embedder", dim: int = 16):
        self.checkpoint_id = checkpoint
        self.dim = dim

    def embed(self, texts: list[str]) -> np.ndarray:
        rows = np.zeros((len(texts), self.dim))
        for r, text in enumerate(texts):
            for tok in _tokens(text) or ["<empty>"]:
                bucket = int(hashlib.md5(tok.encode()).hexdigest(), 16) % self.dim
                rows[r, bucket] += 1.0
        return rows / np.linalg.norm(rows, axis=1, keepdims=True)


class DummyJudge:
    """Token-overlap NLI stand-in returning a valid distribution."""

    def __init__(self, checkpoint: str = "dummy-judge"):
        self.checkpoint_id = checkpoint

    def judge(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        out = []
        for premise, hypothesis in pairs:
            p, h = set(_tokens(premise)), set(_tokens(hypothesis))
            negated = ("not" in p) != ("not" in h)
            overlap = len(p & h) / len(p | h) if p | h else 0.0
            if negated and overlap > 0.3:
                out.append((0.05, 0.10, 0.85))
            elif h and h <= p or overlap > 0.7:
                out.append((0.85, 0.10, 0.05))
            else:
                out.append((0.10, 0.80, 0.10))
        return out


_STOP = frozenset(
    "a an the this that these those and or but if then of in on at to for with by "
    "from is are was were be been am do does did has have had will would can could "
    "not no never it its he she they them we you i".split()
)

_VERB_SUFFIXES = ("ing", "ed", "ifies", "izes")
_COMMON_VERBS = frozenset(
    "runs walks plays eats sleeps jumps moves holds throws rides chases sees looks "
    "watches sits stands swims sings reads writes run walk play eat sleep jump move "
    "hold throw ride chase see look watch sit stand swim sing read write".split()
)
_ADJ_SUFFIXES = ("ous", "ful", "ive", "less", "able", "ible", "ish")


class HeuristicTagger:
    """Suffix/stoplist tagger for the optional tag endpoint."""

    checkpoint_id = "heuristic-tagger"

    def tag(self, texts: list[str]) -> list[list[list[str]]]:
        out = []
        for text in texts:
            tags = []
            for tok in _tokens(text):
                if tok in _STOP:
                    tag = "other"
                elif tok in _COMMON_VERBS or (tok.endswith(_VERB_SUFFIXES) and len(tok) > 4):
                    tag = "verb"
                elif tok.endswith(_ADJ_SUFFIXES) and len(tok) > 4:
                    tag = "adjective"
                else:
                    tag = "noun"
                tags.append([tok, tag])
            out.append(tags)
        return out


def build_engine(role: str, entry: dict):
    """Instantiate one engine from its config entry.

    Raises RuntimeError tagged with the role when loading fails, so a bad
    checkpoint aborts startup with a pointed message.
    """
    kind = entry.get("engine", "dummy")
    checkpoint = entry.get("checkpoint", f"dummy-{role}")
    try:
        if kind == "dummy":
            if role in ("generator", "composer"):
                return DummyGenerator(checkpoint)
            if role == "embedder":
                return DummyEmbedder(checkpoint, dim=int(entry.get("dim", 16)))
            if role == "judge":
                return DummyJudge(checkpoint)
            if role == "tagger":
                return HeuristicTagger()
            raise ValueError(f"unknown role {role!r}")
        if kind == "heuristic" and role == "tagger":
            return HeuristicTagger()
        if kind == "hf":
            from . import hf

            device = entry.get("device", "cpu")
            if role in ("generator", "composer"):
                return hf.HFGenerator(checkpoint, device)
            if role == "embedder":
                return hf.HFEmbedder(checkpoint, device)
            if role == "judge":
                return hf.HFJudge(checkpoint, device)
            raise ValueError(f"role {role!r} has no hf engine")
        raise ValueError(f"unknown engine kind {kind!r}")
    except Exception as exc:
        raise RuntimeError(f"[{role}] failed to load {kind}:{checkpoint}: {exc}") from exc
