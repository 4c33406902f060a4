"""Oracle interface shared by the mock and the remote client."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..textops import Sentence
from .modes import GenerationMode

# Argmax ties resolve in this order.
LABEL_ORDER = ("entail", "neutral", "contradict")

#: Judge label -> NLI dataset label.
JUDGE_TO_NLI = {"entail": "entailment", "neutral": "neutral", "contradict": "contradiction"}


@dataclass(frozen=True)
class PairJudgment:
    """Entailment/neutral/contradiction probabilities for a sentence pair."""

    premise: str
    hypothesis: str
    p_entail: float
    p_neutral: float
    p_contradict: float
    label: str = field(init=False)

    def __post_init__(self):
        probs = (self.p_entail, self.p_neutral, self.p_contradict)
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-4:
            raise InvalidInputError(f"judgment probabilities must form a distribution: {probs}")
        best = max(zip(probs, range(3), LABEL_ORDER), key=lambda t: (t[0], -t[1]))
        object.__setattr__(self, "label", best[2])


class Oracle:
    """Abstract access to the neural capabilities.

    Implementations must be safe to share across threads; every call is an
    independent request with no mutable client state.
    """

    backend_id: str = "abstract"
    embedding_dim: int = 0

    def generate(
        self,
        mode: GenerationMode | str,
        inputs: list[str | Sentence],
        k: int,
    ) -> list[Sentence]:
        """Up to k candidates ordered by decoding score, deduplicated."""
        raise NotImplementedError

    def embed(self, texts: list[str | Sentence]) -> np.ndarray:
        """One L2-normalized row per input text."""
        raise NotImplementedError

    def judge(self, premise: str | Sentence, hypothesis: str | Sentence) -> PairJudgment:
        return self.judge_many([(premise, hypothesis)])[0]

    def judge_many(self, pairs) -> list[PairJudgment]:
        raise NotImplementedError

    def compose(self, s1: str | Sentence, s2: str | Sentence) -> Sentence:
        """Top composition of two sentences; raises CompositionFailedError
        when the backend returns no candidates."""
        from ..errors import CompositionFailedError

        candidates = self.generate(GenerationMode.CONCLUDE, [s1, s2], 1)
        if not candidates:
            raise CompositionFailedError(f"no composition for ({s1!r}, {s2!r})")
        return candidates[0]

    def tag(self, texts: list[str]) -> list[list[tuple[str, str]]]:
        """Optional tagging capability; backends may not support it."""
        raise NotImplementedError(f"{self.backend_id} has no tagger")
