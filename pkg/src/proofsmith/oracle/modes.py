"""Generation modes and their input-prefix strings.

Each mode maps to exactly one prefix; the mapping is bijective and is the
single place in the client where prefixes are defined. Servers apply the
prefix themselves, so clients only ever send the bare mode name plus the
input texts (two-input modes send two separate strings; the server joins
them with the separator token).
"""
from __future__ import annotations

from enum import Enum

from ..errors import InvalidInputError

SEPARATOR = "<sep>"


class GenerationMode(str, Enum):
    ENTAIL = "entail"
    CONTRADICT = "contradict"
    NEUTRAL = "neutral"
    MONOTONIC = "monotonic"
    CONCLUDE = "conclude"
    EXPLAIN = "explain"
    PROOF = "proof"


MODE_PREFIXES: dict[GenerationMode, str] = {
    GenerationMode.ENTAIL: "entail: ",
    GenerationMode.CONTRADICT: "contradict: ",
    GenerationMode.NEUTRAL: "neutral: ",
    GenerationMode.MONOTONIC: "monotonic: ",
    GenerationMode.CONCLUDE: "conclude: ",
    GenerationMode.EXPLAIN: "explain: ",
    GenerationMode.PROOF: "proof: ",
}

#: Modes whose input is a sentence pair joined by SEPARATOR server-side.
TWO_INPUT_MODES = frozenset(
    {GenerationMode.CONCLUDE, GenerationMode.EXPLAIN, GenerationMode.PROOF}
)


def coerce_mode(mode: str | GenerationMode) -> GenerationMode:
    try:
        return GenerationMode(mode)
    except ValueError:
        raise InvalidInputError(f"unknown generation mode: {mode!r}") from None


def expected_arity(mode: GenerationMode) -> int:
    return 2 if mode in TWO_INPUT_MODES else 1


def mode_for_prefix(prefix: str) -> GenerationMode:
    """Inverse of MODE_PREFIXES; raises on unknown prefixes."""
    for mode, pfx in MODE_PREFIXES.items():
        if pfx == prefix:
            return mode
    raise InvalidInputError(f"unknown mode prefix: {prefix!r}")
