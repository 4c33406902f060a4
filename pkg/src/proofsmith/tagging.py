"""Part-of-speech tagging behind a tiny pluggable interface.

The bundled HeuristicTagger keeps the test suite hermetic: a closed-class
stoplist plus a verb lexicon and a handful of suffix rules. Anything not
caught by those is tagged as a noun, which is the right default for the
open-class vocabulary these pipelines see. A model-backed tagger can be
plugged in through the oracle's optional tag endpoint.
"""
from __future__ import annotations

from typing import NamedTuple

from .textops import as_text, normalize_tokens

TAGS = frozenset({"noun", "verb", "adjective", "other"})


class TokenTag(NamedTuple):
    token: str
    tag: str


# Function words: determiners, prepositions, pronouns, conjunctions,
# auxiliaries, negation. These never count as keywords.
CLOSED_CLASS = frozenset(
    """
    a an the this that these those some any no every each all both few many
    and or but nor so yet if then than as of in on at to for with by from
    into onto over under above below between behind near after before during
    up down out off about around through across along upon
    i you he she it we they me him her us them my your his its our their
    who whom whose which what when where why how there here
    is are was were be been being am do does did done doing have has had
    having will would can could shall should may might must
    not n't never none neither nothing nobody
    very too also just only even still again once twice
    """.split()
)

# Content verbs with their third-person singular forms. Both directions are
# needed: the tagger looks tokens up, the mock oracle's negation rule maps
# "runs" -> "does not run" and back.
VERB_FORMS: dict[str, str] = {
    "run": "runs",
    "walk": "walks",
    "move": "moves",
    "play": "plays",
    "perform": "performs",
    "eat": "eats",
    "drink": "drinks",
    "sleep": "sleeps",
    "chase": "chases",
    "throw": "throws",
    "catch": "catches",
    "ride": "rides",
    "drive": "drives",
    "jump": "jumps",
    "sit": "sits",
    "stand": "stands",
    "swim": "swims",
    "hold": "holds",
    "carry": "carries",
    "watch": "watches",
    "look": "looks",
    "see": "sees",
    "wear": "wears",
    "smile": "smiles",
    "laugh": "laughs",
    "sing": "sings",
    "dance": "dances",
    "climb": "climbs",
    "browse": "browses",
    "shop": "shops",
    "entertain": "entertains",
    "produce": "produces",
    "block": "blocks",
    "propel": "propels",
    "spit": "spits",
    "grab": "grabs",
    "keep": "keeps",
    "like": "likes",
    "use": "uses",
    "begin": "begins",
    "start": "starts",
    "stop": "stops",
    "win": "wins",
    "lose": "loses",
    "speak": "speaks",
    "talk": "talks",
    "read": "reads",
    "write": "writes",
    "cook": "cooks",
    "bake": "bakes",
    "paint": "paints",
    "fly": "flies",
}

THIRD_PERSON = {v: k for k, v in VERB_FORMS.items()}

_VERB_TOKENS = frozenset(VERB_FORMS) | frozenset(THIRD_PERSON)

_ADJECTIVES = frozenset(
    """
    black white red green blue brown yellow gray grey pink purple orange
    old young new big large small tall short long tiny huge
    happy glad sad angry tired hungry quick fast slow cold warm hot
    rough smooth soft hard loud quiet wet dry dark bright
    """.split()
)

_ADJ_SUFFIXES = ("ous", "ful", "ive", "less", "able", "ible", "ish")

# Common -ing nouns that the suffix rule would otherwise misfire on.
_ING_NOUNS = frozenset(
    "thing something nothing anything everything king ring wing spring "
    "string morning evening ceiling building painting".split()
)


class HeuristicTagger:
    """Deterministic rule tagger over normalize_tokens output.

    Rule order: closed class, verb lexicon, adjective lexicon, adjective
    suffix, -ing/-ed verb suffix, noun fallback.
    """

    id = "heuristic-v1"

    def tag(self, text: str) -> list[TokenTag]:
        return [TokenTag(tok, self._tag_one(tok)) for tok in normalize_tokens(as_text(text))]

    @staticmethod
    def _tag_one(token: str) -> str:
        if token in CLOSED_CLASS:
            return "other"
        if token in _VERB_TOKENS:
            return "verb"
        if token in _ADJECTIVES:
            return "adjective"
        if token.endswith(_ADJ_SUFFIXES) and len(token) > 4:
            return "adjective"
        if token.endswith("ing") and len(token) > 4 and token not in _ING_NOUNS:
            return "verb"
        if token.endswith("ed") and len(token) > 4:
            return "verb"
        return "noun"

    def nouns(self, text: str) -> list[str]:
        """Noun tokens in order of first appearance, deduplicated."""
        seen: set[str] = set()
        out: list[str] = []
        for tok, tag in self.tag(text):
            if tag == "noun" and tok not in seen:
                seen.add(tok)
                out.append(tok)
        return out


class RemoteTagger:
    """Tagger backed by an oracle client exposing a tag endpoint."""

    def __init__(self, oracle):
        self._oracle = oracle
        self.id = f"remote:{getattr(oracle, 'backend_id', 'oracle')}"

    def tag(self, text: str) -> list[TokenTag]:
        (tags,) = self._oracle.tag([as_text(text)])
        return [TokenTag(tok, tag) for tok, tag in tags]

    def nouns(self, text: str) -> list[str]:
        seen: set[str] = set()
        out: list[str] = []
        for tok, tag in self.tag(text):
            if tag == "noun" and tok not in seen:
                seen.add(tok)
                out.append(tok)
        return out
