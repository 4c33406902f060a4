"""Deterministic mock backend driven by a hand-authored lexicon.

The mock exists so every search and metric behavior can be tested without
model weights: identical requests always produce identical responses, and
every rule is simple enough to brute-force in a test.

Rule tables
-----------
generate(entail)     one candidate per applicable rewrite: hypernym
                     substitutions first (left-to-right token order), then
                     synonym substitutions. Articles a/an are fixed up.
generate(monotonic)  hypernym substitutions only.
generate(contradict) negation insertion: "not" after the first copula,
                     else "does not <lemma>" for the first known verb,
                     else the prefix "it is not true that".
generate(neutral)    the input plus an unverifiable adjunct from a fixed
                     pool, in pool order.
generate(conclude)   template rules, tried in order on both argument
                     orders: (1) "X is a Y" fact substitutes X -> Y in the
                     other sentence; (2) "all A ... are B" rewrites a host
                     "Z is A" to "Z is B"; (3) subject-verb-object
                     bridging: "S v1 ... O", "O v2 T" -> "S v2 T".
generate(explain)    a linking fact "a X is a Y" for the first premise
generate(proof)      token whose hypernym appears in the second input.
embed                hashed bag of words: every token adds one unit on its
                     own bucket and one on its lexical-class bucket, then
                     the sum is L2-normalized. Articles (a/an/the) are
                     skipped so surface rewrites do not perturb closeness;
                     an all-article text falls back to its raw tokens.
                     Classes are the connected components of the
                     hypernym/synonym/related graph, so related words
                     share a component and score higher.
judge                (1) equal normalized text -> entail; (2) a negated
                     hypothesis whose stripped form is entailed ->
                     contradict; (3) same for a negated premise; (4)
                     every open-class hypothesis token reachable from a
                     premise token through the lexicon -> entail;
                     (5) otherwise neutral.

All emitted text is lowercase token-joined, so candidates are already in
normalized form.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..tagging import VERB_FORMS, THIRD_PERSON, CLOSED_CLASS, HeuristicTagger
from ..textops import Sentence, as_text, normalize_tokens
from .base import Oracle, PairJudgment
from .modes import GenerationMode, coerce_mode, expected_arity

_VOWELS = "aeiou"
_COPULAS = ("is", "are", "was", "were")
_NOT_PREFIX = ("it", "is", "not", "true", "that")

# Closed-class words the judge may ignore; negation words stay significant.
_IGNORABLE = frozenset(CLOSED_CLASS) - {
    "not", "n't", "never", "no", "none", "neither", "nothing", "nobody",
}

_JUDGE_PROBS = {
    "entail": (0.92, 0.05, 0.03),
    "neutral": (0.08, 0.87, 0.05),
    "contradict": (0.03, 0.05, 0.92),
}


@dataclass(frozen=True)
class Lexicon:
    """Rewrite knowledge for the mock: all tables are token-level."""

    hypernyms: dict[str, str] = field(default_factory=dict)
    synonyms: tuple[tuple[str, str], ...] = ()
    related: tuple[tuple[str, ...], ...] = ()
    neutral_adjuncts: tuple[str, ...] = (
        "at dawn",
        "on a tuesday",
        "near a tall tree",
        "before breakfast",
    )

    def fingerprint(self) -> str:
        blob = repr((sorted(self.hypernyms.items()), self.synonyms, self.related,
                     self.neutral_adjuncts))
        return hashlib.md5(blob.encode("utf-8")).hexdigest()[:8]

    def synonym_map(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for a, b in self.synonyms:
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
        for k in out:
            out[k] = sorted(set(out[k]))
        return out

    def classes(self) -> dict[str, str]:
        """Token -> class key (smallest member of its connected component).

        Components join tokens linked by a hypernym edge, a synonym pair,
        a verb-form pair, or membership in one `related` group.
        """
        parent: dict[str, str] = {}

        def find(x: str) -> str:
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str):
            ra, rb = find(a), find(b)
            if ra != rb:
                # Deterministic representative: lexicographically smaller root.
                lo, hi = sorted((ra, rb))
                parent[hi] = lo

        for a, b in self.hypernyms.items():
            union(a, b)
        for a, b in self.synonyms:
            union(a, b)
        for lemma, third in VERB_FORMS.items():
            union(lemma, third)
        for group in self.related:
            for tok in group[1:]:
                union(group[0], tok)
        return {tok: find(tok) for tok in list(parent)}


def default_lexicon() -> Lexicon:
    return Lexicon(
        hypernyms={
            "puppy": "dog",
            "kitten": "cat",
            "dog": "animal",
            "cat": "animal",
            "sparrow": "bird",
            "bird": "animal",
            "animal": "creature",
            "guitar": "instrument",
            "piano": "instrument",
            "violin": "instrument",
            "guitarist": "musician",
            "drummer": "musician",
            "musician": "person",
            "woman": "person",
            "man": "person",
            "girl": "child",
            "boy": "child",
            "child": "person",
            "person": "human",
            "frisbee": "toy",
            "ball": "toy",
            "doll": "toy",
            "toy": "object",
            "bicycle": "vehicle",
            "car": "vehicle",
            "truck": "vehicle",
            "vehicle": "machine",
            "apple": "food",
            "sandwich": "food",
            "bread": "food",
            "sofa": "furniture",
            "chair": "furniture",
            "cottage": "house",
            "house": "building",
            "oak": "tree",
            "tree": "plant",
            "runs": "moves",
            "walks": "moves",
            "jumps": "moves",
            "swims": "moves",
        },
        synonyms=(
            ("kid", "child"),
            ("fast", "quick"),
            ("big", "large"),
            ("small", "little"),
            ("rock", "stone"),
            ("street", "road"),
            ("photo", "picture"),
            ("happy", "glad"),
            ("sofa", "couch"),
            ("begins", "starts"),
            ("speaks", "talks"),
        ),
        related=(
            ("snow", "cold", "winter", "ice"),
            ("frisbee", "plastic"),
            ("beach", "sand", "ocean"),
            ("market", "shopping", "store"),
        ),
    )


def _fix_articles(tokens: list[str]) -> list[str]:
    out = list(tokens)
    for i in range(len(out) - 1):
        if out[i] in ("a", "an"):
            out[i] = "an" if out[i + 1][0] in _VOWELS else "a"
    return out


def _substitute(tokens: list[str], index: int, replacement: str) -> str:
    out = list(tokens)
    out[index] = replacement
    return " ".join(_fix_articles(out))


class MockOracle(Oracle):
    """Pure-function backend over a Lexicon; see the module rule tables."""

    def __init__(self, lexicon: Lexicon | None = None, dim: int = 256):
        self.lexicon = lexicon if lexicon is not None else default_lexicon()
        self.embedding_dim = dim
        self.backend_id = f"mock-v1-{self.lexicon.fingerprint()}"
        self._classes = self.lexicon.classes()
        self._synonyms = self.lexicon.synonym_map()
        self._tagger = HeuristicTagger()
        self._closure_cache: dict[str, frozenset[str]] = {}

    # -- generation --------------------------------------------------

    def generate(self, mode, inputs, k):
        mode = coerce_mode(mode)
        if k < 1:
            raise InvalidInputError("k must be >= 1")
        texts = [as_text(s) for s in inputs]
        if len(texts) != expected_arity(mode):
            raise InvalidInputError(
                f"mode {mode.value} expects {expected_arity(mode)} input(s), got {len(texts)}"
            )
        if mode in (GenerationMode.ENTAIL, GenerationMode.MONOTONIC):
            texts_out = self._rewrites(texts[0], with_synonyms=mode is GenerationMode.ENTAIL)
        elif mode is GenerationMode.CONTRADICT:
            texts_out = [self._negate(texts[0])]
        elif mode is GenerationMode.NEUTRAL:
            base = " ".join(normalize_tokens(texts[0]))
            texts_out = [f"{base} {adj}" for adj in self.lexicon.neutral_adjuncts]
        elif mode is GenerationMode.CONCLUDE:
            texts_out = self._conclude(texts[0], texts[1])
        else:  # explain / proof: a linking fact between the two inputs
            texts_out = self._linking_facts(texts[0], texts[1])
        seen: set[str] = set()
        out: list[Sentence] = []
        for text in texts_out:
            if text and text not in seen:
                seen.add(text)
                out.append(Sentence(text))
            if len(out) == k:
                break
        return out

    def _rewrites(self, text: str, with_synonyms: bool) -> list[str]:
        tokens = normalize_tokens(text)
        out: list[str] = []
        for i, tok in enumerate(tokens):
            if tok in self.lexicon.hypernyms:
                out.append(_substitute(tokens, i, self.lexicon.hypernyms[tok]))
        if with_synonyms:
            for i, tok in enumerate(tokens):
                for alt in self._synonyms.get(tok, ()):
                    out.append(_substitute(tokens, i, alt))
        return out

    def _negate(self, text: str) -> str:
        tokens = normalize_tokens(text)
        for i, tok in enumerate(tokens):
            if tok in _COPULAS:
                return " ".join(tokens[: i + 1] + ["not"] + tokens[i + 1 :])
        for i, tok in enumerate(tokens):
            if tok in THIRD_PERSON:
                return " ".join(tokens[:i] + ["does", "not", THIRD_PERSON[tok]] + tokens[i + 1 :])
        return " ".join(list(_NOT_PREFIX) + tokens)

    @staticmethod
    def _strip_negation(tokens: list[str]) -> list[str] | None:
        if tuple(tokens[:5]) == _NOT_PREFIX and len(tokens) > 5:
            return tokens[5:]
        for i in range(len(tokens) - 1):
            if tokens[i] in _COPULAS and tokens[i + 1] == "not":
                return tokens[:i + 1] + tokens[i + 2:]
        for i in range(len(tokens) - 2):
            if tokens[i] == "does" and tokens[i + 1] == "not" and tokens[i + 2] in VERB_FORMS:
                return tokens[:i] + [VERB_FORMS[tokens[i + 2]]] + tokens[i + 3:]
        return None

    # conclude helpers

    @staticmethod
    def _parse_isa(tokens: list[str]) -> tuple[str, str] | None:
        """Match "(a|an)? X (is|are) (a|an)? Y"."""
        toks = [t for t in tokens if t not in ("a", "an")]
        if len(toks) == 3 and toks[1] in ("is", "are"):
            return toks[0], toks[2]
        return None

    @staticmethod
    def _parse_all_rule(tokens: list[str]) -> tuple[str, str] | None:
        """Match "all A (people|men|women|things)? are B"."""
        if len(tokens) >= 4 and tokens[0] == "all" and tokens[-2] == "are":
            middle = tokens[1:-2]
            if middle and middle[-1] in ("people", "men", "women", "things"):
                middle = middle[:-1]
            if len(middle) == 1:
                return middle[0], tokens[-1]
        return None

    @staticmethod
    def _split_svo(tokens: list[str]) -> tuple[list[str], str, list[str]] | None:
        for i, tok in enumerate(tokens):
            if tok in THIRD_PERSON or tok in VERB_FORMS:
                subj, obj = tokens[:i], tokens[i + 1 :]
                if subj and obj:
                    return subj, tok, obj
        return None

    @staticmethod
    def _head(tokens: list[str]) -> str | None:
        for tok in reversed(tokens):
            if tok not in CLOSED_CLASS:
                return tok
        return None

    def _conclude(self, a: str, b: str) -> list[str]:
        ta, tb = normalize_tokens(a), normalize_tokens(b)
        out: list[str] = []
        for fact, host in ((ta, tb), (tb, ta)):
            isa = self._parse_isa(fact)
            if isa and isa[0] in host:
                out.append(_substitute(host, host.index(isa[0]), isa[1]))
        for rule, host in ((ta, tb), (tb, ta)):
            parsed = self._parse_all_rule(rule)
            if parsed and len(host) == 3 and host[1] == "is" and host[2] == parsed[0]:
                out.append(" ".join([host[0], "is", parsed[1]]))
        for s1, s2 in ((ta, tb), (tb, ta)):
            first, second = self._split_svo(s1), self._split_svo(s2)
            if first and second:
                subj1, _, obj1 = first
                subj2, verb2, obj2 = second
                head2 = self._head(subj2)
                if head2 and head2 in obj1:
                    head1 = self._head(subj1)
                    plural = bool(head1) and head1.endswith("s")
                    verb = THIRD_PERSON.get(verb2, verb2) if plural else verb2
                    out.append(" ".join(subj1 + [verb] + obj2))
        return out

    def _linking_facts(self, a: str, b: str) -> list[str]:
        ta, tb = normalize_tokens(a), set(normalize_tokens(b))
        out = []
        for tok in ta:
            hyper = self.lexicon.hypernyms.get(tok)
            if hyper and hyper in tb:
                art_x = "an" if tok[0] in _VOWELS else "a"
                art_y = "an" if hyper[0] in _VOWELS else "a"
                out.append(f"{art_x} {tok} is {art_y} {hyper}")
        return out

    # -- embedding ---------------------------------------------------

    def _bucket(self, key: str) -> int:
        digest = hashlib.md5(key.encode("utf-8")).hexdigest()
        return int(digest, 16) % self.embedding_dim

    _EMBED_SKIP = frozenset({"a", "an", "the"})

    def embed(self, texts):
        if not texts:
            raise InvalidInputError("embed requires a non-empty list of texts")
        rows = np.zeros((len(texts), self.embedding_dim), dtype=float)
        for r, text in enumerate(texts):
            tokens = normalize_tokens(as_text(text))
            content = [t for t in tokens if t not in self._EMBED_SKIP]
            for tok in content or tokens:
                rows[r, self._bucket("t:" + tok)] += 1.0
                rows[r, self._bucket("c:" + self._classes.get(tok, tok))] += 1.0
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        return rows / norms

    # -- judging -----------------------------------------------------

    def _closure(self, token: str) -> frozenset[str]:
        """Tokens reachable through synonym (both ways) and hypernym (up)
        edges, including the token itself."""
        cached = self._closure_cache.get(token)
        if cached is not None:
            return cached
        frontier, seen = [token], {token}
        while frontier:
            tok = frontier.pop()
            neighbors = list(self._synonyms.get(tok, ()))
            if tok in self.lexicon.hypernyms:
                neighbors.append(self.lexicon.hypernyms[tok])
            if tok in VERB_FORMS:
                neighbors.append(VERB_FORMS[tok])
            if tok in THIRD_PERSON:
                neighbors.append(THIRD_PERSON[tok])
            for nxt in neighbors:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        result = frozenset(seen)
        self._closure_cache[token] = result
        return result

    def _core_entails(self, ptoks: list[str], htoks: list[str]) -> bool:
        reachable: set[str] = set()
        for tok in ptoks:
            reachable |= self._closure(tok)
        return all(tok in reachable for tok in htoks if tok not in _IGNORABLE)

    def judge_many(self, pairs) -> list[PairJudgment]:
        out = []
        for premise, hypothesis in pairs:
            p, h = as_text(premise), as_text(hypothesis)
            out.append(self._judge_one(p, h))
        return out

    def _judge_one(self, premise: str, hypothesis: str) -> PairJudgment:
        ptoks, htoks = normalize_tokens(premise), normalize_tokens(hypothesis)
        label = "neutral"
        if ptoks == htoks:
            label = "entail"
        else:
            stripped_h = self._strip_negation(htoks)
            stripped_p = self._strip_negation(ptoks)
            if stripped_h is not None:
                if stripped_h == ptoks or self._core_entails(ptoks, stripped_h):
                    label = "contradict"
            elif stripped_p is not None:
                if stripped_p == htoks or self._core_entails(stripped_p, htoks):
                    label = "contradict"
            elif self._core_entails(ptoks, htoks):
                label = "entail"
        pe, pn, pc = _JUDGE_PROBS[label]
        return PairJudgment(premise, hypothesis, pe, pn, pc)

    # -- tagging (optional capability) --------------------------------

    def tag(self, texts):
        return [[(t.token, t.tag) for t in self._tagger.tag(text)] for text in texts]
