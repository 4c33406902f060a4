"""Proof generation: level search, beam search, the no-search baseline,
and fact-augmented search.

All searches share the same expand/filter machinery. Expansion generates
candidates from every frontier item under the configured modes, scores
them by embedding cosine to the hypothesis, and deduplicates by
normalized text. Filtering keeps the n most hypothesis-similar candidates
with a lexicographic tie rule, which makes every search deterministic for
a deterministic oracle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import CompositionFailedError, InvalidInputError
from .kb import KBIndex, retrieve_for_pair
from .oracle.base import Oracle
from .oracle.modes import GenerationMode, coerce_mode
from .proofs import Proof, ProofStep
from .textops import Sentence, as_text, normalized_text

log = logging.getLogger(__name__)

# Canonical order in which generation modes are consulted.
_MODE_ORDER = (GenerationMode.ENTAIL, GenerationMode.MONOTONIC)

CLOSING_MODES = (GenerationMode.ENTAIL, GenerationMode.MONOTONIC)


@dataclass
class SearchConfig:
    """Search hyperparameters; defaults follow the reference setup."""

    n: int = 10
    max_depth: int = 2
    top_proofs: int = 2
    gen_modes: tuple[str, ...] = ("entail", "monotonic")
    fact_top_k: int = 8
    close_threshold: float = 0.80
    beam: int = 10

    def __post_init__(self):
        if self.n < 1 or self.max_depth < 1 or self.top_proofs < 1:
            raise InvalidInputError("n, max_depth and top_proofs must be >= 1")
        if self.fact_top_k < 1 or self.beam < 1:
            raise InvalidInputError("fact_top_k and beam must be >= 1")
        if not (0.0 < self.close_threshold <= 1.0):
            raise InvalidInputError("close_threshold must be in (0, 1]")
        modes = tuple(coerce_mode(m) for m in self.gen_modes)
        if not modes or any(m not in _MODE_ORDER for m in modes):
            raise InvalidInputError("gen_modes must be a non-empty subset of {entail, monotonic}")
        # Store canonically ordered so iteration order never depends on input order.
        self.gen_modes = tuple(m.value for m in _MODE_ORDER if m in modes)

    def snapshot(self) -> dict:
        return {
            "n": self.n,
            "max_depth": self.max_depth,
            "top_proofs": self.top_proofs,
            "gen_modes": list(self.gen_modes),
            "fact_top_k": self.fact_top_k,
            "close_threshold": self.close_threshold,
            "beam": self.beam,
        }


@dataclass
class ScoredCandidate:
    """A generated sentence scored against the hypothesis.

    `parent` is None for the premise root; every other candidate chains
    back to it. `depth` counts generation steps from the premise.
    """

    sentence: Sentence
    sim_to_hypothesis: float
    parent: "ScoredCandidate | None" = None
    mode: GenerationMode | None = None
    depth: int = 0
    norm_text: str = field(default="")

    def __post_init__(self):
        if not self.norm_text:
            self.norm_text = normalized_text(self.sentence.text)

    def ancestors(self) -> list["ScoredCandidate"]:
        chain = []
        node = self.parent
        while node is not None:
            chain.append(node)
            node = node.parent
        return chain

    def chain_from_root(self) -> list["ScoredCandidate"]:
        """Candidates from depth 1 to this one (the root is excluded)."""
        chain = [self]
        node = self.parent
        while node is not None and node.parent is not None:
            chain.append(node)
            node = node.parent
        chain.reverse()
        return chain


def _sims_to(rows, hyp_vec: np.ndarray) -> list[float]:
    # Per-row dots, not a matrix product: BLAS gemv can differ from np.dot
    # in the last ulp depending on shape, which would make equal-similarity
    # ties order-dependent and break brute-force equivalence checks.
    return [float(np.dot(row, hyp_vec)) for row in np.asarray(rows)]


def _root_candidate(premise: str, hyp_vec: np.ndarray, embedder) -> ScoredCandidate:
    (sim,) = _sims_to(embedder.embed([premise]), hyp_vec)
    return ScoredCandidate(Sentence(premise), sim)


def expand(frontier, modes, oracle: Oracle, embedder, hypothesis,
           hypothesis_vec: np.ndarray | None = None, beam: int = 10,
           forbidden: frozenset[str] = frozenset()) -> list[ScoredCandidate]:
    """One generation step from every frontier candidate.

    Candidates equal (after normalization) to the premise, an ancestor
    step, or any text in `forbidden` are dropped; among duplicates the
    parentage with the higher similarity to the hypothesis wins. Output
    order is deterministic: frontier order, then mode order, then
    backend order.
    """
    if not frontier:
        raise InvalidInputError("expand requires a non-empty frontier")
    modes = [m for m in _MODE_ORDER if m in {coerce_mode(x) for x in modes}]
    if hypothesis_vec is None:
        hypothesis_vec = np.asarray(embedder.embed([as_text(hypothesis)]))[0]

    raw: list[tuple[ScoredCandidate, GenerationMode, Sentence]] = []
    for item in frontier:
        blocked = {item.norm_text} | {a.norm_text for a in item.ancestors()} | forbidden
        for mode in modes:
            for cand in oracle.generate(mode, [item.sentence.text], beam):
                if normalized_text(cand.text) not in blocked:
                    raw.append((item, mode, cand))
    if not raw:
        return []

    sims = _sims_to(embedder.embed([cand.text for _, _, cand in raw]), hypothesis_vec)
    chosen: dict[str, ScoredCandidate] = {}
    for (parent, mode, cand), sim in zip(raw, sims):
        key = normalized_text(cand.text)
        previous = chosen.get(key)
        if previous is not None and previous.parent.sim_to_hypothesis >= parent.sim_to_hypothesis:
            continue
        chosen[key] = ScoredCandidate(
            sentence=cand,
            sim_to_hypothesis=sim,
            parent=parent,
            mode=mode,
            depth=parent.depth + 1,
            norm_text=key,
        )
    # dict preserves first-insertion order for untouched keys; re-walk raw
    # order for a deterministic output list.
    seen: set[str] = set()
    out = []
    for _, _, cand in raw:
        key = normalized_text(cand.text)
        if key not in seen:
            seen.add(key)
            out.append(chosen[key])
    return out


def filter_top_n(candidates, n: int) -> list[ScoredCandidate]:
    """Keep the n most hypothesis-similar candidates.

    Equal similarities break lexicographically on normalized text, so the
    result is a deterministic function of the candidate set.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    ranked = sorted(candidates, key=lambda c: (-c.sim_to_hypothesis, c.norm_text))
    return ranked[:n]


def _proof_from_chain(premise: str, hypothesis: str, chain, method: str,
                      cfg: SearchConfig, warnings: list[str], label: str) -> Proof:
    steps = []
    for position, cand in enumerate(chain, start=1):
        steps.append(ProofStep(
            index=position,
            kind="inferred",
            text=cand.sentence.text,
            mode=cand.mode.value if cand.mode else "entail",
            inputs=(position - 1,),
            extra={"sim": round(cand.sim_to_hypothesis, 6)},
        ))
    return Proof(premise=premise, hypothesis=hypothesis, label=label,
                 search_method=method, steps=steps, config=cfg.snapshot(),
                 warnings=list(warnings))


def _ranked_proofs(premise, hypothesis, finalists, method, cfg, warnings, label):
    ranked = sorted(finalists, key=lambda c: (-c.sim_to_hypothesis, c.norm_text))
    return [
        _proof_from_chain(premise, hypothesis, cand.chain_from_root(), method, cfg,
                          warnings, label)
        for cand in ranked[: cfg.top_proofs]
    ]


def level_search(premise, hypothesis, cfg: SearchConfig, oracle: Oracle, embedder,
                 label: str = "entailment") -> list[Proof]:
    """Depth-synchronized expand-then-filter search.

    Every returned proof has exactly max_depth inferred steps unless some
    depth produced no candidates, in which case the shallower proofs are
    returned and flagged.
    """
    premise, hypothesis = as_text(premise), as_text(hypothesis)
    hyp_vec = np.asarray(embedder.embed([hypothesis]))[0]
    frontier = [_root_candidate(premise, hyp_vec, embedder)]
    warnings: list[str] = []
    for depth in range(1, cfg.max_depth + 1):
        pool = expand(frontier, cfg.gen_modes, oracle, embedder, hypothesis,
                      hypothesis_vec=hyp_vec, beam=cfg.beam)
        if not pool:
            warnings.append(f"frontier_exhausted_at_depth_{depth}")
            break
        frontier = filter_top_n(pool, cfg.n)
    finalists = [c for c in frontier if c.depth > 0]
    return _ranked_proofs(premise, hypothesis, finalists, "level", cfg, warnings, label)


def beam_search(premise, hypothesis, cfg: SearchConfig, oracle: Oracle, embedder,
                label: str = "entailment") -> list[Proof]:
    """Like level search, but the filtered frontiers of every depth are
    merged into one pool before the final top-n cut, so proofs may have
    anywhere from 1 to max_depth steps. Duplicate texts across depths keep
    the shallower chain."""
    premise, hypothesis = as_text(premise), as_text(hypothesis)
    hyp_vec = np.asarray(embedder.embed([hypothesis]))[0]
    frontier = [_root_candidate(premise, hyp_vec, embedder)]
    warnings: list[str] = []
    merged: list[ScoredCandidate] = []
    merged_keys: set[str] = set()
    for depth in range(1, cfg.max_depth + 1):
        pool = expand(frontier, cfg.gen_modes, oracle, embedder, hypothesis,
                      hypothesis_vec=hyp_vec, beam=cfg.beam)
        if not pool:
            warnings.append(f"frontier_exhausted_at_depth_{depth}")
            break
        frontier = filter_top_n(pool, cfg.n)
        for cand in frontier:
            if cand.norm_text not in merged_keys:
                merged_keys.add(cand.norm_text)
                merged.append(cand)
    finalists = filter_top_n(merged, cfg.n) if merged else []
    return _ranked_proofs(premise, hypothesis, finalists, "beam", cfg, warnings, label)


def chain_search(premise, hypothesis, cfg: SearchConfig, oracle: Oracle, embedder,
                 label: str = "entailment") -> list[Proof]:
    """No-search baseline: follow the generator's own ranking.

    The j-th proof starts from the j-th best first-step candidate and then
    greedily takes the backend's top candidate at each further depth, with
    no hypothesis guidance anywhere. Similarities are still recorded for
    reporting.
    """
    premise, hypothesis = as_text(premise), as_text(hypothesis)
    hyp_vec = np.asarray(embedder.embed([hypothesis]))[0]
    root = _root_candidate(premise, hyp_vec, embedder)
    first = expand([root], cfg.gen_modes, oracle, embedder, hypothesis,
                   hypothesis_vec=hyp_vec, beam=cfg.beam)
    proofs = []
    for start in first[: cfg.top_proofs]:
        node = start
        for _ in range(cfg.max_depth - 1):
            step = expand([node], cfg.gen_modes, oracle, embedder, hypothesis,
                          hypothesis_vec=hyp_vec, beam=cfg.beam)
            if not step:
                break
            node = step[0]
        proofs.append(_proof_from_chain(premise, hypothesis, node.chain_from_root(),
                                        "none", cfg, [], label))
    return proofs


def fact_proof_search(premise, hypothesis, index: KBIndex, cfg: SearchConfig,
                      oracle: Oracle, embedder, tagger,
                      label: str = "entailment") -> Proof:
    """Fact-augmented proof search.

    Retrieves fact_top_k facts for the pair, composes the premise with
    each one, and discards any fact whose composition lands farther from
    the hypothesis than the premise already is. Surviving facts are
    composed recursively in retriever-rank order, each emitted as a fact
    step immediately before its composition step. If the last composition
    is still below close_threshold, up to max_depth closing steps are
    added with the entail/monotonic generators. When no fact survives,
    the best beam-search proof is returned instead, flagged.
    """
    premise, hypothesis = as_text(premise), as_text(hypothesis)
    hyp_vec = np.asarray(embedder.embed([hypothesis]))[0]
    (base_sim,) = _sims_to(embedder.embed([premise]), hyp_vec)

    facts = retrieve_for_pair(index, premise, hypothesis, cfg.fact_top_k, embedder, tagger)
    warnings: list[str] = []
    survivors = []
    first_compositions: dict[str, Sentence] = {}
    for fact in facts:
        try:
            composed = oracle.compose(premise, fact.text)
        except CompositionFailedError:
            warnings.append(f"composition_failed:{fact.kb_id}")
            continue
        (sim,) = _sims_to(embedder.embed([composed.text]), hyp_vec)
        if sim < base_sim:
            warnings.append(f"discarded_fact:{fact.kb_id}")
            continue
        survivors.append(fact)
        first_compositions[fact.kb_id] = composed

    steps: list[ProofStep] = []
    current = premise
    last_inferred = 0
    for position, fact in enumerate(survivors):
        if position == 0:
            composed = first_compositions[fact.kb_id]
        else:
            try:
                composed = oracle.compose(current, fact.text)
            except CompositionFailedError:
                warnings.append(f"composition_failed:{fact.kb_id}")
                continue
        fact_index = len(steps) + 1
        steps.append(ProofStep(index=fact_index, kind="fact", text=fact.text,
                               kb_id=fact.kb_id, rank=fact.rank,
                               extra={"score": round(fact.score, 6)}))
        steps.append(ProofStep(index=fact_index + 1, kind="inferred", text=composed.text,
                               mode=GenerationMode.CONCLUDE.value,
                               inputs=(last_inferred, fact_index)))
        last_inferred = fact_index + 1
        current = composed.text

    if last_inferred == 0:
        # Nothing usable came out of the facts; fall back to beam search.
        warnings.append("all_facts_discarded_beam_fallback")
        fallback = beam_search(premise, hypothesis, cfg, oracle, embedder, label=label)
        if fallback:
            proof = fallback[0]
            proof.search_method = "facts"
            proof.warnings = warnings + proof.warnings
            return proof
        return Proof(premise=premise, hypothesis=hypothesis, label=label,
                     search_method="facts", steps=[], config=cfg.snapshot(),
                     warnings=warnings + ["beam_fallback_empty"])

    (current_sim,) = _sims_to(embedder.embed([current]), hyp_vec)
    if current_sim < cfg.close_threshold:
        existing = frozenset(normalized_text(s.text) for s in steps) | {normalized_text(premise)}
        frontier = [ScoredCandidate(Sentence(current), current_sim)]
        best = None
        for _ in range(cfg.max_depth):
            pool = expand(frontier, CLOSING_MODES, oracle, embedder, hypothesis,
                          hypothesis_vec=hyp_vec, beam=cfg.beam, forbidden=existing)
            if not pool:
                break
            frontier = filter_top_n(pool, cfg.n)
            best = frontier[0]
            if best.sim_to_hypothesis >= cfg.close_threshold:
                break
        if best is not None:
            for cand in best.chain_from_root():
                steps.append(ProofStep(index=len(steps) + 1, kind="inferred",
                                       text=cand.sentence.text,
                                       mode=cand.mode.value, inputs=(last_inferred,),
                                       extra={"sim": round(cand.sim_to_hypothesis, 6)}))
                last_inferred = len(steps)

    return Proof(premise=premise, hypothesis=hypothesis, label=label,
                 search_method="facts", steps=steps, config=cfg.snapshot(),
                 warnings=warnings)
