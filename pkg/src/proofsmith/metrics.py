"""Automated proof verification: pairwise correctness through the
entailment judge, minimality proxies (BLEU-4, Jaccard, step and keyword
counts), corrupted-gold baselines, and table-shaped aggregation.

Pair groups follow the reporting convention: P-H is the direct
premise-hypothesis pair, P-I1 the first chain pair, In-H the last, and
I1-In pools every interior pair of proofs long enough to have any.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, OracleUnavailableError
from .oracle.base import Oracle
from .oracle.modes import GenerationMode
from .proofs import Proof, ProofStep
from .textops import bleu4, cosine, count_keywords, jaccard, normalize_tokens

log = logging.getLogger(__name__)

PAIR_GROUPS = ("P-H", "P-I1", "I1-In", "In-H")
SCORING_MODES = ("plain", "fact_concat")

#: Marker stored in pair_labels when the judge could not be reached.
ERROR_LABEL = "error"

# Replacement vocabulary for the bundled perturbation substituter. The
# words are chosen to be absent from the bundled lexicon so perturbed
# steps reliably lose overlap with their neighbors.
SUBSTITUTION_POOL = (
    "quartz", "nebula", "lantern", "violet", "harbor", "meadow",
    "ember", "prism", "canyon", "willow", "saffron", "juniper",
)


def pool_substituter(tokens: list[str], index: int, rng) -> str:
    """Swap a token for a pool word, never returning the original."""
    word = SUBSTITUTION_POOL[int(rng.integers(len(SUBSTITUTION_POOL)))]
    while word == tokens[index]:
        word = SUBSTITUTION_POOL[int(rng.integers(len(SUBSTITUTION_POOL)))]
    return word


@dataclass
class ProofMetrics:
    premise: str
    hypothesis: str
    search_method: str
    mode: str
    pair_labels: list[str]
    pair_bleu4: list[float]
    pair_jaccard: list[float]
    num_steps: int
    keywords_premise: float
    keywords_intermediate_mean: float | None
    keywords_hypothesis: float
    ph_label: str
    ph_bleu4: float
    ph_jaccard: float
    final_step_sim: float | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def errored(self) -> bool:
        return ERROR_LABEL in self.pair_labels or self.ph_label == ERROR_LABEL


def consecutive_pairs(proof: Proof, mode: str = "plain") -> tuple[list[tuple[str, str]], list[str]]:
    """Chain pairs (premise, I1), (I1, I2), ..., (In, hypothesis).

    Fact steps never appear as pair elements. In plain mode they are
    skipped outright; in fact_concat mode each pending fact is
    concatenated onto the left element of the pair that consumes it.
    Returns (pairs, warnings); a proof with no inferred steps degenerates
    to the single pair (premise, hypothesis).
    """
    if mode not in SCORING_MODES:
        raise InvalidInputError(f"unknown scoring mode {mode!r}")
    inferred = proof.inferred_steps()
    if not inferred:
        return [(proof.premise, proof.hypothesis)], ["no_inferred_steps"]
    pairs: list[tuple[str, str]] = []
    left = proof.premise
    pending: list[str] = []
    for step in proof.steps:
        if step.kind == "fact":
            pending.append(step.text)
            continue
        left_text = " ".join([left] + pending) if mode == "fact_concat" else left
        pairs.append((left_text, step.text))
        left = step.text
        pending = []
    left_text = " ".join([left] + pending) if mode == "fact_concat" else left
    pairs.append((left_text, proof.hypothesis))
    return pairs, []


def score_proof(proof: Proof, judge: Oracle, embedder=None, tagger=None,
                mode: str = "plain") -> ProofMetrics:
    """Judge every consecutive pair and compute the minimality proxies.

    Judge failures do not abort scoring: affected pairs get the "error"
    label and the result is flagged, so batch runs can report partial
    output (the CLI turns that into a nonzero exit).
    """
    pairs, warnings = consecutive_pairs(proof, mode)
    all_pairs = [(proof.premise, proof.hypothesis)] + pairs
    try:
        judgments = judge.judge_many(all_pairs)
        labels = [j.label for j in judgments]
    except OracleUnavailableError as exc:
        log.warning("batch judging failed, retrying pair by pair: %s", exc)
        labels = []
        for pair in all_pairs:
            try:
                labels.append(judge.judge(pair[0], pair[1]).label)
            except OracleUnavailableError:
                labels.append(ERROR_LABEL)
        if ERROR_LABEL in labels:
            warnings = warnings + ["judge_unavailable_for_some_pairs"]

    ph_label, pair_labels = labels[0], labels[1:]
    pair_b4 = [bleu4(normalize_tokens(right), normalize_tokens(left)) for left, right in pairs]
    pair_js = [jaccard(normalize_tokens(left), normalize_tokens(right)) for left, right in pairs]
    ph_b4 = bleu4(normalize_tokens(proof.hypothesis), normalize_tokens(proof.premise))
    ph_js = jaccard(normalize_tokens(proof.premise), normalize_tokens(proof.hypothesis))

    inferred = proof.inferred_steps()
    kw_p = kw_h = 0.0
    kw_i = None
    if tagger is not None:
        kw_p = float(count_keywords(proof.premise, tagger))
        kw_h = float(count_keywords(proof.hypothesis, tagger))
        if inferred:
            kw_i = float(np.mean([count_keywords(s.text, tagger) for s in inferred]))

    final_sim = None
    if embedder is not None and inferred:
        vecs = np.asarray(embedder.embed([inferred[-1].text, proof.hypothesis]))
        final_sim = float(cosine(vecs[0], vecs[1]))

    return ProofMetrics(
        premise=proof.premise,
        hypothesis=proof.hypothesis,
        search_method=proof.search_method,
        mode=mode,
        pair_labels=pair_labels,
        pair_bleu4=pair_b4,
        pair_jaccard=pair_js,
        num_steps=len(inferred),
        keywords_premise=kw_p,
        keywords_intermediate_mean=kw_i,
        keywords_hypothesis=kw_h,
        ph_label=ph_label,
        ph_bleu4=ph_b4,
        ph_jaccard=ph_js,
        final_step_sim=final_sim,
        warnings=warnings,
    )


def negate_gold(proof: Proof, oracle: Oracle, beam: int = 10) -> Proof:
    """Replace every inferred step with its top contradiction.

    Premise and hypothesis stay untouched. Steps whose generation comes
    back empty are kept as-is and flagged.
    """
    warnings = list(proof.warnings)
    steps: list[ProofStep] = []
    changed = False
    for step in proof.steps:
        if step.kind != "inferred":
            steps.append(step)
            continue
        candidates = oracle.generate(GenerationMode.CONTRADICT, [step.text], beam)
        if not candidates:
            warnings.append(f"negation_failed:{step.index}")
            steps.append(step)
            continue
        extra = dict(step.extra)
        extra["negated"] = True
        steps.append(replace(step, text=candidates[0].text, extra=extra))
        changed = True
    if not changed:
        warnings.append("no_steps_negated")
    return Proof(premise=proof.premise, hypothesis=proof.hypothesis, label=proof.label,
                 search_method=proof.search_method, steps=steps, config=dict(proof.config),
                 warnings=warnings)


def perturb_gold(proof: Proof, ratio: float, substituter=pool_substituter,
                 rng_seed: int = 0) -> Proof:
    """Randomly replace ceil(ratio * w) token positions in each inferred step.

    Positions are drawn uniformly without replacement from one generator
    seeded with rng_seed and consumed in step order, so the output is a
    pure function of (proof, ratio, seed). Replaced positions and the seed
    are recorded in each step's provenance.
    """
    if not (0.0 < ratio <= 1.0):
        raise InvalidInputError("ratio must be in (0, 1]")
    rng = np.random.default_rng(rng_seed)
    steps: list[ProofStep] = []
    for step in proof.steps:
        if step.kind != "inferred":
            steps.append(step)
            continue
        tokens = normalize_tokens(step.text)
        count = math.ceil(ratio * len(tokens))
        positions = sorted(int(i) for i in rng.choice(len(tokens), size=count, replace=False))
        for pos in positions:
            tokens[pos] = substituter(tokens, pos, rng)
        extra = dict(step.extra)
        extra.update({"perturbed": True, "seed": rng_seed, "replaced": positions})
        steps.append(replace(step, text=" ".join(tokens), extra=extra))
    return Proof(premise=proof.premise, hypothesis=proof.hypothesis, label=proof.label,
                 search_method=proof.search_method, steps=steps, config=dict(proof.config),
                 warnings=list(proof.warnings))


@dataclass
class AggregateReport:
    population: int
    correctness: dict[str, float | None]
    bleu4: dict[str, float | None]
    jaccard_pct: dict[str, float | None]
    mean_steps: float
    keywords_premise: float | None
    keywords_intermediate: float | None
    keywords_hypothesis: float | None

    def to_dict(self) -> dict:
        return {
            "population": self.population,
            "correctness": self.correctness,
            "bleu4": self.bleu4,
            "jaccard_pct": self.jaccard_pct,
            "mean_steps": self.mean_steps,
            "keywords": {
                "premise": self.keywords_premise,
                "intermediate": self.keywords_intermediate,
                "hypothesis": self.keywords_hypothesis,
            },
        }


def _group_pairs(metric: ProofMetrics) -> dict[str, list[int]]:
    """Pair-list indices contributing to each chain group."""
    total = len(metric.pair_labels)
    if metric.num_steps < 1:
        return {"P-I1": [], "I1-In": [], "In-H": []}
    return {
        "P-I1": [0],
        "In-H": [total - 1],
        "I1-In": list(range(1, total - 1)),
    }


def _mean(values: list[float]) -> float | None:
    return float(np.mean(values)) if values else None


def aggregate(metrics: list[ProofMetrics]) -> AggregateReport:
    """Pool pair scores across proofs into the four reporting groups.

    Pair groups pool over pairs (so a proof with three interior pairs
    weighs three times as much in I1-In as one with one); step and
    keyword columns average per proof. Pairs labelled "error" are
    excluded from correctness percentages.
    """
    if not metrics:
        raise InvalidInputError("aggregate requires at least one ProofMetrics")
    entail_counts = {g: [0, 0] for g in PAIR_GROUPS}  # [entail, judged]
    b4_pool: dict[str, list[float]] = {g: [] for g in PAIR_GROUPS}
    js_pool: dict[str, list[float]] = {g: [] for g in PAIR_GROUPS}
    for metric in metrics:
        if metric.ph_label != ERROR_LABEL:
            entail_counts["P-H"][0] += int(metric.ph_label == "entail")
            entail_counts["P-H"][1] += 1
        b4_pool["P-H"].append(metric.ph_bleu4)
        js_pool["P-H"].append(metric.ph_jaccard)
        for group, indices in _group_pairs(metric).items():
            for i in indices:
                label = metric.pair_labels[i]
                if label != ERROR_LABEL:
                    entail_counts[group][0] += int(label == "entail")
                    entail_counts[group][1] += 1
                b4_pool[group].append(metric.pair_bleu4[i])
                js_pool[group].append(metric.pair_jaccard[i])

    correctness = {
        g: (100.0 * hits / judged if judged else None)
        for g, (hits, judged) in entail_counts.items()
    }
    bleu = {g: _mean(vals) for g, vals in b4_pool.items()}
    jac = {g: (100.0 * _mean(vals) if vals else None) for g, vals in js_pool.items()}
    kw_i = [m.keywords_intermediate_mean for m in metrics
            if m.keywords_intermediate_mean is not None]
    return AggregateReport(
        population=len(metrics),
        correctness=correctness,
        bleu4=bleu,
        jaccard_pct=jac,
        mean_steps=float(np.mean([m.num_steps for m in metrics])),
        keywords_premise=_mean([m.keywords_premise for m in metrics]),
        keywords_intermediate=_mean(kw_i) if kw_i else None,
        keywords_hypothesis=_mean([m.keywords_hypothesis for m in metrics]),
    )


# -- report rendering and record files --------------------------------

REPORT_COLUMNS = (
    "set",
    "C(P-H)", "C(P-I1)", "C(I1-In)", "C(In-H)",
    "B4(P-H)", "JS(P-H)", "B4(P-I1)", "JS(P-I1)",
    "B4(I1-In)", "JS(I1-In)", "B4(In-H)", "JS(In-H)",
    "#steps", "KW(P)", "KW(I1-In)", "KW(H)", "N",
)


def _fmt(value: float | None, digits: int) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def report_row(name: str, report: AggregateReport) -> list[str]:
    row = [name]
    row += [_fmt(report.correctness[g], 2) for g in PAIR_GROUPS]
    for group in PAIR_GROUPS:
        row.append(_fmt(report.bleu4[group], 4))
        row.append(_fmt(report.jaccard_pct[group], 2))
    row.append(_fmt(report.mean_steps, 2))
    row.append(_fmt(report.keywords_premise, 2))
    row.append(_fmt(report.keywords_intermediate, 2))
    row.append(_fmt(report.keywords_hypothesis, 2))
    row.append(str(report.population))
    return row


def render_report(rows: list[tuple[str, AggregateReport]]) -> str:
    """Aligned plain-text table with one row per proof set."""
    table = [list(REPORT_COLUMNS)] + [report_row(name, rep) for name, rep in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(REPORT_COLUMNS))]
    lines = []
    for row in table:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def metrics_to_dict(metric: ProofMetrics) -> dict:
    return {
        "premise": metric.premise,
        "hypothesis": metric.hypothesis,
        "search_method": metric.search_method,
        "mode": metric.mode,
        "pair_labels": metric.pair_labels,
        "pair_bleu4": metric.pair_bleu4,
        "pair_jaccard": metric.pair_jaccard,
        "num_steps": metric.num_steps,
        "keywords_premise": metric.keywords_premise,
        "keywords_intermediate_mean": metric.keywords_intermediate_mean,
        "keywords_hypothesis": metric.keywords_hypothesis,
        "ph_label": metric.ph_label,
        "ph_bleu4": metric.ph_bleu4,
        "ph_jaccard": metric.ph_jaccard,
        "final_step_sim": metric.final_step_sim,
        "warnings": metric.warnings,
    }


def metrics_from_dict(payload: dict) -> ProofMetrics:
    return ProofMetrics(**payload)


def write_metrics(metrics: list[ProofMetrics], path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for metric in metrics:
            fh.write(json.dumps(metrics_to_dict(metric), sort_keys=True,
                                ensure_ascii=False, separators=(",", ":")) + "\n")


def read_metrics(path: str | Path) -> list[ProofMetrics]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(metrics_from_dict(json.loads(line)))
    return out
