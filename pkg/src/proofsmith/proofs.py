"""Proof objects: ordered step sequences with provenance, plus the
line-oriented record format shared by the search, metric, and export
layers.

Serialization is canonical (sorted keys, compact separators) so that
parse -> serialize round-trips byte-identically; that property is what
makes golden-file and determinism tests meaningful.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InvalidInputError

LABELS = ("entailment", "contradiction", "neutral")
SEARCH_METHODS = ("level", "beam", "facts", "none")
STEP_KINDS = ("inferred", "fact")

#: Provenance index that refers to the premise.
PREMISE_REF = 0


@dataclass(frozen=True)
class ProofStep:
    """One proof step: an inferred sentence or an injected fact.

    Inferred steps carry `mode` plus the indices of the steps they were
    generated from (0 is the premise); fact steps carry the KB id and the
    retriever rank instead.
    """

    index: int
    kind: str
    text: str
    mode: str | None = None
    inputs: tuple[int, ...] = ()
    kb_id: str | None = None
    rank: int | None = None
    extra: dict = field(default_factory=dict)

    def provenance_dict(self) -> dict:
        if self.kind == "fact":
            prov = {"kb_id": self.kb_id, "rank": self.rank}
        else:
            prov = {"mode": self.mode, "inputs": list(self.inputs)}
        prov.update(self.extra)
        return prov


@dataclass
class Proof:
    premise: str
    hypothesis: str
    label: str
    search_method: str
    steps: list[ProofStep]
    config: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def inferred_steps(self) -> list[ProofStep]:
        return [s for s in self.steps if s.kind == "inferred"]

    def fact_steps(self) -> list[ProofStep]:
        return [s for s in self.steps if s.kind == "fact"]


def validate_proof(proof: Proof):
    """Enforce the structural invariants; raises InvalidInputError.

    Checks: known label/method/kinds, contiguous 1..m indices, all
    provenance references strictly earlier than the referencing step
    (which also rules out cycles), fact steps without a mode, inferred
    steps with exactly one mode and a reference chain that reaches the
    premise.
    """
    if proof.label not in LABELS:
        raise InvalidInputError(f"unknown label {proof.label!r}")
    if proof.search_method not in SEARCH_METHODS:
        raise InvalidInputError(f"unknown search method {proof.search_method!r}")
    for position, step in enumerate(proof.steps, start=1):
        if step.index != position:
            raise InvalidInputError(
                f"step indices must be contiguous 1..m, found {step.index} at {position}"
            )
        if step.kind not in STEP_KINDS:
            raise InvalidInputError(f"unknown step kind {step.kind!r}")
        if step.kind == "fact":
            if step.mode is not None or step.inputs:
                raise InvalidInputError(f"fact step {step.index} must not carry a mode")
            if step.kb_id is None:
                raise InvalidInputError(f"fact step {step.index} needs a kb_id")
        else:
            if not step.mode:
                raise InvalidInputError(f"inferred step {step.index} needs a generation mode")
            if not step.inputs:
                raise InvalidInputError(f"inferred step {step.index} needs input references")
            for ref in step.inputs:
                if not (PREMISE_REF <= ref < step.index):
                    raise InvalidInputError(
                        f"step {step.index} references {ref}, which is not earlier"
                    )
    # Rootedness: following inferred references from any inferred step must
    # reach the premise.
    by_index = {s.index: s for s in proof.steps}
    for step in proof.steps:
        if step.kind != "inferred":
            continue
        frontier = [step.index]
        seen = set()
        rooted = False
        while frontier:
            ref = frontier.pop()
            if ref == PREMISE_REF:
                rooted = True
                break
            if ref in seen:
                continue
            seen.add(ref)
            node = by_index[ref]
            if node.kind == "inferred":
                frontier.extend(node.inputs)
        if not rooted:
            raise InvalidInputError(f"step {step.index} is not rooted at the premise")


def proof_to_dict(proof: Proof) -> dict:
    return {
        "premise": proof.premise,
        "hypothesis": proof.hypothesis,
        "label": proof.label,
        "search_method": proof.search_method,
        "config": proof.config,
        "steps": [
            {"j": s.index, "kind": s.kind, "text": s.text, "provenance": s.provenance_dict()}
            for s in proof.steps
        ],
        "warnings": list(proof.warnings),
    }


def proof_from_dict(payload: dict) -> Proof:
    steps = []
    for raw in payload["steps"]:
        prov = dict(raw.get("provenance", {}))
        kind = raw["kind"]
        if kind == "fact":
            step = ProofStep(index=raw["j"], kind=kind, text=raw["text"],
                             kb_id=prov.pop("kb_id", None), rank=prov.pop("rank", None),
                             extra=prov)
        else:
            step = ProofStep(index=raw["j"], kind=kind, text=raw["text"],
                             mode=prov.pop("mode", None),
                             inputs=tuple(prov.pop("inputs", ())), extra=prov)
        steps.append(step)
    return Proof(
        premise=payload["premise"],
        hypothesis=payload["hypothesis"],
        label=payload["label"],
        search_method=payload["search_method"],
        steps=steps,
        config=dict(payload.get("config", {})),
        warnings=list(payload.get("warnings", [])),
    )


def serialize_proof(proof: Proof) -> str:
    """One canonical JSON line, no trailing newline."""
    return json.dumps(proof_to_dict(proof), sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))


def parse_proof(line: str) -> Proof:
    return proof_from_dict(json.loads(line))


def write_proofs(proofs: Iterable[Proof], path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for proof in proofs:
            fh.write(serialize_proof(proof) + "\n")


def read_proofs(path: str | Path) -> Iterator[Proof]:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield parse_proof(line)
