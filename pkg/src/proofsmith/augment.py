"""Labeled NLI pair generation from the prover's modes, and seeded export
of mixed training datasets.

The mode-to-label mapping is fixed: entail and monotonic generations are
entailment pairs, contradict generations are contradiction pairs, neutral
generations are neutral pairs.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, OracleUnavailableError
from .oracle.base import Oracle
from .oracle.modes import GenerationMode, coerce_mode
from .textops import as_text

log = logging.getLogger(__name__)

MODE_LABELS: dict[GenerationMode, str] = {
    GenerationMode.ENTAIL: "entailment",
    GenerationMode.CONTRADICT: "contradiction",
    GenerationMode.NEUTRAL: "neutral",
    GenerationMode.MONOTONIC: "entailment",
}

AUGMENT_MODES = tuple(MODE_LABELS)


@dataclass(frozen=True)
class AugmentExample:
    premise: str
    hypothesis: str
    label: str
    provenance_mode: str
    source_premise_id: str

    def __post_init__(self):
        expected = MODE_LABELS[coerce_mode(self.provenance_mode)]
        if self.label != expected:
            raise InvalidInputError(
                f"label {self.label!r} does not match mode {self.provenance_mode!r}"
            )


def generate_augment_set(premises, modes=AUGMENT_MODES, per_premise: int = 1,
                         oracle: Oracle | None = None) -> list[AugmentExample]:
    """Top per_premise generations per (premise, mode), labeled by mode.

    Premises may be raw strings or (id, text) tuples. Duplicate
    (premise, hypothesis) pairs keep the first mode that produced them.
    A premise whose generation fails outright is skipped with a warning.
    """
    if per_premise < 1:
        raise InvalidInputError("per_premise must be >= 1")
    modes = [coerce_mode(m) for m in modes]
    for mode in modes:
        if mode not in MODE_LABELS:
            raise InvalidInputError(f"mode {mode.value} has no augmentation label")
    out: list[AugmentExample] = []
    seen: set[tuple[str, str]] = set()
    for position, item in enumerate(premises):
        if isinstance(item, tuple):
            premise_id, premise = item
        else:
            premise_id, premise = f"p{position:06d}", as_text(item)
        try:
            for mode in modes:
                for cand in oracle.generate(mode, [premise], per_premise):
                    key = (premise, cand.text)
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(AugmentExample(
                        premise=premise,
                        hypothesis=cand.text,
                        label=MODE_LABELS[mode],
                        provenance_mode=mode.value,
                        source_premise_id=premise_id,
                    ))
        except OracleUnavailableError as exc:
            log.warning("skipping premise %s: %s", premise_id, exc)
    return out


def read_pair_file(path: str | Path) -> list[tuple[str, str, str]]:
    """TSV rows premise<TAB>hypothesis<TAB>label, duplicates dropped."""
    rows: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InvalidInputError(f"{path}:{lineno}: expected 3 TSV fields")
            key = (parts[0], parts[1])
            if key in seen:
                continue
            seen.add(key)
            rows.append((parts[0], parts[1], parts[2]))
    return rows


def write_pair_file(rows, path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for premise, hypothesis, label in rows:
            fh.write(f"{premise}\t{hypothesis}\t{label}\n")


def _sample(rng: np.random.Generator, items: list, count: int) -> list:
    if count >= len(items):
        return list(items)
    picked = rng.choice(len(items), size=count, replace=False)
    return [items[i] for i in sorted(int(i) for i in picked)]


def export_dataset(base_path: str | Path, base_fraction: float,
                   augment_examples: list[AugmentExample], augment_fraction: float,
                   seed: int, out_path: str | Path,
                   manifest_path: str | Path | None = "auto") -> dict:
    """Mix a seeded base subsample with a seeded augmentation sample.

    The augmentation quota is floor(augment_fraction * |base|), measured
    against the full base file so the quota stays comparable across
    base_fraction settings. The quota is drawn in equal shares across the
    provenance modes present (leftover capacity spills over to the other
    modes deterministically); if the total available falls short, the
    export fails and reports the shortfall. Returns the manifest dict;
    by default it is also written next to the output file (pass
    manifest_path=None to skip, e.g. when a caller embeds it elsewhere).
    """
    if not (0.0 <= base_fraction <= 1.0 and 0.0 <= augment_fraction <= 1.0):
        raise InvalidInputError("fractions must be in [0, 1]")
    base_rows = read_pair_file(base_path)
    rng = np.random.default_rng(seed)

    base_count = math.floor(base_fraction * len(base_rows))
    base_sample = _sample(rng, base_rows, base_count)
    base_keys = {(p, h) for p, h, _ in base_sample}

    quota = math.floor(augment_fraction * len(base_rows))
    usable = [ex for ex in augment_examples if (ex.premise, ex.hypothesis) not in base_keys]
    if quota > len(usable):
        raise InvalidInputError(
            f"augment quota {quota} exceeds the {len(usable)} available examples "
            f"(short by {quota - len(usable)})"
        )
    by_mode: dict[str, list[AugmentExample]] = {}
    for example in usable:
        by_mode.setdefault(example.provenance_mode, []).append(example)
    mode_order = [m.value for m in AUGMENT_MODES if m.value in by_mode]
    picked: list[AugmentExample] = []
    remaining = quota
    # Equal shares first, then spill leftover quota into modes with spare
    # examples, in canonical mode order.
    if mode_order and remaining:
        share = remaining // len(mode_order)
        for mode in mode_order:
            take = min(share, len(by_mode[mode]))
            chosen = _sample(rng, by_mode[mode], take)
            picked.extend(chosen)
            by_mode[mode] = [e for e in by_mode[mode] if e not in chosen]
        remaining = quota - len(picked)
        for mode in mode_order:
            if remaining <= 0:
                break
            take = min(remaining, len(by_mode[mode]))
            picked.extend(_sample(rng, by_mode[mode], take))
            remaining -= take

    combined = [(p, h, lab) for p, h, lab in base_sample]
    combined += [(e.premise, e.hypothesis, e.label) for e in picked]
    order = rng.permutation(len(combined))
    combined = [combined[int(i)] for i in order]
    write_pair_file(combined, out_path)

    histogram: dict[str, int] = {}
    for example in picked:
        histogram[example.provenance_mode] = histogram.get(example.provenance_mode, 0) + 1
    manifest = {
        "base_file": str(base_path),
        "base_total": len(base_rows),
        "base_fraction": base_fraction,
        "base_sampled": len(base_sample),
        "augment_fraction": augment_fraction,
        "augment_sampled": len(picked),
        "augment_available": len(usable),
        "provenance_histogram": histogram,
        "seed": seed,
        "output": str(out_path),
        "total_rows": len(combined),
    }
    if manifest_path is not None:
        if manifest_path == "auto":
            manifest_path = Path(str(out_path) + ".manifest.json")
        Path(manifest_path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    return manifest


def examples_to_records(examples: list[AugmentExample], path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for example in examples:
            fh.write(json.dumps({
                "premise": example.premise,
                "hypothesis": example.hypothesis,
                "label": example.label,
                "provenance_mode": example.provenance_mode,
                "source_premise_id": example.source_premise_id,
            }, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n")


def examples_from_records(path: str | Path) -> list[AugmentExample]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(AugmentExample(**json.loads(line)))
    return out
