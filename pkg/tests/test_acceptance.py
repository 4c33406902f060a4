"""Acceptance suite: one test per release criterion, each printing a
PASS line. Run with `pytest tests/test_acceptance.py -v -s`.
"""
import json
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

from proofsmith import (
    MODE_LABELS,
    ScoredCandidate,
    SearchConfig,
    Sentence,
    aggregate,
    beam_search,
    build_index,
    chain_search,
    export_dataset,
    fact_proof_search,
    filter_top_n,
    generate_augment_set,
    level_search,
    negate_gold,
    parse_proof,
    perturb_gold,
    render_report,
    score_proof,
    serialize_proof,
    validate_proof,
)
from proofsmith.cli import run_command
from proofsmith.kb import retrieve_for_pair
from proofsmith.metrics import REPORT_COLUMNS
from proofsmith.oracle.modes import GenerationMode
from proofsmith.proofs import write_proofs
from proofsmith.textops import bleu4, jaccard, normalize_tokens
from reference_impls import bleu4_bruteforce, expected_beam_chains, expected_level_chains, \
    jaccard_bruteforce

VOCAB = ["dog", "animal", "runs", "snow", "the", "a", "fast", "plays", "guitar",
         "woman", "man", "ball", "cold", "tree", "red", "big", "street", "photo"]


def test_metric_oracle_equivalence():
    rng = random.Random(20240817)
    started = time.perf_counter()
    for _ in range(120):
        a = rng.choices(VOCAB, k=rng.randint(1, 16))
        b = rng.choices(VOCAB, k=rng.randint(1, 16))
        assert abs(bleu4(a, b) - bleu4_bruteforce(a, b)) <= 1e-9
        assert abs(jaccard(a, b) - jaccard_bruteforce(a, b)) <= 1e-9
    identical = "the dog runs fast in the snow".split()
    assert bleu4(identical, identical) == pytest.approx(1.0, abs=1e-9)
    assert jaccard(identical, identical) == 1.0
    assert jaccard(["a", "b"], ["c", "d"]) == 0.0
    assert bleu4(["a", "b", "c"], ["x", "y", "z"]) <= 1e-8
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"metric equivalence took {elapsed:.2f}s"
    print(f"PASS metric-oracle equivalence (120 random pairs, {elapsed:.3f}s)")


def test_filter_contract():
    rng = random.Random(7)
    started = time.perf_counter()
    checked = 0
    for _ in range(40):
        size = rng.randint(1, 200)
        candidates = []
        for i in range(size):
            text = f"{rng.choice(VOCAB)} {rng.choice(VOCAB)} {i}"
            sim = rng.choice([0.0, 0.1, 0.5, 0.5, 0.9, 0.9])  # heavy ties
            candidates.append(ScoredCandidate(Sentence(text), sim))
        for n in (1, 10, 50):
            got = filter_top_n(candidates, n)
            want = sorted(candidates,
                          key=lambda c: (-c.sim_to_hypothesis, c.norm_text))[:n]
            assert [c.norm_text for c in got] == [c.norm_text for c in want]
            checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"filter contract took {elapsed:.2f}s"
    print(f"PASS filter contract ({checked} randomized sets, {elapsed:.3f}s)")


def test_search_equivalence_on_mock_corpus(search_oracle, search_pairs):
    cfg = SearchConfig()
    started = time.perf_counter()
    assert len(search_pairs) == 20
    for premise, hypothesis in search_pairs:
        level = level_search(premise, hypothesis, cfg, search_oracle, search_oracle)
        expected = expected_level_chains(search_oracle, search_oracle, premise,
                                         hypothesis, cfg.gen_modes, cfg.n, cfg.beam,
                                         cfg.top_proofs)
        assert [[s.text for s in p.steps] for p in level] == expected, premise

        beam = beam_search(premise, hypothesis, cfg, search_oracle, search_oracle)
        expected = expected_beam_chains(search_oracle, search_oracle, premise,
                                        hypothesis, cfg.gen_modes, cfg.n, cfg.beam,
                                        cfg.top_proofs)
        assert [[s.text for s in p.steps] for p in beam] == expected, premise
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"search equivalence took {elapsed:.2f}s"
    print(f"PASS search equivalence (20 pairs, level+beam vs brute force, {elapsed:.3f}s)")


@pytest.fixture()
def acceptance_kb(tmp_path, search_oracle):
    crafted = [
        "a guitar is an instrument",
        "a woman is a person",
        "a guitar is a banjo",
        "a woman is a dancer",
        "a dog is an animal",
        "a dog is a creature",
        "a dog is a wolf",
        "snow is cold",
        "a ball is a toy",
        "a car is a vehicle",
    ]
    filler = [f"a thing{i} is a gadget{i}" for i in range(40)]
    path = tmp_path / "acceptance_kb.txt"
    path.write_text("\n".join(crafted + filler) + "\n", encoding="utf-8")
    return build_index([path], search_oracle)


def test_fact_search_rules(search_oracle, tagger, acceptance_kb, tmp_path):
    started = time.perf_counter()
    assert len(acceptance_kb) == 50
    premise, hypothesis = "a woman plays a guitar", "a human plays an instrument"
    cfg = SearchConfig(fact_top_k=8)
    proof = fact_proof_search(premise, hypothesis, acceptance_kb, cfg, search_oracle,
                              search_oracle, tagger)
    validate_proof(proof)

    # (a) discarded set exactly matches the rule cos(I_k, H) < cos(P, H)
    hyp_vec = np.asarray(search_oracle.embed([hypothesis]))[0]
    base = float(np.asarray(search_oracle.embed([premise]))[0] @ hyp_vec)
    expected_discards = set()
    for fact in retrieve_for_pair(acceptance_kb, premise, hypothesis, cfg.fact_top_k,
                                  search_oracle, tagger):
        try:
            composed = search_oracle.compose(premise, fact.text)
        except Exception:
            continue
        sim = float(np.asarray(search_oracle.embed([composed.text]))[0] @ hyp_vec)
        if sim < base:
            expected_discards.add(fact.kb_id)
    got_discards = {w.split(":", 1)[1] for w in proof.warnings
                    if w.startswith("discarded_fact:")}
    assert got_discards == expected_discards
    assert expected_discards, "fixture must exercise the discard rule"

    # (b) fact steps appear in retriever-rank order, each followed by its
    # composition
    fact_steps = proof.fact_steps()
    assert len(fact_steps) >= 2
    ranks = [s.rank for s in fact_steps]
    assert ranks == sorted(ranks)
    for step in fact_steps:
        nxt = proof.steps[step.index]
        assert nxt.kind == "inferred" and step.index in nxt.inputs

    # (c) fallback iff all facts are discarded
    assert "all_facts_discarded_beam_fallback" not in proof.warnings
    bad_kb = tmp_path / "bad_kb.txt"
    bad_kb.write_text("a dog is a wolf\nsnow is cold\n", encoding="utf-8")
    bad = fact_proof_search("a dog runs in the snow", "a creature moves in the snow",
                            build_index([bad_kb], search_oracle), cfg, search_oracle,
                            search_oracle, tagger)
    assert "all_facts_discarded_beam_fallback" in bad.warnings
    assert not bad.fact_steps()
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"fact-search rules took {elapsed:.2f}s"
    print(f"PASS fact-search rules (50-fact KB, {elapsed:.3f}s)")


def test_proof_invariants_and_roundtrip(search_oracle, tagger, search_pairs, acceptance_kb):
    cfg = SearchConfig()
    proofs = []
    for premise, hypothesis in search_pairs[:8]:
        proofs += level_search(premise, hypothesis, cfg, search_oracle, search_oracle)
        proofs += beam_search(premise, hypothesis, cfg, search_oracle, search_oracle)
        proofs += chain_search(premise, hypothesis, cfg, search_oracle, search_oracle)
    proofs.append(fact_proof_search("a woman plays a guitar",
                                    "a human plays an instrument", acceptance_kb, cfg,
                                    search_oracle, search_oracle, tagger))
    assert proofs
    for proof in proofs:
        validate_proof(proof)
        line = serialize_proof(proof)
        assert serialize_proof(parse_proof(line)) == line
    print(f"PASS proof invariants + byte-identical round-trip ({len(proofs)} proofs)")


def test_baseline_separation(oracle, tagger, gold_proofs):
    gold_metrics = [score_proof(p, oracle, tagger=tagger) for p in gold_proofs]
    gold_correct = np.mean([m.pair_labels.count("entail") / len(m.pair_labels)
                            for m in gold_metrics])

    negated_metrics = [score_proof(negate_gold(p, oracle), oracle, tagger=tagger)
                       for p in gold_proofs]
    neg_correct = np.mean([m.pair_labels.count("entail") / len(m.pair_labels)
                           for m in negated_metrics])
    assert neg_correct < gold_correct

    perturbed = [perturb_gold(p, 0.5, rng_seed=97) for p in gold_proofs]
    for original, corrupted in zip(gold_proofs, perturbed):
        for old, new in zip(original.inferred_steps(), corrupted.inferred_steps()):
            old_tokens = normalize_tokens(old.text)
            new_tokens = normalize_tokens(new.text)
            changed = sum(a != b for a, b in zip(old_tokens, new_tokens))
            assert changed == math.ceil(0.5 * len(old_tokens))
    perturbed_metrics = [score_proof(p, oracle, tagger=tagger) for p in perturbed]
    gold_js = np.mean([js for m in gold_metrics for js in m.pair_jaccard])
    pert_js = np.mean([js for m in perturbed_metrics for js in m.pair_jaccard])
    assert pert_js < gold_js
    print(f"PASS baseline separation (gold {gold_correct:.2f} > negated {neg_correct:.2f}; "
          f"jaccard {gold_js:.3f} > perturbed {pert_js:.3f})")


def test_report_shape(tmp_path, oracle, tagger, gold_proofs):
    proofs_path = tmp_path / "gold.rec"
    write_proofs(gold_proofs, proofs_path)
    report_path = tmp_path / "report.txt"
    assert run_command(["score", "--proofs", str(proofs_path), "--report",
                        str(report_path), "--name", "gold"]) == 0
    lines = report_path.read_text().splitlines()
    assert lines[0].split() == list(REPORT_COLUMNS)
    row = dict(zip(lines[0].split(), lines[2].split()))
    assert row["set"] == "gold"
    assert row["#steps"] == "2.00"
    for column in ("C(P-H)", "C(P-I1)", "C(I1-In)", "C(In-H)"):
        assert row[column] == "100.00"

    combined = tmp_path / "combined.txt"
    metrics_path = str(report_path) + ".metrics.jsonl"
    assert run_command(["report", "--metrics", metrics_path, "--names", "gold",
                        "--out", str(combined)]) == 0
    assert combined.read_text().splitlines()[0].split() == list(REPORT_COLUMNS)
    print("PASS report shape (exact column structure, #steps = 2.00 on mock-gold)")


def test_augment_mapping_and_export(tmp_path, oracle):
    examples = generate_augment_set(
        ["a dog runs in the snow", "a woman plays a guitar", "a cat sleeps on the sofa"],
        per_premise=2, oracle=oracle)
    assert examples
    for example in examples:
        assert example.label == MODE_LABELS[GenerationMode(example.provenance_mode)]

    base = tmp_path / "base.tsv"
    base.write_text("\n".join(f"base premise {i}\tbase hypothesis {i}\tentailment"
                              for i in range(1000)) + "\n", encoding="utf-8")
    out_a, out_b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    manifest = export_dataset(base, 0.0, examples, 0.01, seed=31, out_path=out_a)
    assert manifest["augment_sampled"] == 10
    assert len([l for l in out_a.read_text().splitlines() if l]) == 10
    export_dataset(base, 0.0, examples, 0.01, seed=31, out_path=out_b)
    assert out_a.read_bytes() == out_b.read_bytes()
    print("PASS augment mapping + exact 1% quota (10/1000) + seed determinism")
