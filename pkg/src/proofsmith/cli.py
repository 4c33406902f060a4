"""Command-line driver.

Subcommands: prove, retrieve, score, perturb, negate, augment, report,
kb-build. Exit codes: 0 success, 1 domain error, 2 usage error, 3 oracle
unavailable. Every run writes one manifest next to its primary output.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import augment as augment_mod
from . import kb as kb_mod
from . import metrics as metrics_mod
from .errors import InvalidInputError, OracleUnavailableError, ProofsmithError
from .oracle import MockOracle, RemoteOracle
from .proofs import Proof, read_proofs, validate_proof, write_proofs
from .search import SearchConfig, beam_search, chain_search, fact_proof_search, level_search
from .tagging import HeuristicTagger, RemoteTagger

log = logging.getLogger("proofsmith")

_CONFIG_KEYS = ("n", "max_depth", "top_proofs", "fact_top_k", "close_threshold", "beam",
                "gen_modes")


def _add_oracle_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--oracle", choices=("mock", "remote"), default="mock")
    parser.add_argument("--oracle-url", default=None,
                        help="remote backend URL (or set PROOFSMITH_ORACLE_URL)")
    parser.add_argument("--tagger", choices=("heuristic", "oracle"), default="heuristic")


def _add_search_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", default=None, help="JSON config file; flags override it")
    parser.add_argument("--n", type=int, default=None)
    parser.add_argument("--max-depth", type=int, default=None)
    parser.add_argument("--top-proofs", type=int, default=None)
    parser.add_argument("--fact-top-k", type=int, default=None)
    parser.add_argument("--close-threshold", type=float, default=None)
    parser.add_argument("--beam", type=int, default=None)
    parser.add_argument("--gen-modes", default=None, help="comma list from {entail,monotonic}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proofsmith")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    prove = sub.add_parser("prove", help="generate proofs for a pairs file")
    prove.add_argument("--method", choices=("level", "beam", "facts", "none"), required=True)
    prove.add_argument("--pairs", required=True, help="TSV id/premise/hypothesis/label")
    prove.add_argument("--out", required=True)
    prove.add_argument("--kb", nargs="*", default=[], help="fact files (facts method)")
    prove.add_argument("--index", default=None, help="prebuilt KB cache file")
    prove.add_argument("--kb-cache", default=None, help="cache path used when embedding --kb")
    prove.add_argument("--jobs", type=int, default=1)
    prove.add_argument("--seed", type=int, default=0)
    _add_search_flags(prove)
    _add_oracle_flags(prove)

    retrieve = sub.add_parser("retrieve", help="retrieve facts for one pair")
    retrieve.add_argument("--premise", required=True)
    retrieve.add_argument("--hypothesis", required=True)
    retrieve.add_argument("--kb", nargs="*", default=[])
    retrieve.add_argument("--index", default=None)
    retrieve.add_argument("--kb-cache", default=None)
    retrieve.add_argument("--k", type=int, default=8)
    retrieve.add_argument("--out", required=True)
    _add_oracle_flags(retrieve)

    kb_build = sub.add_parser("kb-build", help="embed fact files into a cache")
    kb_build.add_argument("--kb", nargs="+", required=True)
    kb_build.add_argument("--out", required=True)
    _add_oracle_flags(kb_build)

    score = sub.add_parser("score", help="verify proofs and write a report")
    score.add_argument("--proofs", required=True)
    score.add_argument("--report", required=True)
    score.add_argument("--metrics-out", default=None,
                       help="per-proof metric records (default <report>.metrics.jsonl)")
    score.add_argument("--mode", choices=metrics_mod.SCORING_MODES, default="plain")
    score.add_argument("--name", default="proofs", help="row label in the report")
    _add_oracle_flags(score)

    negate = sub.add_parser("negate", help="replace inferred steps with contradictions")
    negate.add_argument("--proofs", required=True)
    negate.add_argument("--out", required=True)
    negate.add_argument("--beam", type=int, default=10)
    _add_oracle_flags(negate)

    perturb = sub.add_parser("perturb", help="randomly corrupt inferred steps")
    perturb.add_argument("--proofs", required=True)
    perturb.add_argument("--out", required=True)
    perturb.add_argument("--ratio", type=float, default=0.5)
    perturb.add_argument("--seed", type=int, default=0)

    aug = sub.add_parser("augment", help="generate labeled pairs and export datasets")
    aug.add_argument("--premises", default=None,
                     help="premise file: one per line, or a proof record file")
    aug.add_argument("--modes", default="entail,contradict,neutral,monotonic")
    aug.add_argument("--per-premise", type=int, default=1)
    aug.add_argument("--examples-out", default=None, help="write generated examples (JSONL)")
    aug.add_argument("--examples", default=None, help="load previously generated examples")
    aug.add_argument("--base", default=None, help="base TSV pair file for export")
    aug.add_argument("--base-fraction", type=float, default=0.0)
    aug.add_argument("--augment-fraction", type=float, default=0.0)
    aug.add_argument("--out", default=None, help="mixed dataset output (TSV)")
    aug.add_argument("--seed", type=int, default=0)
    _add_oracle_flags(aug)

    report = sub.add_parser("report", help="combine metric record files into one table")
    report.add_argument("--metrics", nargs="+", required=True)
    report.add_argument("--names", default=None, help="comma list of row labels")
    report.add_argument("--out", required=True)

    return parser


def _make_oracle(args):
    if args.oracle == "remote":
        return RemoteOracle(args.oracle_url)
    return MockOracle()


def _make_tagger(args, oracle):
    return RemoteTagger(oracle) if args.tagger == "oracle" else HeuristicTagger()


def _search_config(args) -> SearchConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(file_cfg) - set(_CONFIG_KEYS)
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
    defaults = SearchConfig()
    values = {}
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if key == "gen_modes" and isinstance(flag, str):
            flag = tuple(flag.split(","))
        if flag is not None:
            values[key] = flag
        elif key in file_cfg:
            values[key] = tuple(file_cfg[key]) if key == "gen_modes" else file_cfg[key]
        else:
            values[key] = getattr(defaults, key)
    return SearchConfig(**values)


def _read_pairs(path: str) -> list[tuple[str, str, str, str]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise InvalidInputError(f"{path}:{lineno}: expected id/premise/hypothesis/label")
            rows.append(tuple(parts))
    if not rows:
        raise InvalidInputError(f"{path}: no pairs found")
    return rows


def _digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out_path: str, payload: dict):
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest(args, command: str, inputs: list[str], outputs: list[str],
              oracle=None, started: float = 0.0, extra: dict | None = None) -> dict:
    payload = {
        "command": command,
        "argv": sys.argv[1:],
        "inputs": {str(p): _digest(p) for p in inputs if p and Path(p).is_file()},
        "outputs": [str(o) for o in outputs],
        "oracle": getattr(oracle, "backend_id", None),
        "seed": getattr(args, "seed", None),
        "elapsed_s": round(time.time() - started, 3),
    }
    if extra:
        payload.update(extra)
    return payload


def _load_index(args, oracle):
    if args.index:
        return kb_mod.load_cached_index(args.index)
    if args.kb:
        return kb_mod.build_index(args.kb, oracle, cache_path=args.kb_cache)
    raise InvalidInputError("need --kb fact files or a prebuilt --index")


def _cmd_prove(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    tagger = _make_tagger(args, oracle)
    cfg = _search_config(args)
    pairs = _read_pairs(args.pairs)
    index = _load_index(args, oracle) if args.method == "facts" else None

    def prove_one(row):
        _, premise, hypothesis, label = row
        if args.method == "level":
            return level_search(premise, hypothesis, cfg, oracle, oracle, label=label)
        if args.method == "beam":
            return beam_search(premise, hypothesis, cfg, oracle, oracle, label=label)
        if args.method == "none":
            return chain_search(premise, hypothesis, cfg, oracle, oracle, label=label)
        return [fact_proof_search(premise, hypothesis, index, cfg, oracle, oracle,
                                  tagger, label=label)]

    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(prove_one, pairs))
    else:
        results = [prove_one(row) for row in pairs]

    proofs: list[Proof] = []
    for row, found in zip(pairs, results):
        if not found:
            log.warning("no proof found for pair %s", row[0])
        proofs.extend(found)
    for proof in proofs:
        validate_proof(proof)
    write_proofs(proofs, args.out)
    _write_manifest(args.out, _manifest(
        args, "prove", [args.pairs] + list(args.kb or []), [args.out], oracle, started,
        extra={"method": args.method, "search_config": cfg.snapshot(),
               "num_pairs": len(pairs), "num_proofs": len(proofs)}))
    print(f"wrote {len(proofs)} proofs to {args.out}")
    return 0


def _cmd_retrieve(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    tagger = _make_tagger(args, oracle)
    index = _load_index(args, oracle)
    facts = kb_mod.retrieve_for_pair(index, args.premise, args.hypothesis, args.k,
                                     oracle, tagger)
    with open(args.out, "w", encoding="utf-8") as fh:
        for fact in facts:
            fh.write(f"{fact.rank}\t{fact.kb_id}\t{fact.score:.6f}\t{fact.source}\t{fact.text}\n")
    _write_manifest(args.out, _manifest(args, "retrieve", list(args.kb or []),
                                        [args.out], oracle, started, extra={"k": args.k}))
    print(f"wrote {len(facts)} facts to {args.out}")
    return 0


def _cmd_kb_build(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    index = kb_mod.build_index(args.kb, oracle, cache_path=args.out)
    _write_manifest(args.out, _manifest(args, "kb-build", list(args.kb), [args.out],
                                        oracle, started,
                                        extra={"facts": len(index), "dim": index.dimension}))
    print(f"indexed {len(index)} facts into {args.out}")
    return 0


def _cmd_score(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    tagger = _make_tagger(args, oracle)
    proofs = list(read_proofs(args.proofs))
    if not proofs:
        raise InvalidInputError(f"{args.proofs}: no proofs found")
    results = [metrics_mod.score_proof(p, oracle, embedder=oracle, tagger=tagger,
                                       mode=args.mode) for p in proofs]
    metrics_path = args.metrics_out or str(args.report) + ".metrics.jsonl"
    metrics_mod.write_metrics(results, metrics_path)
    table = metrics_mod.render_report([(args.name, metrics_mod.aggregate(results))])
    Path(args.report).write_text(table, encoding="utf-8")
    print(table, end="")
    _write_manifest(args.report, _manifest(
        args, "score", [args.proofs], [args.report, metrics_path], oracle, started,
        extra={"mode": args.mode, "num_proofs": len(proofs)}))
    if any(m.errored for m in results):
        log.error("some pairs could not be judged")
        return 3
    return 0


def _cmd_negate(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    proofs = [metrics_mod.negate_gold(p, oracle, beam=args.beam)
              for p in read_proofs(args.proofs)]
    write_proofs(proofs, args.out)
    _write_manifest(args.out, _manifest(args, "negate", [args.proofs], [args.out],
                                        oracle, started))
    print(f"wrote {len(proofs)} negated proofs to {args.out}")
    return 0


def _cmd_perturb(args) -> int:
    started = time.time()
    proofs = [metrics_mod.perturb_gold(p, args.ratio, rng_seed=args.seed)
              for p in read_proofs(args.proofs)]
    write_proofs(proofs, args.out)
    _write_manifest(args.out, _manifest(args, "perturb", [args.proofs], [args.out],
                                        None, started,
                                        extra={"ratio": args.ratio}))
    print(f"wrote {len(proofs)} perturbed proofs to {args.out}")
    return 0


def _read_premises(path: str) -> list[tuple[str, str]]:
    if path.endswith(".rec"):
        seen, out = set(), []
        for proof in read_proofs(path):
            if proof.premise not in seen:
                seen.add(proof.premise)
                out.append((f"p{len(out):06d}", proof.premise))
        return out
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append((f"p{len(out):06d}", line))
    return out


def _cmd_augment(args) -> int:
    started = time.time()
    oracle = _make_oracle(args)
    examples = []
    if args.examples:
        examples = augment_mod.examples_from_records(args.examples)
    if args.premises:
        premises = _read_premises(args.premises)
        modes = tuple(args.modes.split(","))
        examples += augment_mod.generate_augment_set(premises, modes=modes,
                                                     per_premise=args.per_premise,
                                                     oracle=oracle)
        if args.examples_out:
            augment_mod.examples_to_records(examples, args.examples_out)
    if not examples and not args.base:
        raise InvalidInputError("nothing to do: pass --premises and/or --examples")

    export_manifest = None
    if args.base:
        if not args.out:
            raise InvalidInputError("--base requires --out for the mixed dataset")
        export_manifest = augment_mod.export_dataset(
            args.base, args.base_fraction, examples, args.augment_fraction,
            args.seed, args.out, manifest_path=None)
    primary_out = args.out or args.examples_out
    if not primary_out:
        raise InvalidInputError("pass --examples-out or --out to write results")
    _write_manifest(primary_out, _manifest(
        args, "augment", [p for p in (args.premises, args.examples, args.base) if p],
        [p for p in (args.examples_out, args.out) if p], oracle, started,
        extra={"num_examples": len(examples), "export": export_manifest}))
    print(f"generated {len(examples)} examples"
          + (f", exported {export_manifest['total_rows']} rows" if export_manifest else ""))
    return 0


def _cmd_report(args) -> int:
    started = time.time()
    names = args.names.split(",") if args.names else [Path(p).stem for p in args.metrics]
    if len(names) != len(args.metrics):
        raise InvalidInputError("--names must match the number of metric files")
    rows = []
    for name, path in zip(names, args.metrics):
        rows.append((name, metrics_mod.aggregate(metrics_mod.read_metrics(path))))
    table = metrics_mod.render_report(rows)
    Path(args.out).write_text(table, encoding="utf-8")
    print(table, end="")
    _write_manifest(args.out, _manifest(args, "report", list(args.metrics), [args.out],
                                        None, started))
    return 0


_COMMANDS = {
    "prove": _cmd_prove,
    "retrieve": _cmd_retrieve,
    "kb-build": _cmd_kb_build,
    "score": _cmd_score,
    "negate": _cmd_negate,
    "perturb": _cmd_perturb,
    "augment": _cmd_augment,
    "report": _cmd_report,
}


def run_command(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except OracleUnavailableError as exc:
        log.error("oracle unavailable: %s", exc)
        return 3
    except (ProofsmithError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
