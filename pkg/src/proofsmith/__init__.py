"""proofsmith: multi-step entailment proof search and verification.

The pipeline goes premise/hypothesis pairs -> proof search (level, beam,
fact-augmented, or the no-search baseline) -> automated verification
(correctness via an entailment judge, minimality via BLEU-4/Jaccard and
step/keyword counts) -> labeled-pair export for NLI data augmentation.
All neural capabilities sit behind one oracle interface with a
deterministic mock for hermetic runs and an HTTP client for a model
sidecar.
"""
from .augment import AugmentExample, MODE_LABELS, export_dataset, generate_augment_set
from .errors import (
    CompositionFailedError,
    EmptyKBError,
    InvalidInputError,
    OracleUnavailableError,
    ProofsmithError,
    WireProtocolError,
)
from .kb import Fact, KBIndex, build_index, cluster_keywords, extract_keywords, retrieve, \
    retrieve_for_pair
from .metrics import AggregateReport, ProofMetrics, aggregate, consecutive_pairs, \
    negate_gold, perturb_gold, render_report, score_proof
from .oracle import GenerationMode, Lexicon, MockOracle, PairJudgment, RemoteOracle
from .proofs import Proof, ProofStep, parse_proof, read_proofs, serialize_proof, \
    validate_proof, write_proofs
from .search import ScoredCandidate, SearchConfig, beam_search, chain_search, expand, \
    fact_proof_search, filter_top_n, level_search
from .tagging import HeuristicTagger, RemoteTagger, TokenTag
from .textops import Sentence, bleu4, cosine, count_keywords, jaccard, normalize_tokens

__version__ = "0.1.0"
