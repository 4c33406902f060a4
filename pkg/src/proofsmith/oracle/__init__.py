from .base import JUDGE_TO_NLI, LABEL_ORDER, Oracle, PairJudgment
from .mock import Lexicon, MockOracle, default_lexicon
from .modes import MODE_PREFIXES, SEPARATOR, GenerationMode, coerce_mode, expected_arity
from .remote import ORACLE_URL_ENV, RemoteOracle, resolve_url

__all__ = [
    "GenerationMode",
    "JUDGE_TO_NLI",
    "LABEL_ORDER",
    "Lexicon",
    "MODE_PREFIXES",
    "MockOracle",
    "ORACLE_URL_ENV",
    "Oracle",
    "PairJudgment",
    "RemoteOracle",
    "SEPARATOR",
    "coerce_mode",
    "default_lexicon",
    "expected_arity",
    "resolve_url",
]
