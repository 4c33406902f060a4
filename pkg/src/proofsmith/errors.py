"""Exception types shared across the package.

CLI exit codes map onto these: domain errors exit 1, usage errors exit 2,
and OracleUnavailableError exits 3.
"""


class ProofsmithError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ProofsmithError, ValueError):
    """A precondition on an argument was violated."""


class OracleUnavailableError(ProofsmithError):
    """A model backend (generator, embedder, judge, or tagger) cannot be reached."""


class WireProtocolError(ProofsmithError):
    """A backend replied, but the payload does not match the wire schema."""


class CompositionFailedError(ProofsmithError):
    """The composition backend returned no candidates for a sentence pair."""


class EmptyKBError(ProofsmithError):
    """A knowledge-base index was built from zero facts."""
