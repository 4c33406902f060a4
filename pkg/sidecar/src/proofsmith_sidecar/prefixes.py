"""Generation-mode prefix table, server side.

Clients send bare mode names; the server owns prompt construction. This
table is the one place prefixes are defined on the server and must stay in
sync with the shared fixture tests/data/wire/prefixes.json.
"""
SEPARATOR = "<sep>"

PREFIXES = {
    "entail": "entail: ",
    "contradict": "contradict: ",
    "neutral": "neutral: ",
    "monotonic": "monotonic: ",
    "conclude": "conclude: ",
    "explain": "explain: ",
    "proof": "proof: ",
}

TWO_INPUT_MODES = frozenset({"conclude", "explain", "proof"})


def build_prompt(mode: str, inputs: list[str]) -> str:
    if mode not in PREFIXES:
        raise ValueError(f"unknown mode {mode!r}")
    expected = 2 if mode in TWO_INPUT_MODES else 1
    if len(inputs) != expected:
        raise ValueError(f"mode {mode!r} expects {expected} input(s), got {len(inputs)}")
    joined = f" {SEPARATOR} ".join(inputs)
    return PREFIXES[mode] + joined
