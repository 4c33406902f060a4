"""Server configuration: one JSON file mapping roles to engines."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

ROLES = ("generator", "composer", "embedder", "judge", "tagger")


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8301
    max_batch: int = 64
    device: str = "cpu"
    roles: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        for role in self.roles:
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r} (expected one of {ROLES})")
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")


def dummy_config() -> ServerConfig:
    """Deterministic engines for every role; runs without checkpoints."""
    return ServerConfig(roles={
        "generator": {"engine": "dummy"},
        "composer": {"engine": "dummy"},
        "embedder": {"engine": "dummy"},
        "judge": {"engine": "dummy"},
        "tagger": {"engine": "heuristic"},
    })


def load_config(path: str | Path) -> ServerConfig:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    bind = payload.get("bind", "127.0.0.1:8301")
    host, _, port = bind.rpartition(":")
    device = payload.get("device", "cpu")
    roles = {}
    for role, entry in payload.get("roles", {}).items():
        entry = dict(entry)
        entry.setdefault("device", device)
        roles[role] = entry
    return ServerConfig(host=host or "127.0.0.1", port=int(port),
                        max_batch=int(payload.get("max_batch", 64)),
                        device=device, roles=roles)
