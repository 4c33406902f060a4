import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from proofsmith_sidecar import create_app, dummy_config

WIRE_DIR = Path(__file__).parent / "data" / "wire"


@pytest.fixture(scope="session")
def client() -> TestClient:
    return TestClient(create_app(dummy_config()))


def load_fixture(name: str) -> dict:
    return json.loads((WIRE_DIR / name).read_text(encoding="utf-8"))
