"""Primary-against-sidecar integration over a real socket.

Runs only when the sidecar package is installed alongside; the sidecar is
consumed purely through its HTTP interface, exactly as a deployment would.
"""
import threading
import time

import numpy as np
import pytest

sidecar = pytest.importorskip("proofsmith_sidecar")
uvicorn = pytest.importorskip("uvicorn")

from proofsmith import RemoteOracle, SearchConfig, level_search, score_proof
from proofsmith.cli import run_command
from proofsmith.tagging import RemoteTagger


@pytest.fixture(scope="module")
def sidecar_url():
    app = sidecar.create_app(sidecar.dummy_config())
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0,
                                           log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("sidecar did not start")
        time.sleep(0.05)
    (socket_info,) = server.servers[0].sockets
    host, port = socket_info.getsockname()[:2]
    yield f"http://{host}:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_remote_oracle_roundtrip(sidecar_url):
    oracle = RemoteOracle(sidecar_url)
    candidates = oracle.generate("entail", ["a dog runs"], 5)
    assert candidates and all(s.text for s in candidates)
    rows = oracle.embed(["a dog runs", "a cat sits"])
    assert np.allclose(np.linalg.norm(rows, axis=1), 1.0, atol=1e-6)
    judgment = oracle.judge("a dog runs", "a dog runs")
    assert judgment.label == "entail"
    (tags,) = oracle.tag(["a dog runs"])
    assert ("dog", "noun") in [tuple(t) for t in tags]


def test_level_search_and_scoring_through_wire(sidecar_url):
    oracle = RemoteOracle(sidecar_url)
    cfg = SearchConfig(top_proofs=1, max_depth=2)
    proofs = level_search("a dog runs in the snow", "something follows", cfg, oracle, oracle)
    assert proofs
    metric = score_proof(proofs[0], oracle, embedder=oracle,
                         tagger=RemoteTagger(oracle))
    assert len(metric.pair_labels) == metric.num_steps + 1


def test_cli_prove_against_sidecar(tmp_path, sidecar_url):
    pairs = tmp_path / "pairs.tsv"
    pairs.write_text("p1\ta dog runs\tit follows that a dog runs\tentailment\n",
                     encoding="utf-8")
    out = tmp_path / "proofs.rec"
    code = run_command(["prove", "--method", "beam", "--pairs", str(pairs),
                        "--out", str(out), "--oracle", "remote",
                        "--oracle-url", sidecar_url])
    assert code == 0
    assert out.read_text().strip()
