import json
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from scipy import stats

from mddw.errors import BadResponse, TokenOutOfRange, Transport
from mddw.model import HttpModel, MockModel, ModelConfig, http_gen_block


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(vocab=8, k_cand=9)
    with pytest.raises(ValueError):
        ModelConfig(k_cand=1)
    assert ModelConfig(k_cand=16, block_len=2).min_entropy_bits == 8


def test_uniform_when_k_equals_v():
    m = MockModel(ModelConfig(vocab=64, k_cand=64, block_len=2), sample_seed=1)
    toks = m.generate([1], [], 100_000)
    counts = np.bincount(toks, minlength=64)
    assert stats.chisquare(counts).pvalue > 0.01


def test_block_length_and_freshness():
    m = MockModel(ModelConfig(block_len=3), sample_seed=2)
    blocks = [tuple(m.gen_block([1, 2], [5, 6, 7])) for _ in range(200)]
    assert all(len(b) == 3 for b in blocks)
    # repeated calls on identical context are independent samples
    assert len(set(blocks)) > 150


def test_candidate_sets_reproducible():
    cfg = ModelConfig(seed=9)
    a, b = MockModel(cfg, sample_seed=1), MockModel(cfg, sample_seed=2)
    ctx = [3, 4, 5]
    assert a.candidates([1], ctx) == b.candidates([1], ctx)
    assert len(set(a.candidates([1], ctx))) == cfg.k_cand
    assert a.candidates([1], ctx) != a.candidates([2], ctx)


def test_min_entropy_tiny():
    cfg = ModelConfig(vocab=16, k_cand=4, block_len=1, seed=3)
    m = MockModel(cfg, sample_seed=4)
    cands = m.candidates([0], [7])
    counts = Counter(m.gen_block([0], [7])[0] for _ in range(10_000))
    assert set(counts) == set(cands)
    for c in cands:
        assert abs(counts[c] / 10_000 - 0.25) < 0.03
    assert stats.chisquare([counts[c] for c in cands]).pvalue > 0.01


class _Stub(BaseHTTPRequestHandler):
    reply = None  # set per test; a plain value or a function of the request
    status = 200
    seen = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        _Stub.seen.append(body)
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        reply = type(self).__dict__["reply"]
        payload = reply(body) if callable(reply) else reply
        self.wfile.write(payload if isinstance(payload, bytes) else json.dumps(payload).encode())

    def log_message(self, *args):
        pass


@pytest.fixture
def stub():
    server = HTTPServer(("127.0.0.1", 0), _Stub)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _Stub.seen = []
    _Stub.status = 200
    yield f"http://127.0.0.1:{server.server_address[1]}/generate"
    server.shutdown()
    server.server_close()


def test_http_passthrough(stub):
    _Stub.reply = lambda body: {"tokens": [9] * body["num_tokens"]}
    assert http_gen_block(stub, [1, 2], [3], 2, vocab=64) == [9, 9]
    assert _Stub.seen[-1] == {"prompt": [1, 2], "context": [3], "num_tokens": 2}


def test_http_errors(stub):
    model = HttpModel(stub, vocab=64, block_len=2, retries=0)
    _Stub.reply = {"tokens": [1]}
    with pytest.raises(BadResponse):
        model.gen_block([], [])
    _Stub.reply = {"tokens": [1, 64]}
    with pytest.raises(TokenOutOfRange):
        model.gen_block([], [])
    _Stub.reply = b"not json"
    with pytest.raises(BadResponse):
        model.gen_block([], [])
    _Stub.reply = {"tokens": [1, 2]}
    _Stub.status = 404
    with pytest.raises(Transport):
        model.gen_block([], [])


def test_http_unreachable():
    model = HttpModel("http://127.0.0.1:9/none", vocab=64, block_len=2, timeout=0.5, retries=1, backoff=0.01)
    with pytest.raises(Transport):
        model.gen_block([], [])
