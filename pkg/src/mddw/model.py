"""Token models that the watermark engine samples from.

A model exposes ``vocab``, ``block_len`` and ``generate(prompt, context,
count)``; every call must return fresh samples, because rejection sampling
re-queries the model with an unchanged context until a block hashes to the
wanted bit. ``gen_block`` is ``generate`` with ``count = block_len``.

:class:`MockModel` draws each token uniformly from a candidate set of size
``k_cand``. The set is a deterministic function of ``(seed, prompt, recent
context, position)``, while the draw comes from a separate sampling stream,
so candidate sets are reproducible and samples are not. Each ``block_len``
block then has min-entropy ``block_len * log2(k_cand)`` bits.

:class:`HttpModel` forwards to a completion endpoint speaking::

    POST {"prompt": [int], "context": [int], "num_tokens": int}
    ->   {"tokens": [int]}
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
import random
import struct
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import BadResponse, TokenOutOfRange, Transport
from .oracles import encode_tokens, xof

TAG_MOCK = b"MDDW/MOCK"


class TokenModel(Protocol):
    vocab: int
    block_len: int

    def generate(self, prompt: Sequence[int], context: Sequence[int], count: int) -> list[int]: ...

    def gen_block(self, prompt: Sequence[int], context: Sequence[int]) -> list[int]: ...


@dataclass(frozen=True)
class ModelConfig:
    vocab: int = 64
    k_cand: int = 16
    seed: int = 0
    block_len: int = 2
    context_window: int = 4

    def __post_init__(self):
        if not 2 <= self.k_cand <= self.vocab:
            raise ValueError(f"need 2 <= k_cand <= vocab, got k_cand={self.k_cand}, vocab={self.vocab}")
        if self.block_len < 1:
            raise ValueError("block_len must be positive")

    @property
    def min_entropy_bits(self) -> float:
        """Per-block min-entropy of the mock model."""
        return self.block_len * math.log2(self.k_cand)


@functools.lru_cache(maxsize=256)
def _prompt_digest(prompt: tuple) -> bytes:
    return hashlib.sha3_256(encode_tokens(prompt)).digest()[:16]


class MockModel:
    """Seeded stand-in for a language model with tunable entropy."""

    def __init__(self, config: ModelConfig | None = None, sample_seed: int | None = None):
        self.config = config or ModelConfig()
        self.vocab = self.config.vocab
        self.block_len = self.config.block_len
        if sample_seed is None:
            sample_seed = int.from_bytes(hashlib.sha3_256(b"sampler" + struct.pack(">q", self.config.seed)).digest()[:8], "big")
        self._rng = random.Random(sample_seed)
        self._full = list(range(self.vocab)) if self.config.k_cand == self.vocab else None

    def candidates(self, prompt: Sequence[int], context: Sequence[int]) -> list[int]:
        """Candidate set for the token following ``context``."""
        if self._full is not None:
            return self._full
        cfg = self.config
        w = cfg.context_window
        recent = context[-w:] if w else ()
        seed_material = (struct.pack(">qQ", cfg.seed, len(context)) + _prompt_digest(tuple(prompt))
                         + encode_tokens(recent))
        out: list[int] = []
        seen: set[int] = set()
        counter = 0
        while len(out) < cfg.k_cand:
            stream = xof(TAG_MOCK, seed_material + struct.pack(">I", counter), 4 * cfg.k_cand)
            for (v,) in struct.iter_unpack(">I", stream):
                t = v % cfg.vocab
                if t not in seen:
                    seen.add(t)
                    out.append(t)
                    if len(out) == cfg.k_cand:
                        break
            counter += 1
        return out

    def generate(self, prompt: Sequence[int], context: Sequence[int], count: int) -> list[int]:
        ctx = list(context)
        out = []
        k = self.config.k_cand
        for _ in range(count):
            tok = self.candidates(prompt, ctx)[self._rng.randrange(k)]
            ctx.append(tok)
            out.append(tok)
        return out

    def gen_block(self, prompt: Sequence[int], context: Sequence[int]) -> list[int]:
        return self.generate(prompt, context, self.block_len)


class HttpModel:
    """Client for a remote token-completion endpoint."""

    def __init__(self, endpoint: str, vocab: int, block_len: int, timeout: float = 30.0, retries: int = 2,
                 backoff: float = 0.5):
        self.endpoint = endpoint
        self.vocab = vocab
        self.block_len = block_len
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff

    def _post(self, payload: dict) -> bytes:
        body = json.dumps(payload).encode()
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            req = urllib.request.Request(self.endpoint, data=body, headers={"Content-Type": "application/json"},
                                         method="POST")
            try:
                with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                    return resp.read()
            except urllib.error.HTTPError as exc:
                # a status code is an answer; retrying a 4xx will not help
                if exc.code < 500:
                    raise Transport(f"{self.endpoint} answered HTTP {exc.code}") from exc
                last = exc
            except (urllib.error.URLError, TimeoutError, ConnectionError, OSError) as exc:
                last = exc
            if attempt < self.retries:
                time.sleep(self.backoff * 2 ** attempt)
        raise Transport(f"could not reach {self.endpoint}: {last}") from last

    def generate(self, prompt: Sequence[int], context: Sequence[int], count: int) -> list[int]:
        raw = self._post({"prompt": list(prompt), "context": list(context), "num_tokens": count})
        try:
            tokens = json.loads(raw)["tokens"]
        except (ValueError, KeyError, TypeError) as exc:
            raise BadResponse(f"unparseable response from {self.endpoint}") from exc
        if not isinstance(tokens, list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in tokens):
            raise BadResponse("'tokens' must be a list of integers")
        if len(tokens) != count:
            raise BadResponse(f"asked for {count} tokens, got {len(tokens)}")
        for t in tokens:
            if not 0 <= t < self.vocab:
                raise TokenOutOfRange(f"endpoint returned token {t} outside [0, {self.vocab})")
        return tokens

    def gen_block(self, prompt: Sequence[int], context: Sequence[int]) -> list[int]:
        return self.generate(prompt, context, self.block_len)


def http_gen_block(endpoint: str, prompt: Sequence[int], context: Sequence[int], block_len: int, vocab: int,
                   timeout: float = 30.0) -> list[int]:
    return HttpModel(endpoint, vocab, block_len, timeout=timeout, retries=0).gen_block(prompt, context)
