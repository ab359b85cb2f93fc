"""Pairing-based designated-verifier signature.

Signer and verifier share the value ``e(g, h)^(ssk * vsk)``: the signer
reaches it as ``e(vpk, h^ssk)``, the verifier as ``e(spk, h^vsk)``. The
signature is an ``l``-bit digest of that value, with ``h`` hashed from
``r || m``.

Two modes:

``rs``
    ``r`` is 32 fresh random bytes carried in the signature.
``s_only``
    ``r`` is derived from a context string (the anchor block in the
    watermark engine), so the signature is ``s`` alone.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Any

import numpy as np

from .algebra import Group
from .errors import DecodeError
from .oracles import bits_to_bytes, bytes_to_bits, xof

TAG_H0 = b"MDDW/DVS-H0"
TAG_H1 = b"MDDW/DVS-H1"
TAG_R = b"MDDW/DVSR"

MODES = ("rs", "s_only")
DEFAULT_L = 256
R_BYTES = 32


@dataclass(frozen=True)
class DvsKeyPair:
    sk: int
    pk: Any

    @classmethod
    def generate(cls, group: Group, rng=None) -> "DvsKeyPair":
        sk = group.random_scalar(rng)
        return cls(sk, group.base_exp(sk))


@dataclass(frozen=True, eq=False)
class DvsSig:
    s: np.ndarray
    r: bytes | None = None

    def __eq__(self, other) -> bool:
        return isinstance(other, DvsSig) and self.r == other.r and np.array_equal(self.s, other.s)

    def to_bytes(self) -> bytes:
        return (self.r or b"") + bits_to_bytes(self.s)

    @classmethod
    def from_bytes(cls, data: bytes, mode: str = "s_only", l: int = DEFAULT_L) -> "DvsSig":
        nbytes = (l + 7) // 8
        expected = nbytes + (R_BYTES if mode == "rs" else 0)
        if len(data) != expected:
            raise DecodeError(f"DVS signature must be {expected} bytes in mode {mode}")
        if mode == "rs":
            return cls(bytes_to_bits(data[R_BYTES:], l), data[:R_BYTES])
        return cls(bytes_to_bits(data, l))


def derive_r(ctx: bytes) -> bytes:
    return xof(TAG_R, ctx, R_BYTES)


def _shared_digest(group: Group, gt, l: int) -> np.ndarray:
    return bytes_to_bits(xof(TAG_H1, group.encode_gt(gt), (l + 7) // 8), l)


def _resolve_r(mode: str, r: bytes | None, ctx: bytes | None) -> bytes:
    if mode == "s_only":
        if ctx is None:
            raise ValueError("s_only mode needs a context to derive r from")
        return derive_r(ctx)
    if mode == "rs":
        if r is None or len(r) != R_BYTES:
            raise DecodeError("rs-mode signature must carry a 32-byte r")
        return r
    raise ValueError(f"unknown DVS mode {mode!r}")


def dvs_sign(group: Group, ssk: int, vpk: Any, m: bytes, mode: str = "rs", ctx: bytes | None = None,
             l: int = DEFAULT_L, rng=None) -> DvsSig:
    if mode == "rs":
        r = rng.randbytes(R_BYTES) if rng is not None else secrets.token_bytes(R_BYTES)
    else:
        r = _resolve_r(mode, None, ctx)
    h = group.hash_to_group(TAG_H0, r + m)
    s = _shared_digest(group, group.pair(vpk, group.exp(h, ssk)), l)
    return DvsSig(s, r if mode == "rs" else None)


def dvs_expected(group: Group, spk: Any, vsk: int, m: bytes, r: bytes, l: int = DEFAULT_L) -> np.ndarray:
    """The only ``s`` that verifies for ``(m, r)``; what a designated verifier would forge."""
    h = group.hash_to_group(TAG_H0, r + m)
    return _shared_digest(group, group.pair(spk, group.exp(h, vsk)), l)


def dvs_verify(group: Group, spk: Any, vsk: int, m: bytes, sig: DvsSig, mode: str = "rs",
               ctx: bytes | None = None, l: int = DEFAULT_L) -> bool:
    try:
        r = _resolve_r(mode, sig.r, ctx)
    except DecodeError:
        return False
    if len(sig.s) != l:
        return False
    return bool(np.array_equal(sig.s, dvs_expected(group, spk, vsk, m, r, l)))
