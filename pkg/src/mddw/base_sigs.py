"""Building-block signatures.

* Schnorr with caller-supplied randomness. The nonce is derived from that
  randomness, so signing is a deterministic function of
  ``(sk, msg, rand32)``; the claimable transform relies on this to recompute
  a signature inside ``Claim``.
* Hash-valued BLS: the signature is ``H'(e(H(m)^sk, g))`` truncated to
  ``l_bls`` bits, checked against ``H'(e(H(m), pk))``.

Serialisations: Schnorr is ``c || z`` as fixed-width scalars; BLS is the raw
``l_bls``-bit string packed MSB-first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .algebra import Group
from .errors import DecodeError
from .oracles import bits_to_bytes, bytes_to_bits, xof

TAG_NONCE = b"MDDW/NONCE"
TAG_SCHNORR = b"MDDW/SCH"
TAG_BLS_H = b"MDDW/BLSH"
TAG_BLS_HPRIME = b"MDDW/BLSH'"

DEFAULT_L_BLS = 128


@dataclass(frozen=True)
class SchnorrKeyPair:
    sk: int
    pk: Any

    @classmethod
    def generate(cls, group: Group, rng=None) -> "SchnorrKeyPair":
        sk = group.random_scalar(rng)
        return cls(sk, group.base_exp(sk))


@dataclass(frozen=True)
class SchnorrSig:
    c: int
    z: int

    def to_bytes(self, group: Group) -> bytes:
        return group.encode_scalar(self.c) + group.encode_scalar(self.z)

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "SchnorrSig":
        w = group.params.scalar_bytes
        if len(data) != 2 * w:
            raise DecodeError(f"Schnorr signature must be {2 * w} bytes, got {len(data)}")
        return cls(group.decode_scalar(data[:w]), group.decode_scalar(data[w:]))


def schnorr_sign(group: Group, sk: int, msg: bytes, rand32: bytes) -> SchnorrSig:
    if len(rand32) != 32:
        raise ValueError("signing randomness must be 32 bytes")
    pk_bytes = group.encode(group.base_exp(sk))
    k = group.hash_to_scalar(TAG_NONCE, rand32 + msg + pk_bytes)
    R = group.base_exp(k)
    c = group.hash_to_scalar(TAG_SCHNORR, group.encode(R) + pk_bytes + msg)
    z = (k - c * sk) % group.q
    return SchnorrSig(c, z)


def schnorr_verify(group: Group, pk: Any, msg: bytes, sig: SchnorrSig) -> bool:
    """Accept iff ``c == H(pk^c * g^z || pk || msg)``. Never raises on bad input."""
    try:
        if not (0 <= sig.c < group.q and 0 <= sig.z < group.q):
            return False
        R = group.mul(group.exp(pk, sig.c), group.base_exp(sig.z))
        c = group.hash_to_scalar(TAG_SCHNORR, group.encode(R) + group.encode(pk) + msg)
    except (TypeError, ValueError, AttributeError):
        return False
    return c == sig.c


@dataclass(frozen=True, eq=False)
class BlsSig:
    s: np.ndarray

    def to_bytes(self) -> bytes:
        return bits_to_bytes(self.s)

    @classmethod
    def from_bytes(cls, data: bytes, l_bls: int = DEFAULT_L_BLS) -> "BlsSig":
        if len(data) != (l_bls + 7) // 8:
            raise DecodeError(f"BLS signature must be {(l_bls + 7) // 8} bytes")
        return cls(bytes_to_bits(data, l_bls))

    def __eq__(self, other) -> bool:
        return isinstance(other, BlsSig) and np.array_equal(self.s, other.s)


def _bls_digest(group: Group, gt: Any, l_bls: int) -> np.ndarray:
    return bytes_to_bits(xof(TAG_BLS_HPRIME, group.encode_gt(gt), (l_bls + 7) // 8), l_bls)


def bls_sign(group: Group, sk: int, msg: bytes, l_bls: int = DEFAULT_L_BLS) -> BlsSig:
    h = group.hash_to_group(TAG_BLS_H, msg)
    return BlsSig(_bls_digest(group, group.pair(group.exp(h, sk), group.g), l_bls))


def bls_verify(group: Group, pk: Any, msg: bytes, sig: BlsSig, l_bls: int = DEFAULT_L_BLS) -> bool:
    h = group.hash_to_group(TAG_BLS_H, msg)
    if len(sig.s) != l_bls:
        return False
    return bool(np.array_equal(sig.s, _bls_digest(group, group.pair(h, pk), l_bls)))
