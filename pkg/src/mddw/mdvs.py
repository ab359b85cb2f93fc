"""Multi-designated-verifier signature from a two-member Schnorr OR-proof.

The ring has two members: the signer key ``spk`` and a virtual key
``Y = prod(vpk_i ** h_i)`` that aggregates the designated verifiers. A
signature proves knowledge of the discrete log of one of the two, so the
signer (knowing ``ssk``) and the designated set acting together (knowing
``sum(vsk_i * h_i)``) can both produce one. Verification is public apart
from the membership check on the verifier's own key.

Verifier keys are put in canonical order (sorted by encoding) before any
hashing, so callers may pass them in any order.

No rogue-key hardening: the aggregation coefficients ``h_i`` are taken
verbatim from the original scheme and a malicious verifier choosing its key
after seeing the others is not defended against.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .algebra import Group
from .errors import EmptyVerifierSet, WrongLength
from .oracles import bits_to_bytes, bytes_to_bits

TAG_AGG = b"MDDW/MDVS-H"
TAG_CHALLENGE = b"MDDW/MDVS-C"


@dataclass(frozen=True)
class MdvsKeyPair:
    sk: int
    pk: Any

    @classmethod
    def generate(cls, group: Group, rng=None) -> "MdvsKeyPair":
        sk = group.random_scalar(rng)
        return cls(sk, group.base_exp(sk))


@dataclass(frozen=True)
class MdvsSignature:
    c1: int
    c2: int
    z1: int
    z2: int

    def to_bytes(self, group: Group) -> bytes:
        return b"".join(group.encode_scalar(v) for v in (self.c1, self.c2, self.z1, self.z2))

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "MdvsSignature":
        w = group.params.scalar_bytes
        if len(data) != 4 * w:
            raise WrongLength(f"MDVS signature must be {4 * w} bytes, got {len(data)}")
        return cls(*(group.decode_scalar(data[i * w:(i + 1) * w]) for i in range(4)))


def signature_bits(group: Group) -> int:
    return 4 * group.params.scalar_bits


def mdvs_sig_to_bits(group: Group, sig: MdvsSignature) -> np.ndarray:
    return bytes_to_bits(sig.to_bytes(group))


def mdvs_bits_to_sig(group: Group, bits: np.ndarray) -> MdvsSignature:
    if len(bits) != signature_bits(group):
        raise WrongLength(f"expected {signature_bits(group)} bits, got {len(bits)}")
    return MdvsSignature.from_bytes(group, bits_to_bytes(bits))


def canonical_verifiers(group: Group, vpks: Iterable[Any]) -> list:
    """Designated keys sorted by encoding, duplicates removed."""
    by_enc = {group.encode(v): v for v in vpks}
    return [by_enc[k] for k in sorted(by_enc)]


def encode_verifiers(group: Group, vpks: Sequence[Any]) -> bytes:
    ordered = canonical_verifiers(group, vpks)
    return struct.pack(">I", len(ordered)) + b"".join(group.encode(v) for v in ordered)


def _frame(m: bytes) -> bytes:
    return struct.pack(">Q", len(m)) + m


def _aggregate(group: Group, spk_enc: bytes, vpks: list, m: bytes):
    """Coefficients h_i and the virtual verifier key Y."""
    vpk_block = struct.pack(">I", len(vpks)) + b"".join(group.encode(v) for v in vpks)
    prefix = spk_enc + vpk_block + _frame(m)
    hs = [group.hash_to_scalar(TAG_AGG, prefix + struct.pack(">I", i)) for i in range(len(vpks))]
    Y = group.multi_exp(zip(vpks, hs))
    return hs, Y


def _challenge(group: Group, T1, T2, spk_enc: bytes, vpks: list, hs: list, m: bytes, Y) -> int:
    parts = [group.encode(T1), group.encode(T2), spk_enc, struct.pack(">I", len(vpks))]
    for v, h in zip(vpks, hs):
        parts.append(group.encode(v))
        parts.append(group.encode_scalar(h))
    parts.append(_frame(m))
    parts.append(group.encode(Y))
    return group.hash_to_scalar(TAG_CHALLENGE, b"".join(parts))


def mdvs_sign(group: Group, ssk: int, spk: Any, vpks: Sequence[Any], m: bytes, rng=None) -> MdvsSignature:
    """Sign ``m`` for the designated keys ``vpks`` (order irrelevant)."""
    vpks = canonical_verifiers(group, vpks)
    if not vpks:
        raise EmptyVerifierSet("at least one designated verifier is required")
    spk_enc = group.encode(spk)
    hs, Y = _aggregate(group, spk_enc, vpks, m)
    q = group.q
    r, c2, z2 = (group.random_scalar(rng) for _ in range(3))
    T1 = group.base_exp(r)
    T2 = group.mul(group.exp(Y, c2), group.base_exp(z2))
    c = _challenge(group, T1, T2, spk_enc, vpks, hs, m, Y)
    c1 = (c - c2) % q
    z1 = (r - c1 * ssk) % q
    return MdvsSignature(c1, c2, z1, z2)


def mdvs_check(group: Group, spk: Any, vpks: Sequence[Any], m: bytes, sig: MdvsSignature) -> bool:
    """The ring equation alone; needs no secret."""
    vpks = canonical_verifiers(group, vpks)
    if not vpks:
        return False
    spk_enc = group.encode(spk)
    return check_aggregated(group, spk, spk_enc, vpks, m, _aggregate(group, spk_enc, vpks, m), sig)


def aggregate(group: Group, spk: Any, vpks: Sequence[Any], m: bytes):
    """The message-dependent part of verification, ``(h_i, Y)``; reusable across signatures on ``m``."""
    return _aggregate(group, group.encode(spk), canonical_verifiers(group, vpks), m)


def check_aggregated(group: Group, spk: Any, spk_enc: bytes, vpks: list, m: bytes, agg, sig: MdvsSignature) -> bool:
    """:func:`mdvs_check` with canonical ``vpks`` and a precomputed :func:`aggregate`."""
    q = group.q
    if not all(0 <= v < q for v in (sig.c1, sig.c2, sig.z1, sig.z2)):
        return False
    hs, Y = agg
    T1 = group.mul(group.exp(spk, sig.c1), group.base_exp(sig.z1))
    T2 = group.mul(group.exp(Y, sig.c2), group.base_exp(sig.z2))
    c = _challenge(group, T1, T2, spk_enc, vpks, hs, m, Y)
    return c == (sig.c1 + sig.c2) % q


def is_designated(group: Group, vsk: int, vpks: Sequence[Any]) -> bool:
    mine = group.encode(group.base_exp(vsk))
    return any(group.encode(v) == mine for v in vpks)


def mdvs_verify(group: Group, spk: Any, vsk: int, vpks: Sequence[Any], m: bytes, sig: MdvsSignature) -> bool:
    """Verify as the holder of ``vsk``; returns False if that key is not designated."""
    if not is_designated(group, vsk, vpks):
        return False
    return mdvs_check(group, spk, vpks, m, sig)


def mdvs_fge_ds(group: Group, spk: Any, vsks: Sequence[int], m: bytes, rng=None) -> MdvsSignature:
    """Signature on ``m`` produced jointly by the whole designated set.

    The signer branch is simulated and the aggregated-verifier branch is
    proven honestly with ``sum(vsk_i * h_i)`` as witness.
    """
    if not vsks:
        raise EmptyVerifierSet("forging needs the secrets of the designated set")
    q = group.q
    by_enc = {}
    for vsk in vsks:
        by_enc[group.encode(group.base_exp(vsk))] = vsk % q
    order = sorted(by_enc)
    vpks = [group.base_exp(by_enc[k]) for k in order]
    spk_enc = group.encode(spk)
    hs, Y = _aggregate(group, spk_enc, vpks, m)
    sk_y = sum(by_enc[k] * h for k, h in zip(order, hs)) % q
    c1, z1, r = (group.random_scalar(rng) for _ in range(3))
    T1 = group.mul(group.exp(spk, c1), group.base_exp(z1))
    T2 = group.base_exp(r)
    c = _challenge(group, T1, T2, spk_enc, vpks, hs, m, Y)
    c2 = (c - c1) % q
    z2 = (r - c2 * sk_y) % q
    return MdvsSignature(c1, c2, z1, z2)
