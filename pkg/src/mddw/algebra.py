"""Prime-order groups used by every scheme in the package.

Three backends are registered under fixed ids:

``toy23``
    Order-11 subgroup of Z_23^*, generator 2. Small enough to enumerate.
``test16``
    Order-65521 subgroup of Z_p^* for the pinned 32-bit prime
    p = 2149481927 = 2 * 16401 * 65521 + 1. Used for fast end-to-end runs.
``prod128``
    BLS12-381 with a symmetric-pairing view: an element g^x is carried as the
    pair (g1^x, g2^x), and ``pair(a, b) = e(a.g1, b.g2)``. Backed by the
    arkworks bindings in ``py_arkworks_bls12381``.

Scalars are plain ints reduced mod q. Encodings are fixed-width big-endian:

========  ============  =============  =====================================
group     scalar bytes  element bytes  element layout
========  ============  =============  =====================================
toy23     1             1              x mod p
test16    2             4              x mod p
prod128   32            144            compressed G1 (48) || compressed G2 (96)
========  ============  =============  =====================================

Pairing-target elements on prod128 encode to 576 bytes (the Fq12 value as
serialised by arkworks).

``hash_to_group`` returns ``g ** hash_to_scalar(...)``. Its discrete log is
therefore public, which is fine for correctness but means that schemes whose
unforgeability rests on an unknown-log hash (BLS, the pairing DVS) are only
correctness-faithful here, not secure.
"""

from __future__ import annotations

import functools
import random
import secrets
import struct
from dataclasses import dataclass
from typing import Any, NamedTuple

from .errors import DecodeError, PairingUnavailable
from .oracles import xof

__all__ = [
    "GroupParams",
    "Group",
    "ModPGroup",
    "Bls12Group",
    "DualPoint",
    "get_group",
    "GROUP_IDS",
]

GROUP_IDS = ("toy23", "test16", "prod128")

BLS12_381_R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
# base-field characteristic, recorded in GroupParams.p
BLS12_381_P = int(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab", 16)


@dataclass(frozen=True)
class GroupParams:
    group_id: str
    p: int
    q: int
    g: bytes
    pairing_available: bool
    scalar_bytes: int
    element_bytes: int
    gt_bytes: int = 0

    @property
    def scalar_bits(self) -> int:
        return 8 * self.scalar_bytes


class Group:
    """Operations common to all backends. Subclasses supply the arithmetic."""

    params: GroupParams

    # -- subclass hooks --------------------------------------------------
    @property
    def identity(self) -> Any:
        raise NotImplementedError

    @property
    def g(self) -> Any:
        raise NotImplementedError

    def exp(self, base: Any, e: int) -> Any:
        raise NotImplementedError

    def mul(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def encode(self, x: Any) -> bytes:
        raise NotImplementedError

    def decode(self, data: bytes) -> Any:
        raise NotImplementedError

    def pair(self, a: Any, b: Any) -> Any:
        raise PairingUnavailable(f"group {self.params.group_id} has no pairing")

    def encode_gt(self, x: Any) -> bytes:
        raise PairingUnavailable(f"group {self.params.group_id} has no pairing")

    # -- shared ----------------------------------------------------------
    @property
    def q(self) -> int:
        return self.params.q

    @property
    def group_id(self) -> str:
        return self.params.group_id

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.params.group_id}>"

    def base_exp(self, e: int) -> Any:
        return self.exp(self.g, e)

    def multi_exp(self, pairs) -> Any:
        """Product of ``base ** e`` over ``(base, e)`` pairs."""
        acc = self.identity
        for base, e in pairs:
            acc = self.mul(acc, self.exp(base, e))
        return acc

    def inverse(self, x: Any) -> Any:
        return self.exp(x, self.q - 1)

    def random_scalar(self, rng: random.Random | None = None) -> int:
        """Uniform scalar in [1, q)."""
        if rng is None:
            return 1 + secrets.randbelow(self.q - 1)
        return rng.randrange(1, self.q)

    def encode_scalar(self, s: int) -> bytes:
        return (s % self.q).to_bytes(self.params.scalar_bytes, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.params.scalar_bytes:
            raise DecodeError(f"scalar must be {self.params.scalar_bytes} bytes, got {len(data)}")
        s = int.from_bytes(data, "big")
        if s >= self.q:
            raise DecodeError("scalar not reduced mod q")
        return s

    def hash_to_scalar(self, tag: bytes, msg: bytes) -> int:
        """Nonzero scalar from ``2 * scalar_bytes`` bytes of XOF output.

        A zero result is rejected by re-hashing with the next counter value.
        """
        wide = 2 * self.params.scalar_bytes
        counter = 0
        while True:
            h = int.from_bytes(xof(tag, msg + struct.pack(">I", counter), wide), "big") % self.q
            if h:
                return h
            counter += 1

    def hash_to_group(self, tag: bytes, msg: bytes) -> Any:
        return self.exp(self.g, self.hash_to_scalar(tag, msg))

    def in_subgroup(self, x: Any) -> bool:
        raise NotImplementedError

    def gt_identity(self) -> Any:
        raise PairingUnavailable(f"group {self.params.group_id} has no pairing")

    def gt_mul(self, a: Any, b: Any) -> Any:
        raise PairingUnavailable(f"group {self.params.group_id} has no pairing")

    def gt_exp(self, x: Any, e: int) -> Any:
        """Square-and-multiply in the pairing target group."""
        e %= self.q
        acc = self.gt_identity()
        for bit in bin(e)[2:]:
            acc = self.gt_mul(acc, acc)
            if bit == "1":
                acc = self.gt_mul(acc, x)
        return acc


class ModPGroup(Group):
    """Order-q subgroup of Z_p^* with elements as ints."""

    def __init__(self, group_id: str, p: int, q: int, g: int):
        if (p - 1) % q:
            raise ValueError("q must divide p - 1")
        if g == 1 or pow(g, q, p) != 1:
            raise ValueError("g must have order q")
        self._p = p
        self._g = g
        ebytes = (p.bit_length() + 7) // 8
        self.params = GroupParams(
            group_id=group_id,
            p=p,
            q=q,
            g=g.to_bytes(ebytes, "big"),
            pairing_available=False,
            scalar_bytes=(q.bit_length() + 7) // 8,
            element_bytes=ebytes,
        )

    @property
    def identity(self) -> int:
        return 1

    @property
    def g(self) -> int:
        return self._g

    def exp(self, base: int, e: int) -> int:
        return pow(base, e % self.q, self._p)

    def mul(self, a: int, b: int) -> int:
        return a * b % self._p

    def in_subgroup(self, x: int) -> bool:
        # exp() reduces the exponent mod q, so check the order directly
        return 0 < x < self._p and pow(x, self.q, self._p) == 1

    def encode(self, x: int) -> bytes:
        return x.to_bytes(self.params.element_bytes, "big")

    def decode(self, data: bytes) -> int:
        if len(data) != self.params.element_bytes:
            raise DecodeError(f"element must be {self.params.element_bytes} bytes, got {len(data)}")
        x = int.from_bytes(data, "big")
        if not 0 < x < self._p or pow(x, self.q, self._p) != 1:
            raise DecodeError("element not in the order-q subgroup")
        return x


class DualPoint(NamedTuple):
    """g^x on BLS12-381, held in both source groups."""

    g1: Any
    g2: Any


class Bls12Group(Group):
    """BLS12-381 seen as a symmetric-pairing group via :class:`DualPoint`."""

    G1_BYTES = 48
    G2_BYTES = 96
    GT_BYTES = 576

    def __init__(self):
        import py_arkworks_bls12381 as ark

        self._ark = ark
        self._g = DualPoint(ark.G1Point(), ark.G2Point())
        self._id = DualPoint(ark.G1Point.identity(), ark.G2Point.identity())
        self._gt_base = None
        self.params = GroupParams(
            group_id="prod128",
            p=BLS12_381_P,
            q=BLS12_381_R,
            g=self._encode(self._g),
            pairing_available=True,
            scalar_bytes=32,
            element_bytes=self.G1_BYTES + self.G2_BYTES,
            gt_bytes=self.GT_BYTES,
        )

    @property
    def identity(self) -> DualPoint:
        return self._id

    @property
    def g(self) -> DualPoint:
        return self._g

    def exp(self, base: DualPoint, e: int) -> DualPoint:
        s = self._ark.Scalar(e % self.q)
        return DualPoint(base.g1 * s, base.g2 * s)

    def mul(self, a: DualPoint, b: DualPoint) -> DualPoint:
        return DualPoint(a.g1 + b.g1, a.g2 + b.g2)

    @staticmethod
    def _encode(x: DualPoint) -> bytes:
        return bytes(x.g1.to_compressed_bytes()) + bytes(x.g2.to_compressed_bytes())

    def encode(self, x: DualPoint) -> bytes:
        return self._encode(x)

    def decode(self, data: bytes) -> DualPoint:
        if len(data) != self.params.element_bytes:
            raise DecodeError(f"element must be {self.params.element_bytes} bytes, got {len(data)}")
        try:
            p1 = self._ark.G1Point.from_compressed_bytes(list(data[: self.G1_BYTES]))
            p2 = self._ark.G2Point.from_compressed_bytes(list(data[self.G1_BYTES:]))
        except ValueError as exc:
            raise DecodeError(f"bad curve point: {exc}") from exc
        # both halves must share one discrete log
        GT = self._ark.GT
        if GT.pairing(p1, self._g.g2) != GT.pairing(self._g.g1, p2):
            raise DecodeError("G1 and G2 halves have different discrete logs")
        return DualPoint(p1, p2)

    def pair(self, a: DualPoint, b: DualPoint):
        return self._ark.GT.pairing(a.g1, b.g2)

    def encode_gt(self, x) -> bytes:
        return bytes.fromhex(str(x))

    def gt_identity(self):
        return self._ark.GT.one()

    def gt_mul(self, a, b):
        return a * b

    def in_subgroup(self, x: DualPoint) -> bool:
        # compressed decoding with checks enforces prime-order subgroup membership
        try:
            self.decode(self.encode(x))
        except DecodeError:
            return False
        return True


@functools.lru_cache(maxsize=None)
def get_group(group_id: str) -> Group:
    if group_id == "toy23":
        return ModPGroup("toy23", 23, 11, 2)
    if group_id == "test16":
        return ModPGroup("test16", 2149481927, 65521, 687385019)
    if group_id == "prod128":
        return Bls12Group()
    raise ValueError(f"unknown group id {group_id!r}; expected one of {GROUP_IDS}")
