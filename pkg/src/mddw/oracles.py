"""Domain-separated hash oracles, PRF and commitment.

Everything here is derived from SHAKE256. An oracle call with ASCII tag ``T``
on input ``D`` absorbs::

    len(T) as u16 big-endian || T || D

and squeezes as many bytes as needed. Bit strings are numpy ``uint8`` arrays
of 0/1 values, most significant bit of each byte first.

Token sequences are encoded as an 8-byte big-endian length followed by one
4-byte big-endian word per token.
"""

from __future__ import annotations

import hashlib
import hmac
import struct
from typing import Sequence

import numpy as np

from .errors import DecodeError, TokenOutOfRange, WrongBlockLength

TAG_H1 = b"MDDW/H1"
TAG_H2 = b"MDDW/H2"
TAG_H3 = b"MDDW/H3"
TAG_PRF = b"MDDW/PRF"
TAG_COM = b"MDDW/COM"

PRF_KEY_BYTES = 32
COMMIT_BYTES = 32
COMMIT_RAND_BYTES = 32

_TOKEN_MAX = 1 << 32

_prefix_cache: dict[bytes, "hashlib._Hash"] = {}


def _tagged(tag: bytes):
    base = _prefix_cache.get(tag)
    if base is None:
        base = hashlib.shake_256(struct.pack(">H", len(tag)) + tag)
        _prefix_cache[tag] = base
    return base.copy()


def xof(tag: bytes, data: bytes, nbytes: int) -> bytes:
    """Squeeze ``nbytes`` from SHAKE256 over the framed ``(tag, data)``."""
    h = _tagged(tag)
    h.update(data)
    return h.digest(nbytes)


# -- bit strings ----------------------------------------------------------

def bytes_to_bits(data: bytes, nbits: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if nbits is not None:
        bits = bits[:nbits]
    return bits


def bits_to_bytes(bits: np.ndarray) -> bytes:
    """Pack bits MSB-first; a trailing partial byte is zero-padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def xor_bits(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) != len(b):
        raise ValueError(f"xor of bit strings with lengths {len(a)} and {len(b)}")
    return np.bitwise_xor(np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8))


# -- token encoding -------------------------------------------------------

def encode_tokens(tokens: Sequence[int], vocab: int | None = None) -> bytes:
    limit = _TOKEN_MAX if vocab is None else vocab
    for t in tokens:
        if not 0 <= t < limit:
            raise TokenOutOfRange(f"token {t} outside [0, {limit})")
    return struct.pack(f">Q{len(tokens)}I", len(tokens), *tokens)


def decode_tokens(data: bytes) -> list[int]:
    if len(data) < 8:
        raise DecodeError("token encoding shorter than its length header")
    (n,) = struct.unpack_from(">Q", data)
    if len(data) != 8 + 4 * n:
        raise DecodeError(f"token encoding declares {n} tokens but has {len(data) - 8} payload bytes")
    return list(struct.unpack_from(f">{n}I", data, 8))


# -- H1 / H2 / H3 ---------------------------------------------------------

def _check_block(tokens: Sequence[int], block_len: int | None) -> None:
    if block_len is not None and len(tokens) != block_len:
        raise WrongBlockLength(f"expected a block of {block_len} tokens, got {len(tokens)}")


def h1_message(tokens: Sequence[int], block_len: int | None = None) -> bytes:
    """32-byte message digest of an anchor block."""
    _check_block(tokens, block_len)
    return xof(TAG_H1, encode_tokens(tokens), 32)


def h2_mask(tokens: Sequence[int], out_bits: int, block_len: int | None = None) -> np.ndarray:
    """``out_bits`` mask bits keyed by an anchor block.

    Shorter requests are prefixes of longer ones.
    """
    _check_block(tokens, block_len)
    if out_bits < 1:
        raise ValueError("out_bits must be positive")
    return bytes_to_bits(xof(TAG_H2, encode_tokens(tokens), (out_bits + 7) // 8), out_bits)


def h3_bit(m: Sequence[int], x: Sequence[int], sigma_prev: Sequence[int],
           block_len: int | None = None) -> int:
    """Carrier bit for block ``x`` appended to the carrier prefix ``m``.

    The hashed sequence is ``m || x``; the detector, which already holds
    ``m || x`` as its running prefix, gets the same bit from
    :func:`h3_chain_bit`.
    """
    if block_len is not None:
        _check_block(x, block_len)
        if len(m) % block_len:
            raise WrongBlockLength(f"carrier prefix length {len(m)} is not a multiple of {block_len}")
    return h3_chain_bit(list(m) + list(x), sigma_prev)


def h3_chain_bit(m: Sequence[int], sigma_prev: Sequence[int]) -> int:
    h = _tagged(TAG_H3)
    h.update(encode_tokens(m))
    h.update(bytes(bytearray(sigma_prev)))
    return h.digest(1)[0] >> 7


H3_FRAME = struct.pack(">H", len(TAG_H3)) + TAG_H3
"""Length-prefixed H3 tag, the first bytes of every H3 input."""


def h3_bit_encoded(encoded_m: bytes, sigma_prev: bytes) -> int:
    """:func:`h3_chain_bit` on pre-encoded inputs (hot path of embed/detect)."""
    h = _tagged(TAG_H3)
    h.update(encoded_m)
    h.update(sigma_prev)
    return h.digest(1)[0] >> 7


# -- PRF and commitment ---------------------------------------------------

def prf_eval(key: bytes, data: bytes) -> bytes:
    if len(key) != PRF_KEY_BYTES:
        raise ValueError(f"PRF key must be {PRF_KEY_BYTES} bytes")
    return xof(TAG_PRF, key + data, 32)


def commit(msg: bytes, r: bytes) -> bytes:
    if len(r) != COMMIT_RAND_BYTES:
        raise ValueError(f"commitment randomness must be {COMMIT_RAND_BYTES} bytes")
    return xof(TAG_COM, r + msg, COMMIT_BYTES)


def decommit(com: bytes, r: bytes, msg: bytes) -> bool:
    if len(r) != COMMIT_RAND_BYTES or len(com) != COMMIT_BYTES:
        return False
    return hmac.compare_digest(commit(msg, r), com)
