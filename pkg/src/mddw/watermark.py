"""Embedding, detection, designated-set forging and claiming of watermarks.

Layout of one watermark, ``W = (len_sig + 1) * block_len`` tokens::

    | anchor (block_len) | carrier 1 | carrier 2 | ... | carrier len_sig |

The anchor is ordinary model output; its digest is signed. Each carrier
block is rejection-sampled until ``h3(carriers so far, bits so far)`` equals
the next signature bit. Watermarks are laid back to back from offset 0 while
``|t| + W < n`` and the rest is padded with plain model output.

Backends differ only in how a signature becomes bits:

========  ===================================  ========
backend   embedded bits                        XOR mask
========  ===================================  ========
mdvs      c1 || c2 || z1 || z2                 yes
cmdvs     c1 || c2 || z1 || z2 || com          yes
ddw       DVS ``s`` (r derived from anchor)    no
pdw       hash-valued BLS                      no
========  ===================================  ========
"""

from __future__ import annotations

import abc
import hashlib
import secrets
import struct
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import cmdvs as _cmdvs
from . import mdvs as _mdvs
from .algebra import Group
from .base_sigs import DEFAULT_L_BLS, BlsSig, SchnorrSig, bls_sign, bls_verify
from .cmdvs import CmdvsClaim, CmdvsPublicKey, CmdvsSignature, CmdvsSignerKey
from .dvs import DEFAULT_L, DvsSig, derive_r, dvs_expected, dvs_sign, dvs_verify
from .errors import (
    BackendUnsupported,
    DecodeError,
    EmptyVerifierSet,
    IncompleteSecretSet,
    LowEntropyModel,
    TokenOutOfRange,
)
from .oracles import bits_to_bytes, bytes_to_bits, encode_tokens, h1_message, h2_mask, h3_bit_encoded, xor_bits
from .oracles import H3_FRAME

BACKENDS = ("mdvs", "cmdvs", "ddw", "pdw")
XOR_BACKENDS = frozenset({"mdvs", "cmdvs"})
DEFAULT_MAX_ATTEMPTS = 4096
_AGG_CACHE = 1 << 16  # anchors whose (h_i, Y) a detector keeps

_HEADERS = [struct.pack(">Q", i) for i in range(8192)]


def backend_len_sig(backend: str, group: Group, l: int | None = None) -> int:
    """Signature bit length for a backend over ``group``."""
    if backend == "mdvs":
        return _mdvs.signature_bits(group)
    if backend == "cmdvs":
        return _cmdvs.signature_bits(group)
    if backend == "ddw":
        return DEFAULT_L if l is None else l
    if backend == "pdw":
        return DEFAULT_L_BLS if l is None else l
    raise BackendUnsupported(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class WatermarkParams:
    n: int
    block_len: int
    len_sig: int
    backend: str
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise BackendUnsupported(f"unknown backend {self.backend!r}")
        if self.block_len < 1 or self.len_sig < 1 or self.n < 0:
            raise ValueError("n, block_len and len_sig must be positive")

    @classmethod
    def for_backend(cls, backend: str, group: Group, n: int, block_len: int, l: int | None = None,
                    max_attempts: int = DEFAULT_MAX_ATTEMPTS) -> "WatermarkParams":
        return cls(n, block_len, backend_len_sig(backend, group, l), backend, max_attempts)

    @property
    def window(self) -> int:
        """Tokens occupied by one watermark."""
        return (self.len_sig + 1) * self.block_len

    @property
    def xor_mask(self) -> bool:
        return self.backend in XOR_BACKENDS

    def expected_watermarks(self) -> int:
        """Watermarks placed by the embedding loop for a length-``n`` output."""
        if self.n <= self.window:
            return 0
        return -(-(self.n - self.window) // self.window)


# -- backends --------------------------------------------------------------

class _Backend:
    name: str
    len_sig: int

    def check(self, params: WatermarkParams) -> None:
        if params.backend != self.name:
            raise BackendUnsupported(f"params are for {params.backend!r} but backend is {self.name!r}")
        if params.len_sig != self.len_sig:
            raise ValueError(f"len_sig {params.len_sig} does not match backend's {self.len_sig}")


class MdvsSigner(_Backend):
    name = "mdvs"

    def __init__(self, group: Group, ssk: int, spk: Any, vpks: Sequence[Any], rng=None):
        self.group, self.ssk, self.spk, self.rng = group, ssk, spk, rng
        self.vpks = _mdvs.canonical_verifiers(group, vpks)
        self.len_sig = _mdvs.signature_bits(group)

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        sig = _mdvs.mdvs_sign(self.group, self.ssk, self.spk, self.vpks, msg, self.rng)
        return _mdvs.mdvs_sig_to_bits(self.group, sig)


class MdvsForger(MdvsSigner):
    """Stands in for the signer using the designated set's secrets."""

    def __init__(self, group: Group, spk: Any, vsks: Sequence[int], rng=None):
        super().__init__(group, 0, spk, [group.base_exp(v) for v in vsks], rng)
        self.vsks = list(vsks)

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        sig = _mdvs.mdvs_fge_ds(self.group, self.spk, self.vsks, msg, self.rng)
        return _mdvs.mdvs_sig_to_bits(self.group, sig)


class MdvsDetector(_Backend):
    name = "mdvs"

    def __init__(self, group: Group, spk: Any, vsk: int, vpks: Sequence[Any]):
        self.group, self.spk, self.vsk = group, spk, vsk
        self.vpks = _mdvs.canonical_verifiers(group, vpks)
        self.len_sig = _mdvs.signature_bits(group)
        self.designated = _mdvs.is_designated(group, vsk, self.vpks)
        self._spk_enc = group.encode(spk)
        self._agg: dict[bytes, Any] = {}

    def verify_bits(self, msg: bytes, anchor: Sequence[int], bits: np.ndarray) -> bool:
        if not self.designated:
            return False
        try:
            sig = _mdvs.mdvs_bits_to_sig(self.group, bits)
        except DecodeError:
            return False
        agg = self._agg.get(msg)
        if agg is None:
            if len(self._agg) >= _AGG_CACHE:
                self._agg.clear()
            agg = self._agg[msg] = _mdvs.aggregate(self.group, self.spk, self.vpks, msg)
        return _mdvs.check_aggregated(self.group, self.spk, self._spk_enc, self.vpks, msg, agg, sig)


class CmdvsSigner(_Backend):
    name = "cmdvs"

    def __init__(self, group: Group, sk: CmdvsSignerKey, vpks: Sequence[Any], rng=None):
        self.group, self.sk, self.rng = group, sk, rng
        self.vpks = _mdvs.canonical_verifiers(group, vpks)
        self.len_sig = _cmdvs.signature_bits(group)

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        sig = _cmdvs.cmdvs_sign(self.group, self.sk, self.vpks, msg, self.rng)
        return bytes_to_bits(sig.to_bytes(self.group))


class CmdvsForger(_Backend):
    """Designated-set forgery for the claimable backend; the commitment is random."""

    name = "cmdvs"

    def __init__(self, group: Group, spk: CmdvsPublicKey, vsks: Sequence[int], rng=None):
        self.group, self.spk, self.vsks, self.rng = group, spk, list(vsks), rng
        self.len_sig = _cmdvs.signature_bits(group)

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        inner = _mdvs.mdvs_fge_ds(self.group, self.spk.spk_mdvs, self.vsks, msg, self.rng)
        com = self.rng.randbytes(32) if self.rng is not None else secrets.token_bytes(32)
        return bytes_to_bits(CmdvsSignature(inner, com).to_bytes(self.group))


class CmdvsDetector(_Backend):
    name = "cmdvs"

    def __init__(self, group: Group, spk: CmdvsPublicKey, vsk: int, vpks: Sequence[Any]):
        self.group, self.spk, self.vsk = group, spk, vsk
        self.vpks = _mdvs.canonical_verifiers(group, vpks)
        self.len_sig = _cmdvs.signature_bits(group)
        self.designated = _mdvs.is_designated(group, vsk, self.vpks)

    def verify_bits(self, msg: bytes, anchor: Sequence[int], bits: np.ndarray) -> bool:
        if not self.designated:
            return False
        try:
            sig = CmdvsSignature.from_bytes(self.group, bits_to_bytes(bits))
        except DecodeError:
            return False
        return _mdvs.mdvs_check(self.group, self.spk.spk_mdvs, self.vpks, msg, sig.inner)


class DdwSigner(_Backend):
    name = "ddw"

    def __init__(self, group: Group, ssk: int, vpk: Any, l: int = DEFAULT_L):
        self.group, self.ssk, self.vpk, self.len_sig = group, ssk, vpk, l

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        return dvs_sign(self.group, self.ssk, self.vpk, msg, mode="s_only", ctx=encode_tokens(anchor),
                        l=self.len_sig).s


class DdwForger(_Backend):
    """The designated detector recomputes exactly what the signer would send."""

    name = "ddw"

    def __init__(self, group: Group, spk: Any, vsk: int, l: int = DEFAULT_L):
        self.group, self.spk, self.vsk, self.len_sig = group, spk, vsk, l

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        return dvs_expected(self.group, self.spk, self.vsk, msg, derive_r(encode_tokens(anchor)), self.len_sig)


class DdwDetector(_Backend):
    name = "ddw"

    def __init__(self, group: Group, spk: Any, vsk: int, l: int = DEFAULT_L):
        self.group, self.spk, self.vsk, self.len_sig = group, spk, vsk, l

    def verify_bits(self, msg: bytes, anchor: Sequence[int], bits: np.ndarray) -> bool:
        return dvs_verify(self.group, self.spk, self.vsk, msg, DvsSig(bits), mode="s_only",
                          ctx=encode_tokens(anchor), l=self.len_sig)


class PdwSigner(_Backend):
    name = "pdw"

    def __init__(self, group: Group, sk: int, l: int = DEFAULT_L_BLS):
        self.group, self.sk, self.len_sig = group, sk, l

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        return bls_sign(self.group, self.sk, msg, self.len_sig).s


class PdwDetector(_Backend):
    """Public detection with the signer's public key only."""

    name = "pdw"

    def __init__(self, group: Group, pk: Any, l: int = DEFAULT_L_BLS):
        self.group, self.pk, self.len_sig = group, pk, l

    def verify_bits(self, msg: bytes, anchor: Sequence[int], bits: np.ndarray) -> bool:
        return bls_verify(self.group, self.pk, msg, BlsSig(bits), self.len_sig)


# -- embedding -------------------------------------------------------------

@dataclass
class EmbedStats:
    """Filled in by :func:`watmar` when passed."""

    anchors: list[int] = field(default_factory=list)
    attempts: list[int] = field(default_factory=list)
    embedded_bits: list[np.ndarray] = field(default_factory=list)

    @property
    def mean_attempts(self) -> float:
        return float(np.mean(self.attempts)) if self.attempts else float("nan")


def _pack(tokens: Sequence[int]) -> bytes:
    try:
        return struct.pack(f">{len(tokens)}I", *tokens)
    except struct.error as exc:
        raise TokenOutOfRange(str(exc)) from exc


def watmar(params: WatermarkParams, signer, model, prompt: Sequence[int],
           stats: EmbedStats | None = None) -> list[int]:
    """Generate ``params.n`` tokens carrying back-to-back watermarks."""
    signer.check(params)
    ell = params.block_len
    if model.block_len != ell:
        raise ValueError(f"model block_len {model.block_len} differs from params block_len {ell}")
    t: list[int] = []
    while len(t) + params.window < params.n:
        anchor = model.gen_block(prompt, t)
        if stats is not None:
            stats.anchors.append(len(t))
        t.extend(anchor)
        sigma = signer.sign_bits(h1_message(anchor), anchor)
        if params.xor_mask:
            sigma = xor_bits(sigma, h2_mask(anchor, params.len_sig))
        if stats is not None:
            stats.embedded_bits.append(np.array(sigma, dtype=np.uint8))
        carrier = bytearray()
        sigma_prev = bytearray()
        for bit in sigma.tolist():
            header = struct.pack(">Q", len(carrier) // 4 + ell)
            for attempt in range(1, params.max_attempts + 1):
                x = model.gen_block(prompt, t)
                xb = _pack(x)
                if h3_bit_encoded(header + carrier + xb, sigma_prev) == bit:
                    break
            else:
                raise LowEntropyModel(
                    f"no carrier block hashed to bit {bit} within {params.max_attempts} attempts")
            carrier += xb
            sigma_prev.append(bit)
            t.extend(x)
            if stats is not None:
                stats.attempts.append(attempt)
    if len(t) < params.n:
        t.extend(model.generate(prompt, t, params.n - len(t)))
    return t


# -- detection -------------------------------------------------------------

@dataclass(frozen=True)
class DetectResult:
    detected: bool
    offset: int | None
    backend: str

    def to_json(self) -> dict:
        out: dict = {"detected": self.detected}
        if self.offset is not None:
            out["offset"] = self.offset
        return out


def extract_bits(params: WatermarkParams, tokens: Sequence[int], offset: int,
                 packed: bytes | None = None) -> np.ndarray:
    """Carrier bits of the window at ``offset``, before any unmasking."""
    ell = params.block_len
    if packed is None:
        packed = _pack(tokens)
    if offset < 0 or offset + params.window > len(tokens):
        raise ValueError(f"window at offset {offset} does not fit in {len(tokens)} tokens")
    start = 4 * (offset + ell)
    step = 4 * ell
    body = packed[start:start + step * params.len_sig]
    shake = hashlib.shake_256
    sigma = bytearray()
    # one constructor call per bit: same bytes as h3_bit_encoded, far less call overhead
    for phi in range(1, params.len_sig + 1):
        header = _HEADERS[phi * ell] if phi * ell < len(_HEADERS) else struct.pack(">Q", phi * ell)
        sigma.append(shake(H3_FRAME + header + body[:step * phi] + sigma).digest(1)[0] >> 7)
    return np.frombuffer(bytes(sigma), dtype=np.uint8)


def extract_signature_bits(params: WatermarkParams, tokens: Sequence[int], offset: int,
                           packed: bytes | None = None) -> np.ndarray:
    """Signature bits at ``offset``: carrier bits, unmasked for XOR backends."""
    bits = extract_bits(params, tokens, offset, packed)
    if params.xor_mask:
        bits = xor_bits(bits, h2_mask(tokens[offset:offset + params.block_len], params.len_sig))
    return bits


def detect(params: WatermarkParams, detector, tokens: Sequence[int]) -> DetectResult:
    """Scan every window offset; report the first one whose signature verifies."""
    detector.check(params)
    tokens = list(tokens)
    packed = _pack(tokens)
    ell = params.block_len
    for mu in range(0, len(tokens) - params.window + 1):
        anchor = tokens[mu:mu + ell]
        bits = extract_signature_bits(params, tokens, mu, packed)
        if detector.verify_bits(h1_message(anchor), anchor, bits):
            return DetectResult(True, mu, params.backend)
    return DetectResult(False, None, params.backend)


# -- designated-set forging -------------------------------------------------

def forge_ds(params: WatermarkParams, group: Group, spk, detector_secrets: Sequence[int], model,
             prompt: Sequence[int], *, detector_pubs: Sequence[Any] | None = None, rng=None,
             stats: EmbedStats | None = None) -> list[int]:
    """Watermarked-looking text produced by the designated detectors together.

    ``spk`` is the signer's public key (a :class:`CmdvsPublicKey` for the
    claimable backend). If ``detector_pubs`` is given, the secrets must cover
    exactly that set.
    """
    if params.backend == "pdw":
        raise BackendUnsupported("public detection has no designated set to forge with")
    if not detector_secrets:
        raise EmptyVerifierSet("forging needs the designated detectors' secrets")
    if detector_pubs is not None:
        have = {group.encode(group.base_exp(v)) for v in detector_secrets}
        want = {group.encode(v) for v in detector_pubs}
        if have != want:
            raise IncompleteSecretSet("secrets do not match the designated detector set")
    if params.backend == "mdvs":
        forger = MdvsForger(group, spk, detector_secrets, rng)
    elif params.backend == "cmdvs":
        forger = CmdvsForger(group, spk, detector_secrets, rng)
    else:
        if len(detector_secrets) != 1:
            raise IncompleteSecretSet("ddw has exactly one designated detector")
        forger = DdwForger(group, spk, detector_secrets[0], params.len_sig)
    return watmar(params, forger, model, prompt, stats)


class AnySubsetForger(abc.ABC):
    """Interface for forging with the secrets of an arbitrary detector subset.

    No concrete scheme here supports this; the interface lets such a scheme
    plug into :func:`forge_as` by producing signature bits the full
    designated set would accept.
    """

    name: str
    len_sig: int

    @abc.abstractmethod
    def forge_bits(self, msg: bytes, anchor: Sequence[int], subset_secrets: Sequence[int]) -> np.ndarray:
        ...


class _SubsetSigner(_Backend):
    def __init__(self, forger: AnySubsetForger, subset_secrets: Sequence[int]):
        self.name, self.len_sig = forger.name, forger.len_sig
        self.forger, self.secrets = forger, list(subset_secrets)

    def sign_bits(self, msg: bytes, anchor: Sequence[int]) -> np.ndarray:
        return self.forger.forge_bits(msg, anchor, self.secrets)


def forge_as(params: WatermarkParams, forger: AnySubsetForger, subset_secrets: Sequence[int], model,
             prompt: Sequence[int]) -> list[int]:
    """Text forged by a detector subset through a pluggable :class:`AnySubsetForger`."""
    return watmar(params, _SubsetSigner(forger, subset_secrets), model, prompt)


# -- claiming ----------------------------------------------------------------

@dataclass(frozen=True)
class ClaimEntry:
    offset: int
    claim: CmdvsClaim


@dataclass(frozen=True)
class TextClaimProof:
    proofs: tuple[ClaimEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.proofs)

    def to_json(self, group: Group) -> dict:
        return {"proofs": [{"offset": e.offset, "r_commit": e.claim.r_commit.hex(),
                            "sigma_sig": e.claim.sigma_sig.to_bytes(group).hex()} for e in self.proofs]}

    @classmethod
    def from_json(cls, group: Group, obj: dict) -> "TextClaimProof":
        entries = []
        for p in obj["proofs"]:
            claim = CmdvsClaim(bytes.fromhex(p["r_commit"]),
                               SchnorrSig.from_bytes(group, bytes.fromhex(p["sigma_sig"])))
            entries.append(ClaimEntry(int(p["offset"]), claim))
        return cls(tuple(entries))


def _signature_at(params: WatermarkParams, group: Group, tokens: Sequence[int], offset: int,
                  packed: bytes) -> CmdvsSignature | None:
    bits = extract_signature_bits(params, tokens, offset, packed)
    try:
        return CmdvsSignature.from_bytes(group, bits_to_bytes(bits))
    except DecodeError:
        return None


def _require_cmdvs(params: WatermarkParams, group: Group) -> None:
    if params.backend != "cmdvs":
        raise BackendUnsupported("claiming needs the cmdvs backend")
    if params.len_sig != _cmdvs.signature_bits(group):
        raise ValueError("len_sig does not match the cmdvs signature length for this group")


def claim_text(params: WatermarkParams, group: Group, sk: CmdvsSignerKey, detector_pubs: Sequence[Any],
               tokens: Sequence[int]) -> TextClaimProof:
    """Claims for every watermark slot (stride ``params.window`` from 0) this key signed."""
    _require_cmdvs(params, group)
    tokens = list(tokens)
    packed = _pack(tokens)
    entries = []
    for mu in range(0, len(tokens) - params.window + 1, params.window):
        sig = _signature_at(params, group, tokens, mu, packed)
        if sig is None:
            continue
        claim = _cmdvs.cmdvs_claim(group, sk, detector_pubs, sig)
        if claim is not None:
            entries.append(ClaimEntry(mu, claim))
    return TextClaimProof(tuple(entries))


def clmver_text(params: WatermarkParams, group: Group, spk: CmdvsPublicKey, detector_pubs: Sequence[Any],
                tokens: Sequence[int], proof: TextClaimProof) -> bool:
    _require_cmdvs(params, group)
    tokens = list(tokens)
    packed = _pack(tokens)
    for entry in proof.proofs:
        mu = entry.offset
        if mu < 0 or mu + params.window > len(tokens):
            continue
        sig = _signature_at(params, group, tokens, mu, packed)
        if sig is not None and _cmdvs.cmdvs_clm_ver(group, spk, detector_pubs, sig, entry.claim):
            return True
    return False


# -- overlap predicate -------------------------------------------------------

def nolap_k(k: int, candidate: Sequence[int], corpus: Sequence[Sequence[int]]) -> bool:
    """True iff no ``k``-token window of ``candidate`` occurs in any corpus text.

    Windows are hashed as tuples; set membership confirms equality exactly.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    seen = set()
    for text in corpus:
        text = tuple(text)
        for i in range(len(text) - k + 1):
            seen.add(text[i:i + k])
    cand = tuple(candidate)
    return not any(cand[i:i + k] in seen for i in range(len(cand) - k + 1))
