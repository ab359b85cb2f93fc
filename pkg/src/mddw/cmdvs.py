"""Claimable MDVS: an MDVS signature plus a commitment the signer can open.

Signing derives two values from a PRF keyed by the signer:

* ``r_sig``    = PRF(k, spk || sigma_mdvs || 0x00), the Schnorr randomness
* ``r_commit`` = PRF(k, spk || sigma_mdvs || 0x01), the commitment randomness

and commits to ``spk || vpks || schnorr_sig``. Verification ignores the
commitment. Claiming recomputes both PRF values and the Schnorr signature,
checks that they open the commitment, and reveals ``(r_commit, schnorr_sig)``.

Here ``spk`` is always the full public key, Schnorr half then MDVS half.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Any, Sequence

from .algebra import Group
from .base_sigs import SchnorrSig, schnorr_sign, schnorr_verify
from .errors import DecodeError, WrongLength
from .mdvs import MdvsSignature, encode_verifiers, mdvs_sign, mdvs_verify
from .oracles import COMMIT_BYTES, PRF_KEY_BYTES, commit, decommit, prf_eval


@dataclass(frozen=True)
class CmdvsPublicKey:
    spk_sig: Any
    spk_mdvs: Any

    def to_bytes(self, group: Group) -> bytes:
        return group.encode(self.spk_sig) + group.encode(self.spk_mdvs)


@dataclass(frozen=True)
class CmdvsSignerKey:
    k: bytes
    ssk_sig: int
    spk_sig: Any
    ssk_mdvs: int
    spk_mdvs: Any

    @classmethod
    def generate(cls, group: Group, rng=None) -> "CmdvsSignerKey":
        if rng is None:
            k = secrets.token_bytes(PRF_KEY_BYTES)
        else:
            k = rng.randbytes(PRF_KEY_BYTES)
        ssk_sig = group.random_scalar(rng)
        ssk_mdvs = group.random_scalar(rng)
        return cls(k, ssk_sig, group.base_exp(ssk_sig), ssk_mdvs, group.base_exp(ssk_mdvs))

    @property
    def public(self) -> CmdvsPublicKey:
        return CmdvsPublicKey(self.spk_sig, self.spk_mdvs)


@dataclass(frozen=True)
class CmdvsSignature:
    inner: MdvsSignature
    com: bytes

    def to_bytes(self, group: Group) -> bytes:
        return self.inner.to_bytes(group) + self.com

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "CmdvsSignature":
        w = 4 * group.params.scalar_bytes
        if len(data) != w + COMMIT_BYTES:
            raise WrongLength(f"CMDVS signature must be {w + COMMIT_BYTES} bytes, got {len(data)}")
        return cls(MdvsSignature.from_bytes(group, data[:w]), data[w:])


@dataclass(frozen=True)
class CmdvsClaim:
    r_commit: bytes
    sigma_sig: SchnorrSig

    def to_bytes(self, group: Group) -> bytes:
        return self.r_commit + self.sigma_sig.to_bytes(group)

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "CmdvsClaim":
        if len(data) < 32:
            raise DecodeError("claim too short")
        return cls(data[:32], SchnorrSig.from_bytes(group, data[32:]))


def signature_bits(group: Group) -> int:
    return 8 * (4 * group.params.scalar_bytes + COMMIT_BYTES)


def _bound(group: Group, spk: CmdvsPublicKey, inner: MdvsSignature) -> bytes:
    """The message the Schnorr signature covers: spk || sigma_mdvs."""
    return spk.to_bytes(group) + inner.to_bytes(group)


def _opening(group: Group, spk: CmdvsPublicKey, vpks, sigma_sig: SchnorrSig) -> bytes:
    return spk.to_bytes(group) + encode_verifiers(group, vpks) + sigma_sig.to_bytes(group)


def _derive(group: Group, sk: CmdvsSignerKey, inner: MdvsSignature):
    bound = _bound(group, sk.public, inner)
    r_sig = prf_eval(sk.k, bound + b"\x00")
    r_commit = prf_eval(sk.k, bound + b"\x01")
    sigma_sig = schnorr_sign(group, sk.ssk_sig, bound, r_sig)
    return r_commit, sigma_sig


def cmdvs_sign(group: Group, sk: CmdvsSignerKey, vpks: Sequence[Any], m: bytes, rng=None) -> CmdvsSignature:
    inner = mdvs_sign(group, sk.ssk_mdvs, sk.spk_mdvs, vpks, m, rng)
    r_commit, sigma_sig = _derive(group, sk, inner)
    return CmdvsSignature(inner, commit(_opening(group, sk.public, vpks, sigma_sig), r_commit))


def cmdvs_verify(group: Group, spk: CmdvsPublicKey, vsk: int, vpks: Sequence[Any], m: bytes,
                 sig: CmdvsSignature) -> bool:
    return mdvs_verify(group, spk.spk_mdvs, vsk, vpks, m, sig.inner)


def cmdvs_claim(group: Group, sk: CmdvsSignerKey, vpks: Sequence[Any], sig: CmdvsSignature) -> CmdvsClaim | None:
    """Proof that ``sk`` produced ``sig``, or None if it did not."""
    r_commit, sigma_sig = _derive(group, sk, sig.inner)
    if not decommit(sig.com, r_commit, _opening(group, sk.public, vpks, sigma_sig)):
        return None
    return CmdvsClaim(r_commit, sigma_sig)


def cmdvs_clm_ver(group: Group, spk: CmdvsPublicKey, vpks: Sequence[Any], sig: CmdvsSignature,
                  claim: CmdvsClaim) -> bool:
    try:
        if not decommit(sig.com, claim.r_commit, _opening(group, spk, vpks, claim.sigma_sig)):
            return False
        return schnorr_verify(group, spk.spk_sig, _bound(group, spk, sig.inner), claim.sigma_sig)
    except (TypeError, ValueError, AttributeError):
        return False
