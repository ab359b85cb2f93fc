"""JSON file formats for keys, watermarked texts and claim proofs.

Key files::

    {"scheme": "mdvs" | "cmdvs" | "dvs" | "bls",
     "group": "<group id>", "role": "signer" | "verifier",
     "sk": "<hex scalar>", "pk": "<hex element>",
     # cmdvs signer keys only:
     "prf_key": "<hex, 32 bytes>", "ssk_sig": "<hex scalar>", "spk_sig": "<hex element>"}

A public key file is the same object without ``sk``, ``prf_key`` and
``ssk_sig``. Text files::

    {"vocab": V, "params": {"n", "block_len", "len_sig", "backend", "group"}, "tokens": [...]}

Claim files are the ``{"proofs": [...]}`` objects of
:class:`~mddw.watermark.TextClaimProof`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebra import Group, get_group
from .cmdvs import CmdvsPublicKey, CmdvsSignerKey
from .errors import DecodeError, MddwError
from .watermark import BACKENDS, TextClaimProof, WatermarkParams

SCHEMES = ("mdvs", "cmdvs", "dvs", "bls")
ROLES = ("signer", "verifier")
SCHEME_BACKEND = {"mdvs": "mdvs", "cmdvs": "cmdvs", "dvs": "ddw", "bls": "pdw"}
_SECRET_FIELDS = ("sk", "prf_key", "ssk_sig")


class FormatError(MddwError, ValueError):
    """A file parsed as JSON but does not have the expected shape."""


@dataclass(frozen=True)
class KeyFile:
    scheme: str
    group_id: str
    role: str
    pk: Any
    sk: int | None = None
    prf_key: bytes | None = None
    ssk_sig: int | None = None
    spk_sig: Any = None

    @property
    def group(self) -> Group:
        return get_group(self.group_id)

    @property
    def has_secret(self) -> bool:
        return self.sk is not None

    def public(self) -> "KeyFile":
        return KeyFile(self.scheme, self.group_id, self.role, self.pk, spk_sig=self.spk_sig)

    def cmdvs_public(self) -> CmdvsPublicKey:
        if self.scheme != "cmdvs" or self.spk_sig is None:
            raise FormatError("not a cmdvs signer key")
        return CmdvsPublicKey(self.spk_sig, self.pk)

    def cmdvs_secret(self) -> CmdvsSignerKey:
        if self.scheme != "cmdvs" or None in (self.sk, self.prf_key, self.ssk_sig):
            raise FormatError("cmdvs signer secret key needed")
        return CmdvsSignerKey(self.prf_key, self.ssk_sig, self.spk_sig, self.sk, self.pk)

    def to_json(self) -> dict:
        g = self.group
        out: dict = {"scheme": self.scheme, "group": self.group_id, "role": self.role}
        if self.sk is not None:
            out["sk"] = g.encode_scalar(self.sk).hex()
        out["pk"] = g.encode(self.pk).hex()
        if self.prf_key is not None:
            out["prf_key"] = self.prf_key.hex()
        if self.ssk_sig is not None:
            out["ssk_sig"] = g.encode_scalar(self.ssk_sig).hex()
        if self.spk_sig is not None:
            out["spk_sig"] = g.encode(self.spk_sig).hex()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "KeyFile":
        try:
            scheme, group_id, role = obj["scheme"], obj["group"], obj["role"]
            if scheme not in SCHEMES or role not in ROLES:
                raise FormatError(f"unknown scheme/role {scheme!r}/{role!r}")
            g = get_group(group_id)
            pk = g.decode(bytes.fromhex(obj["pk"]))
            sk = g.decode_scalar(bytes.fromhex(obj["sk"])) if "sk" in obj else None
            prf_key = bytes.fromhex(obj["prf_key"]) if "prf_key" in obj else None
            ssk_sig = g.decode_scalar(bytes.fromhex(obj["ssk_sig"])) if "ssk_sig" in obj else None
            spk_sig = g.decode(bytes.fromhex(obj["spk_sig"])) if "spk_sig" in obj else None
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed key file: {exc}") from exc
        if sk is not None and g.encode(g.base_exp(sk)) != g.encode(pk):
            raise FormatError("pk does not match sk")
        if ssk_sig is not None and (spk_sig is None or g.encode(g.base_exp(ssk_sig)) != g.encode(spk_sig)):
            raise FormatError("spk_sig does not match ssk_sig")
        if prf_key is not None and len(prf_key) != 32:
            raise FormatError("prf_key must be 32 bytes")
        if scheme == "cmdvs" and role == "signer" and spk_sig is None:
            raise FormatError("cmdvs signer keys carry spk_sig")
        return cls(scheme, group_id, role, pk, sk, prf_key, ssk_sig, spk_sig)


def generate_key(scheme: str, role: str, group_id: str, rng=None) -> KeyFile:
    if scheme not in SCHEMES:
        raise FormatError(f"unknown scheme {scheme!r}")
    if role not in ROLES:
        raise FormatError(f"unknown role {role!r}")
    g = get_group(group_id)
    if scheme in ("dvs", "bls") and not g.params.pairing_available:
        raise FormatError(f"{scheme} needs a pairing group; {group_id} has none")
    if scheme == "cmdvs" and role == "signer":
        k = CmdvsSignerKey.generate(g, rng)
        return KeyFile(scheme, group_id, role, k.spk_mdvs, k.ssk_mdvs, k.k, k.ssk_sig, k.spk_sig)
    sk = g.random_scalar(rng)
    return KeyFile(scheme, group_id, role, g.base_exp(sk), sk)


@dataclass(frozen=True)
class TextFile:
    vocab: int
    params: WatermarkParams
    group_id: str
    tokens: list

    def to_json(self) -> dict:
        p = self.params
        return {"vocab": self.vocab,
                "params": {"n": p.n, "block_len": p.block_len, "len_sig": p.len_sig, "backend": p.backend,
                           "group": self.group_id},
                "tokens": list(self.tokens)}

    @classmethod
    def from_json(cls, obj: dict) -> "TextFile":
        try:
            p = obj["params"]
            block_len = p["block_len"] if "block_len" in p else p["ℓ"]
            backend = p["backend"]
            if backend not in BACKENDS:
                raise FormatError(f"unknown backend {backend!r}")
            params = WatermarkParams(int(p["n"]), int(block_len), int(p["len_sig"]), backend)
            vocab = int(obj["vocab"])
            tokens = [int(t) for t in obj["tokens"]]
            group_id = p["group"]
            get_group(group_id)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed text file: {exc}") from exc
        if any(not 0 <= t < vocab for t in tokens):
            raise FormatError(f"text contains tokens outside [0, {vocab})")
        return cls(vocab, params, group_id, tokens)


def claim_from_json(group: Group, obj: dict) -> TextClaimProof:
    try:
        return TextClaimProof.from_json(group, obj)
    except (KeyError, TypeError, ValueError, DecodeError) as exc:
        raise FormatError(f"malformed claim file: {exc}") from exc


def read_json(path: str | Path) -> Any:
    """Parse a JSON file. ``OSError`` propagates; bad JSON becomes :class:`FormatError`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc


def write_json(path: str | Path | None, obj: Any) -> None:
    """Write to ``path``, or print to stdout when ``path`` is None or ``-``."""
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is None or str(path) == "-":
        print(text)
        return
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_key(path: str | Path) -> KeyFile:
    return KeyFile.from_json(read_json(path))


def load_text(path: str | Path) -> TextFile:
    return TextFile.from_json(read_json(path))
