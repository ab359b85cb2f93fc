"""Command-line front end.

Exit codes: 0 success (``detect``: watermark found; ``claim``: at least one
proof; ``clmver``: proof accepted), 1 negative result, 2 usage or
configuration error, 3 I/O or transport error. Machine-readable JSON goes to
stdout, human summaries to stderr.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Sequence

from . import __version__
from .errors import (
    BackendUnsupported,
    BadResponse,
    DecodeError,
    LowEntropyModel,
    MddwError,
    PairingUnavailable,
    TokenOutOfRange,
    Transport,
)
from .formats import (
    SCHEME_BACKEND,
    SCHEMES,
    FormatError,
    KeyFile,
    TextFile,
    claim_from_json,
    generate_key,
    load_key,
    load_text,
    write_json,
)
from .games import SUITES, run_suite
from .model import HttpModel, MockModel, ModelConfig
from .watermark import (
    DEFAULT_MAX_ATTEMPTS,
    CmdvsDetector,
    CmdvsSigner,
    DdwDetector,
    DdwSigner,
    MdvsDetector,
    MdvsSigner,
    PdwDetector,
    PdwSigner,
    WatermarkParams,
    claim_text,
    clmver_text,
    detect,
    forge_ds,
    watmar,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(MddwError):
    pass


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def parse_model_spec(spec: str, block_len: int, seed: int | None, timeout: float, retries: int):
    """``mock:seed=1,V=64,k=16[,w=4]`` or ``http:<url>|V=<vocab>`` model spec to a model."""
    kind, _, rest = spec.partition(":")
    if kind == "mock":
        opts = {"seed": 0, "V": 64, "k": 16, "w": 4}
        for item in filter(None, rest.split(",")):
            key, eq, value = item.partition("=")
            if not eq or key not in opts:
                raise ConfigError(f"bad mock model option {item!r}; expected seed=, V=, k= or w=")
            try:
                opts[key] = int(value)
            except ValueError:
                raise ConfigError(f"mock model option {key} must be an integer") from None
        try:
            cfg = ModelConfig(vocab=opts["V"], k_cand=opts["k"], seed=opts["seed"], block_len=block_len,
                              context_window=opts["w"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        sample_seed = None if seed is None else random.Random(seed ^ 0x5EED).getrandbits(64)
        if sample_seed is None:
            sample_seed = random.SystemRandom().getrandbits(64)
        return MockModel(cfg, sample_seed=sample_seed)
    if kind == "http":
        url, vocab = rest, None
        if "|V=" in rest:
            url, _, v = rest.rpartition("|V=")
            vocab = int(v)
        if not url.startswith(("http://", "https://")):
            raise ConfigError(f"http model needs a URL, got {url!r}")
        return HttpModel(url, vocab or 1 << 32, block_len, timeout=timeout, retries=retries)
    raise ConfigError(f"unknown model spec {spec!r}; use mock:... or http:<url>")


def _rng(seed: int | None):
    return None if seed is None else random.Random(seed)


def _prompt(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError("--prompt must be comma-separated integers") from None


def _load_pubs(paths: Sequence[str], group_id: str) -> list:
    keys = [load_key(p) for p in paths]
    for k in keys:
        if k.group_id != group_id:
            raise ConfigError(f"detector key is for group {k.group_id}, expected {group_id}")
    return [k.pk for k in keys]


def _params(backend: str, group, n: int, block_len: int, l: int | None, max_attempts: int) -> WatermarkParams:
    if l is not None and backend in ("mdvs", "cmdvs"):
        raise ConfigError("--l applies to ddw/pdw only; mdvs/cmdvs lengths follow from the group")
    try:
        return WatermarkParams.for_backend(backend, group, n, block_len, l, max_attempts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _signer(key: KeyFile, detector_pubs: list, l: int | None, rng):
    g = key.group
    backend = SCHEME_BACKEND[key.scheme]
    if not key.has_secret or key.role != "signer":
        raise ConfigError("watermarking needs a signer key with its secret")
    if backend == "mdvs":
        return MdvsSigner(g, key.sk, key.pk, _need_pubs(detector_pubs), rng)
    if backend == "cmdvs":
        return CmdvsSigner(g, key.cmdvs_secret(), _need_pubs(detector_pubs), rng)
    if backend == "ddw":
        if len(detector_pubs) != 1:
            raise ConfigError("ddw designates exactly one detector")
        return DdwSigner(g, key.sk, detector_pubs[0], l)
    return PdwSigner(g, key.sk, l)


def _need_pubs(pubs: list) -> list:
    if not pubs:
        raise ConfigError("at least one --detector-pub is required")
    return pubs


def _detector(signer_pub: KeyFile, det_key: KeyFile | None, detector_pubs: list, params: WatermarkParams):
    g = signer_pub.group
    backend = params.backend
    if SCHEME_BACKEND[signer_pub.scheme] != backend:
        raise ConfigError(f"text was made with {backend} but the signer key is {signer_pub.scheme}")
    if backend == "pdw":
        return PdwDetector(g, signer_pub.pk, params.len_sig)
    if det_key is None or not det_key.has_secret:
        raise ConfigError(f"{backend} detection needs a designated detector secret key (--key)")
    if backend == "mdvs":
        return MdvsDetector(g, signer_pub.pk, det_key.sk, _need_pubs(detector_pubs))
    if backend == "cmdvs":
        return CmdvsDetector(g, signer_pub.cmdvs_public(), det_key.sk, _need_pubs(detector_pubs))
    return DdwDetector(g, signer_pub.pk, det_key.sk, params.len_sig)


# -- subcommands -------------------------------------------------------------

def cmd_keygen(a) -> int:
    key = generate_key(a.scheme, a.role, a.group, _rng(a.seed))
    write_json(a.out, key.to_json())
    if a.pub_out:
        write_json(a.pub_out, key.public().to_json())
    _info(f"generated {a.scheme} {a.role} key on {a.group}")
    return EXIT_OK


def _model_for(a, block_len: int):
    return parse_model_spec(a.model, block_len, a.seed, a.timeout, a.retries)


def cmd_watermark(a) -> int:
    key = load_key(a.key)
    g = key.group
    backend = SCHEME_BACKEND[key.scheme]
    params = _params(backend, g, a.n, a.block_len, a.l, a.max_attempts)
    pubs = _load_pubs(a.detector_pub, key.group_id)
    rng = _rng(a.seed)
    signer = _signer(key, pubs, params.len_sig if backend in ("ddw", "pdw") else None, rng)
    model = _model_for(a, params.block_len)
    tokens = watmar(params, signer, model, _prompt(a.prompt))
    write_json(a.out, TextFile(model.vocab, params, key.group_id, tokens).to_json())
    _info(f"wrote {len(tokens)} tokens, {params.expected_watermarks()} watermark(s) of {params.window} tokens")
    return EXIT_OK


def cmd_forge_ds(a) -> int:
    spk = load_key(a.signer_pub)
    g = spk.group
    backend = SCHEME_BACKEND[spk.scheme]
    params = _params(backend, g, a.n, a.block_len, a.l, a.max_attempts)
    det_keys = [load_key(p) for p in a.detector_key]
    if any(not k.has_secret for k in det_keys):
        raise ConfigError("forging needs every designated detector's secret key")
    model = _model_for(a, params.block_len)
    signer_pk = spk.cmdvs_public() if backend == "cmdvs" else spk.pk
    tokens = forge_ds(params, g, signer_pk, [k.sk for k in det_keys], model, _prompt(a.prompt),
                      rng=_rng(a.seed))
    write_json(a.out, TextFile(model.vocab, params, spk.group_id, tokens).to_json())
    _info(f"wrote {len(tokens)} forged tokens")
    return EXIT_OK


def cmd_detect(a) -> int:
    text = load_text(a.text)
    spk = load_key(a.signer_pub)
    if spk.group_id != text.group_id:
        raise ConfigError("signer key and text use different groups")
    det_key = load_key(a.key) if a.key else None
    pubs = _load_pubs(a.detector_pub, text.group_id)
    det = _detector(spk, det_key, pubs, text.params)
    result = detect(text.params, det, text.tokens)
    print(json.dumps(result.to_json()))
    _info("watermark detected" + (f" at offset {result.offset}" if result.detected else "") if result.detected
          else "no watermark detected")
    return EXIT_OK if result.detected else EXIT_NEGATIVE


def cmd_claim(a) -> int:
    key = load_key(a.key)
    text = load_text(a.text)
    if text.params.backend != "cmdvs" or key.scheme != "cmdvs":
        raise ConfigError("claims need a cmdvs signer key and a cmdvs text")
    pubs = _need_pubs(_load_pubs(a.detector_pub, key.group_id))
    proof = claim_text(text.params, key.group, key.cmdvs_secret(), pubs, text.tokens)
    write_json(a.out, proof.to_json(key.group))
    _info(f"{len(proof)} watermark(s) claimed")
    return EXIT_OK if len(proof) else EXIT_NEGATIVE


def cmd_clmver(a) -> int:
    spk = load_key(a.signer_pub)
    text = load_text(a.text)
    if text.params.backend != "cmdvs" or spk.scheme != "cmdvs":
        raise ConfigError("claim verification needs a cmdvs signer key and a cmdvs text")
    from .formats import read_json
    proof = claim_from_json(spk.group, read_json(a.claim))
    pubs = _need_pubs(_load_pubs(a.detector_pub, spk.group_id))
    ok = clmver_text(text.params, spk.group, spk.cmdvs_public(), pubs, text.tokens, proof)
    print(json.dumps({"valid": ok}))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_bench(a) -> int:
    rng = random.Random(a.seed if a.seed is not None else 0)
    scheme = {"mdvs": "mdvs", "cmdvs": "cmdvs", "ddw": "dvs", "pdw": "bls"}[a.backend]
    signer_key = generate_key(scheme, "signer", a.group, rng)
    det_keys = [generate_key(scheme if scheme != "cmdvs" else "mdvs", "verifier", a.group, rng)
                for _ in range(1 if a.backend in ("ddw", "pdw") else a.detectors)]
    pubs = [k.pk for k in det_keys]
    g = signer_key.group
    params = _params(a.backend, g, a.n, a.block_len, a.l, a.max_attempts)
    signer = _signer(signer_key, pubs, params.len_sig if a.backend in ("ddw", "pdw") else None, rng)
    det = _detector(signer_key.public(), det_keys[0], pubs, params)
    model = _model_for(a, params.block_len)
    prompt = _prompt(a.prompt)
    gen, plain, det_t = [], [], []
    detected = 0
    for _ in range(a.trials):
        t0 = time.perf_counter()
        model.generate(prompt, [], params.n)
        t1 = time.perf_counter()
        tokens = watmar(params, signer, model, prompt)
        t2 = time.perf_counter()
        detected += detect(params, det, tokens).detected
        t3 = time.perf_counter()
        plain.append(t1 - t0)
        gen.append(t2 - t1)
        det_t.append(t3 - t2)
    report = {
        "backend": a.backend, "group": a.group, "n": params.n, "block_len": params.block_len,
        "len_sig": params.len_sig, "trials": a.trials, "detected": detected,
        "plain_generation_s": sum(plain) / a.trials,
        "watermarked_generation_s": sum(gen) / a.trials,
        "detection_s": sum(det_t) / a.trials,
    }
    print(json.dumps(report))
    return EXIT_OK


def cmd_games(a) -> int:
    opts = {}
    for item in a.option or []:
        key, _, value = item.partition("=")
        try:
            opts[key] = int(value)
        except ValueError:
            raise ConfigError(f"--option expects key=int, got {item!r}") from None
    report = run_suite(a.suite, a.trials, a.seed, group_id=a.group, n=a.n, block_len=a.block_len, **opts)
    write_json(a.out, report.to_dict())
    _info(f"{a.suite}: {report.failures} failure(s) in {report.trials} trial(s)")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


# -- parser ------------------------------------------------------------------

def _add_model_args(p, with_seed: bool = True) -> None:
    p.add_argument("--model", default="mock:seed=0,V=64,k=16",
                   help="mock:seed=S,V=V,k=K or http:<url>|V=<vocab>")
    p.add_argument("--prompt", default="", help="comma-separated prompt tokens")
    p.add_argument("--timeout", type=float, default=30.0, help="HTTP model timeout in seconds")
    p.add_argument("--retries", type=int, default=2, help="HTTP model retries on transport errors")
    if with_seed:
        p.add_argument("--seed", type=int, default=None, help="makes output byte-reproducible with mock models")


def _add_layout_args(p, n_default: int = 160) -> None:
    p.add_argument("--n", type=int, default=n_default, help="output length in tokens")
    p.add_argument("--block-len", type=int, default=2, help="tokens per block")
    p.add_argument("--l", type=int, default=None, help="signature bits for ddw/pdw")
    p.add_argument("--max-attempts", type=int, default=DEFAULT_MAX_ATTEMPTS)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mddw", description="Multi-designated-detector watermarking")
    ap.add_argument("--version", action="version", version=f"mddw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key file")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--role", choices=("signer", "verifier"), required=True)
    p.add_argument("--group", default="test16")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="key file path (stdout if omitted)")
    p.add_argument("--pub-out", default=None, help="also write the public half here")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("watermark", help="generate watermarked text")
    p.add_argument("--key", required=True, help="signer key file")
    p.add_argument("--detector-pub", nargs="*", default=[], help="designated detector key files")
    _add_layout_args(p)
    _add_model_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_watermark)

    p = sub.add_parser("forge-ds", help="forge text with all designated detectors' secrets")
    p.add_argument("--signer-pub", required=True)
    p.add_argument("--detector-key", nargs="+", required=True)
    _add_layout_args(p)
    _add_model_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_forge_ds)

    p = sub.add_parser("detect", help="look for a watermark; exit 0 if found, 1 if not")
    p.add_argument("--text", required=True)
    p.add_argument("--signer-pub", required=True)
    p.add_argument("--key", default=None, help="this detector's secret key (not needed for pdw)")
    p.add_argument("--detector-pub", nargs="*", default=[])
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("claim", help="produce claim proofs for a cmdvs text")
    p.add_argument("--key", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--detector-pub", nargs="+", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_claim)

    p = sub.add_parser("clmver", help="verify a claim proof")
    p.add_argument("--signer-pub", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--claim", required=True)
    p.add_argument("--detector-pub", nargs="+", required=True)
    p.set_defaults(func=cmd_clmver)

    p = sub.add_parser("bench", help="time plain generation, watermarking and detection")
    p.add_argument("--backend", choices=("mdvs", "cmdvs", "ddw", "pdw"), default="mdvs")
    p.add_argument("--group", default="test16")
    p.add_argument("--detectors", type=int, default=3)
    p.add_argument("--trials", type=int, default=5)
    _add_layout_args(p)
    _add_model_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("games", help="run a security-game suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group", default="test16")
    p.add_argument("--n", type=int, default=160)
    p.add_argument("--block-len", type=int, default=2)
    p.add_argument("--option", action="append", help="suite option key=int, e.g. samples=500")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_games)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, Transport, BadResponse) as exc:
        _info(f"error: {exc}")
        return EXIT_IO
    except (ConfigError, FormatError, DecodeError, TokenOutOfRange, BackendUnsupported, PairingUnavailable,
            LowEntropyModel, ValueError) as exc:
        _info(f"error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
