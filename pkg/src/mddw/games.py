"""Desk-scale security experiments.

Each suite builds fresh honest keys from a seeded generator, plays a scripted
adversary against the public API and counts failures. A suite passes when
``failures == 0``; statistical suites count a p-value at or below
``ALPHA`` as a failure.

Suites and what ``trials`` means for each:

=============  ==============================================================
completeness   watermarked texts, each checked by every designated detector
consistency    candidate texts (random, bit-mutated, crops) judged by all
               detectors; a failure is a split decision
soundness      random texts plus the same number of NOLap splices; a failure
               is any detection
robustness     watermarked texts with at least two watermarks, cropped to a
               random ``2 * window`` tokens; a failure is a missed detection
otr            designated-set forgeries checked by every detector, plus
               chi-square checks on signature components and token counts
distortion     thousands of tokens per corpus (watermarked vs plain, uniform
               model)
claim          own-text claims; also foreign claims and bogus proofs
attempts       carrier blocks whose rejection-sampling attempts are averaged
=============  ==============================================================
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import stats as _st

from .algebra import Group, get_group
from .base_sigs import SchnorrSig
from .cmdvs import CmdvsClaim, CmdvsSignerKey
from .mdvs import MdvsKeyPair, mdvs_fge_ds, mdvs_sign
from .model import MockModel, ModelConfig
from .watermark import (
    ClaimEntry,
    CmdvsSigner,
    EmbedStats,
    MdvsDetector,
    MdvsSigner,
    TextClaimProof,
    WatermarkParams,
    claim_text,
    clmver_text,
    detect,
    forge_ds,
    nolap_k,
    watmar,
)

SUITES = ("completeness", "consistency", "soundness", "robustness", "otr", "distortion", "claim", "attempts")
ALPHA = 0.01


@dataclass
class GameReport:
    suite: str
    trials: int
    failures: int
    seed: int
    group: str
    stats: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


@dataclass
class _World:
    """Honest keys, parameters and a model for one suite run."""

    group: Group
    rng: random.Random
    params: WatermarkParams
    signer_keys: MdvsKeyPair
    verifier_keys: list
    model: MockModel
    prompt: list

    @property
    def vpks(self) -> list:
        return [v.pk for v in self.verifier_keys]

    def signer(self) -> MdvsSigner:
        return MdvsSigner(self.group, self.signer_keys.sk, self.signer_keys.pk, self.vpks, self.rng)

    def detectors(self) -> list:
        return [MdvsDetector(self.group, self.signer_keys.pk, v.sk, self.vpks) for v in self.verifier_keys]

    def random_text(self, length: int) -> list:
        return [self.rng.randrange(self.model.vocab) for _ in range(length)]


def _world(rng: random.Random, group_id: str, n: int, block_len: int, n_verifiers: int, vocab: int,
           k_cand: int) -> _World:
    group = get_group(group_id)
    params = WatermarkParams.for_backend("mdvs", group, n, block_len)
    signer = MdvsKeyPair.generate(group, rng)
    verifiers = [MdvsKeyPair.generate(group, rng) for _ in range(n_verifiers)]
    cfg = ModelConfig(vocab=vocab, k_cand=k_cand, seed=rng.getrandbits(63), block_len=block_len)
    model = MockModel(cfg, sample_seed=rng.getrandbits(64))
    prompt = [rng.randrange(vocab) for _ in range(8)]
    return _World(group, rng, params, signer, verifiers, model, prompt)


def _token_chi2(a: list, b: list, vocab: int) -> float:
    """p-value of a chi-square homogeneity test on two token corpora."""
    table = np.array([np.bincount(a, minlength=vocab), np.bincount(b, minlength=vocab)])
    table = table[:, table.sum(axis=0) > 0]
    return float(_st.chi2_contingency(table)[1])


def _uniform_p(values: list, q: int, bins: int = 16) -> float:
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=bins, range=(0, q))
    return float(_st.chisquare(counts)[1])


# -- suites ------------------------------------------------------------------

def _completeness(w: _World, trials: int) -> tuple[int, dict]:
    signer, dets = w.signer(), w.detectors()
    failures = 0
    offsets = []
    for _ in range(trials):
        text = watmar(w.params, signer, w.model, w.prompt)
        results = [detect(w.params, d, text) for d in dets]
        failures += not all(r.detected for r in results)
        offsets.extend(r.offset for r in results if r.detected)
    return failures, {"detectors": len(dets), "offset_zero_fraction": offsets.count(0) / max(1, len(offsets))}


def _mutate(rng: random.Random, text: list, vocab: int) -> list:
    out = list(text)
    i = rng.randrange(len(out))
    out[i] ^= 1 << rng.randrange(max(1, vocab.bit_length() - 1))
    out[i] %= vocab
    return out


def _consistency(w: _World, trials: int) -> tuple[int, dict]:
    signer, dets = w.signer(), w.detectors()
    W, n = w.params.window, w.params.n
    splits = positives = 0
    kinds = {"random": 0, "mutated": 0, "crop": 0}
    for i in range(trials):
        kind = ("random", "mutated", "crop")[i % 3]
        kinds[kind] += 1
        if kind == "random":
            cand = w.random_text(w.rng.randint(W, n))
        else:
            # each watermarked source yields one mutated and one cropped candidate
            if kind == "mutated":
                text = watmar(w.params, signer, w.model, w.prompt)
                cand = _mutate(w.rng, text, w.model.vocab)
            else:
                length = w.rng.randint(W, n)
                start = w.rng.randint(0, n - length)
                cand = text[start:start + length]
        verdicts = {detect(w.params, d, cand).detected for d in dets}
        splits += len(verdicts) > 1
        positives += True in verdicts
    return splits, {"detectors": len(dets), "positive_texts": positives, "kinds": kinds}


def _splice(w: _World, issued: list, forbidden: set, length: int) -> list:
    """Alternate issued-text tokens with fresh ones while avoiding every issued ell-gram."""
    ell = w.params.block_len
    V = w.model.vocab
    out: list = []
    for pos in range(length):
        preferred = issued[pos % len(issued)] if pos % 2 == 0 else None
        for _ in range(256):
            tok = preferred if preferred is not None else w.rng.randrange(V)
            preferred = None
            if len(out) + 1 < ell or tuple(out[len(out) + 1 - ell:] + [tok]) not in forbidden:
                break
        else:
            raise RuntimeError("could not extend splice without reusing an issued window")
        out.append(tok)
    return out


def _soundness(w: _World, trials: int, splices_per_issue: int = 5) -> tuple[int, dict]:
    signer, det = w.signer(), w.detectors()[0]
    n, ell = w.params.n, w.params.block_len
    random_hits = splice_hits = nolap_violations = 0
    for _ in range(trials):
        random_hits += detect(w.params, det, w.random_text(n)).detected
    issued = None
    forbidden: set = set()
    for i in range(trials):
        if i % splices_per_issue == 0:
            issued = watmar(w.params, signer, w.model, w.prompt)
            forbidden = {tuple(issued[j:j + ell]) for j in range(len(issued) - ell + 1)}
        cand = _splice(w, issued, forbidden, n)
        if not nolap_k(ell, cand, [issued]):
            nolap_violations += 1
            continue
        splice_hits += detect(w.params, det, cand).detected
    offsets = n - w.params.window + 1
    return random_hits + splice_hits + nolap_violations, {
        "random_detections": random_hits,
        "splice_detections": splice_hits,
        "nolap_violations": nolap_violations,
        "expected_false_detections": 2 * trials * offsets / w.group.q,
    }


def _robustness(w: _World, trials: int) -> tuple[int, dict]:
    signer, det = w.signer(), w.detectors()[0]
    W = w.params.window
    crop = 2 * W
    params = WatermarkParams(3 * W + W // 2, w.params.block_len, w.params.len_sig, "mdvs")
    misses = 0
    marks = []
    for _ in range(trials):
        st = EmbedStats()
        text = watmar(params, signer, w.model, w.prompt, st)
        marks.append(len(st.anchors))
        start = w.rng.randint(0, len(text) - crop)
        misses += not detect(params, det, text[start:start + crop]).detected
    return misses, {"crop_len": crop, "n": params.n, "min_watermarks": min(marks, default=0)}


def _otr(w: _World, trials: int, samples: int = 5000, corpus_tokens: int = 100_000) -> tuple[int, dict]:
    g, dets = w.group, w.detectors()
    vsks = [v.sk for v in w.verifier_keys]
    spk = w.signer_keys.pk
    missed = 0
    for _ in range(trials):
        text = forge_ds(w.params, g, spk, vsks, w.model, w.prompt, detector_pubs=w.vpks, rng=w.rng)
        missed += not all(detect(w.params, d, text).detected for d in dets)
    honest_sigs = []
    forged_sigs = []
    for _ in range(samples):
        m = w.rng.randbytes(32)
        honest_sigs.append(mdvs_sign(g, w.signer_keys.sk, spk, w.vpks, m, w.rng))
        forged_sigs.append(mdvs_fge_ds(g, spk, vsks, m, w.rng))
    pvals = {}
    for name in ("c1", "c2", "z1", "z2"):
        pvals[f"sign_{name}"] = _uniform_p([getattr(s, name) for s in honest_sigs], g.q)
        pvals[f"fgeds_{name}"] = _uniform_p([getattr(s, name) for s in forged_sigs], g.q)
    honest_tokens: list = []
    forged_tokens: list = []
    signer = w.signer()
    while len(honest_tokens) < corpus_tokens:
        honest_tokens += watmar(w.params, signer, w.model, w.prompt)
    while len(forged_tokens) < corpus_tokens:
        forged_tokens += forge_ds(w.params, g, spk, vsks, w.model, w.prompt, rng=w.rng)
    pvals["tokens"] = _token_chi2(honest_tokens[:corpus_tokens], forged_tokens[:corpus_tokens], w.model.vocab)
    bad = sum(p <= ALPHA for p in pvals.values())
    return missed + bad, {"forged_missed": missed, "p_values": pvals, "samples": samples,
                          "corpus_tokens": corpus_tokens}


def _distortion(w: _World, tokens: int) -> tuple[int, dict]:
    V = w.model.vocab
    cfg = ModelConfig(vocab=V, k_cand=V, seed=w.model.config.seed, block_len=w.params.block_len)
    model = MockModel(cfg, sample_seed=w.rng.getrandbits(64))
    signer = w.signer()
    marked: list = []
    plain: list = []
    while len(marked) < tokens:
        marked += watmar(w.params, signer, model, w.prompt)
    while len(plain) < tokens:
        plain += model.generate(w.prompt, [], w.params.n)
    p = _token_chi2(marked[:tokens], plain[:tokens], V)
    return int(p <= ALPHA), {"p_value": p, "tokens": tokens}


def _random_claim(g: Group, rng: random.Random) -> CmdvsClaim:
    return CmdvsClaim(rng.randbytes(32), SchnorrSig(rng.randrange(g.q), rng.randrange(g.q)))


def _claim(w: _World, trials: int, bogus: int = 1000) -> tuple[int, dict]:
    g, rng = w.group, w.rng
    params = WatermarkParams.for_backend("cmdvs", g, 0, w.params.block_len)
    params = WatermarkParams(params.window + 4 * params.block_len, params.block_len, params.len_sig, "cmdvs")
    owner = CmdvsSignerKey.generate(g, rng)
    other = CmdvsSignerKey.generate(g, rng)
    signer = CmdvsSigner(g, owner, w.vpks, rng)
    foreign_signer = CmdvsSigner(g, other, w.vpks, rng)
    own_fail = foreign_claimed = bogus_accepted = 0
    texts, proofs = [], []
    for _ in range(trials):
        text = watmar(params, signer, w.model, w.prompt)
        proof = claim_text(params, g, owner, w.vpks, text)
        own_fail += not (len(proof) >= 1 and clmver_text(params, g, owner.public, w.vpks, text, proof))
        texts.append(text)
        proofs.append(proof)
    for _ in range(trials):
        text = watmar(params, foreign_signer, w.model, w.prompt)
        foreign_claimed += len(claim_text(params, g, owner, w.vpks, text)) > 0
    forged = [forge_ds(params, g, owner.public, [v.sk for v in w.verifier_keys], w.model, w.prompt, rng=rng)
              for _ in range(min(trials, 20))]
    forged_claimed = sum(len(claim_text(params, g, owner, w.vpks, t)) > 0 for t in forged)
    for i in range(bogus):
        j = rng.randrange(len(texts))
        kind = i % 4
        if kind == 0:
            proof = TextClaimProof((ClaimEntry(0, _random_claim(g, rng)),))
            text = texts[j]
        elif kind == 1:
            # an honest proof replayed against a different text
            text = texts[(j + 1) % len(texts)]
            proof = proofs[j]
        elif kind == 2:
            entry = proofs[j].proofs[0]
            flipped = bytearray(entry.claim.r_commit)
            flipped[rng.randrange(32)] ^= 1 << rng.randrange(8)
            proof = TextClaimProof((ClaimEntry(entry.offset, CmdvsClaim(bytes(flipped), entry.claim.sigma_sig)),))
            text = texts[j]
        else:
            entry = proofs[j].proofs[0]
            proof = TextClaimProof((ClaimEntry(entry.offset + rng.randint(1, 3), entry.claim),))
            text = texts[j]
        # a framing attempt names the owner as signer of something they did not claim
        bogus_accepted += clmver_text(params, g, owner.public, w.vpks, text, proof)
    return own_fail + foreign_claimed + forged_claimed + bogus_accepted, {
        "own_failures": own_fail,
        "foreign_claimed": foreign_claimed,
        "forged_claimed": forged_claimed,
        "bogus_accepted": bogus_accepted,
        "bogus_trials": bogus,
        "len_sig": params.len_sig,
    }


def _attempts(w: _World, blocks: int) -> tuple[int, dict]:
    signer = w.signer()
    st = EmbedStats()
    while len(st.attempts) < blocks:
        watmar(w.params, signer, w.model, w.prompt, st)
    mean = st.mean_attempts
    return int(not 1.9 <= mean <= 2.1), {"mean_attempts": mean, "blocks": len(st.attempts),
                                         "max_attempts_seen": max(st.attempts)}


_SUITES: dict[str, Callable] = {
    "completeness": _completeness,
    "consistency": _consistency,
    "soundness": _soundness,
    "robustness": _robustness,
    "otr": _otr,
    "distortion": _distortion,
    "claim": _claim,
    "attempts": _attempts,
}


def run_suite(suite: str, trials: int, seed: int, *, group_id: str = "test16", n: int = 160,
              block_len: int = 2, n_verifiers: int = 3, vocab: int = 64, k_cand: int = 16,
              **options) -> GameReport:
    """Run one experiment; ``options`` are passed to the suite (e.g. ``samples`` for otr)."""
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rng = random.Random(seed)
    w = _world(rng, group_id, n, block_len, n_verifiers, vocab, k_cand)
    t0 = time.perf_counter()
    failures, stats = _SUITES[suite](w, trials, **options)
    return GameReport(suite, trials, int(failures), seed, group_id, stats, time.perf_counter() - t0)
