import random

import numpy as np
import pytest

from mddw.dvs import DvsKeyPair, DvsSig, derive_r, dvs_expected, dvs_sign, dvs_verify
from mddw.errors import PairingUnavailable
from mddw.mdvs import signature_bits
from mddw.oracles import encode_tokens


@pytest.fixture(scope="module")
def pair_keys(prod):
    r = random.Random(41)
    return DvsKeyPair.generate(prod, r), DvsKeyPair.generate(prod, r)


def test_rs_mode(prod, pair_keys):
    s, v = pair_keys
    sig = dvs_sign(prod, s.sk, v.pk, b"m", rng=random.Random(1))
    assert dvs_verify(prod, s.pk, v.sk, b"m", sig)
    assert not dvs_verify(prod, s.pk, v.sk, b"n", sig)
    flipped = sig.s.copy()
    flipped[0] ^= 1
    assert not dvs_verify(prod, s.pk, v.sk, b"m", DvsSig(flipped, sig.r))
    assert not dvs_verify(prod, s.pk, v.sk, b"m", DvsSig(sig.s, None))
    assert DvsSig.from_bytes(sig.to_bytes(), "rs") == sig


def test_s_only_mode(prod, pair_keys):
    s, v = pair_keys
    ctx = encode_tokens([3, 4])
    a = dvs_sign(prod, s.sk, v.pk, b"m", mode="s_only", ctx=ctx)
    b = dvs_sign(prod, s.sk, v.pk, b"m", mode="s_only", ctx=ctx)
    assert a == b and a.r is None
    assert len(a.s) == 256
    assert dvs_verify(prod, s.pk, v.sk, b"m", a, mode="s_only", ctx=ctx)
    assert not dvs_verify(prod, s.pk, v.sk, b"m", a, mode="s_only", ctx=encode_tokens([3, 5]))
    assert np.array_equal(dvs_expected(prod, s.pk, v.sk, b"m", derive_r(ctx)), a.s)
    assert len(a.to_bytes()) == 32
    with pytest.raises(ValueError):
        dvs_sign(prod, s.sk, v.pk, b"m", mode="s_only")


def test_ratio_to_mdvs(prod):
    assert signature_bits(prod) / 256 == 4


def test_symmetric_identity(prod):
    r = random.Random(42)
    h = prod.hash_to_group(b"MDDW/DVS-H0", b"x")
    for _ in range(100):
        a, b = DvsKeyPair.generate(prod, r), DvsKeyPair.generate(prod, r)
        assert prod.pair(b.pk, prod.exp(h, a.sk)) == prod.pair(a.pk, prod.exp(h, b.sk))


def test_wrong_verifier_key(prod, pair_keys):
    s, v = pair_keys
    other = DvsKeyPair.generate(prod, random.Random(43))
    sig = dvs_sign(prod, s.sk, v.pk, b"m", rng=random.Random(2), l=128)
    assert not dvs_verify(prod, s.pk, other.sk, b"m", sig, l=128)


def test_requires_pairing(g16):
    with pytest.raises(PairingUnavailable):
        dvs_sign(g16, 3, g16.g, b"m")


def test_wrong_verifier_scan(prod, pair_keys):
    """10^4 wrong detector keys; e(spk, h^k) = e(spk, h)^k lets us step k with one GT multiply."""
    from mddw.dvs import TAG_H0, TAG_H1
    from mddw.oracles import bytes_to_bits, xof

    s, v = pair_keys
    sig = dvs_sign(prod, s.sk, v.pk, b"scan", rng=random.Random(3), l=128)
    h = prod.hash_to_group(TAG_H0, sig.r + b"scan")
    base = prod.pair(s.pk, h)
    gt = base
    hits = 0
    for k in range(1, 10_001):
        if k != v.sk:
            hits += bool(np.array_equal(bytes_to_bits(xof(TAG_H1, prod.encode_gt(gt), 16)), sig.s))
        gt = prod.gt_mul(gt, base)
    assert hits == 0
