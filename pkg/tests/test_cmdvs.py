import random

from mddw.base_sigs import SchnorrSig
from mddw.cmdvs import (
    CmdvsClaim,
    CmdvsSignature,
    CmdvsSignerKey,
    cmdvs_claim,
    cmdvs_clm_ver,
    cmdvs_sign,
    cmdvs_verify,
    signature_bits,
)
from mddw.mdvs import MdvsKeyPair, MdvsSignature, mdvs_fge_ds


def setup(g, r, nv=3):
    sk = CmdvsSignerKey.generate(g, r)
    vs = [MdvsKeyPair.generate(g, r) for _ in range(nv)]
    return sk, vs, [v.pk for v in vs]


def test_sign_verify_claim(g16, rng):
    sk, vs, vpks = setup(g16, rng)
    sig = cmdvs_sign(g16, sk, vpks, b"m", rng)
    assert all(cmdvs_verify(g16, sk.public, v.sk, vpks, b"m", sig) for v in vs)
    claim = cmdvs_claim(g16, sk, vpks, sig)
    assert claim is not None
    assert cmdvs_clm_ver(g16, sk.public, vpks, sig, claim)
    assert CmdvsClaim.from_bytes(g16, claim.to_bytes(g16)) == claim
    assert CmdvsSignature.from_bytes(g16, sig.to_bytes(g16)) == sig
    assert len(sig.to_bytes(g16)) * 8 == signature_bits(g16) == 320


def test_com_is_not_verified(g16, rng):
    sk, vs, vpks = setup(g16, rng)
    sig = cmdvs_sign(g16, sk, vpks, b"m", rng)
    flipped = CmdvsSignature(sig.inner, bytes([sig.com[0] ^ 1]) + sig.com[1:])
    assert cmdvs_verify(g16, sk.public, vs[1].sk, vpks, b"m", flipped)
    tampered = CmdvsSignature(MdvsSignature(sig.inner.c1 ^ 1, sig.inner.c2, sig.inner.z1, sig.inner.z2), sig.com)
    assert not cmdvs_verify(g16, sk.public, vs[1].sk, vpks, b"m", tampered)


def test_fresh_signatures_differ(g16, rng):
    sk, vs, vpks = setup(g16, rng)
    sigs = [cmdvs_sign(g16, sk, vpks, b"same", rng) for _ in range(100)]
    assert len({s.com for s in sigs}) == 100
    assert len({s.inner for s in sigs}) == 100


def test_foreign_and_forged_claims(g16):
    r = random.Random(31)
    owner, vs, vpks = setup(g16, r)
    none_count = 0
    for _ in range(100):
        other = CmdvsSignerKey.generate(g16, r)
        foreign = cmdvs_sign(g16, other, vpks, r.randbytes(8), r)
        none_count += cmdvs_claim(g16, owner, vpks, foreign) is None
        m = r.randbytes(8)
        forged = CmdvsSignature(mdvs_fge_ds(g16, owner.spk_mdvs, [v.sk for v in vs], m, r), r.randbytes(32))
        none_count += cmdvs_claim(g16, owner, vpks, forged) is None
    assert none_count == 200


def test_claim_unforgeability(g16):
    """Adversaries without the owner's PRF key cannot claim the owner's signatures as their own."""
    r = random.Random(32)
    owner, vs, vpks = setup(g16, r)
    accepted = 0
    for _ in range(100):
        sig = cmdvs_sign(g16, owner, vpks, r.randbytes(8), r)
        adv = CmdvsSignerKey.generate(g16, r)
        claim = cmdvs_claim(g16, adv, vpks, sig)
        if claim is not None:
            accepted += cmdvs_clm_ver(g16, adv.public, vpks, sig, claim)
        # a claim built from the adversary's own Schnorr key and guessed randomness
        from mddw.base_sigs import schnorr_sign
        guess = CmdvsClaim(r.randbytes(32), schnorr_sign(g16, adv.ssk_sig, adv.public.to_bytes(g16), r.randbytes(32)))
        accepted += cmdvs_clm_ver(g16, adv.public, vpks, sig, guess)
    assert accepted == 0


def test_non_frameability(g16):
    r = random.Random(33)
    owner, vs, vpks = setup(g16, r)
    sigs = [cmdvs_sign(g16, owner, vpks, r.randbytes(8), r) for _ in range(20)]
    claims = [cmdvs_claim(g16, owner, vpks, s) for s in sigs]
    accepted = 0
    for i in range(1000):
        j = r.randrange(20)
        kind = i % 4
        if kind == 0:
            sig = CmdvsSignature(MdvsSignature(*(r.randrange(g16.q) for _ in range(4))), r.randbytes(32))
            claim = CmdvsClaim(r.randbytes(32), SchnorrSig(r.randrange(g16.q), r.randrange(g16.q)))
        elif kind == 1:
            sig, claim = sigs[j], CmdvsClaim(r.randbytes(32), SchnorrSig(r.randrange(g16.q), r.randrange(g16.q)))
        elif kind == 2:
            sig, claim = sigs[(j + 1) % 20], claims[j]  # replay against another signature's com
        else:
            rc = bytearray(claims[j].r_commit)
            rc[r.randrange(32)] ^= 1 << r.randrange(8)
            sig, claim = sigs[j], CmdvsClaim(bytes(rc), claims[j].sigma_sig)
        accepted += cmdvs_clm_ver(g16, owner.public, vpks, sig, claim)
    assert accepted == 0
    assert not cmdvs_clm_ver(g16, owner.public, vpks, sigs[0], "junk")
