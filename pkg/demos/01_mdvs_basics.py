"""Multi-designated verifier signatures on the small test group.

A signer designates three verifiers. Each of them can check the signature,
the signature size does not depend on how many were designated, and the
verifiers together can produce signatures that look exactly like real ones.
"""

import random

from mddw.algebra import get_group
from mddw.mdvs import MdvsKeyPair, mdvs_fge_ds, mdvs_sign, mdvs_verify

rng = random.Random(1)
g = get_group("test16")

signer = MdvsKeyPair.generate(g, rng)
verifiers = [MdvsKeyPair.generate(g, rng) for _ in range(3)]
vpks = [v.pk for v in verifiers]

msg = b"hello, designated world"
sig = mdvs_sign(g, signer.sk, signer.pk, vpks, msg, rng)
print("signature:", sig)
print("each verifier accepts:", [mdvs_verify(g, signer.pk, v.sk, vpks, msg, sig) for v in verifiers])

outsider = MdvsKeyPair.generate(g, rng)
print("outsider (not designated) accepts:", mdvs_verify(g, signer.pk, outsider.sk, vpks, msg, sig))
print("tampered message accepted:", mdvs_verify(g, signer.pk, verifiers[0].sk, vpks, b"other", sig))

# Constant size: the encoding is four scalars whatever |S| is.
for k in (1, 2, 3):
    s = mdvs_sign(g, signer.sk, signer.pk, vpks[:k], msg, rng)
    print(f"|S|={k}: {len(s.to_bytes(g))} bytes")

# Off-the-record: all designated verifiers together can forge without the signer.
forged = mdvs_fge_ds(g, signer.pk, [v.sk for v in verifiers], msg, rng)
print("forged signature accepted by every verifier:",
      all(mdvs_verify(g, signer.pk, v.sk, vpks, msg, forged) for v in verifiers))
