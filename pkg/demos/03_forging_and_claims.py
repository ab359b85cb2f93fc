"""Deniability and claimability.

The designated detectors can jointly produce text that every one of them
detects, so a detection proves nothing to an outsider. With the claimable
backend the real signer can still prove authorship, and only for text it
actually produced.
"""

import random

from mddw.algebra import get_group
from mddw.cmdvs import CmdvsSignerKey
from mddw.mdvs import MdvsKeyPair
from mddw.model import MockModel, ModelConfig
from mddw.watermark import (
    CmdvsDetector,
    CmdvsSigner,
    WatermarkParams,
    claim_text,
    clmver_text,
    detect,
    forge_ds,
    watmar,
)

rng = random.Random(3)
g = get_group("test16")
owner = CmdvsSignerKey.generate(g, rng)
stranger = CmdvsSignerKey.generate(g, rng)
verifiers = [MdvsKeyPair.generate(g, rng) for _ in range(3)]
vpks = [v.pk for v in verifiers]

params = WatermarkParams.for_backend("cmdvs", g, n=700, block_len=2)
model = MockModel(ModelConfig(seed=4))
prompt = [1, 2, 3]
detectors = [CmdvsDetector(g, owner.public, v.sk, vpks) for v in verifiers]

honest = watmar(params, CmdvsSigner(g, owner, vpks, rng), model, prompt)
forged = forge_ds(params, g, owner.public, [v.sk for v in verifiers], model, prompt, detector_pubs=vpks, rng=rng)
print("honest text detected:", [detect(params, d, honest).detected for d in detectors])
print("forged text detected:", [detect(params, d, forged).detected for d in detectors])

proof = claim_text(params, g, owner, vpks, honest)
print("owner claims", len(proof.proofs), "watermark(s); verifies:",
      clmver_text(params, g, owner.public, vpks, honest, proof))

print("owner's claim on forged text:", len(claim_text(params, g, owner, vpks, forged).proofs), "proofs")
print("stranger's claim on honest text:", len(claim_text(params, g, stranger, vpks, honest).proofs), "proofs")
