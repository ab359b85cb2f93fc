"""The two single-key baselines on BLS12-381.

The designated scheme uses a pairing-based DVS with a 256-bit hash output
and no stored randomness; the public scheme uses short BLS-style hashes that
anyone holding the signer's public key can check. Both are slower than the
test group because every signature and every scanned offset costs a pairing.
"""

import random
import time

from mddw.algebra import get_group
from mddw.dvs import DvsKeyPair
from mddw.model import MockModel, ModelConfig
from mddw.watermark import (
    DdwDetector,
    DdwSigner,
    PdwDetector,
    PdwSigner,
    WatermarkParams,
    detect,
    watmar,
)

rng = random.Random(5)
g = get_group("prod128")
model = MockModel(ModelConfig(seed=6))
prompt = [7, 7, 7]

signer, verifier = DvsKeyPair.generate(g, rng), DvsKeyPair.generate(g, rng)
params = WatermarkParams.for_backend("ddw", g, n=560, block_len=2)
t0 = time.perf_counter()
text = watmar(params, DdwSigner(g, signer.sk, verifier.pk), model, prompt)
res = detect(params, DdwDetector(g, signer.pk, verifier.sk), text)
print(f"ddw: len_sig={params.len_sig}, W={params.window}, detected={res.detected} at {res.offset} "
      f"({time.perf_counter() - t0:.1f}s)")
other = DvsKeyPair.generate(g, rng)
print("ddw with a non-designated key:", detect(params, DdwDetector(g, signer.pk, other.sk), text).detected)

params = WatermarkParams.for_backend("pdw", g, n=300, block_len=2)
text = watmar(params, PdwSigner(g, signer.sk), model, prompt)
print(f"pdw: len_sig={params.len_sig}, detected with the public key:",
      detect(params, PdwDetector(g, signer.pk), text).detected)
