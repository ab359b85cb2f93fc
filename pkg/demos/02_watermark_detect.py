"""Embed an MDVS watermark with a mock model and detect it.

The text carries back-to-back signatures; each designated detector finds the
first one, and a crop of two windows still contains a complete watermark.
"""

import random

from mddw.algebra import get_group
from mddw.mdvs import MdvsKeyPair
from mddw.model import MockModel, ModelConfig
from mddw.watermark import EmbedStats, MdvsDetector, MdvsSigner, WatermarkParams, detect, watmar

rng = random.Random(2)
g = get_group("test16")
signer = MdvsKeyPair.generate(g, rng)
verifiers = [MdvsKeyPair.generate(g, rng) for _ in range(3)]
vpks = [v.pk for v in verifiers]

params = WatermarkParams.for_backend("mdvs", g, n=400, block_len=2)
print(f"len_sig={params.len_sig} bits, window W={params.window} tokens, n={params.n}")

model = MockModel(ModelConfig(vocab=64, k_cand=16, seed=3))
prompt = [5, 9, 12]
stats = EmbedStats()
text = watmar(params, MdvsSigner(g, signer.sk, signer.pk, vpks, rng), model, prompt, stats)
print("watermarks embedded:", len(stats.anchors), "mean attempts per bit:", round(stats.mean_attempts, 3))
print("first tokens:", text[:20])

detectors = [MdvsDetector(g, signer.pk, v.sk, vpks) for v in verifiers]
for i, d in enumerate(detectors):
    print(f"detector {i}:", detect(params, d, text).to_json())

crop = text[150:150 + 2 * params.window]
print("crop of 2W tokens:", detect(params, detectors[0], crop).to_json())

plain = model.generate(prompt, [], params.n)
print("unwatermarked text:", detect(params, detectors[0], plain).to_json())
