"""Breaking a congruential key stream from a handful of outputs.

The recovery uses 4-output windows: each window's determinant is a
multiple of the modulus, so a GCD across five windows pins the modulus,
after which the multiplier, increment, and seed follow by modular algebra.
"""

import numpy as np

from qauth.attacks import degraded_lcg_recover, lcg_delta, lcg_recover
from qauth.bitsource import LcgParams, derive_rng, generator_from_config, lcg_values

params = LcgParams(251, 33, 17, 5)
outputs = lcg_values(params, 8)
print("Secret generator: x -> (33 x + 17) mod 251, seed 5")
print(f"Adversary observes 8 outputs: {outputs}\n")

print("Window determinants (each a multiple of the modulus):")
for i in range(5):
    print(f"  delta_{i} = {lcg_delta(outputs[i:i + 4])}")

rec = lcg_recover(outputs)
print(f"\nRecovered: A = {rec.modulus}, a = {rec.multiplier}, "
      f"b = {rec.increment}, s0 = {rec.state}")
print(f"Confidence: {rec.confidence} ({rec.detail})\n")

print("Recovery rate over 40 random instances (A prime, 8 outputs each):")
sieve = np.ones(2048, dtype=bool)
sieve[:2] = False
for i in range(2, 46):
    if sieve[i]:
        sieve[i * i::i] = False
primes = [int(p) for p in np.nonzero(sieve)[0] if p >= 100]
rng = derive_rng(12, "seed-recovery-demo")
hits = 0
for _ in range(40):
    A = int(rng.choice(primes))
    truth = LcgParams(A, int(rng.integers(2, A)), int(rng.integers(0, A)),
                      int(rng.integers(0, A)))
    guess = lcg_recover(lcg_values(truth, 8))
    hits += guess.confidence == "exact" and guess.params() == truth
print(f"  {hits}/40 exact\n")

print("Even scattered bits of the stream shrink the seed space quickly:")
cfg = {"kind": "lcg", "A": 251, "a": 33, "b": 17, "s0": 5}
stream = generator_from_config(cfg).bits(64)
for step in (64, 32, 16, 8):
    partial = {i: stream[i] for i in range(0, 64, step)}
    out = degraded_lcg_recover(partial, cfg)
    print(f"  {len(partial):2d} known bits of 64 -> {out.candidates:3d} "
          f"candidate seeds{' (unique)' if out.unique else ''}")
