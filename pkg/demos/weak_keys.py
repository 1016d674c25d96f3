"""What a biased key costs, and how long a key block can stay safe.

A pseudorandom basis key shifts the adversary's view away from the fair
mixture.  Trace distance between the two views is capped by the key's
bias, and the entropy loss is capped by an explicit function of the bias,
which in turn yields a maximum usable block length.
"""

import math

from qauth.bitsource import BitBlock, bias, block_distribution, \
    distribution_with_bias, uniform_distribution
from qauth.bounds import (fannes_bound, max_block_length,
                          max_block_length_simple, proposition2_check,
                          theorem2_bound, theorem2_check)

LCG = {"kind": "lcg", "A": 251, "a": 33, "b": 17, "s0": 5}

print("Blocks drawn from a small congruential generator are visibly")
print("non-uniform once the block is wider than the state space:\n")
for k in (4, 8, 12):
    p = block_distribution(LCG, k)
    print(f"  k={k:2d}: bias of the LCG block law = {bias(p):.6f}"
          f"   (fair key: {bias(uniform_distribution(k)):.1f})")

print("\nTrace distance between the adversary views is at most the bias:")
for target in (0.05, 0.2):
    p = distribution_with_bias(3, target)
    r = proposition2_check(p, BitBlock.zeros(3))
    print(f"  bias {target:.2f}: D = {r.value:.6f} <= B = {r.bound:.6f}"
          f"   ({'ok' if r.satisfied else 'violated'})")

print("\nEntropy loss against the fair-key view, in nats:")
for eps in (0.01, 0.05):
    p = distribution_with_bias(4, eps)
    r = theorem2_check(p, BitBlock.zeros(4), eps)
    print(f"  eps {eps:.2f}: |dS| = {r.value:.6f} <= "
          f"{r.bound:.6f} = 2ln2(k-1)eps + 2eps ln(1/eps)")

print("\nRequiring the loss to stay under a budget delta caps the block:")
eps, delta = 0.001, 0.1
print(f"  eps {eps}, delta {delta}: k <= {max_block_length(eps, delta):.3f}")
print(f"  simple variant at eps 0.01: k <= "
      f"{max_block_length_simple(0.01):.3f}")
anomaly = max_block_length(0.01, 0.01)
print(f"  note: at delta = eps = 0.01 the exact formula returns "
      f"{anomaly:.3f},")
print("  a negative length, so that operating point admits no block at all.")

print("\nFannes-type continuity gives the comparable state-side cap:")
d = 0.1
print(f"  D = {d}, dimension 4: |dS| <= {fannes_bound(d, 4):.6f} nats"
      f" (valid for D <= 1/(2e) = {1 / (2 * math.e):.4f})")
print(f"  same numbers through the bias bound at eps = {d}: "
      f"{theorem2_bound(d, 2):.6f} nats")
