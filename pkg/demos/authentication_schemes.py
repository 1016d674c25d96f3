"""The four authentication variants, honest and under attack.

Runs each scheme over the same message batch three times: on a quiet
channel, against a tag-substituting adversary, and against an
intercept-resend adversary, then compares key consumption.
"""

from qauth.attacks import InterceptResend, RandomTagSubstitution
from qauth.bitsource import BitBlock, derive_rng
from qauth.hashing import HashFamilyShape
from qauth.protocol import (SchemeConfig, VARIANTS, VARIANT_CLASSICAL,
                            VARIANT_QUANTUM_FIXED, VARIANT_REUSED_HASH,
                            key_cost_per_message, run_session)

SHAPE = HashFamilyShape(message_bits=4, tag_bits=2)
N_MESSAGES = 200
MASTER = 77

msg_rng = derive_rng(MASTER, "demo-messages")
messages = [BitBlock(tuple(int(b) for b in msg_rng.integers(0, 2, 4)))
            for _ in range(N_MESSAGES)]
hash_key = BitBlock(tuple(int(b) for b in
                          derive_rng(MASTER, "demo-hash-key").integers(0, 2, 7)))


def make_config(variant: str) -> SchemeConfig:
    fixed = (VARIANT_CLASSICAL, VARIANT_QUANTUM_FIXED)
    return SchemeConfig(variant=variant, shape=SHAPE,
                        generator={"kind": "fair", "seed": MASTER},
                        hash_key=hash_key if variant in fixed else None)


print(f"{N_MESSAGES} messages, m = {SHAPE.message_bits}, k = {SHAPE.tag_bits}, "
      f"hash key = {SHAPE.key_bits} bits\n")

header = (f"{'variant':>24} {'honest':>7} {'tag-sub':>8} "
          f"{'intercept':>10} {'bits/msg':>9} {'stream bits':>12}")
print(header)
print("-" * len(header))
for variant in VARIANTS:
    cfg = make_config(variant)
    honest = run_session(cfg, messages, master_seed=MASTER)
    sub = run_session(cfg, messages, RandomTagSubstitution(MASTER + 1),
                      master_seed=MASTER)
    if variant == VARIANT_CLASSICAL:
        ir_cell = f"{'n/a':>10}"
    else:
        ir = run_session(cfg, messages, InterceptResend(
            MASTER + 2, reference_hash=cfg.fixed_hash()), master_seed=MASTER)
        ir_cell = f"{ir.accept_rate:10.3f}"
    print(f"{variant:>24} {honest.accept_rate:7.3f} {sub.accept_rate:8.3f} "
          f"{ir_cell} {key_cost_per_message(cfg):9d} "
          f"{honest.key_bits_consumed:12d}")

print("""
Reading the table:
  - Honest acceptance is 1.000 everywhere; the schemes differ in what an
    adversary can do and in what they cost.
  - Blind tag substitution succeeds with probability 2^-k = 0.25 per
    message whatever the carrier (a substituted qubit also passes the
    receiver's measurement half the time per position); every tag-sub
    column sits within sampling noise of 0.25.
  - Intercept-resend beats blind guessing against the qubit variants
    (expected accept rate (3/4)^k ~ 0.56 here) but stays far below the
    honest rate, and every intercepted qubit is detectable disturbance.
  - The single-key variant burns a fresh hash key every message; that is
    the price of dropping the pre-shared hash.""")

reused = make_config(VARIANT_REUSED_HASH)
t = run_session(reused, messages[:5], master_seed=MASTER)
per_round = [r.sent.key_window for r in t.rounds]
print(f"\nReused-hash key windows for 5 messages (start, length): {per_round}")
print(f"First window starts at bit {per_round[0][0]}: the first "
      f"{SHAPE.key_bits} stream bits fix the session hash once.")
