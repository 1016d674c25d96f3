"""Eavesdropping experiments and key-stream recovery."""

from fractions import Fraction
import math

import pytest

from qauth.bitsource import (BitBlock, LcgParams, derive_rng,
                             generator_from_config, lcg_values)
from qauth.errors import ConfigError
from qauth.hashing import HashFamilyShape, random_hash
from qauth.protocol import (SchemeConfig, run_session, VARIANT_CLASSICAL,
                            VARIANT_QUANTUM_FIXED)
from qauth.quantum import encode_qubit
from qauth.attacks import (random_basis_intercept, hoeffding_failure_bound,
                           hoeffding_standard_bound,
                           exact_failure_probability,
                           intercept_success_experiment, breidbart_attack,
                           breidbart_attack_experiment, lcg_delta, lcg_recover,
                           degraded_lcg_recover, corollary1_pipeline)

REF = LcgParams(251, 33, 17, 5)


class TestInterceptRecords:
    def test_exhaustive_inference_table(self):
        # a conclusive outcome proves the basis; check every reachable case
        rng = derive_rng(1, "attack-tests")
        seen_conclusive = 0
        for x in (0, 1):
            for t in (0, 1):
                qubit = encode_qubit(x, t)
                for _ in range(200):
                    rec = random_basis_intercept([qubit], BitBlock((t,)), rng)[0]
                    assert rec.conclusive == (rec.outcome != t)
                    if rec.basis_chosen == x:
                        assert rec.outcome == t    # same basis never disturbs
                    if rec.conclusive:
                        assert rec.inferred_x == x
                        seen_conclusive += 1
        assert seen_conclusive > 0

    def test_positions_label_stream_offsets(self):
        rng = derive_rng(2, "attack-tests")
        qubits = [encode_qubit(0, 0)] * 2
        recs = random_basis_intercept(qubits, BitBlock.zeros(2), rng,
                                      positions=[8, 11])
        assert [r.position for r in recs] == [8, 11]
        with pytest.raises(ValueError):
            random_basis_intercept(qubits, BitBlock.zeros(2), rng,
                                   positions=[8])

    def test_conclusive_rate_quarter(self):
        rng = derive_rng(3, "attack-tests")
        n = 20000
        bits = derive_rng(4, "attack-tests").integers(0, 2, size=(n, 2))
        qubits = [encode_qubit(int(x), int(t)) for x, t in bits]
        ref = BitBlock(tuple(int(t) for t in bits[:, 1]))
        recs = random_basis_intercept(qubits, ref, rng)
        rate = sum(r.conclusive for r in recs) / n
        sigma = math.sqrt(0.25 * 0.75 / n)
        assert abs(rate - 0.25) < 4 * sigma


class TestFailureProbability:
    def test_exact_p1(self):
        # P[Bin(8, 1/4) < 1] = (3/4)^8
        assert exact_failure_probability(1) == pytest.approx(
            float(Fraction(3, 4) ** 8), abs=1e-15)

    def test_exact_p2(self):
        # P[Bin(16, 1/4) < 2] = (3/4)^16 + 16 (1/4)(3/4)^15
        expect = Fraction(3, 4) ** 16 + 16 * Fraction(1, 4) * Fraction(3, 4) ** 15
        assert exact_failure_probability(2) == pytest.approx(float(expect),
                                                             abs=1e-15)

    def test_displayed_bound_fails_at_p2(self):
        # the aggressive exp(-2p) form undershoots the true probability
        assert exact_failure_probability(2) > hoeffding_failure_bound(2)
        assert exact_failure_probability(1) < hoeffding_failure_bound(1)

    def test_standard_form_holds(self):
        for p in (1, 2, 4, 8, 16):
            assert exact_failure_probability(p) <= hoeffding_standard_bound(p)

    def test_bound_values(self):
        assert hoeffding_failure_bound(1) == pytest.approx(math.exp(-2))
        assert hoeffding_standard_bound(4) == pytest.approx(math.exp(-1))

    def test_experiment_matches_exact(self):
        r = intercept_success_experiment(1, 4000, master_seed=5)
        exact = r["exact_failure_probability"]
        sigma = math.sqrt(exact * (1 - exact) / 4000)
        assert abs(r["empirical_failure_rate"] - exact) < 5 * sigma
        assert abs(r["empirical_conclusive_rate"] - 0.25) < 0.02
        assert r["bound_as_displayed"] == pytest.approx(math.exp(-2))
        assert r["bound_standard_form"] == pytest.approx(math.exp(-0.25))


class TestBreidbartAttack:
    def test_known_data_guessing_rate(self):
        r = breidbart_attack_experiment(40000, master_seed=6)
        hit = (1 + 1 / math.sqrt(2)) / 2
        sigma = math.sqrt(hit * (1 - hit) / 40000)
        assert abs(r["empirical_accuracy"] - hit) < 5 * sigma
        assert r["channel_information_bits"] == pytest.approx(0.3991239633,
                                                              abs=1e-9)

    def test_attack_outputs_align(self):
        rng = derive_rng(7, "attack-tests")
        bits = derive_rng(8, "attack-tests").integers(0, 2, size=(200, 2))
        qubits = [encode_qubit(int(x), int(t)) for x, t in bits]
        ref = BitBlock(tuple(int(t) for t in bits[:, 1]))
        guesses, outcomes = breidbart_attack(qubits, ref, rng)
        assert len(guesses) == len(outcomes) == 200
        hits = sum(g == int(x) for g, (x, _) in zip(guesses, bits))
        assert hits / 200 > 0.75


class TestLcgRecovery:
    def test_delta_reference(self):
        # determinant of the first window of the reference stream
        assert lcg_delta([182, 250, 235, 242]) == 251

    def test_recover_reference(self):
        rec = lcg_recover(lcg_values(REF, 8))
        assert rec.confidence == "exact"
        assert (rec.modulus, rec.multiplier, rec.increment, rec.state) == \
            (251, 33, 17, 5)

    def test_recover_needs_enough_outputs(self):
        with pytest.raises(ValueError):
            lcg_recover(lcg_values(REF, 7))

    def test_recover_random_instances(self):
        rng = derive_rng(9, "attack-tests")
        primes = [p for p in range(100, 1000)
                  if all(p % d for d in range(2, int(p ** 0.5) + 1))]
        exact = 0
        for _ in range(30):
            A = int(rng.choice(primes))
            a = int(rng.integers(2, A))
            b = int(rng.integers(0, A))
            s0 = int(rng.integers(0, A))
            params = LcgParams(A, a, b, s0)
            rec = lcg_recover(lcg_values(params, 8))
            if rec.confidence == "exact":
                assert (rec.modulus, rec.multiplier, rec.increment,
                        rec.state) == (A, a, b, s0)
                exact += 1
        assert exact >= 29

    def test_degenerate_stream_flagged(self):
        # multiplier 1 generates an arithmetic progression: deltas vanish
        rec = lcg_recover(lcg_values(LcgParams(251, 1, 7, 3), 8))
        assert rec.confidence != "exact"


class TestDegradedRecovery:
    def test_full_prefix_pins_seed(self):
        cfg = {"kind": "lcg", "A": 251, "a": 33, "b": 17, "s0": 5}
        stream = generator_from_config(cfg).bits(24)
        partial = {i: stream[i] for i in range(24)}
        out = degraded_lcg_recover(partial, cfg)
        assert out.unique
        assert out.seeds[0][0] == 5

    def test_no_information_keeps_all_states(self):
        cfg = {"kind": "lcg", "A": 251, "a": 33, "b": 17, "s0": 5}
        out = degraded_lcg_recover({}, cfg)
        assert out.candidates == 251

    def test_scattered_bits_narrow_candidates(self):
        cfg = {"kind": "lcg", "A": 251, "a": 33, "b": 17, "s0": 5}
        stream = generator_from_config(cfg).bits(64)
        partial = {i: stream[i] for i in range(0, 64, 3)}
        out = degraded_lcg_recover(partial, cfg)
        assert 1 <= out.candidates < 251
        assert any(s[0] == 5 for s in out.seeds)


class TestPipeline:
    @staticmethod
    def make_transcript(p=16, seed=41):
        shape = HashFamilyShape(8, 4)
        h = random_hash(shape, derive_rng(seed, "hash-key"))
        cfg = SchemeConfig(variant=VARIANT_QUANTUM_FIXED, shape=shape,
                           generator={"kind": "lcg", "A": 251, "a": 33,
                                      "b": 17, "s0": 5},
                           hash_key=h.diagonals + h.offset)
        rng = derive_rng(seed, "messages")
        n = math.ceil(8 * p / 4)
        msgs = [BitBlock(tuple(int(b) for b in rng.integers(0, 2, size=8)))
                for _ in range(n)]
        return cfg, run_session(cfg, msgs, None, master_seed=seed)

    def test_recovers_target_bits(self):
        cfg, transcript = self.make_transcript()
        out = corollary1_pipeline(transcript, 16, master_seed=41)
        assert out.qubits_seen == 128
        assert out.status == "ok"
        assert out.conclusive >= 16
        truth = generator_from_config(cfg.generator).bits(128)
        for pos, bit in out.recovered_bits.items():
            assert truth[pos] == bit

    def test_requires_quantum_fixed_variant(self):
        shape = HashFamilyShape(4, 2)
        h = random_hash(shape, derive_rng(1, "hash-key"))
        cfg = SchemeConfig(variant=VARIANT_CLASSICAL, shape=shape,
                           generator={"kind": "fair", "seed": 1},
                           hash_key=h.diagonals + h.offset)
        rng = derive_rng(1, "messages")
        msgs = [BitBlock(tuple(int(b) for b in rng.integers(0, 2, size=4)))]
        t = run_session(cfg, msgs, None, master_seed=1)
        with pytest.raises(ConfigError):
            corollary1_pipeline(t, 1, master_seed=1)
