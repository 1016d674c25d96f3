"""Adversary toolbox: interception, measurement attacks, seed recovery.

Quantum side: the random-basis intercept that turns a quarter of the tag
qubits into certain knowledge of key-stream bits, the intermediate-basis
(Breidbart) measurement, and channel-tamper strategies for sessions.

Classical side: cryptanalysis of the linear congruential key stream -- the
determinant/GCD recovery of the modulus from eight consecutive outputs, the
modular solve for multiplier/increment/initial state, and a brute-force
recovery from partially known stream bits.  A pipeline stitches both sides
together: intercept tag qubits, map conclusive records to stream positions,
and hand the partial stream to the seed-recovery stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .bitsource import (BitBlock, BitGenerator, LcgGenerator, LcgParams,
                        derive_rng, generator_from_config, lcg_values)
from .errors import CapacityError, ConfigError
from .protocol import (SchemeConfig, SessionTranscript, VARIANT_QUANTUM_FIXED,
                       VARIANT_CLASSICAL)
from .quantum import PureState, encode_qubit

__all__ = [
    "InterceptRecord",
    "RecoveredLcgSeed",
    "DegradedRecovery",
    "PipelineResult",
    "random_basis_intercept",
    "hoeffding_failure_bound",
    "hoeffding_standard_bound",
    "exact_failure_probability",
    "intercept_success_experiment",
    "breidbart_attack",
    "breidbart_attack_experiment",
    "lcg_delta",
    "lcg_recover",
    "degraded_lcg_recover",
    "corollary1_pipeline",
    "RandomTagSubstitution",
    "MessageTamper",
    "InterceptResend",
]

_COS8_SQ = math.cos(math.pi / 8) ** 2


@dataclass(frozen=True)
class InterceptRecord:
    """One intercepted qubit.

    ``conclusive`` means the outcome differs from the public reference bit,
    which can only happen when the chosen basis differs from the encoding
    basis -- so the encoding basis is then known with certainty and stored
    in ``inferred_x`` (1 - basis_chosen).
    """

    position: int
    basis_chosen: int
    outcome: int
    reference: int
    conclusive: bool
    inferred_x: Optional[int] = None


def random_basis_intercept(qubits: Sequence[PureState], reference: BitBlock,
                           rng: np.random.Generator,
                           positions: Optional[Sequence[int]] = None) -> List[InterceptRecord]:
    """Measures every qubit in a uniformly random basis.

    Args:
        qubits: single-qubit states carrying the reference bits.
        reference: the public data bits the qubits encode (known to the
            adversary, e.g. the tag of a public message under a public hash).
        rng: adversary randomness.
        positions: stream positions to record (defaults to 0..n-1).

    Returns:
        One InterceptRecord per qubit, in order.
    """
    n = len(qubits)
    if len(reference) != n:
        raise ValueError("reference length must match the qubit count")
    if positions is None:
        positions = range(n)
    elif len(positions) != n:
        raise ValueError("positions length must match the qubit count")
    for q in qubits:
        if q.num_qubits != 1:
            raise ValueError("intercept expects single-qubit carriers")
    amps = np.stack([q.amplitudes for q in qubits])
    bases = rng.integers(0, 2, size=n)
    # rotate the diagonal-basis picks into the computational frame
    s = 1.0 / math.sqrt(2.0)
    rotated = amps.copy()
    picked = bases == 1
    rotated[picked, 0] = s * (amps[picked, 0] + amps[picked, 1])
    rotated[picked, 1] = s * (amps[picked, 0] - amps[picked, 1])
    p0 = np.abs(rotated[:, 0]) ** 2
    outcomes = (rng.random(n) >= p0).astype(int)
    records = []
    for pos, b, z, y in zip(positions, bases, outcomes, reference):
        conclusive = bool(z != y)
        records.append(InterceptRecord(position=int(pos), basis_chosen=int(b),
                                       outcome=int(z), reference=int(y),
                                       conclusive=conclusive,
                                       inferred_x=(1 - int(b)) if conclusive else None))
    return records


def hoeffding_failure_bound(p: int) -> float:
    """exp(-2p): the failure bound as displayed in the source analysis."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return math.exp(-2.0 * p)


def hoeffding_standard_bound(p: int) -> float:
    """exp(-p/4): the textbook Hoeffding form for the same event."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return math.exp(-p / 4.0)


def exact_failure_probability(p: int) -> float:
    """P[Bin(8p, 1/4) < p], computed in exact rational arithmetic.

    The probability that fewer than p of 8p intercepted qubits are
    conclusive.  Exceeds exp(-2p) already at p = 2, which is why the
    experiment below is asserted against this value and merely *reports*
    the closed-form bounds.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    n = 8 * p
    total = Fraction(0)
    for j in range(p):
        total += math.comb(n, j) * Fraction(3) ** (n - j) / Fraction(4) ** n
    return float(total)


def intercept_success_experiment(p: int, trials: int, *,
                                 master_seed: int) -> dict:
    """Monte Carlo of the conclusive-count shortfall event.

    Each trial intercepts 8p fair-input qubits and counts conclusive
    records; a trial fails when fewer than p are conclusive.  The report
    carries the empirical rates next to the exact binomial probability and
    both closed-form bounds.
    """
    if p < 1 or trials < 1:
        raise ValueError("p and trials must be >= 1")
    rng = derive_rng(master_seed, "intercept-experiment")
    n = 8 * p
    # matched bases never yield conclusive outcomes; mismatched do so with
    # probability 1/2 -- per qubit the conclusive chance is exactly 1/4,
    # so the experiment reduces to simulating the induced Bernoulli draws
    # faithfully through actual state preparation and measurement.
    failures = 0
    conclusive_total = 0
    for _ in range(trials):
        x_bits = rng.integers(0, 2, size=n)
        t_bits = rng.integers(0, 2, size=n)
        qubits = [encode_qubit(int(x), int(t)) for x, t in zip(x_bits, t_bits)]
        records = random_basis_intercept(qubits, BitBlock(tuple(int(t) for t in t_bits)), rng)
        got = sum(1 for r in records if r.conclusive)
        conclusive_total += got
        if got < p:
            failures += 1
    return {
        "p": p,
        "qubits_per_trial": n,
        "trials": trials,
        "empirical_failure_rate": failures / trials,
        "empirical_conclusive_rate": conclusive_total / (trials * n),
        "exact_failure_probability": exact_failure_probability(p),
        "bound_as_displayed": hoeffding_failure_bound(p),
        "bound_standard_form": hoeffding_standard_bound(p),
    }


def breidbart_attack(qubits: Sequence[PureState], reference: BitBlock,
                     rng: np.random.Generator,
                     theta: float = -math.pi / 8) -> Tuple[BitBlock, BitBlock]:
    """Intermediate-basis measurement of every qubit; guesses the basis bits.

    Measures at angle ``theta`` and guesses each encoding basis as
    outcome xor reference -- right with probability cos^2(pi/8) per qubit at
    the default angle on fair inputs.

    Returns:
        (guessed basis bits, raw outcomes).
    """
    n = len(qubits)
    if len(reference) != n:
        raise ValueError("reference length must match the qubit count")
    for q in qubits:
        if q.num_qubits != 1:
            raise ValueError("attack expects single-qubit carriers")
    c, s = math.cos(theta), math.sin(theta)
    amps = np.stack([q.amplitudes for q in qubits])
    # amplitude on the angle-theta axis and its complement
    a0 = c * amps[:, 0] + s * amps[:, 1]
    p0 = np.abs(a0) ** 2
    outcomes = (rng.random(n) >= p0).astype(int)
    guesses = tuple(int(z) ^ y for z, y in zip(outcomes, reference))
    return BitBlock(guesses), BitBlock(tuple(int(z) for z in outcomes))


def breidbart_attack_experiment(n_qubits: int, *, master_seed: int,
                                theta: float = -math.pi / 8) -> dict:
    """Accuracy of the intermediate-basis basis-guess on fair random inputs."""
    from .bounds import binary_entropy   # local import avoids a cycle

    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    rng = derive_rng(master_seed, "breidbart-experiment")
    x_bits = rng.integers(0, 2, size=n_qubits)
    t_bits = rng.integers(0, 2, size=n_qubits)
    qubits = [encode_qubit(int(x), int(t)) for x, t in zip(x_bits, t_bits)]
    reference = BitBlock(tuple(int(t) for t in t_bits))
    guesses, _ = breidbart_attack(qubits, reference, rng, theta)
    hits = sum(1 for g, x in zip(guesses, x_bits) if g == int(x))
    accuracy = hits / n_qubits
    return {
        "n_qubits": n_qubits,
        "theta": theta,
        "empirical_accuracy": accuracy,
        "expected_accuracy": _COS8_SQ if abs(theta + math.pi / 8) < 1e-12 else None,
        "channel_information_bits": 1.0 - binary_entropy(_COS8_SQ),
    }


# ---------------------------------------------------------------------------
# linear congruential cryptanalysis


def lcg_delta(window: Sequence[int]) -> int:
    """det [[s_i, s_{i+1}, 1], [s_{i+1}, s_{i+2}, 1], [s_{i+2}, s_{i+3}, 1]].

    A multiple of the modulus for any four consecutive outputs; exact
    integer arithmetic throughout.
    """
    if len(window) != 4:
        raise ValueError("a delta window holds exactly 4 values")
    s0, s1, s2, s3 = (int(v) for v in window)
    return (s0 * (s2 - s3) - s1 * (s1 - s3) + s2 * (s1 - s2))


@dataclass(frozen=True)
class RecoveredLcgSeed:
    """Outcome of a seed-recovery attempt.

    confidence is "exact" (full quadruple recovered and the regenerated
    stream reproduces every observed output), "multiple-of-A" (a modulus
    multiple was found but the parameter solve was not unique), or
    "failed".  Unrecovered components are None.
    """

    modulus: Optional[int]
    multiplier: Optional[int]
    increment: Optional[int]
    state: Optional[int]
    confidence: str
    detail: str = ""

    def params(self) -> LcgParams:
        if self.confidence != "exact":
            raise ValueError("no exact parameter set recovered")
        return LcgParams(self.modulus, self.multiplier, self.increment, self.state)


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _mod_inverse(a: int, modulus: int) -> Optional[int]:
    g, x, _ = _egcd(a % modulus, modulus)
    return x % modulus if g == 1 else None


def _divisors(n: int) -> List[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _solve_parameters(observed: Sequence[int], modulus: int):
    """(a, b) from consecutive output triples, trying each until invertible."""
    for i in range(len(observed) - 2):
        s1, s2, s3 = observed[i], observed[i + 1], observed[i + 2]
        inv = _mod_inverse(s1 - s2, modulus)
        if inv is None:
            continue
        a = ((s2 - s3) * inv) % modulus
        b = (s2 - a * s1) % modulus
        return a, b
    return None


def _regenerates(observed: Sequence[int], modulus: int, a: int, b: int) -> bool:
    s = observed[0]
    for v in observed[1:]:
        s = (a * s + b) % modulus
        if s != v:
            return False
    return True


def lcg_recover(observed: Sequence[int], *, n_deltas: int = 5) -> RecoveredLcgSeed:
    """Recovers (A, a, b, s0) from consecutive outputs s_1, s_2, ...

    Needs at least 8 outputs (5 delta windows).  The modulus candidate is
    the GCD of the first ``n_deltas`` nonzero deltas, extended over all
    available windows while it exceeds max(observed) + 1; divisors of the
    GCD no smaller than max(observed) + 1 are then tried smallest-first
    until the regenerated stream matches every observed output.
    """
    observed = [int(v) for v in observed]
    if len(observed) < 8:
        raise ValueError("need at least 8 consecutive outputs")
    windows = len(observed) - 3
    deltas = [lcg_delta(observed[i:i + 4]) for i in range(windows)]
    floor = max(observed) + 1

    def gcd_of(count):
        g = 0
        for d in deltas[:count]:
            g = math.gcd(g, abs(d))
        return g

    used = min(n_deltas, windows)
    g = gcd_of(used)
    while g > floor and used < windows:
        used += 1
        g = gcd_of(used)
    if g == 0:
        return RecoveredLcgSeed(None, None, None, None, "failed",
                                "all delta determinants vanish (degenerate stream)")
    if g < floor:
        return RecoveredLcgSeed(None, None, None, None, "failed",
                                f"gcd {g} is smaller than max(observed)+1 = {floor}")

    for candidate in (d for d in _divisors(g) if d >= floor):
        solved = _solve_parameters(observed, candidate)
        if solved is None:
            continue
        a, b = solved
        if not _regenerates(observed, candidate, a, b):
            continue
        inv_a = _mod_inverse(a, candidate)
        if inv_a is None:
            return RecoveredLcgSeed(candidate, a, b, None, "multiple-of-A",
                                    "multiplier not invertible; s0 ambiguous")
        s0 = (inv_a * (observed[0] - b)) % candidate
        return RecoveredLcgSeed(candidate, a, b, s0, "exact",
                                f"verified against {len(observed)} outputs")
    return RecoveredLcgSeed(g, None, None, None, "multiple-of-A",
                            "no divisor of the gcd reproduces the stream")


@dataclass(frozen=True)
class DegradedRecovery:
    """Outcome of brute-force recovery from partially known stream bits."""

    candidates: int
    seeds: tuple
    unique: bool
    bits_known: int


def degraded_lcg_recover(partial_bits: Mapping[int, int], gen_config: Mapping,
                         *, enumerate_mode: str = "state-only",
                         capacity: int = 1 << 20) -> DegradedRecovery:
    """Enumerates the seed space and keeps seeds consistent with known bits.

    Args:
        partial_bits: stream position -> bit value (positions are bit
            indices into the expanded key stream).
        gen_config: LCG description; enumerated axes ignore its seed fields.
        enumerate_mode: "state-only" (s0) or "full-seed" ((s0, a, b)).
        capacity: enumeration guard.

    Returns:
        DegradedRecovery with the consistent-seed count and (capped) list.
    """
    if gen_config.get("kind") != "lcg":
        raise ConfigError("degraded recovery targets the lcg generator")
    modulus = int(gen_config["A"])
    if modulus < 2:
        raise ConfigError("modulus must be >= 2")
    positions = sorted(int(i) for i in partial_bits)
    if any(i < 0 for i in positions):
        raise ValueError("positions must be >= 0")
    if enumerate_mode == "state-only":
        a, b = int(gen_config["a"]), int(gen_config["b"])
        space = ((s0, a, b) for s0 in range(modulus))
        n_seeds = modulus
    elif enumerate_mode == "full-seed":
        space = ((s0, a, b) for s0 in range(modulus)
                 for a in range(modulus) for b in range(modulus))
        n_seeds = modulus ** 3
    else:
        raise ConfigError(f"unknown enumerate_mode {enumerate_mode!r}")
    if n_seeds > capacity:
        raise CapacityError(f"{n_seeds} seeds exceed capacity {capacity}")

    width = (modulus - 1).bit_length()
    need_bits = (positions[-1] + 1) if positions else 0
    need_values = math.ceil(need_bits / width) if need_bits else 0
    survivors = []
    for s0, a, b in space:
        params = LcgParams(modulus, a % modulus, b % modulus, s0)
        ok = True
        if positions:
            stream = LcgGenerator(params).bits(need_values * width)
            for pos in positions:
                if stream[pos] != partial_bits[pos]:
                    ok = False
                    break
        if ok:
            survivors.append((s0, a, b))
    return DegradedRecovery(candidates=len(survivors),
                            seeds=tuple(survivors[:64]),
                            unique=(len(survivors) == 1),
                            bits_known=len(positions))


@dataclass(frozen=True)
class PipelineResult:
    """End-to-end intercept-and-recover outcome."""

    qubits_seen: int
    conclusive: int
    recovered_bits: dict
    status: str
    seed_attempt: Optional[object] = None


def corollary1_pipeline(transcript: SessionTranscript, p_target: int, *,
                        master_seed: int) -> PipelineResult:
    """Intercepts the tag qubits of a session and attacks the key stream.

    Requires the fixed-hash quantum variant (public hash): the adversary
    recomputes every tag from the public message, measures each captured
    qubit in a random basis, and keeps the conclusive records -- each one a
    known bit of the key stream at a known position.  If the positions
    cover eight consecutive stream values, the determinant/GCD recovery is
    run; otherwise, when the seed space is enumerable, the partial bits go
    to the brute-force stage.

    Args:
        transcript: session to attack (carriers captured as sent).
        p_target: the analysis parameter p; status is "ok" when at least
            p_target conclusive bits were recovered.
        master_seed: adversary randomness seed.

    Returns:
        PipelineResult; recovered_bits maps stream position -> bit.
    """
    config = transcript.config
    if config.variant != VARIANT_QUANTUM_FIXED:
        raise ConfigError("the pipeline needs the public fixed-hash quantum "
                          f"variant, not {config.variant}")
    h = config.fixed_hash()
    rng = derive_rng(master_seed, "corollary1-intercept")
    recovered: Dict[int, int] = {}
    qubits_seen = 0
    conclusive = 0
    for rnd in transcript.rounds:
        sent = rnd.sent
        if sent.qubits is None:
            raise ConfigError("transcript round lacks a qubit carrier")
        reference = h(sent.message)
        start, length = sent.key_window
        positions = list(range(start, start + length))
        records = random_basis_intercept(sent.qubits, reference, rng,
                                         positions=positions)
        qubits_seen += len(records)
        for rec in records:
            if rec.conclusive:
                conclusive += 1
                recovered[rec.position] = rec.inferred_x
    status = "ok" if conclusive >= p_target else "insufficient-bits"

    seed_attempt = None
    contiguous = _longest_contiguous_values(recovered, config)
    if contiguous is not None and len(contiguous) >= 8:
        seed_attempt = lcg_recover(contiguous)
    elif config.generator.get("kind") == "lcg":
        try:
            seed_attempt = degraded_lcg_recover(recovered, config.generator)
        except CapacityError:
            seed_attempt = None
    return PipelineResult(qubits_seen=qubits_seen, conclusive=conclusive,
                          recovered_bits=recovered, status=status,
                          seed_attempt=seed_attempt)


def _longest_contiguous_values(recovered: Mapping[int, int],
                               config: SchemeConfig) -> Optional[List[int]]:
    """Consecutive fully known stream values, if the stream is an LCG."""
    gen = config.generator
    if gen.get("kind") != "lcg":
        return None
    width = (int(gen["A"]) - 1).bit_length()
    if not recovered:
        return None
    max_pos = max(recovered)
    n_values = (max_pos + 1 + width - 1) // width
    best: List[int] = []
    run: List[int] = []
    for v in range(n_values):
        bits = [recovered.get(v * width + j) for j in range(width)]
        if any(b is None for b in bits):
            run = []
            continue
        value = 0
        for b in bits:
            value = (value << 1) | b
        run.append(value)
        if len(run) > len(best):
            best = list(run)
    return best if best else None


# ---------------------------------------------------------------------------
# channel tamper strategies for run_session


class RandomTagSubstitution:
    """Replaces every carrier with freshly random content of the same kind."""

    name = "substitute-random-tag"

    def __init__(self, master_seed: int):
        self.rng = derive_rng(master_seed, "eve-substitution")

    def intercept(self, index, sent):
        from .protocol import AuthenticatedMessage

        if sent.tag_bits is not None:
            k = len(sent.tag_bits)
            fake = BitBlock(tuple(int(b) for b in self.rng.integers(0, 2, size=k)))
            return AuthenticatedMessage(message=sent.message,
                                        key_window=sent.key_window,
                                        tag_bits=fake), None
        k = len(sent.qubits)
        bases = self.rng.integers(0, 2, size=k)
        values = self.rng.integers(0, 2, size=k)
        fake_qubits = tuple(encode_qubit(int(x), int(t))
                            for x, t in zip(bases, values))
        return AuthenticatedMessage(message=sent.message,
                                    key_window=sent.key_window,
                                    qubits=fake_qubits), None


class MessageTamper:
    """Flips one message bit and forwards the carrier untouched."""

    name = "flip-message-bit"

    def __init__(self, bit_position: int = 0):
        self.bit_position = bit_position

    def intercept(self, index, sent):
        from .protocol import AuthenticatedMessage

        bits = list(sent.message)
        bits[self.bit_position] ^= 1
        tampered = BitBlock(tuple(bits))
        return AuthenticatedMessage(message=tampered,
                                    key_window=sent.key_window,
                                    tag_bits=sent.tag_bits,
                                    qubits=sent.qubits), None


class InterceptResend:
    """Measures each qubit in a random basis and re-encodes the outcome.

    Keeps the intercept records (position-tagged) so the session transcript
    doubles as attack data; the resent qubits carry the adversary's basis
    choices, which is what disturbs honest verification.
    """

    name = "intercept-resend"

    def __init__(self, master_seed: int, reference_hash=None):
        self.rng = derive_rng(master_seed, "eve-intercept-resend")
        self.reference_hash = reference_hash

    def intercept(self, index, sent):
        from .protocol import AuthenticatedMessage

        if sent.qubits is None:
            raise ConfigError("intercept-resend targets quantum carriers")
        if self.reference_hash is not None:
            reference = self.reference_hash(sent.message)
        else:
            reference = BitBlock.zeros(len(sent.qubits))
        start, length = sent.key_window
        positions = list(range(start + length - len(sent.qubits),
                               start + length))
        records = random_basis_intercept(sent.qubits, reference, self.rng,
                                         positions=positions)
        resent = tuple(encode_qubit(r.basis_chosen, r.outcome) for r in records)
        return AuthenticatedMessage(message=sent.message,
                                    key_window=sent.key_window,
                                    qubits=resent), records
