"""Authentication scheme variants and round/session execution.

Three scheme variants share one skeleton -- hash the message, transport the
tag -- and differ in how the tag travels and where the hash comes from:

* ``classical-brassard``: a fixed secret hash; the tag is XOR-padded with
  fresh key bits and sent as classical data.  Costs k key bits per message.
* ``quantum-fixed-hash``: a fixed secret hash; the tag bits ride qubits
  whose bases are fresh key bits.  Costs k key bits per message.
* ``quantum-single-key``: no pre-shared hash; each message consumes
  m+2k-1 stream bits to select a hash and k more for the bases
  (m+3k-1 per message).
* ``single-key-reused-hash``: like the previous one but the hash prefix is
  consumed once per session, then k basis bits per message.

Verification recomputes the tag on the receiver side; a round is accepted
exactly when the recomputed tag matches the received one.  Both parties
read the same key stream through independent cursors, and the receiver's
cursor advances even on rejected rounds so the parties stay aligned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .bitsource import BitBlock, BitGenerator, derive_rng, generator_from_config
from .errors import ConfigError, KeyExhaustedError
from .hashing import HashFamilyShape, HashFunction, hash_eval, hash_from_key_bits
from .quantum import PureState, encode_qubit, measure_qubit

__all__ = [
    "VARIANTS",
    "SchemeConfig",
    "KeyCursor",
    "AuthenticatedMessage",
    "Verdict",
    "RoundRecord",
    "SessionTranscript",
    "alice_round",
    "bob_round",
    "run_session",
    "key_cost_per_message",
]

VARIANT_CLASSICAL = "classical-brassard"
VARIANT_QUANTUM_FIXED = "quantum-fixed-hash"
VARIANT_SINGLE_KEY = "quantum-single-key"
VARIANT_REUSED_HASH = "single-key-reused-hash"
VARIANTS = (VARIANT_CLASSICAL, VARIANT_QUANTUM_FIXED,
            VARIANT_SINGLE_KEY, VARIANT_REUSED_HASH)

_FIXED_HASH_VARIANTS = (VARIANT_CLASSICAL, VARIANT_QUANTUM_FIXED)
_STREAM_HASH_VARIANTS = (VARIANT_SINGLE_KEY, VARIANT_REUSED_HASH)


@dataclass(frozen=True)
class SchemeConfig:
    """Variant, hash-family geometry, key source, and (maybe) a fixed hash.

    Attributes:
        variant: one of VARIANTS.
        shape: message/tag geometry shared by both parties.
        generator: key-stream description (see generator_from_config).
        hash_key: key bits of the pre-shared hash; required by the
            fixed-hash variants and forbidden for the single-key ones.
    """

    variant: str
    shape: HashFamilyShape
    generator: dict
    hash_key: Optional[BitBlock] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.variant in _FIXED_HASH_VARIANTS:
            if self.hash_key is None:
                raise ConfigError(f"{self.variant} requires hash_key")
            if len(self.hash_key) != self.shape.key_bits:
                raise ConfigError(
                    f"hash_key must hold {self.shape.key_bits} bits")
        elif self.hash_key is not None:
            raise ConfigError(f"{self.variant} derives its hash from the "
                              "key stream; hash_key must be absent")

    def fixed_hash(self) -> Optional[HashFunction]:
        if self.hash_key is None:
            return None
        return hash_from_key_bits(self.shape, self.hash_key)


def key_cost_per_message(config: SchemeConfig) -> int:
    """Stream bits consumed per message (steady state)."""
    k = config.shape.tag_bits
    if config.variant == VARIANT_SINGLE_KEY:
        return config.shape.key_bits + k
    return k


class KeyCursor:
    """Sequential reader over a key stream.

    Wraps a generator with a position and an optional hard limit; ``take``
    returns the next bits and advances.  Cursors over the same generator
    configuration observe identical streams.
    """

    def __init__(self, generator: BitGenerator, *, limit: Optional[int] = None):
        self.generator = generator
        self.position = 0
        self.limit = limit
        self._cache = BitBlock(())

    def _ensure(self, upto: int):
        if len(self._cache) >= upto:
            return
        want = max(upto, 2 * len(self._cache), 64)
        if self.limit is not None:
            want = min(want, self.limit)
        try:
            self._cache = self.generator.bits(want)
        except KeyExhaustedError:
            # fixed streams may be shorter than the prefetch guess
            self._cache = self.generator.bits(upto)

    def take(self, count: int) -> BitBlock:
        if count < 0:
            raise ValueError("count must be >= 0")
        end = self.position + count
        if self.limit is not None and end > self.limit:
            raise KeyExhaustedError(
                f"requested bits up to {end} with limit {self.limit}")
        self._ensure(end)
        out = self._cache[self.position:end]
        self.position = end
        return out


@dataclass(frozen=True)
class AuthenticatedMessage:
    """Message plus its transported tag.

    Exactly one of ``tag_bits`` (classical pad variant) and ``qubits``
    (conjugate-coding variants) is present.  ``key_window`` records which
    stream bits produced the carrier: (first bit position, length).
    """

    message: BitBlock
    key_window: Tuple[int, int]
    tag_bits: Optional[BitBlock] = None
    qubits: Optional[tuple] = None

    def __post_init__(self):
        if (self.tag_bits is None) == (self.qubits is None):
            raise ValueError("exactly one carrier kind must be present")
        if self.qubits is not None:
            object.__setattr__(self, "qubits", tuple(self.qubits))


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    recomputed_tag: BitBlock
    received_tag: BitBlock


def _resolve_hash(config: SchemeConfig, cursor: KeyCursor,
                  session_hash: Optional[HashFunction]) -> HashFunction:
    """Hash for the next round, consuming stream bits when the variant says so."""
    if config.variant in _FIXED_HASH_VARIANTS:
        return config.fixed_hash()
    if config.variant == VARIANT_SINGLE_KEY:
        return hash_from_key_bits(config.shape, cursor.take(config.shape.key_bits))
    # reused-hash: the prefix is consumed once; later rounds receive it
    if session_hash is not None:
        return session_hash
    return hash_from_key_bits(config.shape, cursor.take(config.shape.key_bits))


def alice_round(config: SchemeConfig, message: BitBlock, cursor: KeyCursor,
                session_hash: Optional[HashFunction] = None) -> AuthenticatedMessage:
    """Sender side of one round: hash the message, build the carrier.

    Args:
        config: scheme configuration.
        message: m-bit message to authenticate.
        cursor: the sender's key cursor; advanced by the round's key cost.
        session_hash: resolved hash for the reused-hash variant (omit to
            let the round consume the hash prefix itself).

    Returns:
        The AuthenticatedMessage to transmit.
    """
    if len(message) != config.shape.message_bits:
        raise ValueError(f"message must hold {config.shape.message_bits} bits")
    start = cursor.position
    h = _resolve_hash(config, cursor, session_hash)
    tag = hash_eval(h, message)
    k = config.shape.tag_bits
    if config.variant == VARIANT_CLASSICAL:
        pad = cursor.take(k)
        return AuthenticatedMessage(message=message,
                                    key_window=(start, cursor.position - start),
                                    tag_bits=tag ^ pad)
    bases = cursor.take(k)
    qubits = tuple(encode_qubit(x, t) for x, t in zip(bases, tag))
    return AuthenticatedMessage(message=message,
                                key_window=(start, cursor.position - start),
                                qubits=qubits)


def bob_round(config: SchemeConfig, received: AuthenticatedMessage,
              cursor: KeyCursor, rng: Optional[np.random.Generator] = None,
              session_hash: Optional[HashFunction] = None) -> Verdict:
    """Receiver side: recompute the tag and compare with the carrier.

    The cursor advances by the full key cost whether or not the round is
    accepted, keeping the two parties aligned under tampering.  ``rng``
    drives the quantum measurements and may be omitted for classical rounds.
    """
    if len(received.message) != config.shape.message_bits:
        raise ValueError(f"message must hold {config.shape.message_bits} bits")
    if config.variant != VARIANT_CLASSICAL and rng is None:
        raise ValueError("quantum verification needs an rng")
    h = _resolve_hash(config, cursor, session_hash)
    expected = hash_eval(h, received.message)
    k = config.shape.tag_bits
    if config.variant == VARIANT_CLASSICAL:
        if received.tag_bits is None:
            raise ConfigError("classical variant expects a tag_bits carrier")
        pad = cursor.take(k)
        observed = received.tag_bits ^ pad
    else:
        if received.qubits is None:
            raise ConfigError(f"{config.variant} expects a qubit carrier")
        if len(received.qubits) != k:
            raise ValueError(f"carrier must hold {k} qubits")
        bases = cursor.take(k)
        observed = BitBlock(tuple(measure_qubit(q, b, rng)
                                  for q, b in zip(received.qubits, bases)))
    return Verdict(accepted=(observed == expected), recomputed_tag=expected,
                   received_tag=observed)


@dataclass(frozen=True)
class RoundRecord:
    index: int
    sent: AuthenticatedMessage
    delivered: AuthenticatedMessage
    verdict: Verdict
    eve_notes: Optional[object] = None


@dataclass
class SessionTranscript:
    config: SchemeConfig
    rounds: List[RoundRecord] = field(default_factory=list)

    @property
    def accepted(self) -> int:
        return sum(1 for r in self.rounds if r.verdict.accepted)

    @property
    def accept_rate(self) -> float:
        return self.accepted / len(self.rounds) if self.rounds else float("nan")

    @property
    def key_bits_consumed(self) -> int:
        if not self.rounds:
            return 0
        last = self.rounds[-1].sent.key_window
        return last[0] + last[1]


def run_session(config: SchemeConfig, messages: Sequence[BitBlock],
                eve=None, *, master_seed: int) -> SessionTranscript:
    """Plays a whole session between two honest parties, maybe through Eve.

    Args:
        config: scheme configuration; the generator description inside it
            defines the shared key stream.
        messages: the messages the sender authenticates, in order.
        eve: optional adversary with an ``intercept(index, delivered)``
            method returning (tampered AuthenticatedMessage, notes), or
            None for a quiet channel.
        master_seed: seeds the receiver's measurement randomness (and the
            adversary's, via its own derived stream).

    Returns:
        SessionTranscript with one RoundRecord per message.
    """
    generator = generator_from_config(config.generator)
    alice_cursor = KeyCursor(generator)
    bob_cursor = KeyCursor(generator)
    bob_rng = derive_rng(master_seed, "receiver-measurements")
    session_hash_a = session_hash_b = None
    if config.variant == VARIANT_REUSED_HASH:
        session_hash_a = hash_from_key_bits(config.shape,
                                            alice_cursor.take(config.shape.key_bits))
        session_hash_b = hash_from_key_bits(config.shape,
                                            bob_cursor.take(config.shape.key_bits))
    transcript = SessionTranscript(config=config)
    for i, message in enumerate(messages):
        sent = alice_round(config, message, alice_cursor, session_hash_a)
        delivered, notes = (eve.intercept(i, sent) if eve is not None
                            else (sent, None))
        verdict = bob_round(config, delivered, bob_cursor, bob_rng,
                            session_hash_b)
        transcript.rounds.append(RoundRecord(index=i, sent=sent,
                                             delivered=delivered,
                                             verdict=verdict, eve_notes=notes))
    return transcript
