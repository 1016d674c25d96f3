"""Key-bit sources: ideal fair streams and linear-congruential streams.

Both parties of the authentication schemes read their shared secret as a
stream of bits.  Two stream families are modelled: an ideal fair Bernoulli
source (what the security statements assume) and a linear congruential
generator expanded to bits (what the cryptanalysis chapter breaks).  The
module also computes exact distributions of k-bit windows of a stream under
a uniformly random seed, and the statistical bias of such distributions.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import CapacityError, ConfigError, KeyExhaustedError

__all__ = [
    "BitBlock",
    "LcgParams",
    "BitGenerator",
    "LcgGenerator",
    "FairGenerator",
    "FixedGenerator",
    "BlockDistribution",
    "lcg_step",
    "lcg_values",
    "lcg_bitstream",
    "fair_bitstream",
    "derive_rng",
    "generator_from_config",
    "block_distribution",
    "bias",
    "uniform_distribution",
    "point_mass_distribution",
    "distribution_with_bias",
]

# Enumerations larger than this raise CapacityError rather than grind.
ENUMERATION_LIMIT = 1 << 20


@dataclass(frozen=True)
class BitBlock:
    """An immutable, ordered block of bits (leftmost bit is most significant).

    Thin value type used everywhere a bit string crosses a module boundary:
    keys, tags, messages, basis selections.
    """

    bits: tuple

    def __post_init__(self):
        normalized = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in normalized):
            raise ValueError("BitBlock entries must be 0 or 1")
        object.__setattr__(self, "bits", normalized)

    @classmethod
    def from_string(cls, text: str) -> "BitBlock":
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitBlock":
        """Big-endian expansion of ``value`` into exactly ``width`` bits."""
        if value < 0 or width < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(tuple((value >> (width - 1 - i)) & 1 for i in range(width)))

    @classmethod
    def zeros(cls, width: int) -> "BitBlock":
        return cls((0,) * width)

    def to_int(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def to01(self) -> str:
        return "".join(str(b) for b in self.bits)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.uint8)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitBlock(self.bits[idx])
        return self.bits[idx]

    def __xor__(self, other: "BitBlock") -> "BitBlock":
        if len(self) != len(other):
            raise ValueError("XOR requires equal lengths")
        return BitBlock(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __add__(self, other: "BitBlock") -> "BitBlock":
        return BitBlock(self.bits + other.bits)


@dataclass(frozen=True)
class LcgParams:
    """Parameters of the recurrence s_{i+1} = (a*s_i + b) mod A.

    Attributes:
        modulus: A, at least 2.
        multiplier: a, reduced mod A.
        increment: b, reduced mod A.
        state: s0, the initial (secret) state; s0 itself is never emitted.
    """

    modulus: int
    multiplier: int
    increment: int
    state: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        for name in ("multiplier", "increment", "state"):
            v = getattr(self, name)
            if not 0 <= v < self.modulus:
                raise ValueError(f"{name} must lie in [0, modulus)")

    @property
    def word_bits(self) -> int:
        """Bits per emitted value: ceil(log2(modulus))."""
        return (self.modulus - 1).bit_length()

    @property
    def seed_bits(self) -> int:
        """Total secret size if all four parameters are secret."""
        return 4 * self.word_bits


def lcg_step(state: int, params: LcgParams) -> int:
    """One application of the congruential map to ``state``."""
    if not 0 <= state < params.modulus:
        raise ValueError("state out of range")
    return (params.multiplier * state + params.increment) % params.modulus


def lcg_values(params: LcgParams, count: int) -> list:
    """The first ``count`` outputs s_1, ..., s_count (s0 excluded)."""
    if count < 0:
        raise ValueError("count must be >= 0")
    out = []
    s = params.state
    for _ in range(count):
        s = lcg_step(s, params)
        out.append(s)
    return out


def lcg_bitstream(params: LcgParams, count: int) -> BitBlock:
    """Big-endian bit expansion of the first ``count`` outputs.

    Each value occupies exactly ``params.word_bits`` bits, so the result has
    count * word_bits bits.  The initial state s0 is not part of the stream.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    w = params.word_bits
    bits = []
    for v in lcg_values(params, count):
        bits.extend((v >> (w - 1 - i)) & 1 for i in range(w))
    return BitBlock(tuple(bits))


def _component_key(component: str) -> int:
    # Stable 64-bit index derived from the component name; keeps every
    # consumer of the master seed on its own substream.
    digest = hashlib.sha256(component.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(master_seed: int, component: str) -> np.random.Generator:
    """Per-component random generator derived from one master seed.

    Args:
        master_seed: the experiment-wide seed.
        component: name of the consumer; hashed into the stream index so
            distinct components get statistically independent streams.

    Returns:
        A numpy Generator backed by the Philox counter-mode generator.
    """
    seq = np.random.SeedSequence(entropy=master_seed,
                                 spawn_key=(_component_key(component),))
    return np.random.Generator(np.random.Philox(seq))


def fair_bitstream(master_seed: int, count: int) -> BitBlock:
    """``count`` fair bits from the keyed counter-mode source."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = derive_rng(master_seed, "fair-bitstream")
    return BitBlock(tuple(int(b) for b in rng.integers(0, 2, size=count)))


class BitGenerator:
    """Common interface of the key-stream generators.

    A generator is a pure function of its configuration: ``bits(count)``
    always returns the same prefix for the same instance, so two parties
    holding the same configuration read identical streams.
    """

    kind = "abstract"

    def bits(self, count: int) -> BitBlock:
        raise NotImplementedError

    def bit_at(self, index: int) -> int:
        if index < 0:
            raise ValueError("index must be >= 0")
        return self.bits(index + 1)[index]

    def config(self) -> dict:
        raise NotImplementedError


class LcgGenerator(BitGenerator):
    kind = "lcg"

    def __init__(self, params: LcgParams):
        self.params = params

    def bits(self, count: int) -> BitBlock:
        if count < 0:
            raise ValueError("count must be >= 0")
        if count == 0:
            return BitBlock(())
        values = math.ceil(count / self.params.word_bits)
        return lcg_bitstream(self.params, values)[:count]

    def config(self) -> dict:
        p = self.params
        return {"kind": "lcg", "A": p.modulus, "a": p.multiplier,
                "b": p.increment, "s0": p.state}


class FairGenerator(BitGenerator):
    kind = "fair"

    def __init__(self, seed: int):
        self.seed = int(seed)

    def bits(self, count: int) -> BitBlock:
        if count < 0:
            raise ValueError("count must be >= 0")
        if count == 0:
            return BitBlock(())
        return fair_bitstream(self.seed, count)

    def config(self) -> dict:
        return {"kind": "fair", "seed": self.seed}


class FixedGenerator(BitGenerator):
    """Replays a fixed bit string; raises when read past its end.

    Not a random source at all -- exists so tests and exhaustive sweeps can
    drive the protocols over every possible key stream.
    """

    kind = "fixed"

    def __init__(self, block: BitBlock):
        self.block = block if isinstance(block, BitBlock) else BitBlock(tuple(block))

    def bits(self, count: int) -> BitBlock:
        if count < 0:
            raise ValueError("count must be >= 0")
        if count > len(self.block):
            raise KeyExhaustedError(
                f"fixed stream holds {len(self.block)} bits, {count} requested")
        return self.block[:count]

    def config(self) -> dict:
        return {"kind": "fixed", "bits": self.block.to01()}


def generator_from_config(cfg: Mapping) -> BitGenerator:
    """Builds a generator from its JSON description.

    Recognized forms:
        {"kind": "lcg", "A": ..., "a": ..., "b": ..., "s0": ...}
        {"kind": "fair", "seed": ...}
        {"kind": "fixed", "bits": "0101..."}
    """
    if not isinstance(cfg, Mapping):
        raise ConfigError("generator description must be a mapping")
    kind = cfg.get("kind")
    try:
        if kind == "lcg":
            return LcgGenerator(LcgParams(int(cfg["A"]), int(cfg["a"]),
                                          int(cfg["b"]), int(cfg["s0"])))
        if kind == "fair":
            return FairGenerator(int(cfg["seed"]))
        if kind == "fixed":
            return FixedGenerator(BitBlock.from_string(str(cfg["bits"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator description: {exc}") from exc
    raise ConfigError(f"unknown generator kind {kind!r}")


@dataclass(frozen=True, eq=False)
class BlockDistribution:
    """Probability vector over the 2^k values of a k-bit block.

    Index j corresponds to the block whose big-endian integer value is j.
    """

    k: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (1 << self.k,):
            raise ValueError(f"expected {1 << self.k} probabilities, got {p.shape}")
        if np.any(p < -1e-15):
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    def __getitem__(self, j: int) -> float:
        return float(self.probabilities[j])


def uniform_distribution(k: int) -> BlockDistribution:
    n = 1 << k
    return BlockDistribution(k, np.full(n, 1.0 / n))


def point_mass_distribution(k: int, j: int) -> BlockDistribution:
    p = np.zeros(1 << k)
    p[j] = 1.0
    return BlockDistribution(k, p)


def distribution_with_bias(k: int, target: float) -> BlockDistribution:
    """Deterministic distribution whose bias is exactly ``target``.

    Mass ``target`` is moved from the lexicographically last outcomes onto
    the first outcome, draining the tail outcome by outcome; any bias in
    [0, 1 - 2^-k] is reachable exactly.
    """
    n = 1 << k
    if not 0.0 <= target <= 1.0 - 1.0 / n + 1e-15:
        raise ValueError(f"bias {target} not achievable for k={k}")
    p = np.full(n, 1.0 / n)
    p[0] += target
    remaining = target
    for j in range(n - 1, 0, -1):
        take = min(remaining, p[j])
        p[j] -= take
        remaining -= take
        if remaining <= 0:
            break
    return BlockDistribution(k, p)


def _window_of_stream(bits: BitBlock, start: int, k: int) -> int:
    return bits[start:start + k].to_int()


def block_distribution(gen_config: Mapping, k: int, start_index: int = 0, *,
                       enumerate_mode: str = "state-only",
                       capacity: int = ENUMERATION_LIMIT) -> BlockDistribution:
    """Exact law of the k-bit window at ``start_index`` under a random seed.

    For the fair source the law is uniform for every window, by definition.
    For an LCG the seed space is enumerated exhaustively with a uniform
    prior: just the initial state (``state-only``, default), or all
    (s0, a, b) triples with the modulus fixed (``full-seed``).

    Args:
        gen_config: generator description as for generator_from_config; the
            seed fields present in it are ignored for the enumerated axes.
        k: window width in bits, 1 <= k <= 16.
        start_index: first bit position of the window (0-based).
        enumerate_mode: "state-only" or "full-seed" (LCG only).
        capacity: maximum number of seeds enumerated before CapacityError.

    Returns:
        BlockDistribution over the 2^k window values.
    """
    if not 1 <= k <= 16:
        raise ValueError("k must lie in [1, 16]")
    if start_index < 0:
        raise ValueError("start_index must be >= 0")
    kind = gen_config.get("kind") if isinstance(gen_config, Mapping) else None
    if kind == "fair":
        return uniform_distribution(k)
    if kind == "fixed":
        gen = generator_from_config(gen_config)
        return point_mass_distribution(
            k, _window_of_stream(gen.bits(start_index + k), start_index, k))
    if kind != "lcg":
        raise ConfigError(f"unknown generator kind {kind!r}")

    try:
        modulus = int(gen_config["A"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator description: {exc}") from exc
    if modulus < 2:
        raise ConfigError("modulus must be >= 2")
    if enumerate_mode == "state-only":
        try:
            a = int(gen_config["a"])
            b = int(gen_config["b"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad generator description: {exc}") from exc
        seeds = ((s0, a, b) for s0 in range(modulus))
        n_seeds = modulus
    elif enumerate_mode == "full-seed":
        seeds = ((s0, a, b)
                 for s0 in range(modulus)
                 for a in range(modulus)
                 for b in range(modulus))
        n_seeds = modulus ** 3
    else:
        raise ConfigError(f"unknown enumerate_mode {enumerate_mode!r}")
    if n_seeds > capacity:
        raise CapacityError(
            f"{n_seeds} seeds exceed the enumeration capacity {capacity}")

    values_needed = math.ceil((start_index + k) /
                              (modulus - 1).bit_length())
    counts = np.zeros(1 << k, dtype=np.int64)
    for s0, a, b in seeds:
        params = LcgParams(modulus, a % modulus, b % modulus, s0)
        stream = lcg_bitstream(params, values_needed)
        counts[_window_of_stream(stream, start_index, k)] += 1
    return BlockDistribution(k, counts / n_seeds)


def bias(p: Union[BlockDistribution, Sequence, np.ndarray]) -> float:
    """Statistical distance of ``p`` from the uniform distribution.

    B(p) = (1/2) * sum_j |p_j - 2^-k|; zero iff p is uniform, and at most
    1 - 2^-k (point mass).
    """
    vec = p.probabilities if isinstance(p, BlockDistribution) else np.asarray(p, dtype=float)
    n = vec.shape[0]
    if n == 0 or n & (n - 1):
        raise ValueError("distribution length must be a power of two")
    return float(0.5 * np.abs(vec - 1.0 / n).sum())
