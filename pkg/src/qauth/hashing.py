"""Almost-strongly-universal hashing over GF(2).

The tag family is Toeplitz-affine: a member is a k x m Toeplitz matrix (its
m+k-1 diagonals drawn as bits) plus a k-bit offset, mapping an m-bit message
to a k-bit tag.  The family has exactly 2^(m+2k-1) members and is strongly
universal-2, hence epsilon-almost strongly universal-2 with epsilon = 2^-k:

  condition 1: for every (message, tag), exactly |family|/2^k members map
               the message to the tag;
  condition 2: for every pair of distinct messages and every tag pair, the
               fraction of condition-1 survivors hitting the second pair is
               at most epsilon (here: exactly 2^-k).

Both conditions are verified by explicit enumeration, not by algebra, so the
verifiers double as independent checks of the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitsource import BitBlock
from .errors import CapacityError

__all__ = [
    "HashFamilyShape",
    "HashFunction",
    "hash_eval",
    "hash_from_key_bits",
    "hash_to_hex",
    "hash_from_hex",
    "random_hash",
    "toeplitz_matrix",
    "verify_condition1",
    "verify_condition2",
]

# Enumerating families beyond 2^24 members is out of scope for the verifiers.
KEY_BITS_LIMIT = 24


@dataclass(frozen=True)
class HashFamilyShape:
    """Message/tag geometry of the family.

    Attributes:
        message_bits: m, length of hashed messages.
        tag_bits: k, length of tags; 1 <= k <= m.
    """

    message_bits: int
    tag_bits: int

    def __post_init__(self):
        if not 1 <= self.tag_bits <= self.message_bits:
            raise ValueError("need message_bits >= tag_bits >= 1")

    @property
    def diagonal_bits(self) -> int:
        return self.message_bits + self.tag_bits - 1

    @property
    def key_bits(self) -> int:
        """Bits selecting one family member: diagonals plus offset."""
        return self.message_bits + 2 * self.tag_bits - 1

    @property
    def family_size(self) -> int:
        return 1 << self.key_bits


@dataclass(frozen=True)
class HashFunction:
    """One member of the family: Toeplitz diagonals and an affine offset."""

    shape: HashFamilyShape
    diagonals: BitBlock
    offset: BitBlock

    def __post_init__(self):
        if len(self.diagonals) != self.shape.diagonal_bits:
            raise ValueError("diagonals length must be message_bits+tag_bits-1")
        if len(self.offset) != self.shape.tag_bits:
            raise ValueError("offset length must be tag_bits")
        # Row r of the Toeplitz matrix, packed big-endian so it can be ANDed
        # against the integer form of a message.
        m = self.shape.message_bits
        masks = []
        for r in range(self.shape.tag_bits):
            row = 0
            for c in range(m):
                row = (row << 1) | self.diagonals[r - c + m - 1]
            masks.append(row)
        object.__setattr__(self, "_row_masks", tuple(masks))

    def __call__(self, message: BitBlock) -> BitBlock:
        return hash_eval(self, message)


def toeplitz_matrix(h: HashFunction) -> np.ndarray:
    """The k x m matrix with entry (r, c) = diagonals[r - c + m - 1]."""
    m = h.shape.message_bits
    k = h.shape.tag_bits
    return np.array([[h.diagonals[r - c + m - 1] for c in range(m)]
                     for r in range(k)], dtype=np.uint8)


def hash_eval(h: HashFunction, message: BitBlock) -> BitBlock:
    """Tag of ``message``: Toeplitz matrix-vector product plus offset, mod 2."""
    if len(message) != h.shape.message_bits:
        raise ValueError(
            f"message length {len(message)} != {h.shape.message_bits}")
    msg = message.to_int()
    bits = tuple(((mask & msg).bit_count() & 1) ^ off
                 for mask, off in zip(h._row_masks, h.offset))
    return BitBlock(bits)


def hash_from_key_bits(shape: HashFamilyShape, key_bits: BitBlock) -> HashFunction:
    """Member selected by a key block: diagonals first, then offset."""
    if len(key_bits) != shape.key_bits:
        raise ValueError(f"key must hold {shape.key_bits} bits")
    d = shape.diagonal_bits
    return HashFunction(shape, key_bits[:d], key_bits[d:])


def hash_to_hex(h: HashFunction) -> str:
    """Hex form of diagonals‖offset, ceil(key_bits/4) digits, value-preserving."""
    key = h.diagonals + h.offset
    digits = math.ceil(len(key) / 4)
    return format(key.to_int(), f"0{digits}x")


def hash_from_hex(shape: HashFamilyShape, text: str) -> HashFunction:
    digits = math.ceil(shape.key_bits / 4)
    if len(text) != digits:
        raise ValueError(f"expected {digits} hex digits")
    value = int(text, 16)
    if value >> shape.key_bits:
        raise ValueError("hex value out of range for this shape")
    return hash_from_key_bits(shape, BitBlock.from_int(value, shape.key_bits))


def random_hash(shape: HashFamilyShape, rng: np.random.Generator) -> HashFunction:
    bits = BitBlock(tuple(int(b) for b in rng.integers(0, 2, size=shape.key_bits)))
    return hash_from_key_bits(shape, bits)


def _check_enumerable(shape: HashFamilyShape):
    if shape.key_bits > KEY_BITS_LIMIT:
        raise CapacityError(
            f"family with {shape.key_bits} key bits exceeds the "
            f"{KEY_BITS_LIMIT}-bit enumeration limit")


def _linear_tags_all_messages(shape: HashFamilyShape, diag_value: int) -> np.ndarray:
    """Tags of every message under the linear (offset-free) member ``diag_value``.

    Walks the messages in Gray-code order so each step XORs a single matrix
    column into the running tag; returns an array indexed by message value.
    """
    m = shape.message_bits
    k = shape.tag_bits
    diag = BitBlock.from_int(diag_value, shape.diagonal_bits)
    # Column c packed as a k-bit integer, row 0 most significant.
    cols = []
    for c in range(m):
        v = 0
        for r in range(k):
            v = (v << 1) | diag[r - c + m - 1]
        cols.append(v)
    out = np.zeros(1 << m, dtype=np.int64)
    tag = 0
    gray_prev = 0
    for i in range(1, 1 << m):
        gray = i ^ (i >> 1)
        changed = gray ^ gray_prev
        # changed has one bit set; integer bit position p maps to column m-1-p
        tag ^= cols[m - changed.bit_length()]
        out[gray] = tag
        gray_prev = gray
    return out


def verify_condition1(shape: HashFamilyShape):
    """Enumerates the family and counts preimages of every (message, tag).

    Returns:
        (ok, counts) where counts[message, tag] is the number of members
        mapping message to tag, and ok says every count equals
        family_size / 2^k.
    """
    _check_enumerable(shape)
    m, k = shape.message_bits, shape.tag_bits
    counts = np.zeros((1 << m, 1 << k), dtype=np.int64)
    offsets = np.arange(1 << k, dtype=np.int64)
    messages = np.arange(1 << m, dtype=np.int64)
    for diag_value in range(1 << shape.diagonal_bits):
        linear = _linear_tags_all_messages(shape, diag_value)
        # every offset shifts the whole tag column
        np.add.at(counts, (messages[:, None], linear[:, None] ^ offsets[None, :]), 1)
    expected = shape.family_size >> k
    ok = bool(np.all(counts == expected))
    return ok, counts


def verify_condition2(shape: HashFamilyShape) -> float:
    """Measured epsilon: worst-case conditional collision fraction.

    For every ordered pair of distinct messages (y, y2) and every tag pair
    (t, t2), counts members with h(y)=t and h(y2)=t2, divides by the
    condition-1 count |family|/2^k, and returns the maximum.
    """
    _check_enumerable(shape)
    m, k = shape.message_bits, shape.tag_bits
    n_msg, n_tag = 1 << m, 1 << k
    pair_counts = np.zeros((n_msg, n_msg, n_tag, n_tag), dtype=np.int64)
    offsets = np.arange(n_tag, dtype=np.int64)
    for diag_value in range(1 << shape.diagonal_bits):
        linear = _linear_tags_all_messages(shape, diag_value)
        shifted = linear[:, None] ^ offsets[None, :]   # [message, offset] -> tag
        for y in range(n_msg):
            for y2 in range(n_msg):
                if y == y2:
                    continue
                np.add.at(pair_counts[y, y2], (shifted[y], shifted[y2]), 1)
    denom = shape.family_size >> k
    worst = 0
    for y in range(n_msg):
        for y2 in range(n_msg):
            if y != y2:
                worst = max(worst, int(pair_counts[y, y2].max()))
    return worst / denom
