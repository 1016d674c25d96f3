"""Information-theoretic bounds tying key leakage to stream bias.

Quantities fall in three groups:

* exact entropy accounting over finite joint laws (JointTable): Shannon
  entropy, conditional entropy, mutual information, and the two scheme
  identities -- the one-time-pad equivalence of the XOR variant and the
  tag-equivocation identity H(T|Y,Z) = I(T;X|Y,Z);
* spectral quantities of the eavesdropper's density operators: the Holevo
  ceiling I(X;Z|Y) <= S(rho), the equivocation floor H(X) - S(rho), the
  trace-distance/bias comparison, and the entropy-difference bound
  |dS| <= 2 ln2 (k-1) eps + 2 eps ln(1/eps) (nats) for stream bias <= eps;
* closed-form consequences: the Fannes continuity bound and the maximal
  block lengths k(eps, delta) under which a target entropy gap survives.

Everything is exact enumeration or closed form; nothing here is sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .bitsource import BitBlock, BlockDistribution, bias, uniform_distribution
from .errors import CapacityError
from .hashing import HashFamilyShape, hash_from_key_bits
from .quantum import (Povm, breidbart_measurement, density_for_block,
                      encode_qubit, von_neumann_entropy, trace_distance)

__all__ = [
    "LN2",
    "BoundReport",
    "JointTable",
    "shannon_entropy",
    "binary_entropy",
    "conditional_entropy",
    "mutual_information",
    "conjugate_coding_entropy",
    "holevo_floor",
    "verify_holevo_against_povm",
    "breidbart_information",
    "proposition2_check",
    "fannes_bound",
    "theorem2_bound",
    "theorem2_check",
    "max_block_length",
    "max_block_length_simple",
    "asymptotic_gap_sweep",
    "sample_biased_distribution",
    "xor_scheme_joint",
    "wegman_carter_joint",
    "wegman_carter_equivalence",
    "quantum_tag_joint",
    "tag_equivocation_identity",
]

LN2 = math.log(2.0)

# Exact enumerations beyond this many joint atoms are refused.
ATOM_LIMIT = 1 << 22


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound or identity check.

    Attributes:
        name: what was checked.
        value: the computed quantity.
        bound: the value it is compared against.
        units: "bits", "nats", or "" for unitless quantities.
        satisfied: whether the comparison held within tolerance.
        slack: bound - value (upper bounds) or target deviation (identities).
    """

    name: str
    value: float
    bound: float
    units: str
    satisfied: bool
    slack: float

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "bound": self.bound,
                "units": self.units, "satisfied": self.satisfied,
                "slack": self.slack}


def _upper_bound_report(name, value, bound, units, tol=1e-9) -> BoundReport:
    return BoundReport(name=name, value=float(value), bound=float(bound),
                       units=units, satisfied=bool(value <= bound + tol),
                       slack=float(bound - value))


def _equality_report(name, value, target, units, tol) -> BoundReport:
    return BoundReport(name=name, value=float(value), bound=float(target),
                       units=units, satisfied=bool(abs(value - target) <= tol),
                       slack=float(target - value))


def shannon_entropy(p: Union[Sequence, np.ndarray, BlockDistribution]) -> float:
    """H(p) in bits, with 0 log 0 = 0."""
    vec = p.probabilities if isinstance(p, BlockDistribution) else np.asarray(p, float)
    if np.any(vec < -1e-12):
        raise ValueError("negative probability")
    if abs(float(vec.sum()) - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    vec = vec[vec > 0.0]
    return float(-(vec * np.log2(vec)).sum())


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must lie in [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


@dataclass(frozen=True, eq=False)
class JointTable:
    """Exact joint probability law over named finite variables.

    ``probs`` has one axis per name; all entropy queries reduce to sums over
    this tensor, so every information identity is checked on the same atoms.
    """

    names: tuple
    probs: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        p = np.asarray(self.probs, dtype=float)
        if len(names) != p.ndim:
            raise ValueError("one axis per variable name required")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if np.any(p < -1e-15):
            raise ValueError("negative probability atom")
        if abs(float(p.sum()) - 1.0) > 1e-10:
            raise ValueError("joint law must sum to 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "probs", p)

    def _axes(self, names) -> tuple:
        names = (names,) if isinstance(names, str) else tuple(names)
        missing = [n for n in names if n not in self.names]
        if missing:
            raise ValueError(f"unknown variables {missing}")
        return names

    def marginal(self, names) -> np.ndarray:
        keep = self._axes(names)
        drop = tuple(i for i, n in enumerate(self.names) if n not in keep)
        out = self.probs.sum(axis=drop) if drop else self.probs
        # order axes as requested
        order = [tuple(n for n in self.names if n in keep).index(n) for n in keep]
        return np.transpose(out, order)

    def entropy(self, names) -> float:
        """Joint entropy H(names) in bits."""
        p = self.marginal(names).reshape(-1)
        p = p[p > 0.0]
        return float(-(p * np.log2(p)).sum())

    def conditional_entropy(self, targets, givens=()) -> float:
        targets = self._axes(targets)
        givens = self._axes(givens) if givens else ()
        joint = self.entropy(targets + tuple(g for g in givens if g not in targets))
        return joint - (self.entropy(givens) if givens else 0.0)

    def mutual_information(self, a, b, givens=()) -> float:
        a, b = self._axes(a), self._axes(b)
        if set(a) & set(b):
            raise ValueError("mutual information needs disjoint variable sets")
        return (self.conditional_entropy(a, givens)
                - self.conditional_entropy(a, tuple(b) + tuple(self._axes(givens) if givens else ())))


def conditional_entropy(joint: JointTable, targets, givens=()) -> float:
    return joint.conditional_entropy(targets, givens)


def mutual_information(joint: JointTable, a, b, givens=()) -> float:
    return joint.mutual_information(a, b, givens)


# ---------------------------------------------------------------------------
# spectral bounds


def conjugate_coding_entropy() -> float:
    """Closed form of the single-qubit mixture entropy S* in bits.

    S* = -2 cos^2(pi/8) log2 cos(pi/8) - 2 sin^2(pi/8) log2 sin(pi/8),
    equivalently H2(cos^2(pi/8)) ~ 0.6009.
    """
    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    return (-2 * c * c * math.log2(c)) + (-2 * s * s * math.log2(s))


def holevo_floor(p: BlockDistribution, y_block: BitBlock) -> BoundReport:
    """Equivocation floor H(X^k) - S(rho_{Y^k}) left to an eavesdropper.

    The Holevo ceiling I(X;Z|Y) <= S(rho) turns the spectral entropy into a
    floor on what remains unknown about the key block.  The value always
    lies in [0 - tol, H(X^k)]; the report's bound field carries H(X^k).
    """
    if p.k != len(y_block):
        raise ValueError("distribution width must match the block")
    h_x = shannon_entropy(p)
    s_rho = von_neumann_entropy(density_for_block(y_block, p))
    value = h_x - s_rho
    report = _upper_bound_report("holevo-equivocation-floor", value, h_x, "bits")
    # the floor can reach 0 but never fall meaningfully below it
    if value < -1e-9:
        report = BoundReport(report.name, report.value, report.bound,
                             report.units, False, report.slack)
    return report


def verify_holevo_against_povm(p: BlockDistribution, y_block: BitBlock,
                               povm: Povm) -> BoundReport:
    """Checks I(X^k; Z | Y^k = y) <= S(rho_{Y^k}) for a concrete measurement.

    Builds the exact joint law of the key block X^k (law p) and the POVM
    outcome Z on the corresponding encoding of ``y_block``, computes the
    accessible information of that measurement, and compares it against the
    spectral ceiling.
    """
    k = len(y_block)
    if p.k != k:
        raise ValueError("distribution width must match the block")
    n = 1 << k
    if povm.dimension != n:
        raise ValueError("POVM dimension must be 2^k")
    joint = np.zeros((n, povm.n_outcomes))
    for j in range(n):
        if p[j] == 0.0:
            continue
        x_block = BitBlock.from_int(j, k)
        state = _block_state(x_block, y_block)
        joint[j] = p[j] * _povm_on_state(state, povm)
    table = JointTable(("X", "Z"), joint)
    info = table.mutual_information("X", "Z")
    ceiling = von_neumann_entropy(density_for_block(y_block, p))
    return _upper_bound_report("holevo-ceiling", info, ceiling, "bits")


def _block_state(x_block: BitBlock, y_block: BitBlock) -> np.ndarray:
    amps = np.array([1.0], dtype=np.complex128)
    for x, y in zip(x_block, y_block):
        amps = np.kron(amps, encode_qubit(x, y).amplitudes)
    return amps


def _povm_on_state(amps: np.ndarray, povm: Povm) -> np.ndarray:
    probs = np.array([float((amps.conj() @ (e @ amps)).real) for e in povm.effects])
    return np.clip(probs, 0.0, None)


def breidbart_information(theta: float = -math.pi / 8) -> float:
    """Accessible information of the intermediate-basis measurement, in bits.

    For fair basis bits and one public data bit the measurement induces a
    binary symmetric channel with accuracy cos^2(pi/8); its mutual
    information 1 - H2(cos^2(pi/8)) ~ 0.3991 bits sits strictly below the
    spectral ceiling S* ~ 0.6009 (both are reported side by side upstream;
    no attempt is made to reconcile them).
    """
    povm = breidbart_measurement(theta)
    p = uniform_distribution(1)
    joint = np.zeros((2, 2))
    for x in (0, 1):
        joint[x] = 0.5 * _povm_on_state(encode_qubit(x, 0).amplitudes, povm)
    return JointTable(("X", "Z"), joint).mutual_information("X", "Z")


def proposition2_check(p: BlockDistribution, y_block: BitBlock) -> BoundReport:
    """Trace distance between the biased and fair mixtures vs stream bias.

    D(rho_{Y^k}, sigma_{Y^k}) <= B(p), with equality at the uniform law
    (both sides zero).
    """
    if p.k != len(y_block):
        raise ValueError("distribution width must match the block")
    rho = density_for_block(y_block, p)
    sigma = density_for_block(y_block, None)
    return _upper_bound_report("trace-distance-vs-bias",
                               trace_distance(rho, sigma), bias(p), "")


def fannes_bound(distance: float, dimension: int) -> float:
    """Fannes continuity bound 2 D ln(N / 2D) in nats, for 0 < D <= 1/(2e)."""
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    if distance == 0.0:
        return 0.0
    if not 0.0 < distance <= 1.0 / (2.0 * math.e):
        raise ValueError("distance must lie in (0, 1/(2e)]")
    return float(2.0 * distance * math.log(dimension / (2.0 * distance)))


def theorem2_bound(eps: float, k: int) -> float:
    """Entropy-difference ceiling 2 ln2 (k-1) eps + 2 eps ln(1/eps), nats.

    Valid for 0 < eps <= 1/e; the stream bias must not exceed eps.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < eps <= 1.0 / math.e:
        raise ValueError("eps must lie in (0, 1/e]")
    return float(2.0 * LN2 * (k - 1) * eps + 2.0 * eps * math.log(1.0 / eps))


def theorem2_check(p: BlockDistribution, y_block: BitBlock, eps: float) -> BoundReport:
    """|S(rho) - S(sigma)| in nats against theorem2_bound(eps, k)."""
    if bias(p) > eps + 1e-12:
        raise ValueError("stream bias exceeds eps; the bound does not apply")
    k = len(y_block)
    rho = density_for_block(y_block, p)
    sigma = density_for_block(y_block, None)
    gap = abs(von_neumann_entropy(rho, "nats") - von_neumann_entropy(sigma, "nats"))
    return _upper_bound_report("entropy-gap-vs-bias", gap,
                               theorem2_bound(eps, k), "nats")


def max_block_length(eps: float, delta: float) -> float:
    """Largest block length keeping the entropy gap below delta at bias eps.

    k < 1 + delta/(2 ln2 eps) - ln(1/eps)/ln2.  May be negative when delta
    is small relative to eps (notably at delta = eps); the value is reported
    as computed.
    """
    if not 0.0 < eps <= 1.0 / math.e:
        raise ValueError("eps must lie in (0, 1/e]")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return float(1.0 + delta / (2.0 * LN2 * eps) - math.log(1.0 / eps) / LN2)


def max_block_length_simple(eps: float) -> float:
    """Simplified variant 1 + 1/(eps ln 4)."""
    if not 0.0 < eps <= 1.0 / math.e:
        raise ValueError("eps must lie in (0, 1/e]")
    return float(1.0 + 1.0 / (eps * math.log(4.0)))


def asymptotic_gap_sweep(f: Callable[[int, int], float],
                         g: Callable[[int], int],
                         n_values: Sequence[int]) -> list:
    """Entropy gap along a schedule of seed sizes n.

    For each n, the block length is k = g(n) and the stream bias target is
    eps = f(k, n); a distribution of exactly that bias is constructed, the
    gap |S(rho) - S(sigma)| (nats) is computed on the all-zero block, and
    the row records it next to theorem2_bound(eps, k).

    Returns:
        list of dicts with keys n, k, eps, gap_nats, bound_nats, satisfied.
    """
    from .bitsource import distribution_with_bias

    rows = []
    for n in n_values:
        k = int(g(n))
        if not 1 <= k <= 10:
            raise ValueError(f"schedule produced k={k} outside [1, 10]")
        eps = float(f(k, n))
        if not 0.0 < eps <= 1.0 / math.e:
            raise ValueError(f"schedule produced eps={eps} outside (0, 1/e]")
        p = distribution_with_bias(k, eps)
        y = BitBlock.zeros(k)
        gap = abs(von_neumann_entropy(density_for_block(y, p), "nats")
                  - von_neumann_entropy(density_for_block(y, None), "nats"))
        bound = theorem2_bound(eps, k)
        rows.append({"n": int(n), "k": k, "eps": eps, "gap_nats": gap,
                     "bound_nats": bound,
                     "satisfied": bool(gap <= bound + 1e-9)})
    return rows


def sample_biased_distribution(rng: np.random.Generator, k: int,
                               max_bias: float = 1.0 / math.e,
                               min_bias: float = 0.0) -> BlockDistribution:
    """Symmetric Dirichlet(1) sample, rejected until its bias lands in range."""
    n = 1 << k
    for _ in range(10000):
        p = rng.dirichlet(np.ones(n))
        b = bias(p)
        if min_bias <= b <= max_bias:
            return BlockDistribution(k, p)
    raise RuntimeError("bias band rejection did not terminate")


# ---------------------------------------------------------------------------
# exact scheme identities


def xor_scheme_joint(k: int) -> JointTable:
    """Joint law of (X, Y, Z) for the one-time-pad tag: Z = X xor Y, X fair."""
    if not 1 <= k <= 8:
        raise ValueError("k must lie in [1, 8]")
    n = 1 << k
    probs = np.zeros((n, n, n))
    for x in range(n):
        for y in range(n):
            probs[x, y, x ^ y] = 1.0 / (n * n)
    return JointTable(("X", "Y", "Z"), probs)


def wegman_carter_joint(m: int, k: int,
                        pad_point_mass: Optional[int] = None) -> JointTable:
    """Exact joint law of (T, X, Y, Z) for the padded-hash scheme.

    A hash is drawn uniformly from the Toeplitz-affine family, the message Y
    is uniform over m bits, the tag is T = h(Y), and the transmitted value
    is Z = T xor X with X the k-bit pad.  X is fair unless
    ``pad_point_mass`` pins it to one value (the broken-pad variant).
    """
    shape = HashFamilyShape(m, k)
    n_tag = 1 << k
    n_msg = 1 << m
    n_keys = shape.family_size
    atoms = n_keys * n_msg * (1 if pad_point_mass is not None else n_tag)
    if atoms > ATOM_LIMIT:
        raise CapacityError(f"{atoms} atoms exceed the {ATOM_LIMIT} limit")
    if pad_point_mass is not None and not 0 <= pad_point_mass < n_tag:
        raise ValueError("pad_point_mass out of range")
    probs = np.zeros((n_tag, n_tag, n_msg, n_tag))   # T, X, Y, Z
    pads = ((pad_point_mass,) if pad_point_mass is not None else range(n_tag))
    w = 1.0 / (n_keys * n_msg * len(pads))
    for key in range(n_keys):
        h = hash_from_key_bits(shape, BitBlock.from_int(key, shape.key_bits))
        for y in range(n_msg):
            t = h(BitBlock.from_int(y, m)).to_int()
            for x in pads:
                probs[t, x, y, t ^ x] += w
    return JointTable(("T", "X", "Y", "Z"), probs)


def wegman_carter_equivalence(m: int, k: int,
                              pad_point_mass: Optional[int] = None) -> BoundReport:
    """One-time-pad equivalence: H(T, X | Y, Z) = H(T | Y, Z) = k bits.

    With a uniform hash draw and a fair pad the transmitted value reveals
    nothing: the tag keeps its full k bits of equivocation, which is the
    information-theoretic security statement of the padded scheme.  The
    report is unsatisfied when the pad is degenerate.
    """
    joint = wegman_carter_joint(m, k, pad_point_mass)
    h_tx = joint.conditional_entropy(("T", "X"), ("Y", "Z"))
    h_t = joint.conditional_entropy("T", ("Y", "Z"))
    chain_ok = abs(h_tx - h_t) <= 1e-10
    report = _equality_report("one-time-pad-equivalence", h_t, float(k), "bits",
                              tol=1e-9)
    if not chain_ok:
        report = BoundReport(report.name, report.value, report.bound,
                             report.units, False, report.slack)
    return report


def quantum_tag_joint(m: int, k: int, povm: Povm,
                      basis_law: Optional[BlockDistribution] = None) -> JointTable:
    """Exact joint law of (T, X, Y, Z) for the single-key quantum scheme.

    The composite key X = (hash key, basis bits) selects a family member and
    the encoding bases; the tag T = h(Y) rides the qubits, and Z is the
    outcome of the given POVM on the transmitted register.  Everything is
    enumerated exactly, so information identities hold to float precision.
    """
    shape = HashFamilyShape(m, k)
    n_msg = 1 << m
    n_tag = 1 << k
    n_hash = shape.family_size
    n_basis = 1 << k
    if povm.dimension != n_tag:
        raise ValueError("POVM dimension must be 2^k")
    atoms = n_hash * n_basis * n_msg * povm.n_outcomes
    if atoms > ATOM_LIMIT:
        raise CapacityError(f"{atoms} atoms exceed the {ATOM_LIMIT} limit")
    if basis_law is None:
        basis_law = uniform_distribution(k)
    if basis_law.k != k:
        raise ValueError("basis law width must be k")
    probs = np.zeros((n_tag, n_hash * n_basis, n_msg, povm.n_outcomes))
    for key in range(n_hash):
        h = hash_from_key_bits(shape, BitBlock.from_int(key, shape.key_bits))
        tags = [h(BitBlock.from_int(y, m)) for y in range(n_msg)]
        for xb in range(n_basis):
            x_block = BitBlock.from_int(xb, k)
            w_basis = basis_law[xb]
            if w_basis == 0.0:
                continue
            x_index = key * n_basis + xb
            for y in range(n_msg):
                t = tags[y]
                state = _block_state(x_block, t)
                z_probs = _povm_on_state(state, povm)
                probs[t.to_int(), x_index, y, :] += (w_basis / (n_hash * n_msg)) * z_probs
    return JointTable(("T", "X", "Y", "Z"), probs)


def tag_equivocation_identity(joint: JointTable) -> Tuple[BoundReport, bool]:
    """Checks H(T|Y,Z) = I(T;X|Y,Z) on a joint law where T = f(X, Y).

    Returns the identity report and a flag that is True when the remaining
    tag equivocation equals the full H(T) -- the information-theoretic
    security condition (the adversary's view is independent of the tag).

    Raises:
        ValueError: if T is not determined by (X, Y) on this law.
    """
    for name in ("T", "X", "Y", "Z"):
        if name not in joint.names:
            raise ValueError(f"joint law must contain variable {name}")
    if joint.conditional_entropy("T", ("X", "Y")) > 1e-10:
        raise ValueError("tag must be a function of key and message")
    h_t_yz = joint.conditional_entropy("T", ("Y", "Z"))
    i_tx_yz = joint.mutual_information("T", "X", ("Y", "Z"))
    report = _equality_report("tag-equivocation-identity", h_t_yz, i_tx_yz,
                              "bits", tol=1e-10)
    secure = bool(abs(h_t_yz - joint.entropy("T")) <= 1e-9)
    return report, secure
