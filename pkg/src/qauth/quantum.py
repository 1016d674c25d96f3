"""Conjugate-coding states, block densities, measurements, and entropy.

A tag bit t is transported as one qubit prepared in one of two conjugate
bases, selected by a key bit x:

    (x=0, t=0) -> |0>      (x=0, t=1) -> |1>        computational basis
    (x=1, t=0) -> |+>      (x=1, t=1) -> |->        diagonal basis

For bounds work the module builds the density operator an eavesdropper sees
when the data bit is public but the basis bits are drawn from a distribution
p, together with spectra, von Neumann entropy, trace distance, and POVM
statistics.  Eigenvalues come from the in-repo cyclic Jacobi solver.

Convention: in a multi-qubit register the leftmost bit of a block labels the
most significant tensor factor, so block 10 encoded in bases 11 is |-+>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .bitsource import BitBlock, BlockDistribution, uniform_distribution
from .errors import CapacityError, InvariantError
from .linalg import hermitian_eigenvalues

__all__ = [
    "PureState",
    "DensityMatrix",
    "Spectrum",
    "Povm",
    "BREIDBART_ANGLE",
    "KET0",
    "KET1",
    "KET_PLUS",
    "KET_MINUS",
    "encode_qubit",
    "encode_block",
    "density_for_message",
    "density_for_block",
    "spectrum",
    "von_neumann_entropy",
    "trace_distance",
    "breidbart_measurement",
    "computational_measurement",
    "povm_tensor",
    "povm_power",
    "apply_povm",
    "measure_in_bases",
    "measure_qubit",
    "tensor_product",
    "random_density",
    "random_povm",
]

MAX_QUBITS = 10
BREIDBART_ANGLE = -math.pi / 8

_SQRT_HALF = 1.0 / math.sqrt(2.0)
KET0 = np.array([1.0, 0.0], dtype=np.complex128)
KET1 = np.array([0.0, 1.0], dtype=np.complex128)
KET_PLUS = np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128)
KET_MINUS = np.array([_SQRT_HALF, -_SQRT_HALF], dtype=np.complex128)

_HADAMARD = np.array([[_SQRT_HALF, _SQRT_HALF],
                      [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector of one or more qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.shape[0]
        if n == 0 or n & (n - 1):
            raise ValueError("amplitude count must be a power of two")
        if abs(float(np.vdot(amps, amps).real) - 1.0) > 1e-10:
            raise ValueError("state is not normalized")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace operator; positivity is enforced at spectrum time."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        n = m.shape[0]
        if n == 0 or n & (n - 1):
            raise ValueError("dimension must be a power of two")
        if float(np.abs(m - m.conj().T).max()) > 1e-10:
            raise InvariantError("density matrix is not Hermitian")
        if abs(float(np.trace(m).real) - 1.0) > 1e-10:
            raise InvariantError("density matrix trace differs from 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues in descending order."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.eigenvalues, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "eigenvalues", v)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operator-valued measure: effects summing to the identity."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=np.complex128) for e in self.effects)
        if not effects:
            raise ValueError("a POVM needs at least one effect")
        dim = effects[0].shape[0]
        total = np.zeros((dim, dim), dtype=np.complex128)
        for e in effects:
            if e.shape != (dim, dim):
                raise ValueError("effects must share one square dimension")
            if float(np.abs(e - e.conj().T).max()) > 1e-10:
                raise InvariantError("POVM effect is not Hermitian")
            if hermitian_eigenvalues(e)[-1] < -1e-10:
                raise InvariantError("POVM effect is not positive semidefinite")
            total += e
        if float(np.abs(total - np.eye(dim)).max()) > 1e-10:
            raise InvariantError("POVM effects do not sum to the identity")
        for e in effects:
            e.flags.writeable = False
        object.__setattr__(self, "effects", effects)

    @property
    def dimension(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


_ENCODE_TABLE = {(0, 0): PureState(KET0), (0, 1): PureState(KET1),
                 (1, 0): PureState(KET_PLUS), (1, 1): PureState(KET_MINUS)}


def encode_qubit(x: int, t: int) -> PureState:
    """Qubit carrying data bit ``t`` in basis ``x`` (0: computational, 1: diagonal)."""
    try:
        return _ENCODE_TABLE[(x, t)]
    except (KeyError, TypeError):
        raise ValueError("x and t must be bits") from None


def encode_block(x_block: BitBlock, t_block: BitBlock) -> PureState:
    """Tensor product of per-qubit encodings, first bit leftmost."""
    if len(x_block) != len(t_block):
        raise ValueError("basis and data blocks must have equal length")
    k = len(x_block)
    if k == 0:
        raise ValueError("cannot encode an empty block")
    if k > MAX_QUBITS:
        raise CapacityError(f"{k} qubits exceed the {MAX_QUBITS}-qubit capacity")
    amps = np.array([1.0], dtype=np.complex128)
    for x, t in zip(x_block, t_block):
        amps = np.kron(amps, encode_qubit(x, t).amplitudes)
    return PureState(amps)


def density_for_message(y: int, p: Union[BlockDistribution, Sequence]) -> DensityMatrix:
    """Mixture over the basis bit for one public data bit ``y``.

    rho(y) = p_0 |phi_0(y)><phi_0(y)| + p_1 |phi_1(y)><phi_1(y)| where
    phi_x(y) encodes y in basis x.
    """
    weights = p.probabilities if isinstance(p, BlockDistribution) else np.asarray(p, float)
    if weights.shape != (2,):
        raise ValueError("expected a distribution over one basis bit")
    if np.any(weights < -1e-15) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must form a probability distribution")
    if y not in (0, 1):
        raise ValueError("y must be a bit")
    rho = sum(w * encode_qubit(x, y).projector().matrix
              for x, w in enumerate(weights))
    return DensityMatrix(rho)


def density_for_block(y_block: BitBlock, p: Optional[BlockDistribution] = None) -> DensityMatrix:
    """Eavesdropper's density operator for a public block under basis law ``p``.

    rho = sum_j p_j |phi_j><phi_j| with |phi_j> the block encoding whose
    basis bits spell j big-endian; ``p`` defaults to the uniform law (the
    fair-key case, a tensor power of the single-qubit density).
    """
    k = len(y_block)
    if k == 0:
        raise ValueError("block must hold at least one bit")
    if k > MAX_QUBITS:
        raise CapacityError(f"{k} qubits exceed the {MAX_QUBITS}-qubit capacity")
    if p is None:
        p = uniform_distribution(k)
    if p.k != k:
        raise ValueError("distribution width does not match the block")
    # state matrix: row j holds the amplitudes of phi_j
    states = np.array([1.0], dtype=np.complex128).reshape(1, 1)
    for y in y_block:
        q = np.stack([encode_qubit(0, y).amplitudes,
                      encode_qubit(1, y).amplitudes])
        states = (states[:, None, :, None] * q[None, :, None, :]).reshape(
            states.shape[0] * 2, states.shape[1] * 2)
    rho = (states * p.probabilities[:, None]).T @ states.conj()
    return DensityMatrix(rho)


def spectrum(rho: DensityMatrix) -> Spectrum:
    """Descending eigenvalues; validates the unit-trace invariant."""
    vals = hermitian_eigenvalues(rho.matrix)
    if abs(float(vals.sum()) - 1.0) > 1e-9:
        raise InvariantError("spectrum of a density matrix must sum to 1")
    return Spectrum(vals)


def _clip_spectrum(vals: np.ndarray) -> np.ndarray:
    if vals[-1] < -1e-10:
        raise InvariantError(f"eigenvalue {vals[-1]} below the -1e-10 floor")
    return np.clip(vals, 0.0, None)


def von_neumann_entropy(rho: DensityMatrix, units: str = "bits") -> float:
    """S(rho) = -sum lambda log lambda over the spectrum.

    Eigenvalues in [-1e-10, 0) are treated as exact zeros; anything more
    negative raises.  ``units`` selects the logarithm base: "bits" (log2)
    or "nats" (ln).
    """
    lam = _clip_spectrum(spectrum(rho).eigenvalues)
    lam = lam[lam > 0.0]
    s_nats = float(-(lam * np.log(lam)).sum())
    if units == "nats":
        return s_nats
    if units == "bits":
        return s_nats / math.log(2.0)
    raise ValueError("units must be 'bits' or 'nats'")


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """D(rho, sigma) = (1/2) tr |rho - sigma|."""
    if rho.dimension != sigma.dimension:
        raise ValueError("dimension mismatch")
    diff = rho.matrix - sigma.matrix
    vals = hermitian_eigenvalues(diff)
    return float(0.5 * np.abs(vals).sum())


def breidbart_measurement(theta: float = BREIDBART_ANGLE) -> Povm:
    """Two-outcome projective measurement along the angle-theta axis.

    Outcome 0 projects on cos(theta)|0> + sin(theta)|1>, outcome 1 on its
    orthogonal complement.  The default angle -pi/8 is the intermediate
    basis an eavesdropper uses against conjugate coding.
    """
    psi = np.array([math.cos(theta), math.sin(theta)], dtype=np.complex128)
    perp = np.array([math.sin(theta), -math.cos(theta)], dtype=np.complex128)
    return Povm((np.outer(psi, psi.conj()), np.outer(perp, perp.conj())))


def computational_measurement() -> Povm:
    return Povm((np.outer(KET0, KET0.conj()), np.outer(KET1, KET1.conj())))


def povm_tensor(a: Povm, b: Povm) -> Povm:
    """Joint measurement measuring ``a`` on the left factor and ``b`` on the right.

    Outcome index is a.outcome * b.n_outcomes + b.outcome, so for bit-valued
    parts the joint index spells the outcome bits big-endian.
    """
    effects = tuple(np.kron(ea, eb) for ea in a.effects for eb in b.effects)
    return Povm(effects)


def povm_power(p: Povm, k: int) -> Povm:
    if k < 1:
        raise ValueError("k must be >= 1")
    out = p
    for _ in range(k - 1):
        out = povm_tensor(out, p)
    return out


def apply_povm(rho: DensityMatrix, povm: Povm) -> np.ndarray:
    """Outcome probabilities tr(E_m rho); sums to 1 within 1e-10."""
    if povm.dimension != rho.dimension:
        raise ValueError("POVM dimension does not match the state")
    probs = np.array([float(np.trace(e @ rho.matrix).real) for e in povm.effects])
    if abs(probs.sum() - 1.0) > 1e-10:
        raise InvariantError("POVM probabilities do not sum to 1")
    return np.clip(probs, 0.0, None)


def measure_qubit(state: PureState, basis: int, rng: np.random.Generator) -> int:
    """Projective measurement of a single qubit in the chosen basis."""
    if state.num_qubits != 1:
        raise ValueError("measure_qubit expects a single qubit")
    if basis not in (0, 1):
        raise ValueError("basis must be a bit")
    amps = state.amplitudes if basis == 0 else _HADAMARD @ state.amplitudes
    p0 = float(np.abs(amps[0]) ** 2)
    return 0 if rng.random() < p0 else 1


def measure_in_bases(state: PureState, basis_bits: BitBlock,
                     rng: np.random.Generator) -> BitBlock:
    """Qubit-by-qubit projective measurement of a register.

    Measuring in the bases the block was encoded with reproduces the data
    bits with certainty.
    """
    k = state.num_qubits
    if len(basis_bits) != k:
        raise ValueError("basis block length must equal the qubit count")
    amps = state.amplitudes.reshape((2,) * k)
    for axis, b in enumerate(basis_bits):
        if b:
            amps = np.moveaxis(np.tensordot(_HADAMARD, amps, axes=([1], [axis])),
                               0, axis)
    probs = np.abs(amps.reshape(-1)) ** 2
    probs = probs / probs.sum()
    outcome = int(rng.choice(probs.shape[0], p=probs))
    return BitBlock.from_int(outcome, k)


def tensor_product(a: Union[DensityMatrix, PureState],
                   b: Union[DensityMatrix, PureState]):
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes))
    ma = a.matrix if isinstance(a, DensityMatrix) else a.projector().matrix
    mb = b.matrix if isinstance(b, DensityMatrix) else b.projector().matrix
    return DensityMatrix(np.kron(ma, mb))


def random_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """Ginibre-induced random density matrix (test/demo utility)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_povm(rng: np.random.Generator, dim: int, n_outcomes: int) -> Povm:
    """Random POVM with ``n_outcomes`` effects (test/demo utility)."""
    if n_outcomes < 2:
        raise ValueError("need at least two outcomes")
    gs = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
          for _ in range(n_outcomes)]
    parts = [g @ g.conj().T for g in gs]
    total = sum(parts)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    effects = tuple(inv_sqrt @ part @ inv_sqrt for part in parts)
    # symmetrize away the last floating-point crumbs
    effects = tuple((e + e.conj().T) / 2 for e in effects)
    return Povm(effects)
