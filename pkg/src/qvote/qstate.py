"""Small dense state-vector quantum mechanics.

Conventions used everywhere in qvote:

* qubit 0 is the most significant bit of an amplitude index (big-endian by
  list position), so ``tensor(a, b)`` places ``a``'s qubits first;
* randomness comes only from an explicit ``numpy.random.Generator``;
* registers hold at most :data:`MAX_QUBITS` qubits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qvote import kernels
from qvote.errors import CapacityError, QubitIndexError, ValidationError

MAX_QUBITS = 6
NORM_TOL = 1e-12
# Born weights below this are treated as exactly zero when sampling.
ZERO_PROB = 1e-13

SQRT1_2 = 1 / np.sqrt(2)


class StateVector:
    """Normalized pure state of 1..6 qubits."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, *, normalize: bool = False):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        size = amps.shape[0]
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise ValidationError(f"amplitude count {size} is not 2**n with n >= 1")
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit register limit")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm < NORM_TOL:
                raise ValidationError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm * norm - 1) > NORM_TOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm * norm!r})")
        amps.flags.writeable = False
        self.amplitudes = amps

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Computational basis state, e.g. ``StateVector.from_bits("01")``."""
        amps = np.zeros(1 << len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1
        return cls(amps)

    def inner(self, other: "StateVector") -> complex:
        """Return ``<self|other>``."""
        _same_size(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __neg__(self) -> "StateVector":
        return StateVector(-self.amplitudes)

    def __rmul__(self, phase) -> "StateVector":
        return StateVector(phase * self.amplitudes)

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amplitudes, precision=4)})"


ZERO = StateVector([1, 0])
ONE = StateVector([0, 1])
PLUS = StateVector([SQRT1_2, SQRT1_2])
MINUS = StateVector([SQRT1_2, -SQRT1_2])


def random_state(rng: np.random.Generator, num_qubits: int = 1) -> StateVector:
    """Haar-random pure state."""
    dim = 1 << num_qubits
    return StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim), normalize=True)


class BasisName(enum.Enum):
    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"
    BELL = "bell"
    GHZ = "ghz"


class MeasurementBasis:
    """Named orthonormal basis with one label per outcome."""

    def __init__(self, name: BasisName, vectors: Sequence[StateVector], labels: Sequence[str]):
        vectors = tuple(vectors)
        labels = tuple(labels)
        if not vectors:
            raise ValidationError("basis needs at least one vector")
        arity = vectors[0].num_qubits
        if len(vectors) != 1 << arity or len(labels) != len(vectors):
            raise ValidationError("basis must have 2**arity vectors and one label per vector")
        if len(set(labels)) != len(labels):
            raise ValidationError("basis labels must be distinct")
        if any(v.num_qubits != arity for v in vectors):
            raise ValidationError("basis vectors have mixed sizes")
        matrix = np.array([v.amplitudes for v in vectors])
        gram = matrix.conj() @ matrix.T
        if np.max(np.abs(gram - np.eye(len(vectors)))) >= NORM_TOL:
            raise ValidationError(f"{name.value} basis vectors are not orthonormal")
        self.name = name
        self.vectors = vectors
        self.labels = labels
        self.matrix = matrix
        self.matrix.flags.writeable = False

    @property
    def arity(self) -> int:
        return self.vectors[0].num_qubits

    def vector(self, label: str) -> StateVector:
        return self.vectors[self.labels.index(label)]

    @classmethod
    def computational(cls, arity: int = 1) -> "MeasurementBasis":
        bits = [format(i, f"0{arity}b") for i in range(1 << arity)]
        return cls(BasisName.COMPUTATIONAL, [StateVector.from_bits(b) for b in bits], bits)

    @classmethod
    def diagonal(cls) -> "MeasurementBasis":
        return cls(BasisName.DIAGONAL, [PLUS, MINUS], ["+", "-"])

    def __repr__(self) -> str:
        return f"MeasurementBasis({self.name.value}, {list(self.labels)})"


@dataclass(frozen=True)
class OutcomeRecord:
    """One measurement branch.

    ``post_state`` is the whole register after collapse (measured qubits in
    the outcome's basis vector). ``residual`` is the renormalized state of the
    unmeasured qubits, or ``None`` when every qubit was measured.
    """

    label: str
    probability: float
    post_state: StateVector | None
    residual: StateVector | None


def _same_size(a: StateVector, b: StateVector) -> None:
    if a.num_qubits != b.num_qubits:
        raise ValidationError(f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits")


def _check_targets(n: int, targets: Sequence[int]) -> list[int]:
    targets = [int(t) for t in targets]
    if not targets:
        raise ValidationError("at least one target qubit is required")
    if len(set(targets)) != len(targets):
        raise ValidationError(f"targets {targets} are not distinct")
    for t in targets:
        if not 0 <= t < n:
            raise QubitIndexError(f"qubit {t} out of range for a {n}-qubit register")
    return targets


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise CapacityError(
            f"{a.num_qubits} + {b.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )
    return StateVector(np.kron(a.amplitudes, b.amplitudes), normalize=True)


def is_unitary(u, tol: float = NORM_TOL) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and bool(
        np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) < tol
    )


def apply_unitary(state: StateVector, u, targets: Sequence[int]) -> StateVector:
    targets = _check_targets(state.num_qubits, targets)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (1 << len(targets),) * 2:
        raise ValidationError(f"a {u.shape} matrix cannot act on {len(targets)} qubit(s)")
    if not is_unitary(u):
        raise ValidationError("matrix is not unitary")
    out = kernels.apply_gate(state.amplitudes, state.num_qubits, u, targets)
    return StateVector(out, normalize=True)


def _reassemble(n: int, targets: list[int], vec: np.ndarray, rest: np.ndarray) -> np.ndarray:
    k = len(targets)
    joint = np.kron(vec, rest).reshape((2,) * n)
    return np.moveaxis(joint, list(range(k)), targets).reshape(-1)


def branches(state: StateVector, basis: MeasurementBasis, targets: Sequence[int]) -> list[OutcomeRecord]:
    """Every outcome of measuring ``targets`` in ``basis``, including zero-weight ones.

    Zero-weight branches carry ``None`` states.
    """
    n = state.num_qubits
    targets = _check_targets(n, targets)
    if basis.arity != len(targets):
        raise ValidationError(f"basis arity {basis.arity} != {len(targets)} targets")
    proj = kernels.project_all(state.amplitudes, n, basis.matrix, targets)
    probs = np.sum(np.abs(proj) ** 2, axis=1)
    records = []
    for label, vec, row, p in zip(basis.labels, basis.vectors, proj, probs):
        p = float(p)
        if p <= ZERO_PROB:
            records.append(OutcomeRecord(label, p, None, None))
            continue
        rest = row / np.sqrt(p)
        residual = StateVector(rest, normalize=True) if rest.shape[0] > 1 else None
        post = StateVector(_reassemble(n, targets, vec.amplitudes, rest), normalize=True)
        records.append(OutcomeRecord(label, p, post, residual))
    return records


def outcome_distribution(state: StateVector, basis: MeasurementBasis, targets: Sequence[int]) -> list[tuple[str, float]]:
    return [(r.label, r.probability) for r in branches(state, basis, targets)]


def measure(state: StateVector, basis: MeasurementBasis, targets: Sequence[int], rng: np.random.Generator) -> OutcomeRecord:
    """Sample one outcome with Born probabilities."""
    records = branches(state, basis, targets)
    weights = np.array([r.probability if r.post_state is not None else 0.0 for r in records])
    cumulative = np.cumsum(weights / weights.sum())
    pick = int(np.searchsorted(cumulative, rng.random(), side="right"))
    pick = min(pick, len(records) - 1)
    while records[pick].post_state is None:  # guard against float edge at the top end
        pick -= 1
    return records[pick]


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    return abs(a.inner(b)) >= 1 - tol


def relative_phase(a: StateVector, b: StateVector, tol: float = 1e-9) -> complex:
    """Return the unit ``z`` with ``a == z * b``; raise if no such phase exists."""
    overlap = b.inner(a)
    if abs(overlap) < 1 - tol:
        raise ValidationError("states differ by more than a global phase")
    return overlap / abs(overlap)


class DensityMatrix:
    """Hermitian, trace-one, positive semidefinite operator."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rho = np.array(entries, dtype=np.complex128)
        dim = rho.shape[0]
        n = dim.bit_length() - 1
        if rho.ndim != 2 or rho.shape != (dim, dim) or dim < 2 or (1 << n) != dim:
            raise ValidationError(f"bad density matrix shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) >= NORM_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) >= NORM_TOL:
            raise ValidationError("density matrix trace != 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise ValidationError("density matrix has a negative eigenvalue")
        rho.flags.writeable = False
        self.entries = rho

    @property
    def num_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    def __repr__(self) -> str:
        return f"DensityMatrix({np.array2string(self.entries, precision=4)})"


def to_density(state: StateVector) -> DensityMatrix:
    a = state.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduce ``rho`` to the qubits in ``keep`` (kept in ascending order)."""
    n = rho.num_qubits
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValidationError("keep set must be nonempty")
    for k in keep:
        if not 0 <= k < n:
            raise QubitIndexError(f"qubit {k} out of range for a {n}-qubit operator")
    drop = [q for q in range(n) if q not in keep]
    t = rho.entries.reshape((2,) * (2 * n))
    # move to (keep_rows, drop_rows, keep_cols, drop_cols) then trace drop
    t = np.transpose(t, keep + drop + [n + q for q in keep] + [n + q for q in drop])
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(dk, dd, dk, dd)
    reduced = np.einsum("ajbj->ab", t)
    reduced = (reduced + reduced.conj().T) / 2
    return DensityMatrix(reduced / np.trace(reduced).real)


def purity(rho: DensityMatrix) -> float:
    m = rho.entries
    return float(np.real(np.trace(m @ m)))


def fidelity_pure(rho: DensityMatrix, target: StateVector) -> float:
    if rho.num_qubits != target.num_qubits:
        raise ValidationError("size mismatch between operator and target state")
    t = target.amplitudes
    return float(np.clip(np.real(np.vdot(t, rho.entries @ t)), 0.0, 1.0))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    eig = np.linalg.eigvalsh(a.entries - b.entries)
    return float(0.5 * np.sum(np.abs(eig)))
