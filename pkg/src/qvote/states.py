"""Named states, bases and Pauli label algebra used by the voting protocols.

Bell labels follow the convention |psi±> = (|00> ± |11>)/√2 and
|phi±> = (|01> ± |10>)/√2. Global phases are ignored by all label maps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from qvote.errors import ValidationError
from qvote.qstate import (
    MINUS,
    ONE,
    PLUS,
    SQRT1_2,
    ZERO,
    BasisName,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    equal_up_to_global_phase,
    tensor,
)


class BellLabel(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    def __str__(self) -> str:
        return self.value


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def factor(self) -> int:
        return 1 if self is Sign.PLUS else -1


@dataclass(frozen=True, order=True)
class GhzLabel:
    """GHZ^{a±}: ``a`` is the decimal value of ijk with i = 0."""

    a: int
    sign: Sign

    def __post_init__(self):
        if self.a not in range(4):
            raise ValidationError(f"GHZ index must be 0..3, got {self.a}")

    def __str__(self) -> str:
        return f"GHZ{self.a}{self.sign.value}"

    @classmethod
    def parse(cls, text: str) -> "GhzLabel":
        if len(text) != 5 or not text.startswith("GHZ"):
            raise ValidationError(f"not a GHZ label: {text!r}")
        return cls(int(text[3]), Sign(text[4]))


GHZ_LABELS = tuple(GhzLabel(a, s) for a in range(4) for s in Sign)


class PauliOp(enum.Enum):
    I = "I"
    X = "X"
    IY = "iY"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI[self]

    def __str__(self) -> str:
        return self.value


_PAULI = {
    PauliOp.I: np.eye(2, dtype=np.complex128),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    PauliOp.IY: np.array([[0, 1], [-1, 0]], dtype=np.complex128),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
for _m in _PAULI.values():
    _m.flags.writeable = False


class ControllerBasis(enum.Enum):
    """Basis the controller's qubit is prepared and measured in."""

    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"

    @property
    def kets(self) -> tuple[StateVector, StateVector]:
        return (ZERO, ONE) if self is ControllerBasis.COMPUTATIONAL else (PLUS, MINUS)

    @property
    def basis(self) -> MeasurementBasis:
        if self is ControllerBasis.COMPUTATIONAL:
            return MeasurementBasis.computational(1)
        return MeasurementBasis.diagonal()


@dataclass(frozen=True)
class GhzLikeSpec:
    psi1: BellLabel = BellLabel.PSI_PLUS
    psi2: BellLabel = BellLabel.PHI_PLUS
    controller_basis: ControllerBasis = ControllerBasis.COMPUTATIONAL

    def __post_init__(self):
        if self.psi1 == self.psi2:
            raise ValidationError("psi1 and psi2 must differ, otherwise the controller has no control")

    def branch_label(self, controller_outcome: int) -> BellLabel:
        """Bell state the voter and tallyman share given the controller's outcome bit."""
        return self.psi1 if controller_outcome == 0 else self.psi2


def bell(label: BellLabel) -> StateVector:
    s = SQRT1_2
    return {
        BellLabel.PSI_PLUS: StateVector([s, 0, 0, s]),
        BellLabel.PSI_MINUS: StateVector([s, 0, 0, -s]),
        BellLabel.PHI_PLUS: StateVector([0, s, s, 0]),
        BellLabel.PHI_MINUS: StateVector([0, s, -s, 0]),
    }[label]


def ghz(label: GhzLabel) -> StateVector:
    amps = np.zeros(8, dtype=np.complex128)
    amps[label.a] = SQRT1_2
    amps[7 - label.a] = label.sign.factor * SQRT1_2
    return StateVector(amps)


def bell_basis() -> MeasurementBasis:
    labels = list(BellLabel)
    return MeasurementBasis(BasisName.BELL, [bell(b) for b in labels], [b.value for b in labels])


def ghz_basis() -> MeasurementBasis:
    return MeasurementBasis(BasisName.GHZ, [ghz(g) for g in GHZ_LABELS], [str(g) for g in GHZ_LABELS])


def tzl_channel() -> StateVector:
    """Four-qubit channel (|GHZ0+>|0> + |GHZ1+>|1>)/√2, qubit order (A1, A2, B, C)."""
    first = tensor(ghz(GhzLabel(0, Sign.PLUS)), ZERO).amplitudes
    second = tensor(ghz(GhzLabel(1, Sign.PLUS)), ONE).amplitudes
    return StateVector((first + second) * SQRT1_2)


def ghz_like(spec: GhzLikeSpec) -> StateVector:
    """(|psi1>|a> + |psi2>|b>)/√2 with qubit order (voter, tallyman, controller)."""
    a, b = spec.controller_basis.kets
    first = tensor(bell(spec.psi1), a).amplitudes
    second = tensor(bell(spec.psi2), b).amplitudes
    return StateVector((first + second) * SQRT1_2)


def identify_bell(state: StateVector, tol: float = 1e-9) -> BellLabel:
    for label in BellLabel:
        if equal_up_to_global_phase(state, bell(label), tol):
            return label
    raise ValidationError("state is not a Bell state up to global phase")


@lru_cache(maxsize=None)
def bell_transition(initial: BellLabel, op: PauliOp) -> BellLabel:
    """Bell label of (op ⊗ I)|initial>, ignoring the global phase."""
    return identify_bell(apply_unitary(bell(initial), op.matrix, [0]))


def bell_transition_inverse(initial: BellLabel, observed: BellLabel) -> PauliOp:
    for op in PauliOp:
        if bell_transition(initial, op) is observed:
            return op
    raise AssertionError("bell_transition is a bijection for every initial label")
