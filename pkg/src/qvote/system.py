"""Qubit bookkeeping for multi-party protocol runs.

A :class:`QubitSystem` tracks qubits by integer id. Entangled qubits share a
register (one :class:`StateVector`); registers are merged when an operation
spans several of them and split again after measurement, so no register grows
past what a single protocol round needs.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from qvote.errors import ValidationError
from qvote.qstate import (
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    measure,
    partial_trace,
    tensor,
    to_density,
)


class QubitSystem:
    def __init__(self):
        self._next_qid = 0
        self._next_reg = 0
        self._registers: dict[int, tuple[list[int], StateVector]] = {}
        self._owner: dict[int, int] = {}

    def __contains__(self, qid: int) -> bool:
        return qid in self._owner

    def prepare(self, state: StateVector) -> list[int]:
        """Allocate fresh qubits jointly in ``state``; returns their ids in order."""
        qids = list(range(self._next_qid, self._next_qid + state.num_qubits))
        self._next_qid += state.num_qubits
        self._store(qids, state)
        return qids

    def prepare_one(self, state: StateVector) -> int:
        if state.num_qubits != 1:
            raise ValidationError("prepare_one needs a single-qubit state")
        return self.prepare(state)[0]

    def _store(self, qids: list[int], state: StateVector) -> None:
        reg = self._next_reg
        self._next_reg += 1
        self._registers[reg] = (qids, state)
        for q in qids:
            self._owner[q] = reg

    def _register_ids(self, qids: Sequence[int]) -> list[int]:
        regs = []
        for q in qids:
            if q not in self._owner:
                raise ValidationError(f"unknown qubit id {q}")
            r = self._owner[q]
            if r not in regs:
                regs.append(r)
        return regs

    def _merge(self, qids: Sequence[int]) -> tuple[list[int], StateVector]:
        regs = self._register_ids(qids)
        if len(regs) == 1:
            return self._registers[regs[0]]
        members, state = self._registers.pop(regs[0])
        members = list(members)
        for r in regs[1:]:
            more, other = self._registers.pop(r)
            state = tensor(state, other)
            members += more
        self._store(members, state)
        return members, state

    def apply(self, u, qids: Sequence[int]) -> None:
        members, state = self._merge(qids)
        positions = [members.index(q) for q in qids]
        self._registers[self._owner[qids[0]]] = (members, apply_unitary(state, u, positions))

    def measure(self, basis: MeasurementBasis, qids: Sequence[int], rng: np.random.Generator) -> str:
        """Projectively measure ``qids``; they are left in the outcome's basis vector."""
        qids = list(qids)
        members, state = self._merge(qids)
        reg = self._owner[qids[0]]
        outcome = measure(state, basis, [members.index(q) for q in qids], rng)
        del self._registers[reg]
        self._store(qids, basis.vector(outcome.label))
        rest = [q for q in members if q not in qids]
        if rest:
            self._store(rest, outcome.residual)
        return outcome.label

    def state_of(self, qids: Sequence[int]) -> StateVector:
        """Pure state of ``qids``; they must not be entangled with other qubits."""
        qids = list(qids)
        state = None
        order: list[int] = []
        for r in self._register_ids(qids):
            members, reg_state = self._registers[r]
            if not set(members) <= set(qids):
                raise ValidationError("qubits are entangled with qubits outside the request")
            state = reg_state if state is None else tensor(state, reg_state)
            order += members
        return _reorder(state, order, qids)

    def reduced_density(self, qids: Sequence[int]) -> DensityMatrix:
        qids = list(qids)
        rho = None
        order: list[int] = []
        for r in self._register_ids(qids):
            members, reg_state = self._registers[r]
            keep = [i for i, q in enumerate(members) if q in qids]
            part = to_density(reg_state)
            if len(keep) < len(members):
                part = partial_trace(part, keep)
            rho = part.entries if rho is None else np.kron(rho, part.entries)
            order += [members[i] for i in keep]
        n = len(order)
        perm = [order.index(q) for q in qids]
        t = rho.reshape((2,) * (2 * n)).transpose(perm + [n + p for p in perm])
        return DensityMatrix(t.reshape(1 << n, 1 << n))


def _reorder(state: StateVector, order: list[int], wanted: list[int]) -> StateVector:
    if order == wanted:
        return state
    n = len(order)
    perm = [order.index(q) for q in wanted]
    amps = state.amplitudes.reshape((2,) * n).transpose(perm).reshape(-1)
    return StateVector(amps)
