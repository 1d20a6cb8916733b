"""Labelled qubit register: a growing/shrinking state vector addressed by node id."""

from __future__ import annotations

import math

import numpy as np

from .pauli import PauliOp
from .statevec import (
    MAX_QUBITS,
    SQ2,
    CapacityError,
    MeasBasis,
    StateVec,
    _choose,
    apply_cz,
    apply_matrix,
    apply_pauli_tensor,
)

_PLUS = np.array([SQ2, SQ2], dtype=complex)


class Register:
    __slots__ = ("tensor", "labels")

    def __init__(self, state: StateVec | None = None, labels=()):
        labels = list(labels)
        if state is None:
            state = StateVec.product([])
        if state.n != len(labels):
            raise ValueError(f"{len(labels)} labels for a {state.n}-qubit state")
        self.tensor = state.tensor.copy()
        self.labels = labels

    @property
    def n(self) -> int:
        return len(self.labels)

    def pos(self, label) -> int:
        return self.labels.index(label)

    def add(self, label, ket=_PLUS) -> None:
        if self.n + 1 > MAX_QUBITS:
            raise CapacityError(f"register would exceed {MAX_QUBITS} live qubits")
        if label in self.labels:
            raise ValueError(f"node {label} already live")
        self.tensor = np.multiply.outer(self.tensor, np.asarray(ket, dtype=complex))
        self.labels.append(label)

    def cz(self, a, b) -> None:
        self.tensor = apply_cz(self.tensor, self.pos(a), self.pos(b))

    def apply(self, op, labels) -> None:
        """Apply a :class:`PauliOp` or a dense matrix to the listed nodes."""
        qs = [self.pos(v) for v in labels]
        if isinstance(op, PauliOp):
            self.tensor = apply_pauli_tensor(self.tensor, op, qs)
        else:
            self.tensor = apply_matrix(self.tensor, op, qs)

    def measure(self, label, basis: MeasBasis, rng=None, forced=None) -> tuple[int, float]:
        """Measure and drop ``label``; returns ``(outcome, probability)``."""
        q = self.pos(label)
        t = np.moveaxis(self.tensor, q, 0)
        rest = t.shape[1:]
        branches = basis.vectors().conj() @ t.reshape(2, -1)
        probs = (float(np.vdot(branches[0], branches[0]).real), float(np.vdot(branches[1], branches[1]).real))
        bit = _choose(probs, rng, forced)
        self.tensor = (branches[bit] / math.sqrt(probs[bit])).reshape(rest)
        del self.labels[q]
        return bit, probs[bit]

    def state(self, order=None) -> StateVec:
        if order is None:
            order = self.labels
        order = list(order)
        if sorted(map(repr, order)) != sorted(map(repr, self.labels)):
            raise ValueError(f"order {order} does not match live nodes {self.labels}")
        perm = [self.pos(v) for v in order]
        t = np.transpose(self.tensor, perm) if perm else self.tensor
        return StateVec(np.ascontiguousarray(t).reshape(-1), len(order))
