"""Dense state-vector simulator with single-qubit Z and XY-plane measurements.

Qubit 0 is the most significant bit of the amplitude index.  The tensor kernels
(``apply_matrix``, ``apply_cz``, ``contract_qubit``) act on arrays shaped
``(2,)*n + batch`` so the purified-operator code can push many columns at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOp

MAX_QUBITS = 16
ZERO_BRANCH_TOL = 1e-12

SQ2 = 1 / math.sqrt(2)
GATES = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "CPHASE": np.diag([1, 1, 1, -1]).astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
GATES["CZ"] = GATES["CPHASE"]
GATE_ARITY = {name: int(round(math.log2(m.shape[0]))) for name, m in GATES.items()}


class CapacityError(ValueError):
    pass


class ZeroBranchError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


def phase_gate(theta: float) -> np.ndarray:
    """``diag(1, e^{i theta})``."""
    return np.diag([1, np.exp(1j * theta)]).astype(complex)


@dataclass(frozen=True)
class MeasBasis:
    """Single-qubit measurement basis.

    ``kind="xy"`` measures ``cos(angle) X + sin(angle) Y`` (outcome 0 is the ``+1``
    eigenvector ``(|0> + e^{i angle}|1>)/sqrt2``); ``kind="z"`` measures ``Z``.
    """

    kind: str = "xy"
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in ("xy", "z"):
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @classmethod
    def X(cls) -> MeasBasis:
        return cls("xy", 0.0)

    @classmethod
    def Y(cls) -> MeasBasis:
        return cls("xy", math.pi / 2)

    @classmethod
    def Z(cls) -> MeasBasis:
        return cls("z", 0.0)

    @classmethod
    def xy(cls, angle: float) -> MeasBasis:
        return cls("xy", float(angle))

    def vectors(self) -> np.ndarray:
        """Rows are the eigenvectors for outcomes 0 and 1."""
        if self.kind == "z":
            return np.eye(2, dtype=complex)
        w = np.exp(1j * self.angle)
        return SQ2 * np.array([[1, w], [1, -w]], dtype=complex)

    def observable(self) -> np.ndarray:
        if self.kind == "z":
            return GATES["Z"]
        return math.cos(self.angle) * GATES["X"] + math.sin(self.angle) * GATES["Y"]


# -- tensor kernels -------------------------------------------------------------


def apply_matrix(t: np.ndarray, mat: np.ndarray, qubits) -> np.ndarray:
    qubits = list(qubits)
    k = len(qubits)
    m = np.asarray(mat).reshape((2,) * (2 * k))
    out = np.tensordot(m, t, axes=(list(range(k, 2 * k)), qubits))
    return np.moveaxis(out, list(range(k)), qubits)


def apply_cz(t: np.ndarray, a: int, b: int) -> np.ndarray:
    out = t.copy()
    idx = [slice(None)] * t.ndim
    idx[a] = 1
    idx[b] = 1
    out[tuple(idx)] *= -1
    return out


def apply_pauli_tensor(t: np.ndarray, p: PauliOp, qubits) -> np.ndarray:
    """Apply ``p`` (including its phase) to the listed qubit axes."""
    out = t.copy()
    for j, q in enumerate(qubits):
        # P = i^k X^x Z^z, so Z acts first
        if p.z[j]:
            idx = [slice(None)] * out.ndim
            idx[q] = 1
            out[tuple(idx)] *= -1
        if p.x[j]:
            out = np.flip(out, axis=q)
    k = p.xz_phase()
    return out * (1j**k) if k else out


def contract_qubit(t: np.ndarray, q: int, bra: np.ndarray) -> np.ndarray:
    """Contract axis ``q`` with ``<bra|`` (``bra`` given as a ket; conjugated here)."""
    return np.tensordot(np.conj(bra), t, axes=([0], [q]))


def insert_qubit(t: np.ndarray, q: int, ket: np.ndarray) -> np.ndarray:
    out = np.multiply.outer(np.asarray(ket, dtype=complex), t)
    return np.moveaxis(out, 0, q)


# -- state vectors --------------------------------------------------------------


class StateVec:
    """Dense pure state on ``n`` qubits."""

    __slots__ = ("n", "amps")

    def __init__(self, amps, n: int | None = None):
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if n is None:
            n = int(round(math.log2(amps.size))) if amps.size > 1 else 0
        if amps.size != 2**n:
            raise ValueError(f"{amps.size} amplitudes do not describe {n} qubits")
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds simulator capacity {MAX_QUBITS}")
        self.n = n
        self.amps = amps

    @classmethod
    def zeros(cls, n: int) -> StateVec:
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds simulator capacity {MAX_QUBITS}")
        a = np.zeros(2**n, dtype=complex)
        a[0] = 1
        return cls(a, n)

    @classmethod
    def plus(cls, n: int) -> StateVec:
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds simulator capacity {MAX_QUBITS}")
        return cls(np.full(2**n, 2 ** (-n / 2), dtype=complex), n)

    @classmethod
    def product(cls, kets) -> StateVec:
        amps = np.ones(1, dtype=complex)
        for k in kets:
            amps = np.kron(amps, np.asarray(k, dtype=complex))
        return cls(amps)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> StateVec:
        a = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return cls(a / np.linalg.norm(a), n)

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> StateVec:
        return StateVec(self.amps / self.norm(), self.n)

    def kron(self, other: StateVec) -> StateVec:
        return StateVec(np.kron(self.amps, other.amps), self.n + other.n)

    def copy(self) -> StateVec:
        return StateVec(self.amps.copy(), self.n)

    def __repr__(self) -> str:
        return f"StateVec(n={self.n})"


def _check_qubits(s: StateVec, qubits) -> list[int]:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit index in {qubits}")
    for q in qubits:
        if not 0 <= q < s.n:
            raise IndexError(f"qubit {q} out of range for {s.n}-qubit state")
    return qubits


def apply_unitary(s: StateVec, mat: np.ndarray, qubits) -> StateVec:
    qubits = _check_qubits(s, qubits)
    if np.shape(mat) != (2 ** len(qubits),) * 2:
        raise ValueError(f"matrix shape {np.shape(mat)} does not match {len(qubits)} qubits")
    return StateVec(apply_matrix(s.tensor, mat, qubits), s.n)


def apply_gate(s: StateVec, gate: str, qubits) -> StateVec:
    """Apply a named gate (``H, S, T, CPHASE/CZ, CNOT, X, Y, Z, I``)."""
    name = gate.upper()
    if name not in GATES:
        raise ValueError(f"unknown gate {gate!r}")
    qubits = _check_qubits(s, qubits)
    if len(qubits) != GATE_ARITY[name]:
        raise ValueError(f"{name} acts on {GATE_ARITY[name]} qubits, got {qubits}")
    if name in ("CPHASE", "CZ"):
        return StateVec(apply_cz(s.tensor, *qubits), s.n)
    return StateVec(apply_matrix(s.tensor, GATES[name], qubits), s.n)


def apply_pauli(s: StateVec, p: PauliOp, qubits=None) -> StateVec:
    if qubits is None:
        qubits = range(s.n)
    qubits = _check_qubits(s, qubits)
    if len(qubits) != p.n:
        raise ValueError(f"{p.n}-qubit Pauli on {len(qubits)} qubits")
    return StateVec(apply_pauli_tensor(s.tensor, p, qubits), s.n)


def branch_probabilities(s: StateVec, qubit: int, basis: MeasBasis) -> np.ndarray:
    (qubit,) = _check_qubits(s, [qubit])
    vecs = basis.vectors()
    return np.array(
        [float(np.sum(np.abs(contract_qubit(s.tensor, qubit, vecs[b])) ** 2)) for b in (0, 1)]
    )


def _choose(probs, rng, forced):
    if forced is not None:
        bit = int(forced)
        if probs[bit] <= ZERO_BRANCH_TOL:
            raise ZeroBranchError(f"forced outcome {bit} has probability {probs[bit]:.3g}")
        return bit
    if rng is None:
        raise ValueError("need an rng or a forced outcome")
    return int(rng.random() >= probs[0] / (probs[0] + probs[1]))


def measure(
    s: StateVec,
    qubit: int,
    basis: MeasBasis,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[int, StateVec, float]:
    """Projective measurement; the measured qubit stays in the state.

    Returns ``(outcome, post-measurement state, pre-measurement probability)``.
    """
    (qubit,) = _check_qubits(s, [qubit])
    vecs = basis.vectors()
    branches = [contract_qubit(s.tensor, qubit, vecs[b]) for b in (0, 1)]
    probs = [float(np.sum(np.abs(br) ** 2)) for br in branches]
    bit = _choose(probs, rng, forced)
    rest = branches[bit] / math.sqrt(probs[bit])
    return bit, StateVec(insert_qubit(rest, qubit, vecs[bit]), s.n), probs[bit]


def measure_discard(
    s: StateVec,
    qubit: int,
    basis: MeasBasis,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[int, StateVec, float]:
    """Like :func:`measure` but removes the measured qubit from the register."""
    (qubit,) = _check_qubits(s, [qubit])
    vecs = basis.vectors()
    branches = [contract_qubit(s.tensor, qubit, vecs[b]) for b in (0, 1)]
    probs = [float(np.sum(np.abs(br) ** 2)) for br in branches]
    bit = _choose(probs, rng, forced)
    rest = branches[bit] / math.sqrt(probs[bit])
    return bit, StateVec(rest, s.n - 1), probs[bit]


def overlap(a: StateVec, b: StateVec) -> complex:
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVec, b: StateVec) -> float:
    """``|<a|b>|^2 / (|a|^2 |b|^2)``: equality up to global phase and scale."""
    na, nb = a.norm(), b.norm()
    if na == 0 or nb == 0:
        return 0.0
    return abs(overlap(a, b)) ** 2 / (na * nb) ** 2


def tomography_inputs(n: int) -> list[StateVec]:
    """Products of ``|0>, |1>, |+>, |+i>``: a spanning set whose projectors are
    tomographically complete."""
    singles = [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([SQ2, SQ2], dtype=complex),
        np.array([SQ2, 1j * SQ2], dtype=complex),
    ]
    out = [StateVec.product([])]
    for _ in range(n):
        out = [s.kron(StateVec(k)) for s in out for k in singles]
    return out
