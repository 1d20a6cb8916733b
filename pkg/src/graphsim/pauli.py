"""Pauli-group algebra in the binary symplectic representation.

A :class:`PauliOp` on ``n`` qubits is ``phase * P_0 (x) ... (x) P_{n-1}`` with each
``P_j`` in ``{I, X, Y, Z}`` (``Y`` Hermitian) and ``phase = i**k``.  The single-qubit
factor is encoded by the bit pair ``(x_j, z_j)``: ``I=(0,0), X=(1,0), Z=(0,1), Y=(1,1)``.

A :class:`PauliFrame` is the phaseless ``2n``-bit label ``x-half || z-half`` of the
operator ``X^x Z^z``; frames compose by XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

_PHASE_SYMBOL = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PauliOp:
    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise DimensionMismatch(f"x has {len(self.x)} bits, z has {len(self.z)}")
        object.__setattr__(self, "x", tuple(int(b) & 1 for b in self.x))
        object.__setattr__(self, "z", tuple(int(b) & 1 for b in self.z))
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, n: int) -> PauliOp:
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_label(cls, label: str) -> PauliOp:
        """Parse labels such as ``"XZ"``, ``"-iY"`` or ``"+IXI"``."""
        phase = 0
        body = label.strip()
        for prefix, k in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2), ("i", 1)):
            if body.startswith(prefix) and len(body) > len(prefix):
                phase = k
                body = body[len(prefix):]
                break
        try:
            bits = [_BITS[c] for c in body.upper()]
        except KeyError as exc:
            raise ValueError(f"bad Pauli label {label!r}") from exc
        return cls(tuple(b[0] for b in bits), tuple(b[1] for b in bits), phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOp:
        x, z = [0] * n, [0] * n
        x[qubit], z[qubit] = _BITS[letter]
        return cls(tuple(x), tuple(z))

    @property
    def letters(self) -> str:
        return "".join(_LETTER[(a, b)] for a, b in zip(self.x, self.z))

    @property
    def label(self) -> str:
        return _PHASE_SYMBOL[self.phase] + self.letters

    def __str__(self) -> str:
        return self.label

    @property
    def weight(self) -> int:
        return sum(a | b for a, b in zip(self.x, self.z))

    @property
    def is_identity(self) -> bool:
        return self.weight == 0

    @property
    def num_y(self) -> int:
        return sum(a & b for a, b in zip(self.x, self.z))

    def xz_phase(self) -> int:
        """Exponent ``k`` with ``self == i**k X^x Z^z``."""
        return (self.phase + self.num_y) % 4

    @classmethod
    def from_xz(cls, x, z, k: int) -> PauliOp:
        """Build ``i**k X^x Z^z``."""
        ny = sum(int(a) & int(b) for a, b in zip(x, z))
        return cls(tuple(x), tuple(z), (k - ny) % 4)

    def __mul__(self, other: PauliOp) -> PauliOp:
        return pauli_mul(self, other)

    def __neg__(self) -> PauliOp:
        return PauliOp(self.x, self.z, self.phase + 2)

    def phaseless(self) -> PauliOp:
        return PauliOp(self.x, self.z, 0)

    def commutes(self, other: PauliOp) -> bool:
        return symplectic_product(self, other) == 0

    def matrix(self) -> np.ndarray:
        mats = [PAULI_MATRICES[c] for c in self.letters] or [np.eye(1, dtype=complex)]
        return (1j**self.phase) * reduce(np.kron, mats)

    def on(self, n: int, qubits) -> PauliOp:
        """Embed this operator into ``n`` qubits at positions ``qubits``."""
        x, z = [0] * n, [0] * n
        for j, q in enumerate(qubits):
            x[q], z[q] = self.x[j], self.z[j]
        return PauliOp(tuple(x), tuple(z), self.phase)

    def restrict(self, qubits) -> PauliOp:
        return PauliOp(tuple(self.x[q] for q in qubits), tuple(self.z[q] for q in qubits), self.phase)


def pauli_mul(a: PauliOp, b: PauliOp) -> PauliOp:
    """Group product ``a @ b`` with exact phase."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply {a.n}-qubit and {b.n}-qubit Paulis")
    # X^x1 Z^z1 X^x2 Z^z2 = (-1)^{z1.x2} X^{x1+x2} Z^{z1+z2}
    swap = sum(zb & xb for zb, xb in zip(a.z, b.x))
    k = a.xz_phase() + b.xz_phase() + 2 * swap
    x = tuple(p ^ q for p, q in zip(a.x, b.x))
    z = tuple(p ^ q for p, q in zip(a.z, b.z))
    return PauliOp.from_xz(x, z, k)


def symplectic_product(a: PauliOp, b: PauliOp) -> int:
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} qubits")
    return (sum(p & q for p, q in zip(a.x, b.z)) + sum(p & q for p, q in zip(a.z, b.x))) % 2


def all_paulis(n: int, nontrivial: bool = False) -> list[PauliOp]:
    """Phaseless Paulis on ``n`` qubits in lexicographic ``I < X < Y < Z`` order."""
    out = [PauliOp.from_label("".join(w)) for w in product("IXYZ", repeat=n)]
    return out[1:] if nontrivial else out


# images of X_j and Z_j under conjugation U P U^dagger
_CLIFFORD_IMAGES = {
    "H": {("X", 0): "Z", ("Z", 0): "X"},
    "S": {("X", 0): "Y", ("Z", 0): "Z"},
    "CPHASE": {("X", 0): "XZ", ("X", 1): "ZX", ("Z", 0): "ZI", ("Z", 1): "IZ"},
    "CNOT": {("X", 0): "XX", ("X", 1): "IX", ("Z", 0): "ZI", ("Z", 1): "ZZ"},
    "X": {("X", 0): "X", ("Z", 0): "-Z"},
    "Y": {("X", 0): "-X", ("Z", 0): "-Z"},
    "Z": {("X", 0): "-X", ("Z", 0): "Z"},
}


def conjugate(p: PauliOp, gate: str, qubits) -> PauliOp:
    """Return ``U p U^dagger`` for a Clifford ``gate`` acting on ``qubits``."""
    images = _CLIFFORD_IMAGES[gate.upper()]
    qubits = tuple(qubits)
    n = p.n
    result = PauliOp.identity(n)
    local = p.restrict(qubits)
    untouched = [q for q in range(n) if q not in qubits]
    # qubits outside the gate pass through unchanged
    rest = PauliOp.from_xz(
        tuple(p.x[q] if q in untouched else 0 for q in range(n)),
        tuple(p.z[q] if q in untouched else 0 for q in range(n)),
        0,
    )
    # p = i^k X^x Z^z: conjugate the local X factors, then the local Z factors
    factors = []
    for j in range(len(qubits)):
        if local.x[j]:
            factors.append(PauliOp.from_label(images[("X", j)]).on(n, qubits))
    for j in range(len(qubits)):
        if local.z[j]:
            factors.append(PauliOp.from_label(images[("Z", j)]).on(n, qubits))
    for f in factors:
        result = result * f
    result = result * rest
    return PauliOp.from_xz(result.x, result.z, result.xz_phase() + p.xz_phase())


@dataclass(frozen=True)
class PauliFrame:
    """Phaseless byproduct label ``e = x || z`` standing for ``X^x Z^z``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) % 2:
            raise DimensionMismatch("frame must have an even number of bits")
        object.__setattr__(self, "bits", tuple(int(b) & 1 for b in self.bits))

    @property
    def n(self) -> int:
        return len(self.bits) // 2

    @property
    def x(self) -> tuple[int, ...]:
        return self.bits[: self.n]

    @property
    def z(self) -> tuple[int, ...]:
        return self.bits[self.n:]

    @classmethod
    def zero(cls, n: int) -> PauliFrame:
        return cls((0,) * (2 * n))

    @classmethod
    def from_xz(cls, x, z) -> PauliFrame:
        return cls(tuple(x) + tuple(z))

    @classmethod
    def from_index(cls, n: int, index: int) -> PauliFrame:
        """Frame whose bits, most significant first, spell ``index``."""
        return cls(tuple((index >> (2 * n - 1 - j)) & 1 for j in range(2 * n)))

    @classmethod
    def project(cls, op: PauliOp) -> PauliFrame:
        return cls(op.x + op.z)

    def lift(self) -> PauliOp:
        return PauliOp.from_xz(self.x, self.z, 0)

    def __xor__(self, other: PauliFrame) -> PauliFrame:
        return frame_compose(self, other)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.uint8)

    def __str__(self) -> str:
        return "".join(map(str, self.x)) + "|" + "".join(map(str, self.z))


def frame_compose(e1: PauliFrame, e2: PauliFrame) -> PauliFrame:
    if e1.n != e2.n:
        raise DimensionMismatch(f"frames on {e1.n} and {e2.n} qubits")
    return PauliFrame(tuple(a ^ b for a, b in zip(e1.bits, e2.bits)))


def all_frames(n: int) -> list[PauliFrame]:
    return [PauliFrame.from_index(n, i) for i in range(4**n)]
