from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsim.pauli import (
    PauliFrame,
    PauliOp,
    all_frames,
    all_paulis,
    conjugate,
    frame_compose,
    pauli_mul,
    symplectic_product,
)
from graphsim.statevec import GATES

letters = st.text(alphabet="IXYZ", min_size=1, max_size=3)
phases = st.sampled_from(["", "-", "i", "-i"])


def paulis(n=None):
    size = st.just(n) if n else st.integers(1, 3)
    return size.flatmap(
        lambda k: st.tuples(phases, st.text(alphabet="IXYZ", min_size=k, max_size=k)).map(
            lambda t: PauliOp.from_label(t[0] + t[1])
        )
    )


def test_label_round_trip():
    for lab in ["X", "-Y", "iZZ", "-iXYZ", "I"]:
        p = PauliOp.from_label(lab)
        assert PauliOp.from_label(p.label) == p


def test_y_is_hermitian_convention():
    assert np.allclose(PauliOp.from_label("Y").matrix(), [[0, -1j], [1j, 0]])
    assert np.allclose(PauliOp.from_label("XZ").matrix(), np.kron(GATES["X"], GATES["Z"]))


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_product_matches_matrices(pair):
    a, b = pair
    assert np.allclose((a * b).matrix(), a.matrix() @ b.matrix())
    assert pauli_mul(a, b) == a * b


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_commutation_from_symplectic_form(pair):
    a, b = pair
    A, B = a.matrix(), b.matrix()
    commute = np.allclose(A @ B, B @ A)
    assert a.commutes(b) == commute
    assert symplectic_product(a, b) == (0 if commute else 1)


@pytest.mark.parametrize("gate,arity", [("H", 1), ("S", 1), ("CPHASE", 2), ("CNOT", 2)])
def test_clifford_conjugation_matches_dense(gate, arity):
    U = GATES[gate]
    for p in all_paulis(arity):
        for ph in ("", "-", "i"):
            q = PauliOp.from_label(ph + p.label.lstrip("+"))
            got = conjugate(q, gate, list(range(arity)))
            assert np.allclose(got.matrix(), U @ q.matrix() @ U.conj().T)


def test_conjugation_on_a_subset_of_qubits():
    p = PauliOp.from_label("XZY")
    got = conjugate(p, "H", [1])
    assert got == PauliOp.from_label("XXY")


def test_all_paulis_counts_and_order():
    ps = all_paulis(2, nontrivial=True)
    assert len(ps) == 15
    assert [p.label for p in ps[:4]] == ["+IX", "+IY", "+IZ", "+XI"]


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(*(st.integers(0, 4**n - 1) for _ in range(2)), st.just(n))))
def test_frames_compose_like_phaseless_products(t):
    i, j, n = t
    a, b = PauliFrame.from_index(n, i), PauliFrame.from_index(n, j)
    prod = (a.lift() * b.lift()).phaseless()
    assert PauliFrame.project(prod) == (a ^ b) == frame_compose(a, b)


def test_frame_index_is_msb_first():
    assert PauliFrame.from_index(1, 2).bits == (1, 0)
    assert str(PauliFrame.from_xz([1, 0], [0, 1])) == "10|01"
    assert len(all_frames(2)) == 16
