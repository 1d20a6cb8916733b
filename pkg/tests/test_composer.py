from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsim.composer import (
    CircuitIR,
    CircuitRangeError,
    CircuitSyntaxError,
    ComposedPattern,
    compose,
    count_locations,
    format_circuit,
    parse_circuit,
    run_composed,
    run_reference,
    single,
    verify_sequence,
)
from graphsim.graphstate import validate_schedule
from graphsim.patterns import GATE_PATTERNS, elementary_pattern, verify_composability
from graphsim.pauli import PauliFrame
from graphsim.statevec import GATES, StateVec, apply_pauli, fidelity, tomography_inputs

CNOT = "qubits 2\ncnot 0 1\n"


def test_parse_examples():
    c = parse_circuit("qubits 1\nprep_plus 0\nh 0\nmeasure_x 0")
    assert c.n_qubits == 1 and [op.name for op in c.ops] == ["prep_plus", "h", "measure_x"]
    c = parse_circuit("qubits 2\ncnot 0 1  # trailing comment\n\n")
    assert [(op.name, op.qubits) for op in c.ops] == [("cnot", (0, 1))]
    assert parse_circuit("") == CircuitIR(0, ())


@pytest.mark.parametrize(
    "text,line,cls",
    [
        ("qubits 1\nh 5\n", 2, CircuitRangeError),
        ("qubits 1\nfoo 0\n", 2, CircuitSyntaxError),
        ("h 0\n", 1, CircuitSyntaxError),
        ("qubits 2\ncnot 0\n", 2, CircuitSyntaxError),
        ("qubits 2\ncnot 1 1\n", 2, CircuitSyntaxError),
        ("qubits 1\nmeasure_z 0\nh 0\n", 3, CircuitRangeError),
        ("qubits 1\nh 0\nprep_zero 0\n", 3, CircuitRangeError),
        ("qubits 1\nh x\n", 2, CircuitSyntaxError),
        ("qubits 1\nH 0\n", 2, CircuitSyntaxError),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, cls):
    with pytest.raises(cls) as info:
        parse_circuit(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


ops_1q = st.sampled_from(["h", "s", "t"])


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 3))
    lines = []
    for _ in range(draw(st.integers(0, 6))):
        if n > 1 and draw(st.booleans()):
            a, b = draw(st.permutations(range(n)))[:2]
            lines.append(f"{draw(st.sampled_from(['cphase', 'cnot']))} {a} {b}")
        else:
            lines.append(f"{draw(ops_1q)} {draw(st.integers(0, n - 1))}")
    return f"qubits {n}\n" + "".join(line + "\n" for line in lines)


@given(circuits())
def test_format_round_trip(text):
    c = parse_circuit(text)
    assert parse_circuit(format_circuit(c)) == CircuitIR(c.n_qubits, tuple(op.__class__(op.name, op.qubits, i + 2) for i, op in enumerate(c.ops)))


def test_cnot_composition_structure():
    cp = compose(parse_circuit(CNOT))
    assert [i.gate for i in cp.instances] == ["H", "CPHASE", "H"]
    assert count_locations(cp).total == 5
    h1, cz, h2 = cp.instances
    # outputs identified with the successor's inputs
    assert h1.node_map[1] == cz.node_map[1]
    assert cz.node_map[1] == h2.node_map[0]
    assert cz.node_map[0] == cp.input_nodes[0] == cp.output_nodes[0]
    assert cp.output_nodes[1] == h2.node_map[1]
    assert validate_schedule(cp, cp.schedule) == []


def test_cnot_simulates_cnot():
    rep = verify_sequence(compose(parse_circuit(CNOT)))
    assert rep.passed and rep.exhaustive
    assert rep.n_runs == 16 * 16 * 4


def test_single_h_is_the_catalog_pattern():
    cp = compose(parse_circuit("qubits 1\nh 0\n"))
    assert len(cp.instances) == 1
    assert cp.instances[0].pattern is elementary_pattern("H")
    assert len(cp.edges) == 1 and len(cp.measured_nodes) == 1


def _as_identity_pattern(cp: ComposedPattern):
    """Check H;H against F = I with a composability-style sweep over frames and outcomes."""
    for e_in in PauliFrame.zero(1), PauliFrame.from_index(1, 3):
        for psi in tomography_inputs(1):
            for h in itertools.product((0, 1), repeat=2):
                run = run_composed(cp, apply_pauli(psi, e_in.lift()), e_in, outcomes=h)
                want = apply_pauli(psi, run.e_out.lift())
                assert fidelity(want, run.state) == pytest.approx(1.0, abs=1e-10)


def test_hh_is_identity():
    _as_identity_pattern(compose(parse_circuit("qubits 1\nh 0\nh 0\n")))


def test_ss_is_z():
    cp = compose(parse_circuit("qubits 1\ns 0\ns 0\n"))
    assert verify_sequence(cp).passed
    psi = StateVec.random(1, np.random.default_rng(0))
    run = run_composed(cp, psi, rng=np.random.default_rng(1))
    want = apply_pauli(StateVec(GATES["Z"] @ psi.amps), run.e_out.lift())
    assert fidelity(want, run.state) == pytest.approx(1.0)


def test_empty_circuit():
    cp = compose(parse_circuit(""))
    rep = verify_sequence(cp)
    assert rep.passed
    assert count_locations(cp).total == 0


def test_parallel_cphases_cancel():
    cp = compose(parse_circuit("qubits 2\ncphase 0 1\ncphase 0 1\n"))
    assert len(cp.edges) == 2
    assert verify_sequence(cp).passed


def test_prep_and_measure_words():
    for text in [
        "qubits 1\nprep_zero 0\nmeasure_z 0\n",
        "qubits 1\nprep_plus 0\nt 0\nmeasure_y 0\n",
        "qubits 2\nprep_zero 1\ncnot 0 1\nmeasure_z 1\n",
        "qubits 2\nh 0\ncnot 0 1\nmeasure_x 0\nmeasure_z 1\n",
    ]:
        cp = compose(parse_circuit(text))
        rep = verify_sequence(cp)
        assert rep.passed, (text, rep.to_dict())


def test_prep_zero_result_is_deterministic():
    cp = compose(parse_circuit("qubits 1\nprep_zero 0\nmeasure_z 0\n"))
    for seed in range(20):
        assert run_composed(cp, StateVec.zeros(0), rng=np.random.default_rng(seed)).results == (0,)


def test_reference_matches_dense_circuit():
    cp = compose(parse_circuit("qubits 2\nh 0\nt 1\ncnot 1 0\ns 0\n"))
    psi = StateVec.random(2, np.random.default_rng(5))
    U = np.kron(GATES["S"], np.eye(2)) @ np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]]) @ np.kron(GATES["H"], GATES["T"])
    ref = run_reference(cp, psi)
    assert fidelity(ref.state, StateVec(U @ psi.amps)) == pytest.approx(1.0)


def test_location_counts():
    for g in GATE_PATTERNS:
        assert count_locations(elementary_pattern(g)).total <= 4
    assert count_locations(elementary_pattern("CPHASE")).total == 1
    full = count_locations(compose(parse_circuit(CNOT)), "full")
    assert full.breakdown["prep"] == 2 and full.breakdown["cphase"] == 3


@given(circuits())
def test_location_counts_are_additive(text):
    cp = compose(parse_circuit(text))
    parts = sum(count_locations(i.pattern).total for i in cp.instances)
    assert count_locations(cp).total == parts
    # every edge and measurement has exactly one owner
    assert len(cp.edge_owner) == len(cp.edges)
    assert len({n for n in cp.measured_nodes}) == len(cp.measured_nodes)


@given(circuits())
def test_final_frame_relates_outputs(text):
    cp = compose(parse_circuit(text))
    rng = np.random.default_rng(len(text))
    psi = StateVec.random(cp.n_in, rng)
    run = run_composed(cp, psi, rng=rng)
    ref = run_reference(cp, psi)
    assert fidelity(apply_pauli(ref.state, run.e_out.lift()), run.state) == pytest.approx(1.0, abs=1e-9)


def test_json_round_trip():
    cp = compose(parse_circuit("qubits 2\nt 0\ncnot 0 1\n"))
    back = ComposedPattern.from_json(cp.to_json())
    assert back.to_dict() == cp.to_dict()
    assert back.partial_order == cp.partial_order


def test_adaptive_dependencies_follow_frame_support():
    # T after H: the adaptive angle needs the x bit written by H's outcome
    cp = compose(parse_circuit("qubits 1\nh 0\nt 0\n"))
    assert cp.partial_order == ((0, 1),)
    # T on a fresh input has no dependency
    assert compose(parse_circuit("qubits 1\nt 0\n")).partial_order == ()


def test_single_wraps_any_pattern():
    cp = single(elementary_pattern("T"))
    assert cp.n_in == cp.n_out == 1
    assert verify_composability(cp.instances[0].pattern).passed


def test_prep_on_live_wire_rejected():
    from graphsim.composer import compose_patterns

    with pytest.raises(ValueError):
        compose_patterns(1, [(elementary_pattern("H"), (0,), 0), (elementary_pattern("PREP_PLUS"), (0,), 1)])


ONE_QUBIT = ["h 0", "s 0", "t 0"]
TWO_QUBIT = ["h 0", "h 1", "s 0", "s 1", "t 0", "t 1", "cphase 0 1", "cnot 0 1", "cnot 1 0"]


def test_one_qubit_corpus():
    # every word of length <= 3, every input frame
    for n in (1, 2, 3):
        for word in itertools.product(ONE_QUBIT, repeat=n):
            rep = verify_sequence(compose(parse_circuit("qubits 1\n" + "\n".join(word))))
            assert rep.passed, word


def test_two_qubit_corpus():
    # every word of length <= 2; longer words are covered by scripts/corpus.py
    for n in (1, 2):
        for word in itertools.product(TWO_QUBIT, repeat=n):
            rep = verify_sequence(compose(parse_circuit("qubits 2\n" + "\n".join(word))), frames="zero")
            assert rep.passed, word
