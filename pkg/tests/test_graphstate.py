from __future__ import annotations

import json
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsim.composer import compose, parse_circuit, run_composed, single
from graphsim.graphstate import (
    Graph,
    MalformedPattern,
    PrepSchedule,
    build_graph_state,
    laziness,
    random_graph,
    schedule_dynamic,
    stabilizer,
    stabilizer_check,
    upfront_schedule,
    validate_schedule,
)
from graphsim.patterns import GATE_PATTERNS, elementary_pattern
from graphsim.pauli import PauliFrame, PauliOp
from graphsim.statevec import ZeroBranchError, apply_pauli, fidelity, tomography_inputs


@given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**31 - 1))
def test_random_graph_states_are_stabilized(n, p, seed):
    g = random_graph(n, p, np.random.default_rng(seed))
    rep = stabilizer_check(build_graph_state(g), g)
    assert rep.passed, rep.residuals
    assert rep.worst < 1e-10


def test_z_error_fails_only_its_own_stabilizer():
    # Z_v anticommutes with K_v alone (K_w only carries Z on v for neighbors w)
    g = Graph.from_edges(range(4), [(0, 1), (1, 2), (2, 3)])
    s = apply_pauli(build_graph_state(g), PauliOp.from_label("IZII"))
    assert stabilizer_check(s, g).failing == [1]


def test_x_error_fails_the_neighbors():
    g = Graph.from_edges(range(4), [(0, 1), (1, 2), (2, 3)])
    s = apply_pauli(build_graph_state(g), PauliOp.from_label("IXII"))
    assert stabilizer_check(s, g).failing == [0, 2]


def test_stabilizer_shape():
    g = Graph.from_edges("abc", [("a", "b"), ("a", "c")])
    assert stabilizer(g, "a").label == "+XZZ"
    assert stabilizer(g, "b").label == "+ZXI"


def test_graph_validation_and_json():
    with pytest.raises(ValueError):
        Graph.from_edges([0, 1], [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges([0, 1], [(0, 2)])
    with pytest.raises(ValueError):
        Graph.from_edges([0, 1], [(0, 1), (1, 0)])
    g = Graph.from_edges(range(3), [(0, 1), (2, 1)])
    assert Graph.from_json(g.to_json()) == g


def _objects():
    out = [(g, single(elementary_pattern(g))) for g in GATE_PATTERNS]
    out.append(("CNOT", compose(parse_circuit("qubits 2\ncnot 0 1\n"))))
    out.append(("T;H;S", compose(parse_circuit("qubits 1\nt 0\nh 0\ns 0\n"))))
    return out


@pytest.mark.parametrize("name,cp", _objects())
def test_dynamic_schedule_is_valid_and_lazy(name, cp):
    sched = schedule_dynamic(cp)
    assert validate_schedule(cp, sched) == []
    assert validate_schedule(cp, upfront_schedule(cp)) == []
    assert laziness(sched) >= laziness(upfront_schedule(cp))
    assert PrepSchedule.from_json(sched.to_json()) == sched


@pytest.mark.parametrize("name,cp", _objects())
def test_dynamic_equals_upfront(name, cp):
    up = upfront_schedule(cp)
    for e_in in (PauliFrame.zero(cp.n_in), PauliFrame.from_index(cp.n_in, 4**cp.n_in - 1)):
        for psi in tomography_inputs(cp.n_in):
            twisted = apply_pauli(psi, e_in.lift())
            rng = np.random.default_rng(7)
            for _ in range(4):
                h = tuple(int(b) for b in rng.integers(0, 2, len(cp.measured_nodes)))
                try:
                    a = run_composed(cp, twisted, e_in, outcomes=h)
                except ZeroBranchError:
                    continue
                b = run_composed(cp, twisted, e_in, outcomes=h, schedule=up)
                assert a.e_out == b.e_out
                assert a.probability == pytest.approx(b.probability, abs=1e-12)
                assert fidelity(a.state, b.state) == pytest.approx(1.0, abs=1e-10)


def test_validation_catches_problems():
    cp = single(elementary_pattern("S"))
    steps = list(schedule_dynamic(cp).steps)
    # measure the input before its edge exists
    bad = PrepSchedule(tuple([steps[0]] + [s for s in steps[1:] if s.kind == "measure"][:1]))
    problems = validate_schedule(cp, bad)
    assert any("before edge" in p for p in problems)
    doubled = PrepSchedule(tuple(steps + [s for s in steps if s.kind == "prep"][:1]))
    assert any("prepared 2 times" in p for p in validate_schedule(cp, doubled))


def test_cyclic_partial_order_is_rejected():
    fake = SimpleNamespace(
        node_ids=(0, 1), input_nodes=(), edges=(), measured_nodes=(0, 1), partial_order=((0, 1), (1, 0))
    )
    with pytest.raises(MalformedPattern):
        schedule_dynamic(fake)


def test_schedule_json_shape():
    cp = single(elementary_pattern("H"))
    data = json.loads(schedule_dynamic(cp).to_json())
    assert [d["op"] for d in data] == ["input", "prep", "cphase", "measure"]
