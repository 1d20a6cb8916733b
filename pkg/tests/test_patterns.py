from __future__ import annotations

import json
import math

import numpy as np
import pytest

from graphsim.patterns import (
    DIRECT_PATTERNS,
    GATE_PATTERNS,
    AffineRule,
    NoCandidate,
    Pattern,
    UpdateRule,
    catalog,
    derive_update_rule,
    elementary_pattern,
    run_pattern,
    verify_composability,
)
from graphsim.pauli import PauliFrame
from graphsim.statevec import GATES, StateVec, apply_pauli, fidelity


@pytest.mark.parametrize("gate", GATE_PATTERNS + DIRECT_PATTERNS)
def test_catalog_is_composable(gate):
    rep = verify_composability(elementary_pattern(gate))
    assert rep.passed, rep.to_dict()
    assert rep.worst_infidelity < 1e-10


def test_shapes():
    counts = {g: elementary_pattern(g).counts() for g in GATE_PATTERNS}
    assert counts == {"H": (2, 1, 1), "S": (3, 2, 2), "T": (3, 2, 2), "CPHASE": (2, 1, 0)}


def test_h_rule():
    # x_out = z_in + s, z_out = x_in
    br = elementary_pattern("H").rule.branches[0]
    assert br.A.tolist() == [[0, 1], [1, 0]]
    assert br.B.tolist() == [[1], [0]]
    assert br.c.tolist() == [0, 0]


def test_cphase_rule_is_symplectic_conjugation():
    br = elementary_pattern("CPHASE").rule.branches[0]
    want = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]])
    assert br.A.tolist() == want.tolist()


def test_t_rule_shifts_frame_by_outcomes_in_both_branches():
    pat = elementary_pattern("T")
    for e in range(4):
        e_in = PauliFrame.from_index(1, e)
        for s in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            b = pat.branch(e_in.bits, s)
            out = pat.rule.e_out(e_in.bits, s, b)
            assert tuple(out) == (e_in.x[0] ^ s[1], e_in.z[0] ^ s[0])


def test_t_adaptive_angle_sign():
    m = elementary_pattern("T").measurements[0].basis
    assert m.phi0 == pytest.approx(-math.pi / 4)
    assert m.phi1 == pytest.approx(math.pi / 4)


def test_measurement_readouts():
    R = {g: elementary_pattern(g).rule.readout.tolist() for g in DIRECT_PATTERNS if g != "PREP_PLUS"}
    assert R == {"MEASURE_X": [[0, 1]], "MEASURE_Y": [[1, 1]], "MEASURE_Z": [[1, 0]]}


def _with_rule(pat, **changes):
    br = pat.rule.branches[0]
    parts = {"A": br.A.copy(), "B": br.B.copy(), "c": br.c.copy()}
    for k, fn in changes.items():
        fn(parts[k])
    return pat.with_rule(UpdateRule(branches=(AffineRule(parts["A"], parts["B"], parts["c"]),)))


def test_corrupted_constant_fails_every_cell():
    pat = _with_rule(elementary_pattern("H"), c=lambda c: c.__setitem__(0, 1))
    rep = verify_composability(pat)
    assert not rep.passed
    assert len(rep.failed_cells) == len(rep.cells) == 8
    # an X error is invisible on the X eigenstates: half the inputs fail
    assert all(c.failed_inputs == 2 for c in rep.failed_cells)


def test_corrupted_outcome_dependence_fails_the_s1_half():
    pat = _with_rule(elementary_pattern("H"), B=lambda B: B.__setitem__((0, 0), 0))
    rep = verify_composability(pat)
    assert sorted({c.outcomes for c in rep.failed_cells}) == ["1"]
    assert len(rep.failed_cells) == 4


def test_wrong_graph_has_no_rule():
    pat = elementary_pattern("S")
    broken = Pattern("S", pat.nodes, pat.edges[:1] + ((0, 2),), pat.measurements, pat.inputs, pat.outputs)
    with pytest.raises(NoCandidate):
        derive_update_rule(broken)


@pytest.mark.parametrize("gate", GATE_PATTERNS + DIRECT_PATTERNS)
def test_json_round_trip(gate):
    pat = elementary_pattern(gate)
    back = Pattern.from_dict(json.loads(json.dumps(pat.to_dict())))
    assert back.to_dict() == pat.to_dict()
    assert verify_composability(back).passed


def test_run_pattern_realizes_gate_up_to_frame():
    pat = elementary_pattern("S")
    psi = StateVec.random(1, np.random.default_rng(3))
    run = run_pattern(psi, pat, rng=np.random.default_rng(4))
    want = apply_pauli(StateVec(GATES["S"] @ psi.amps), run.e_out.lift())
    assert fidelity(want, run.state) == pytest.approx(1.0, abs=1e-12)


def test_catalog_keys():
    assert set(catalog()) == set(GATE_PATTERNS + DIRECT_PATTERNS)
