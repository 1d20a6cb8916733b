from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsim.composer import compose, count_locations, parse_circuit, run_composed, single
from graphsim.faults import (
    CSS_CAVEAT,
    NoiseModel,
    check_fault_equivalence,
    enumerate_locations,
    local_locations,
    localization_suite,
    localize_fault,
    path_probability,
    psim_estimate,
    psim_exact,
    run_noisy,
    run_shots,
    sample_fault_path,
    shot_seeds,
    threshold_translate,
)
from graphsim.patterns import DIRECT_PATTERNS, GATE_PATTERNS, elementary_pattern
from graphsim.pauli import PauliFrame, PauliOp, all_paulis
from graphsim.statevec import StateVec, fidelity

CNOT = compose(parse_circuit("qubits 2\ncnot 0 1\n"))


@pytest.mark.parametrize("gate,n", [("H", 2), ("S", 4), ("T", 4), ("CPHASE", 1), ("MEASURE_X", 1), ("PREP_PLUS", 0)])
def test_paper_location_counts(gate, n):
    assert count_locations(elementary_pattern(gate), "paper").total == n
    assert len(enumerate_locations(elementary_pattern(gate), "paper")) == n


def test_full_mode_adds_preps_and_storage():
    locs = enumerate_locations(elementary_pattern("S"), "full")
    kinds = [l.kind for l in locs]
    assert kinds.count("prep") == 2
    assert kinds.count("cphase") == 2 and kinds.count("measurement") == 2
    assert count_locations(elementary_pattern("S"), "full").total == len(locs)
    assert [l.id for l in locs] == list(range(len(locs)))


def test_unknown_mode():
    with pytest.raises(ValueError):
        enumerate_locations(CNOT, "everything")


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel({"cphase": 1.5})
    with pytest.raises(ValueError):
        NoiseModel({"gate": 0.1})
    with pytest.raises(ValueError):
        NoiseModel(weights=(1, 0, 0, 0))


def test_depolarizing_is_uniform():
    ops, probs = NoiseModel.depolarizing(0.1).distribution(2)
    assert len(ops) == 15
    assert np.allclose(probs, 1 / 15)


def test_independent_xz_marginals():
    ops, probs = NoiseModel.independent_xz(0.1, 0.3).distribution(1)
    d = {op.letters: p for op, p in zip(ops, probs)}
    norm = 1 - 0.7**2
    assert d["X"] == pytest.approx(0.3 * 0.7 / norm)
    assert d["Y"] == pytest.approx(0.09 / norm)


@given(st.floats(0.0, 1.0))
def test_path_probabilities_sum_to_one(p):
    nm = NoiseModel.depolarizing(p)
    locs = enumerate_locations(elementary_pattern("H"), "paper")
    choices = [[None] + all_paulis(len(l.support), nontrivial=True) for l in locs]
    total = 0.0
    for pick in itertools.product(*choices):
        events = [(l.id, f) for l, f in zip(locs, pick) if f is not None]
        total += path_probability(nm, locs, events)
    assert total == pytest.approx(1.0)


def test_sampling_extremes():
    locs = enumerate_locations(CNOT, "full")
    rng = np.random.default_rng(0)
    assert len(sample_fault_path(NoiseModel.depolarizing(0.0), locs, rng)) == 0
    path = sample_fault_path(NoiseModel.depolarizing(1.0), locs, rng)
    assert [i for i, _ in path.events] == [l.id for l in locs]
    assert all(not f.is_identity for _, f in path.events)


def test_noiseless_shot_matches_ideal_run():
    psi = StateVec.random(2, np.random.default_rng(3))
    rec, state = run_noisy(CNOT, psi, None, NoiseModel.depolarizing(0.0), seed=11, return_state=True)
    ideal = run_composed(CNOT, psi, outcomes=rec.outcomes)
    assert fidelity(state, ideal.state) == pytest.approx(1.0)
    assert rec.e_out == ideal.e_out


def test_shots_are_seeded_and_thread_independent():
    nm = NoiseModel.depolarizing(0.2)
    a = [r.to_dict() for r in run_shots(CNOT, nm, 30, seed=4, threads=1)]
    b = [r.to_dict() for r in run_shots(CNOT, nm, 30, seed=4, threads=3)]
    c = [r.to_dict() for r in run_shots(CNOT, nm, 30, seed=5, threads=1)]
    assert a == b
    assert a != c
    assert shot_seeds(4, 3) == shot_seeds(4, 3)


@pytest.mark.parametrize("gate", GATE_PATTERNS + DIRECT_PATTERNS)
@pytest.mark.parametrize("mode", ["paper", "full"])
def test_localization_suite(gate, mode):
    rep = localization_suite(elementary_pattern(gate), mode)
    assert rep.passed, rep.to_dict()
    assert rep.worst_infidelity <= 1e-9


def test_clifford_faults_localize_to_paulis():
    for gate in ("H", "S", "CPHASE"):
        rep = localization_suite(elementary_pattern(gate), "full")
        assert "operator" not in set(rep.descriptors.values())


def test_t_pattern_has_non_pauli_descriptors():
    rep = localization_suite(elementary_pattern("T"), "paper")
    assert "operator" in set(rep.descriptors.values())


def test_x_before_adaptive_measurement_turns_t_into_t_dagger():
    pat = elementary_pattern("T")
    loc = _meas_location(pat, 0)
    node = pat.measurements[0].node
    for s in itertools.product((0, 1), repeat=2):
        d = localize_fault(pat, loc.position, (node,), PauliOp.from_label("X"), s).descriptor
        assert d.kind == "operator"
        # S^dag up to a global phase
        R = d.op / d.op[0, 0]
        assert np.allclose(R, np.diag([1, -1j]), atol=1e-9)
    # a Z there only flips the outcome, which the frame absorbs as a Pauli
    d = localize_fault(pat, loc.position, (node,), PauliOp.from_label("Z"), (0, 0)).descriptor
    assert d.kind == "pauli"


def _meas_location(pat, meas_index):
    return [l for l in local_locations(pat, "paper") if l.kind == "measurement"][meas_index]


def test_h_measurement_faults():
    pat = elementary_pattern("H")
    loc = _meas_location(pat, 0)
    nodes = (pat.measurements[0].node,)
    # X commutes with the X measurement of the input: no effect
    d = localize_fault(pat, loc.position, nodes, PauliOp.from_label("X"), (0,)).descriptor
    assert d.op.letters == "I"
    # Z flips the outcome, which the frame turns into an X after the gate
    d = localize_fault(pat, loc.position, nodes, PauliOp.from_label("Z"), (0,)).descriptor
    assert d.op.letters == "X"


def test_cphase_fault_is_itself():
    pat = elementary_pattern("CPHASE")
    (loc,) = local_locations(pat, "paper")
    for f in all_paulis(2, nontrivial=True):
        d = localize_fault(pat, loc.position, pat.edges[0], f, ()).descriptor
        assert d.op.letters == f.letters


def test_measurement_pattern_fault():
    pat = elementary_pattern("MEASURE_Z")
    (loc,) = local_locations(pat, "paper")
    node = pat.measurements[0].node
    assert localize_fault(pat, loc.position, (node,), PauliOp.from_label("X"), (0,)).descriptor.op.letters in ("X", "Y")
    assert localize_fault(pat, loc.position, (node,), PauliOp.from_label("Z"), (0,)).descriptor.op.letters in ("I", "Z")


@pytest.mark.parametrize("mode", ["paper", "full"])
def test_cnot_fault_equivalence(mode):
    frames = [PauliFrame.zero(2), PauliFrame.from_index(2, 9)]
    rep = check_fault_equivalence(CNOT, mode, frames=frames)
    assert rep.passed, rep.failures[:3]
    assert rep.cases > 0


def test_fault_equivalence_with_t_and_storage():
    cp = compose(parse_circuit("qubits 2\nt 0\nh 1\ncphase 0 1\n"))
    rep = check_fault_equivalence(cp, "full")
    assert rep.passed, rep.failures[:3]


def test_psim_closed_form():
    assert psim_exact(0.0, 5) == 0.0
    assert psim_exact(0.1, 4) == pytest.approx(1 - 0.9**4)
    assert psim_exact(0.01, 4) <= 4 * 0.01


@given(st.floats(0.0, 0.5), st.integers(0, 12))
def test_psim_union_bound(p, L):
    assert psim_exact(p, L) <= L * p + 1e-15


def test_psim_estimate():
    est = psim_estimate(elementary_pattern("T"), 0.05, 20000, rng=np.random.default_rng(1))
    assert est.L == 4
    assert est.within(3.0)
    assert est.ci_low <= est.mc <= est.ci_high
    with pytest.raises(ValueError):
        psim_estimate(elementary_pattern("T"), 1.5, 10)


def test_threshold_translation():
    native = threshold_translate(0.01)
    assert native.bound == pytest.approx(0.01 / 4)
    assert not native.caveat
    with_cnot = threshold_translate(0.01, ("H", "CNOT"))
    assert with_cnot.worst_gate == "CNOT" and with_cnot.bound == pytest.approx(0.002)
    css = threshold_translate(0.01, ("CPHASE", "PREP_PLUS", "MEASURE_X"))
    assert css.bound == pytest.approx(0.01)
    assert css.caveat == CSS_CAVEAT
    with pytest.raises(ValueError):
        threshold_translate(0.0)


def test_single_pattern_locations_match_local():
    for g in GATE_PATTERNS:
        pat = elementary_pattern(g)
        # the schedules may order steps differently, but host the same locations
        a = sorted((l.kind, l.support) for l in enumerate_locations(single(pat), "paper"))
        b = sorted((l.kind, l.support) for l in local_locations(pat, "paper"))
        assert a == b
