from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsim.faults import local_locations
from graphsim.patterns import DIRECT_PATTERNS, GATE_PATTERNS, elementary_pattern, identity_pattern
from graphsim.pauli import PauliFrame, PauliOp
from graphsim.purified import (
    bad_part_norm,
    flag_probabilities,
    identity_component,
    make_coherent_fault,
    norm_study,
    pauli_components,
    power_iteration_norm,
    purify_pattern,
    stochastic_fault,
    unitarity_residual,
    verify_purified,
)
from graphsim.statevec import StateVec


@pytest.mark.parametrize("gate", GATE_PATTERNS)
def test_purified_matches_incoherent_runs(gate):
    rep = verify_purified(purify_pattern(elementary_pattern(gate)))
    assert rep.passed, rep.to_dict()
    assert rep.worst_amplitude_error < 1e-10
    assert rep.unitarity < 1e-10


def test_identity_pattern():
    assert verify_purified(purify_pattern(identity_pattern())).passed


def test_direct_patterns_are_not_purified():
    for g in DIRECT_PATTERNS:
        with pytest.raises(ValueError):
            purify_pattern(elementary_pattern(g))


def test_omitting_the_frame_update_is_caught():
    rep = verify_purified(purify_pattern(elementary_pattern("S"), omit_frame_update=True))
    assert not rep.passed
    assert rep.frame_mismatches
    # the amplitudes themselves are unchanged; only the frame register is wrong
    assert rep.worst_amplitude_error < 1e-10


@pytest.mark.parametrize("gate", ["H", "CPHASE"])
def test_purified_map_is_unitary(gate):
    pp = purify_pattern(elementary_pattern(gate))
    M = pp.matrix()
    assert np.allclose(M.conj().T @ M, np.eye(M.shape[0]), atol=1e-10)
    assert unitarity_residual(pp) < 1e-10


def test_power_iteration_matches_svd():
    rng = np.random.default_rng(0)
    for shape in [(1, 1), (5, 3), (8, 8), (16, 4)]:
        B = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        assert power_iteration_norm(B, tol=1e-12) == pytest.approx(np.linalg.norm(B, 2), rel=1e-6)
    assert power_iteration_norm(np.zeros((4, 4))) == 0.0


@given(st.integers(1, 2), st.floats(0.0, 0.9), st.integers(0, 2**32 - 1))
@settings(max_examples=20)
def test_coherent_fault_strength(k, eta, seed):
    f = make_coherent_fault(k, 2, eta, np.random.default_rng(seed))
    d = 2 ** (k + 1)
    assert np.allclose(f.U.conj().T @ f.U, np.eye(d), atol=1e-10)
    assert f.eta == pytest.approx(eta, abs=1e-7)
    assert np.linalg.norm(f.bad(), 2) == pytest.approx(f.eta, abs=1e-9)


def test_fault_decomposition():
    f = make_coherent_fault(1, 2, 0.3, np.random.default_rng(2))
    comps = pauli_components(f.U, 1, 2)
    rebuilt = sum(np.kron(PauliOp.from_label(lab).matrix(), A) for lab, A in comps.items())
    assert np.allclose(rebuilt, f.U)
    assert np.allclose(comps["+I"], identity_component(f.U, 1, 2))
    with pytest.raises(ValueError):
        make_coherent_fault(1, 2, 1.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        make_coherent_fault(1, 3, 0.1, np.random.default_rng(0))


def test_cphase_bad_norm_equals_eta():
    pp = purify_pattern(elementary_pattern("CPHASE"))
    f = make_coherent_fault(2, 2, 0.2, np.random.default_rng(1))
    assert bad_part_norm(pp, [f]).bad_norm == pytest.approx(0.2, abs=1e-6)


def test_zero_strength_faults_have_no_bad_part():
    pp = purify_pattern(elementary_pattern("H"))
    rng = np.random.default_rng(3)
    faults = [make_coherent_fault(len(l.support), 2, 0.0, rng) for l in local_locations(pp.pattern, "paper")]
    assert bad_part_norm(pp, faults).bad_norm < 1e-7


def test_wrong_fault_count():
    pp = purify_pattern(elementary_pattern("S"))
    with pytest.raises(ValueError):
        bad_part_norm(pp, [make_coherent_fault(1, 2, 0.1, np.random.default_rng(0))])


def test_bad_norm_agrees_with_svd():
    from graphsim.purified import evolution_maps

    pp = purify_pattern(elementary_pattern("H"))
    rng = np.random.default_rng(7)
    faults = [make_coherent_fault(len(l.support), 2, 0.05, rng) for l in local_locations(pp.pattern, "paper")]
    full, good = evolution_maps(pp, faults)
    r = bad_part_norm(pp, faults, tol=1e-12)
    assert r.bad_norm == pytest.approx(np.linalg.norm(full - good, 2), rel=1e-5)
    assert r.passed


@pytest.mark.parametrize("gate", ["H", "S", "T"])
def test_norm_study_bounds(gate):
    rows = norm_study(elementary_pattern(gate), etas=(0.05,), draws=3, seed=1)
    assert len(rows) == 3
    assert all(r["pass"] and r["bad_norm"] <= r["bound"] + 1e-12 for r in rows)


def test_heterogeneous_and_shared_environment():
    rows = norm_study(elementary_pattern("H"), etas=(0.1,), draws=3, seed=2, heterogeneous=True)
    assert all(r["pass"] for r in rows)
    rows = norm_study(elementary_pattern("H"), etas=(0.1,), draws=3, seed=2, shared_env=True)
    assert all(r["pass"] for r in rows)


def test_norm_study_is_seeded():
    a = norm_study(elementary_pattern("H"), etas=(0.1,), draws=2, seed=9)
    b = norm_study(elementary_pattern("H"), etas=(0.1,), draws=2, seed=9)
    assert a == b


def test_stochastic_flags_reproduce_path_probabilities():
    pat = elementary_pattern("H")
    pp = purify_pattern(pat)
    p = 0.3
    locs = local_locations(pat, "paper")
    paulis = [PauliOp.from_label("XZ"), PauliOp.from_label("Z")]
    faults = [stochastic_fault(P, p) for P in paulis]
    probs = flag_probabilities(pp, faults, PauliFrame.zero(1), StateVec.zeros(1))
    assert sum(probs.values()) == pytest.approx(1.0)
    # flags 00, 01, 10, 11 carry the classical path weights
    assert probs[(0, 0)] == pytest.approx((1 - p) ** 2)
    assert probs[(1, 1)] == pytest.approx(p**2)
    assert probs[(0, 1)] == pytest.approx(p * (1 - p))
