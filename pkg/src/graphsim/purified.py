"""Coherent description of a pattern: measurements and frame updates as unitaries.

Register layout (big-endian): frame bits ``x_1..x_n z_1..z_n`` | pattern nodes in
node order | one outcome ancilla per measurement | fault environments.  A
measurement in basis ``b`` becomes: rotate ``b`` onto the computational basis, copy
the node's bit into a ``|+>`` ancilla with CZ followed by H, rotate back.  The
frame update is the basis permutation ``|e>|s> -> |e_out(e, s)>|s>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .faults import local_locations
from .pauli import PauliFrame, PauliOp, all_frames, all_paulis
from .patterns import AdaptiveBasis, Pattern, ideal_operator, run_pattern
from .statevec import (
    GATES,
    MAX_QUBITS,
    SQ2,
    CapacityError,
    MeasBasis,
    StateVec,
    ZeroBranchError,
    apply_cz,
    apply_matrix,
    apply_pauli,
    fidelity,
    phase_gate,
    tomography_inputs,
)

AMPLITUDE_TOL = 1e-10
MAX_NORM_DIM = 2**12
_PLUS = np.array([SQ2, SQ2], dtype=complex)


class NotReversible(ValueError):
    pass


# -- ops on batched tensors ---------------------------------------------------------


def _apply_perm(t: np.ndarray, table: np.ndarray, qubits) -> np.ndarray:
    """``|j> -> |table[j]>`` on the listed qubit axes (big-endian index over them)."""
    m = len(qubits)
    moved = np.moveaxis(t, list(qubits), list(range(m)))
    shape = moved.shape
    flat = moved.reshape(2**m, -1)
    out = np.empty_like(flat)
    out[table] = flat
    return np.moveaxis(out.reshape(shape), list(range(m)), list(qubits))


def apply_ops(t: np.ndarray, ops) -> np.ndarray:
    for op in ops:
        kind = op[0]
        if kind == "cz":
            t = apply_cz(t, op[1], op[2])
        elif kind == "matrix":
            t = apply_matrix(t, op[1], op[2])
        elif kind == "perm":
            t = _apply_perm(t, op[1], op[2])
        else:
            raise ValueError(f"unknown op {kind}")
    return t


def _rotation_ops(basis, q: int, controls, inverse: bool):
    """Ops mapping the measurement basis onto the computational basis (or back).

    Adaptive bases become a diagonal controlled by the parity of ``controls``.
    """
    if isinstance(basis, MeasBasis) and basis.kind == "z":
        return []
    H = [("matrix", GATES["H"], [q])]
    if isinstance(basis, AdaptiveBasis):
        c = len(controls)
        sign = 1 if inverse else -1
        diag = np.ones(2 ** (c + 1), dtype=complex)
        for idx in range(2 ** (c + 1)):
            bits = [(idx >> (c - j)) & 1 for j in range(c + 1)]
            if bits[-1]:
                phi = basis.phi1 if sum(bits[:-1]) % 2 else basis.phi0
                diag[idx] = np.exp(1j * sign * phi)
        D = [("matrix", np.diag(diag), list(controls) + [q])]
    else:
        D = [("matrix", phase_gate(basis.angle if inverse else -basis.angle), [q])]
    return H + D if inverse else D + H


# -- purified patterns ----------------------------------------------------------------


@dataclass(eq=False)
class PurifiedPattern:
    pattern: Pattern
    n_frame: int
    node_qubit: dict
    anc_qubit: tuple
    segments: list  # per default step: list of ops
    update: tuple | None  # frame-update op, or None when omitted
    n_qubits: int

    @property
    def frame_qubits(self) -> list[int]:
        return list(range(self.n_frame))

    @property
    def k(self) -> int:
        return len(self.anc_qubit)

    def ops(self, inserts: dict | None = None) -> list:
        """All ops in order; ``inserts[i]`` is placed right after step ``i`` (``-1``: first)."""
        inserts = inserts or {}
        out = list(inserts.get(-1, ()))
        for i, seg in enumerate(self.segments):
            out += seg
            out += inserts.get(i, ())
        if self.update is not None:
            out.append(self.update)
        return out

    def initial(self, e_in: PauliFrame, psi: StateVec, extra: int = 0) -> np.ndarray:
        """``|e_in> (x) P_{e_in}|psi> on the inputs, |+> elsewhere (x) |+>^k``, plus ``extra``
        environment qubits in ``|0>``."""
        pat = self.pattern
        twisted = apply_pauli(psi, e_in.lift()) if pat.n_in else psi
        frame = np.zeros(2**self.n_frame, dtype=complex)
        frame[int("".join(map(str, e_in.bits)) or "0", 2)] = 1
        others = [v for v in pat.node_ids if v not in pat.inputs]
        vec = np.kron(frame, twisted.amps)
        for _ in others:
            vec = np.kron(vec, _PLUS)
        for _ in range(self.k):
            vec = np.kron(vec, _PLUS)
        env = np.zeros(2**extra, dtype=complex)
        env[0] = 1
        vec = np.kron(vec, env)
        n = self.n_qubits + extra
        t = vec.reshape((2,) * n)
        src = list(range(self.n_frame, self.n_frame + len(pat.node_ids)))
        order = list(pat.inputs) + others
        dst = [self.node_qubit[v] for v in order]
        return np.moveaxis(t, src, dst)

    def matrix(self) -> np.ndarray:
        """Dense ``S_F`` on the whole register (for unitarity checks)."""
        d = 2**self.n_qubits
        t = np.eye(d, dtype=complex).reshape((2,) * self.n_qubits + (d,))
        return apply_ops(t, self.ops()).reshape(d, d)


def _frame_table(pat: Pattern, n_frame: int, k: int) -> np.ndarray:
    table = np.zeros(2 ** (n_frame + k), dtype=np.int64)
    for s in product((0, 1), repeat=k):
        images = set()
        for e in all_frames(pat.n_in):
            b = pat.branch(e.bits, s)
            out = tuple(int(v) for v in pat.rule.e_out(e.bits, s, b))
            images.add(out)
            src = int("".join(map(str, e.bits + s)) or "0", 2)
            dst = int("".join(map(str, out + s)) or "0", 2)
            table[src] = dst
        if len(images) != 2**n_frame:
            raise NotReversible(f"{pat.gate}: frame update is not a bijection for s={s}")
    return table


def purify_pattern(pat: Pattern, omit_frame_update: bool = False) -> PurifiedPattern:
    """Unitary form of a gate pattern (inputs and outputs of equal size)."""
    if pat.kind != "gate" or pat.n_in != pat.n_out:
        raise ValueError(f"{pat.gate}: only gate patterns with n_in == n_out can be purified")
    if pat.rule is None or not pat.rule.affine:
        raise ValueError(f"{pat.gate}: needs an affine update rule")
    n_frame = 2 * pat.n_in
    nodes = pat.node_ids
    k = len(pat.measurements)
    n = n_frame + len(nodes) + k
    if n > MAX_QUBITS:
        raise CapacityError(f"purified {pat.gate} needs {n} qubits")
    node_qubit = {v: n_frame + i for i, v in enumerate(nodes)}
    anc = tuple(n_frame + len(nodes) + j for j in range(k))
    segments = []
    for st in pat.default_steps():
        if st.kind in ("input", "prep"):
            segments.append([])
        elif st.kind == "cphase":
            a, b = st.nodes
            segments.append([("cz", node_qubit[a], node_qubit[b])])
        elif st.kind == "measure":
            j = st.meas
            m = pat.measurements[j]
            q = node_qubit[m.node]
            controls = []
            if isinstance(m.basis, AdaptiveBasis):
                controls = list(m.basis.frame_bits) + [anc[i] for i in m.basis.outcome_bits]
            seg = _rotation_ops(m.basis, q, controls, inverse=False)
            seg += [("cz", q, anc[j]), ("matrix", GATES["H"], [anc[j]])]
            seg += _rotation_ops(m.basis, q, controls, inverse=True)
            segments.append(seg)
    update = None
    if not omit_frame_update:
        update = ("perm", _frame_table(pat, n_frame, k), list(range(n_frame)) + list(anc))
    return PurifiedPattern(pat, n_frame, node_qubit, anc, segments, update, n)


def unitarity_residual(pp: PurifiedPattern) -> float:
    U = pp.matrix()
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2))


# -- verification ---------------------------------------------------------------------------


def _bits_index(bits) -> int:
    return int("".join(map(str, bits)) or "0", 2)


@dataclass
class PurifiedCase:
    e_in: str
    input: int
    outcomes: str
    amp_error: float
    infidelity: float
    frame_ok: bool


@dataclass
class PurifiedReport:
    gate: str
    cases: list
    tol: float
    unitarity: float

    @property
    def worst_amplitude_error(self) -> float:
        return max((c.amp_error for c in self.cases), default=0.0)

    @property
    def worst_infidelity(self) -> float:
        return max((c.infidelity for c in self.cases), default=0.0)

    @property
    def frame_mismatches(self) -> list:
        return [c for c in self.cases if not c.frame_ok]

    @property
    def failures(self) -> list:
        return [c for c in self.cases if c.amp_error > self.tol or c.infidelity > self.tol or not c.frame_ok]

    @property
    def passed(self) -> bool:
        return not self.failures and self.unitarity <= self.tol

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "passed": self.passed,
            "cases": len(self.cases),
            "worst_amplitude_error": self.worst_amplitude_error,
            "worst_infidelity": self.worst_infidelity,
            "frame_mismatches": len(self.frame_mismatches),
            "unitarity_residual": self.unitarity,
            "failures": [c.__dict__ for c in self.failures[:50]],
        }


def _expected_branch(pp: PurifiedPattern, e_out, s, out_state: StateVec, bases) -> np.ndarray:
    """``|e_out> (x) |phi_s> (x) out_state (x) |s>`` in register order."""
    pat = pp.pattern
    frame = np.zeros(2**pp.n_frame, dtype=complex)
    frame[_bits_index(e_out)] = 1
    measured = [m.node for m in pat.measurements]
    vec = np.kron(frame, out_state.amps)
    for j, _ in enumerate(measured):
        vec = np.kron(vec, bases[j].vectors()[s[j]])
    anc = np.zeros(2**pp.k, dtype=complex)
    anc[_bits_index(s)] = 1
    vec = np.kron(vec, anc)
    t = vec.reshape((2,) * pp.n_qubits)
    order = list(pat.outputs) + measured
    src = list(range(pp.n_frame, pp.n_frame + len(order)))
    dst = [pp.node_qubit[v] for v in order]
    return np.moveaxis(t, src, dst).reshape(-1)


def verify_purified(pp: PurifiedPattern, tol: float = AMPLITUDE_TOL) -> PurifiedReport:
    """Project the outcome ancillas on each ``|s>`` and compare with the incoherent run.

    Checks ``|c_s|^2`` against the branch probability, the product form
    ``|e_out> (x) |phi_s> (x) P_{e_out} F |psi>`` and that the frame register holds the
    incoherent rule's ``e_out``.
    """
    pat = pp.pattern
    F = ideal_operator(pat.gate)
    inputs = tomography_inputs(pat.n_in)
    ops = pp.ops()
    cases = []
    for e_in in all_frames(pat.n_in):
        for idx, psi in enumerate(inputs):
            t = apply_ops(pp.initial(e_in, psi), ops)
            anc_first = np.moveaxis(t, list(pp.anc_qubit), list(range(pp.k)))
            for s in product((0, 1), repeat=pp.k):
                proj = np.zeros_like(t)
                sel = anc_first[s]
                # put the projected slice back into the ancilla basis state |s>
                tmp = np.moveaxis(proj, list(pp.anc_qubit), list(range(pp.k)))
                tmp[s] = sel
                proj = np.moveaxis(tmp, list(range(pp.k)), list(pp.anc_qubit)).reshape(-1)
                c2 = float(np.vdot(proj, proj).real)
                twisted = apply_pauli(psi, e_in.lift()) if pat.n_in else psi
                try:
                    run = run_pattern(twisted, pat, e_in, outcomes=s)
                    p = run.probability
                except ZeroBranchError:
                    run, p = None, 0.0
                amp_err = abs(c2 - p)
                if run is None or c2 <= tol:
                    cases.append(PurifiedCase(str(e_in), idx, "".join(map(str, s)), amp_err, 0.0, True))
                    continue
                e_out = run.e_out.bits
                frame_mass = np.sum(
                    np.abs(proj.reshape((2**pp.n_frame, -1))[_bits_index(e_out)]) ** 2
                ) / c2
                ideal_out = StateVec(F @ psi.amps)
                ideal_out = apply_pauli(ideal_out, run.e_out.lift())
                want = _expected_branch(pp, e_out, s, ideal_out, run.bases)
                inc = _expected_branch(pp, e_out, s, run.state, run.bases)
                bad = max(
                    1 - fidelity(StateVec(want), StateVec(proj)),
                    1 - fidelity(StateVec(inc), StateVec(proj)),
                )
                cases.append(
                    PurifiedCase(str(e_in), idx, "".join(map(str, s)), amp_err, bad, frame_mass >= 1 - tol)
                )
    return PurifiedReport(pat.gate, cases, tol, unitarity_residual(pp))


# -- coherent faults ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoherentFault:
    """Unitary on (support qubits) (x) (environment) with its I (x) A0 part split off."""

    k: int
    d_env: int
    U: np.ndarray
    eta: float

    @property
    def env_qubits(self) -> int:
        return int(round(math.log2(self.d_env)))

    def good(self) -> np.ndarray:
        return np.kron(np.eye(2**self.k), identity_component(self.U, self.k, self.d_env))

    def bad(self) -> np.ndarray:
        return self.U - self.good()


def identity_component(U: np.ndarray, k: int, d_env: int) -> np.ndarray:
    """``A0 = Tr_S(U) / d_S``, the coefficient of the identity Pauli on the system."""
    d_s = 2**k
    T = U.reshape(d_s, d_env, d_s, d_env)
    return np.einsum("aiaj->ij", T) / d_s


def pauli_components(U: np.ndarray, k: int, d_env: int) -> dict:
    """``A_P = Tr_S((P (x) I) U) / d_S`` for every Pauli ``P`` on ``k`` qubits."""
    d_s = 2**k
    out = {}
    for P in all_paulis(k):
        M = np.kron(P.matrix().conj().T, np.eye(d_env)) @ U
        out[P.label] = np.einsum("aiaj->ij", M.reshape(d_s, d_env, d_s, d_env)) / d_s
    return out


def _bad_norm(U, k, d_env) -> float:
    B = U - np.kron(np.eye(2**k), identity_component(U, k, d_env))
    return float(np.linalg.norm(B, 2))


def _expm_herm(K: np.ndarray, theta: float) -> np.ndarray:
    w, V = np.linalg.eigh(K)
    return (V * np.exp(-1j * theta * w)) @ V.conj().T


def _random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    K = (A + A.conj().T) / 2
    return K / np.linalg.norm(K, 2)


def make_coherent_fault(k: int, d_env: int, eta: float, rng: np.random.Generator, tol: float = 1e-9) -> CoherentFault:
    """Random ``exp(-i theta K)`` with ``theta`` bisected so the bad part has norm ``eta``."""
    if not 0.0 <= eta < 1.0:
        raise ValueError("fault strength must lie in [0, 1)")
    if d_env < 1 or d_env & (d_env - 1):
        raise ValueError("environment dimension must be a power of two")
    d = 2**k * d_env
    if eta == 0.0:
        U = np.kron(np.eye(2**k), _expm_herm(_random_hermitian(d_env, rng), 1.0))
        return CoherentFault(k, d_env, U, _bad_norm(U, k, d_env))
    K = _random_hermitian(d, rng)
    f = lambda th: _bad_norm(_expm_herm(K, th), k, d_env)  # noqa: E731
    hi = 1e-3
    while f(hi) < eta:
        hi *= 2
        if hi > 64:
            raise ValueError(f"could not reach strength {eta}")
    lo = 0.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) < eta:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 or abs(f(mid) - eta) < tol:
            break
    U = _expm_herm(K, (lo + hi) / 2)
    return CoherentFault(k, d_env, U, _bad_norm(U, k, d_env))


def stochastic_fault(P: PauliOp, p: float) -> CoherentFault:
    """``sqrt(1-p) I (x) I + sqrt(p) P (x) J`` with ``J = |1><0| - |0><1|``: the environment
    flag records whether the Pauli happened."""
    J = np.array([[0, -1], [1, 0]], dtype=complex)
    d_s = 2**P.n
    U = math.sqrt(1 - p) * np.eye(2 * d_s, dtype=complex) + math.sqrt(p) * np.kron(P.matrix(), J)
    return CoherentFault(P.n, 2, U, _bad_norm(U, P.n, 2))


# -- bad-part norm -----------------------------------------------------------------------


def power_iteration_norm(B: np.ndarray, tol: float = 1e-8, max_iter: int = 100_000, seed: int = 0) -> float:
    """Largest singular value of ``B`` by power iteration on ``B^dag B``."""
    if B.size == 0:
        return 0.0
    G = B.conj().T @ B
    rng = np.random.default_rng(seed)
    v = rng.normal(size=G.shape[0]) + 1j * rng.normal(size=G.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        new = float(np.vdot(v, w).real)
        v = w / nw
        if abs(new - lam) <= tol * max(new, 1e-300):
            lam = new
            break
        lam = new
    return math.sqrt(max(lam, 0.0))


@dataclass
class NormResult:
    bad_norm: float
    L: int
    etas: tuple
    bound_max: float
    bound_sum: float

    @property
    def passed(self) -> bool:
        return self.bad_norm <= self.bound_max + 1e-12 and self.bad_norm <= self.bound_sum + 1e-12


def _fault_ops(pp: PurifiedPattern, placements, env_of, use_good: bool):
    inserts: dict = {}
    for (loc_nodes, position), (env, fault) in zip(placements, env_of):
        qubits = [pp.node_qubit[v] for v in loc_nodes] + list(env)
        M = fault.good() if use_good else fault.U
        inserts.setdefault(position, []).append(("matrix", M, qubits))
    return inserts


def evolution_maps(pp: PurifiedPattern, faults, shared_env: bool = False):
    """Full and all-good evolutions restricted to frame (x) inputs (x) environments.

    ``faults`` pairs each paper-mode location of the pattern (in order) with a
    CoherentFault.  Returns ``(M_full, M_good)`` as matrices (register x domain).
    """
    pat = pp.pattern
    locs = local_locations(pat, "paper")
    if len(faults) != len(locs):
        raise ValueError(f"{pat.gate} has {len(locs)} locations, got {len(faults)} faults")
    from .composer import single

    nm = single(pat).instances[0].node_map
    back = {g: l for l, g in nm.items()}
    placements = [(tuple(back[v] for v in loc.support), loc.position) for loc in locs]
    if shared_env:
        e = faults[0].env_qubits
        if any(f.env_qubits != e for f in faults):
            raise ValueError("shared environment needs equal environment sizes")
        env_q = [tuple(range(pp.n_qubits, pp.n_qubits + e))] * len(faults)
        n_env = e
    else:
        env_q, start = [], pp.n_qubits
        for f in faults:
            env_q.append(tuple(range(start, start + f.env_qubits)))
            start += f.env_qubits
        n_env = start - pp.n_qubits
    n_tot = pp.n_qubits + n_env
    dom_q = pp.frame_qubits + [pp.node_qubit[v] for v in pat.inputs] + list(range(pp.n_qubits, n_tot))
    dim_dom = 2 ** len(dom_q)
    if 2**n_tot > MAX_NORM_DIM:
        raise CapacityError(f"bad-part computation needs {n_tot} qubits")
    # batch of domain basis states, fixed |+> on auxiliary nodes and ancillas
    fixed = [q for q in range(n_tot) if q not in dom_q]
    t0 = np.zeros((dim_dom,) + (2,) * len(fixed) + (dim_dom,), dtype=complex)
    plus = np.full((2,) * len(fixed), 2 ** (-len(fixed) / 2), dtype=complex)
    for j in range(dim_dom):
        t0[(j, ...) + (j,)] = plus
    t0 = t0.reshape((2,) * n_tot + (dim_dom,))
    t = np.moveaxis(t0, list(range(n_tot)), dom_q + fixed)
    env_of = list(zip(env_q, faults))
    full = apply_ops(t, pp.ops(_fault_ops(pp, placements, env_of, False)))
    good = apply_ops(t, pp.ops(_fault_ops(pp, placements, env_of, True)))
    return full.reshape(-1, dim_dom), good.reshape(-1, dim_dom)


def bad_part_norm(pp: PurifiedPattern, faults, shared_env: bool = False, tol: float = 1e-8) -> NormResult:
    """Sup norm of (full evolution - all-good evolution), with the ``L eta_max`` and
    ``sum eta`` bounds."""
    M_full, M_good = evolution_maps(pp, faults, shared_env)
    norm = power_iteration_norm(M_full - M_good, tol=tol)
    etas = tuple(f.eta for f in faults)
    L = len(faults)
    return NormResult(norm, L, etas, L * max(etas, default=0.0), sum(etas))


def flag_probabilities(pp: PurifiedPattern, faults, e_in: PauliFrame, psi: StateVec) -> dict:
    """Squared norms of the branches labelled by the environment flag strings."""
    pat = pp.pattern
    locs = local_locations(pat, "paper")
    from .composer import single

    nm = single(pat).instances[0].node_map
    back = {g: l for l, g in nm.items()}
    placements = [(tuple(back[v] for v in loc.support), loc.position) for loc in locs]
    env_q, start = [], pp.n_qubits
    for f in faults:
        env_q.append(tuple(range(start, start + f.env_qubits)))
        start += f.env_qubits
    t = pp.initial(e_in, psi, extra=start - pp.n_qubits)
    out = apply_ops(t, pp.ops(_fault_ops(pp, placements, list(zip(env_q, faults)), False)))
    env_axes = list(range(pp.n_qubits, start))
    flat = np.moveaxis(out, env_axes, list(range(len(env_axes)))).reshape(2 ** len(env_axes), -1)
    probs = np.sum(np.abs(flat) ** 2, axis=1)
    return {tuple(int(b) for b in format(i, f"0{len(env_axes)}b")) if env_axes else (): float(v) for i, v in enumerate(probs)}


def norm_study(
    pat: Pattern,
    etas=(0.01, 0.1),
    draws: int = 20,
    seed: int = 0,
    d_env: int = 2,
    heterogeneous: bool = False,
    shared_env: bool = False,
) -> list[dict]:
    """Rows ``(pattern, L, eta, draw, bad_norm, bound, pass)`` over random coherent faults.

    With ``heterogeneous`` each location draws its strength uniformly from
    ``[eta / 10, eta]`` and the bound is ``L * max(eta_l)``.
    """
    pp = purify_pattern(pat)
    locs = local_locations(pat, "paper")
    rows = []
    children = np.random.SeedSequence(seed).spawn(len(etas) * draws)
    for i, eta in enumerate(etas):
        for d in range(draws):
            rng = np.random.default_rng(children[i * draws + d])
            strengths = rng.uniform(eta / 10, eta, len(locs)) if heterogeneous else [eta] * len(locs)
            faults = [make_coherent_fault(len(l.support), d_env, float(s), rng) for l, s in zip(locs, strengths)]
            r = bad_part_norm(pp, faults, shared_env=shared_env)
            rows.append(
                {
                    "pattern": pat.gate,
                    "L": r.L,
                    "eta": eta,
                    "draw": d,
                    "bad_norm": r.bad_norm,
                    "bound": r.bound_max,
                    "pass": r.passed,
                }
            )
    return rows
