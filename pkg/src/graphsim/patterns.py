"""Elementary measurement patterns, byproduct update rules and the composability check.

A pattern consumes ``n_in`` input qubits carrying a known byproduct ``P_{e_in}`` and
produces ``n_out`` output qubits carrying ``P_{e_out}``, where ``e_out`` is a GF(2)-affine
function of ``e_in`` and the outcomes.  Update rules are never typed in by hand: they
are found by brute-force search over Pauli candidates and then fitted over GF(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product

import numpy as np

from .gf2 import NotAffine, fit_linear, matvec
from .graphstate import Step
from .pauli import PauliFrame, all_frames
from .register import Register
from .statevec import (
    GATES,
    SQ2,
    MeasBasis,
    StateVec,
    ZeroBranchError,
    apply_pauli,
    fidelity,
    tomography_inputs,
)

GATE_PATTERNS = ("H", "S", "T", "CPHASE")
DIRECT_PATTERNS = ("PREP_PLUS", "MEASURE_X", "MEASURE_Y", "MEASURE_Z")
ROLES = ("input", "aux", "output", "io")

FIDELITY_TOL = 1e-10


class UnknownGate(ValueError):
    pass


class NoCandidate(ValueError):
    """No Pauli frame explains a pattern output: the pattern is wrong."""


@dataclass(frozen=True)
class AdaptiveBasis:
    """XY-plane basis chosen by a GF(2)-linear predicate.

    The predicate is the parity of the listed local input-frame bits and earlier
    outcomes of the same pattern; ``phi0`` is used when it is 0, ``phi1`` otherwise.
    """

    frame_bits: tuple[int, ...]
    outcome_bits: tuple[int, ...]
    phi0: float
    phi1: float

    def select(self, e_in, outcomes) -> int:
        bit = 0
        for j in self.frame_bits:
            bit ^= int(e_in[j])
        for j in self.outcome_bits:
            if outcomes[j] is None:
                raise ValueError(f"adaptive basis needs outcome {j} which is not available yet")
            bit ^= int(outcomes[j])
        return bit

    def basis(self, bit: int) -> MeasBasis:
        return MeasBasis.xy(self.phi1 if bit else self.phi0)

    def swapped(self) -> AdaptiveBasis:
        return replace(self, phi0=self.phi1, phi1=self.phi0)


@dataclass(frozen=True)
class MeasStep:
    node: int
    basis: MeasBasis | AdaptiveBasis

    @property
    def adaptive(self) -> bool:
        return isinstance(self.basis, AdaptiveBasis)


@dataclass(frozen=True, eq=False)
class AffineRule:
    """``e_out = A e_in + B s + c`` over GF(2)."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray

    def __call__(self, e_in, outcomes) -> np.ndarray:
        return (matvec(self.A, e_in) + matvec(self.B, outcomes) + self.c) % 2

    def __eq__(self, other):
        return (
            isinstance(other, AffineRule)
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.c, other.c)
        )


@dataclass(frozen=True, eq=False)
class UpdateRule:
    """Per adaptive branch affine maps, plus a readout matrix for measurement patterns.

    ``readout`` maps the input frame to the flips of the classical results:
    ``result = s + R e_in``.  ``table`` is filled instead of ``branches`` when the
    dependence is not affine.
    """

    branches: tuple[AffineRule, ...] = ()
    readout: np.ndarray | None = None
    table: dict | None = None
    ambiguous: tuple = ()

    @property
    def affine(self) -> bool:
        return self.table is None

    def e_out(self, e_in, outcomes, branch: int = 0) -> np.ndarray:
        e_in = np.asarray(e_in, dtype=np.int64)
        s = np.asarray(outcomes, dtype=np.int64)
        if self.table is not None:
            return np.array(self.table[(branch, tuple(e_in), tuple(s))], dtype=np.int64)
        return self.branches[branch](e_in, s)

    def results(self, e_in, outcomes) -> np.ndarray:
        if self.readout is None:
            return np.zeros(0, dtype=np.int64)
        return (np.asarray(outcomes, dtype=np.int64) + matvec(self.readout, e_in)) % 2


@dataclass(frozen=True, eq=False)
class Pattern:
    gate: str
    nodes: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int], ...]
    measurements: tuple[MeasStep, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    rule: UpdateRule | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [v for v, _ in self.nodes]
        roles = dict(self.nodes)
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        if any(r not in ROLES for r in roles.values()):
            raise ValueError(f"unknown role in {self.nodes}")
        measured = [m.node for m in self.measurements]
        if len(set(measured)) != len(measured):
            raise ValueError("a node is measured twice")
        for v, r in self.nodes:
            should_measure = r in ("input", "aux")
            if should_measure != (v in measured):
                raise ValueError(f"node {v} with role {r} measured={v in measured}")
        if tuple(v for v in self.inputs) != tuple(v for v in ids if roles[v] in ("input", "io")):
            raise ValueError("inputs must list the input/io nodes in node order")
        if set(self.outputs) != {v for v in ids if roles[v] in ("output", "io")}:
            raise ValueError("outputs must be exactly the output/io nodes")
        for u, v in self.edges:
            if u == v or u not in roles or v not in roles:
                raise ValueError(f"bad edge {(u, v)}")

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    @property
    def n_io(self) -> int:
        return max(self.n_in, self.n_out)

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.nodes)

    @property
    def role(self) -> dict:
        return dict(self.nodes)

    @property
    def kind(self) -> str:
        if self.gate.startswith("MEASURE"):
            return "measure"
        if self.gate.startswith("PREP"):
            return "prep"
        return "gate"

    @property
    def adaptive_steps(self) -> list[int]:
        return [j for j, m in enumerate(self.measurements) if m.adaptive]

    def counts(self) -> tuple[int, int, int]:
        """``(nodes, edges, measurements)``."""
        return len(self.nodes), len(self.edges), len(self.measurements)

    def default_steps(self) -> tuple[Step, ...]:
        steps = [Step("input", (v,)) for v in self.inputs]
        steps += [Step("prep", (v,)) for v in self.node_ids if v not in self.inputs]
        steps += [Step("cphase", tuple(e), edge=i) for i, e in enumerate(self.edges)]
        steps += [Step("measure", (m.node,), j) for j, m in enumerate(self.measurements)]
        return tuple(steps)

    def basis_for(self, j: int, e_in, outcomes) -> tuple[MeasBasis, int | None]:
        step = self.measurements[j]
        if step.adaptive:
            bit = step.basis.select(e_in, outcomes)
            return step.basis.basis(bit), bit
        return step.basis, None

    def branch(self, e_in, outcomes) -> int:
        b = 0
        for k, j in enumerate(self.adaptive_steps):
            b |= self.measurements[j].basis.select(e_in, outcomes) << k
        return b

    def with_rule(self, rule: UpdateRule) -> Pattern:
        return replace(self, rule=rule)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "gate": self.gate,
            "nodes": [{"id": v, "role": r} for v, r in self.nodes],
            "edges": [list(e) for e in self.edges],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "schedule": [_step_to_dict(m) for m in self.measurements],
        }
        if self.rule is not None:
            d["update_rule"] = _rule_to_dict(self.rule)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Pattern:
        rule = _rule_from_dict(d["update_rule"]) if "update_rule" in d else None
        return cls(
            gate=d["gate"].upper(),
            nodes=tuple((n["id"], n["role"]) for n in d["nodes"]),
            edges=tuple(tuple(e) for e in d["edges"]),
            measurements=tuple(_step_from_dict(s) for s in d["schedule"]),
            inputs=tuple(d["inputs"]),
            outputs=tuple(d["outputs"]),
            rule=rule,
        )


def _bits(row) -> str:
    return "".join(str(int(b)) for b in row)


def _unbits(rows, n_cols: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, n_cols), dtype=np.uint8)
    return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), n_cols)


def _step_to_dict(m: MeasStep) -> dict:
    b = m.basis
    if isinstance(b, AdaptiveBasis):
        basis = {
            "adaptive": {
                "frame_bits": list(b.frame_bits),
                "outcome_bits": list(b.outcome_bits),
                "phi0": b.phi0,
                "phi1": b.phi1,
            }
        }
    elif b.kind == "z":
        basis = {"fixed": "z"}
    else:
        basis = {"fixed": b.angle}
    return {"node": m.node, "basis": basis}


def _step_from_dict(d: dict) -> MeasStep:
    b = d["basis"]
    if "adaptive" in b:
        a = b["adaptive"]
        basis = AdaptiveBasis(tuple(a["frame_bits"]), tuple(a["outcome_bits"]), a["phi0"], a["phi1"])
    elif b["fixed"] == "z":
        basis = MeasBasis.Z()
    else:
        basis = MeasBasis.xy(float(b["fixed"]))
    return MeasStep(d["node"], basis)


def _rule_to_dict(rule: UpdateRule) -> dict:
    d: dict = {}
    if rule.table is not None:
        d["table"] = [
            {"branch": b, "e_in": _bits(e), "s": _bits(s), "e_out": _bits(v)}
            for (b, e, s), v in sorted(rule.table.items())
        ]
    else:
        d["branches"] = [
            {
                "A": [_bits(r) for r in br.A],
                "B": [_bits(r) for r in br.B],
                "c": _bits(br.c),
                "n_in": int(br.A.shape[1]),
                "n_outcomes": int(br.B.shape[1]),
            }
            for br in rule.branches
        ]
    if rule.readout is not None:
        d["readout"] = [_bits(r) for r in rule.readout]
        d["readout_cols"] = int(rule.readout.shape[1])
    return d


def _rule_from_dict(d: dict) -> UpdateRule:
    readout = None
    if "readout" in d:
        readout = _unbits(d["readout"], d["readout_cols"])
    if "table" in d:
        table = {
            (t["branch"], tuple(int(c) for c in t["e_in"]), tuple(int(c) for c in t["s"])): tuple(
                int(c) for c in t["e_out"]
            )
            for t in d["table"]
        }
        return UpdateRule(readout=readout, table=table)
    branches = []
    for br in d["branches"]:
        c = np.array([int(ch) for ch in br["c"]], dtype=np.uint8)
        branches.append(
            AffineRule(_unbits(br["A"], br["n_in"]), _unbits(br["B"], br["n_outcomes"]), c)
        )
    return UpdateRule(branches=tuple(branches), readout=readout)


# -- ideal operations ---------------------------------------------------------------


def ideal_operator(gate: str) -> np.ndarray:
    """Matrix ``F`` of shape ``(2**n_out, 2**n_in)`` for gate and preparation patterns."""
    g = gate.upper()
    if g == "PREP_PLUS":
        return np.array([[SQ2], [SQ2]], dtype=complex)
    if g == "I":
        return GATES["I"]
    if g in GATE_PATTERNS:
        return GATES[g]
    raise UnknownGate(gate)


def ideal_basis(gate: str) -> MeasBasis:
    return {"MEASURE_X": MeasBasis.X(), "MEASURE_Y": MeasBasis.Y(), "MEASURE_Z": MeasBasis.Z()}[
        gate.upper()
    ]


# -- execution -------------------------------------------------------------------


@dataclass
class PatternRun:
    state: StateVec
    e_out: PauliFrame | None
    outcomes: tuple[int, ...]
    probability: float
    branch: int
    results: tuple[int, ...] = ()
    bases: tuple[MeasBasis, ...] = ()


def run_pattern(
    state: StateVec,
    pat: Pattern,
    e_in: PauliFrame | None = None,
    outcomes=None,
    rng: np.random.Generator | None = None,
    injections=(),
    steps=None,
) -> PatternRun:
    """Run ``pat`` on a fragment holding exactly its input qubits (in wire order).

    ``outcomes`` forces measurement results; otherwise ``rng`` samples them.
    ``injections`` are ``(position, nodes, op)`` triples: ``op`` (a PauliOp or a
    matrix) is applied to ``nodes`` right after step ``position`` (``-1``: at start).
    """
    if state.n != pat.n_in:
        raise ValueError(f"{pat.gate} pattern expects {pat.n_in} input qubits, got {state.n}")
    e_in = PauliFrame.zero(pat.n_in) if e_in is None else e_in
    if e_in.n != pat.n_in:
        raise ValueError(f"frame on {e_in.n} qubits for a {pat.n_in}-input pattern")
    e = e_in.bits
    steps = pat.default_steps() if steps is None else tuple(steps)
    by_pos: dict = {}
    for pos, nodes, op in injections:
        by_pos.setdefault(pos, []).append((nodes, op))
    reg = Register(state, pat.inputs)
    m = len(pat.measurements)
    outs: list = [None] * m
    bases: list = [None] * m
    prob = 1.0
    for nodes, op in by_pos.get(-1, ()):
        reg.apply(op, nodes)
    for i, st in enumerate(steps):
        if st.kind == "prep":
            reg.add(st.nodes[0])
        elif st.kind == "cphase":
            reg.cz(*st.nodes)
        elif st.kind == "measure":
            j = st.meas
            basis, _ = pat.basis_for(j, e, outs)
            forced = None if outcomes is None else outcomes[j]
            bit, p = reg.measure(st.nodes[0], basis, rng=rng, forced=forced)
            outs[j] = bit
            bases[j] = basis
            prob *= p
        for nodes, op in by_pos.get(i, ()):
            reg.apply(op, nodes)
    branch = pat.branch(e, outs)
    e_out = None
    results: tuple = ()
    if pat.rule is not None:
        e_out = PauliFrame(tuple(pat.rule.e_out(e, outs, branch)))
        results = tuple(int(b) for b in pat.rule.results(e, outs))
    return PatternRun(reg.state(pat.outputs), e_out, tuple(outs), prob, branch, results, tuple(bases))


def _frame_twisted(psi: StateVec, e: PauliFrame) -> StateVec:
    return apply_pauli(psi, e.lift()) if e.n else psi


def _outcome_strings(m: int):
    return list(product((0, 1), repeat=m))


# -- derivation --------------------------------------------------------------------


def derive_update_rule(pat: Pattern, ideal: np.ndarray | None = None) -> UpdateRule:
    """Find ``e_out`` for every ``(e_in, s)`` by Pauli-candidate search, then fit GF(2) maps."""
    if pat.n_io > 2:
        raise ValueError("derivation is limited to patterns with at most 2 inputs/outputs")
    if pat.kind == "measure":
        return _derive_readout(pat)
    F = ideal_operator(pat.gate) if ideal is None else np.asarray(ideal, dtype=complex)
    inputs = tomography_inputs(pat.n_in)
    candidates = all_frames(pat.n_out)
    m = len(pat.measurements)
    points: dict = {}
    ambiguous = []
    for e_in in all_frames(pat.n_in):
        for s in _outcome_strings(m):
            outs = []
            for psi in inputs:
                try:
                    run = run_pattern(_frame_twisted(psi, e_in), pat, e_in, outcomes=s)
                except ZeroBranchError:
                    continue
                outs.append((StateVec(F @ psi.amps), run))
            if not outs:
                continue
            branch = outs[0][1].branch
            good = [
                c
                for c in candidates
                if all(
                    fidelity(apply_pauli(ideal_out, c.lift()) if c.n else ideal_out, run.state)
                    >= 1 - FIDELITY_TOL
                    for ideal_out, run in outs
                )
            ]
            if not good:
                raise NoCandidate(f"{pat.gate}: no frame explains e_in={e_in}, s={s}")
            if len(good) > 1:
                ambiguous.append((e_in.bits, s, tuple(c.bits for c in good)))
            points.setdefault(branch, []).append((e_in.bits, s, good[0].bits))
    n_branches = 1 << len(pat.adaptive_steps)
    branches = []
    try:
        for b in range(n_branches):
            pts = points.get(b, [])
            X = np.array([list(e) + list(s) + [1] for e, s, _ in pts], dtype=np.uint8).reshape(
                len(pts), 2 * pat.n_in + m + 1
            )
            Y = np.array([list(v) for _, _, v in pts], dtype=np.uint8).reshape(len(pts), 2 * pat.n_out)
            M = fit_linear(X, Y)
            n_e = 2 * pat.n_in
            branches.append(AffineRule(M[:, :n_e], M[:, n_e : n_e + m], M[:, -1].copy()))
    except NotAffine:
        table = {(b, e, tuple(s)): v for b, pts in points.items() for e, s, v in pts}
        return UpdateRule(table=table, ambiguous=tuple(ambiguous))
    return UpdateRule(branches=tuple(branches), ambiguous=tuple(ambiguous))


def _derive_readout(pat: Pattern) -> UpdateRule:
    """For a direct measurement pattern find which frame bits flip the raw outcome."""
    basis = ideal_basis(pat.gate)
    inputs = tomography_inputs(pat.n_in)
    rows, flips = [], []
    for e_in in all_frames(pat.n_in):
        found = None
        for f in (0, 1):
            ok = True
            for psi in inputs:
                p_ideal = _branch_prob(psi, basis)
                twisted = _frame_twisted(psi, e_in)
                for s in (0, 1):
                    try:
                        p = run_pattern(twisted, pat, e_in, outcomes=(s,)).probability
                    except ZeroBranchError:
                        p = 0.0
                    if abs(p - p_ideal[s ^ f]) > FIDELITY_TOL:
                        ok = False
            if ok:
                found = f
                break
        if found is None:
            raise NoCandidate(f"{pat.gate}: no classical flip explains e_in={e_in}")
        rows.append(list(e_in.bits) + [1])
        flips.append([found])
    M = fit_linear(np.array(rows), np.array(flips))
    readout = M[:, :-1]
    empty = AffineRule(np.zeros((0, 2 * pat.n_in), np.uint8), np.zeros((0, 1), np.uint8), np.zeros(0, np.uint8))
    if M[0, -1]:
        raise NoCandidate(f"{pat.gate}: readout needs a constant flip")
    return UpdateRule(branches=(empty,), readout=readout)


def _branch_prob(psi: StateVec, basis: MeasBasis) -> np.ndarray:
    vecs = basis.vectors()
    return np.array([abs(np.vdot(vecs[b], psi.amps)) ** 2 for b in (0, 1)])


# -- catalog -------------------------------------------------------------------------


def _raw_pattern(gate: str) -> Pattern:
    g = gate.upper()
    X, Y = MeasBasis.X(), MeasBasis.Y()
    if g == "H":
        return Pattern("H", ((0, "input"), (1, "output")), ((0, 1),), (MeasStep(0, X),), (0,), (1,))
    if g == "S":
        return Pattern(
            "S",
            ((0, "input"), (1, "aux"), (2, "output")),
            ((0, 1), (1, 2)),
            (MeasStep(0, Y), MeasStep(1, X)),
            (0,),
            (2,),
        )
    if g == "T":
        mt = AdaptiveBasis(frame_bits=(0,), outcome_bits=(), phi0=math.pi / 4, phi1=-math.pi / 4)
        return Pattern(
            "T",
            ((0, "input"), (1, "aux"), (2, "output")),
            ((0, 1), (1, 2)),
            (MeasStep(0, mt), MeasStep(1, X)),
            (0,),
            (2,),
        )
    if g in ("CPHASE", "CZ"):
        return Pattern("CPHASE", ((0, "io"), (1, "io")), ((0, 1),), (), (0, 1), (0, 1))
    if g == "I":
        return Pattern("I", ((0, "io"),), (), (), (0,), (0,))
    if g == "PREP_PLUS":
        return Pattern("PREP_PLUS", ((0, "output"),), (), (), (), (0,))
    if g in ("MEASURE_X", "MEASURE_Y", "MEASURE_Z"):
        basis = ideal_basis(g)
        return Pattern(g, ((0, "input"),), (), (MeasStep(0, basis),), (0,), ())
    raise UnknownGate(gate)


def _flip_adaptive(pat: Pattern) -> Pattern:
    meas = tuple(
        MeasStep(m.node, m.basis.swapped()) if m.adaptive else m for m in pat.measurements
    )
    return replace(pat, measurements=meas)


@lru_cache(maxsize=None)
def elementary_pattern(gate: str) -> Pattern:
    """Catalog pattern for ``gate`` with its machine-derived update rule.

    For adaptive patterns both sign conventions of the adaptive angles are tried and
    the first that admits a valid rule everywhere is kept.
    """
    raw = _raw_pattern(gate)
    tries = [raw, _flip_adaptive(raw)] if raw.adaptive_steps else [raw]
    last = None
    for cand in tries:
        try:
            rule = derive_update_rule(cand)
        except NoCandidate as exc:
            last = exc
            continue
        return cand.with_rule(rule)
    raise NoCandidate(f"no sign convention works for {gate}: {last}")


def identity_pattern() -> Pattern:
    return elementary_pattern("I")


# -- composability verification ----------------------------------------------------------


@dataclass
class CellResult:
    e_in: str
    outcomes: str
    worst_infidelity: float
    failed_inputs: int
    n_inputs: int
    probability_mass: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failed_inputs == 0


@dataclass
class ComposabilityReport:
    gate: str
    cells: list[CellResult]
    prob_sum_error: float
    tol: float

    @property
    def worst_infidelity(self) -> float:
        return max((c.worst_infidelity for c in self.cells), default=0.0)

    @property
    def failed_cells(self) -> list[CellResult]:
        return [c for c in self.cells if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failed_cells and self.prob_sum_error <= self.tol

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "passed": self.passed,
            "worst_infidelity": self.worst_infidelity,
            "prob_sum_error": self.prob_sum_error,
            "n_cells": len(self.cells),
            "failed_cells": [
                {"e_in": c.e_in, "s": c.outcomes, "failed_inputs": c.failed_inputs, "worst": c.worst_infidelity}
                for c in self.failed_cells
            ],
        }


def verify_composability(pat: Pattern, ideal=None, tol: float = FIDELITY_TOL) -> ComposabilityReport:
    """Exhaustively check that every ``(e_in, s)`` branch simulates the ideal operation.

    For gate and preparation patterns the branch output must be proportional to
    ``P_{e_out} F |psi>``; for measurement patterns the frame-corrected outcome
    distribution must equal the ideal one.
    """
    if pat.rule is None:
        raise ValueError("pattern has no update rule")
    if pat.n_io > 2:
        raise ValueError("exhaustive verification is limited to n_io <= 2")
    inputs = tomography_inputs(pat.n_in)
    m = len(pat.measurements)
    cells = []
    mass: dict = {}
    if pat.kind == "measure":
        basis = ideal_basis(pat.gate)
    else:
        F = ideal_operator(pat.gate) if ideal is None else np.asarray(ideal, dtype=complex)
    for e_in in all_frames(pat.n_in):
        for s in _outcome_strings(m):
            worst, failed, total_p = 0.0, 0, 0.0
            for k, psi in enumerate(inputs):
                try:
                    run = run_pattern(_frame_twisted(psi, e_in), pat, e_in, outcomes=s)
                except ZeroBranchError:
                    continue
                mass[(e_in.bits, k)] = mass.get((e_in.bits, k), 0.0) + run.probability
                total_p += run.probability
                if pat.kind == "measure":
                    # probability of this raw branch vs the ideal probability of its corrected result
                    r = run.results[0]
                    bad = abs(run.probability - _branch_prob(psi, basis)[r])
                else:
                    target = StateVec(F @ psi.amps)
                    if pat.n_out:
                        target = apply_pauli(target, run.e_out.lift())
                    bad = 1 - fidelity(target, run.state)
                worst = max(worst, bad)
                failed += bad > tol
            cells.append(
                CellResult(str(e_in), "".join(map(str, s)), worst, failed, len(inputs), total_p)
            )
    prob_err = max((abs(v - 1) for v in mass.values()), default=0.0)
    return ComposabilityReport(pat.gate, cells, prob_err, tol)


def catalog() -> dict[str, Pattern]:
    return {g: elementary_pattern(g) for g in GATE_PATTERNS + DIRECT_PATTERNS}
