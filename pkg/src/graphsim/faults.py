"""Stochastic Pauli noise on simulation locations, fault localization and p_sim estimates.

Noisy preparations and CPHASEs are modelled as the ideal step followed by a Pauli;
noisy measurements as a Pauli followed by the ideal measurement; storage faults hit
idle qubits after a schedule step.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.stats import binomtest

from .composer import (
    ComposedPattern,
    count_locations,
    idle_slots,
    run_composed,
    run_reference,
    single,
)
from .graphstate import PrepSchedule, Step
from .pauli import PauliFrame, PauliOp, all_frames, all_paulis
from .patterns import Pattern, elementary_pattern, ideal_basis, ideal_operator, run_pattern
from .statevec import StateVec, ZeroBranchError, apply_pauli, fidelity, tomography_inputs

KINDS = ("prep", "cphase", "measurement", "storage")
PAPER_KINDS = ("cphase", "measurement")
LOCALIZE_TOL = 1e-9
RNG_ALGORITHM = "numpy.PCG64/SeedSequence"


class LocalizationError(RuntimeError):
    """No single descriptor explains a faulty branch."""


@dataclass(frozen=True)
class Location:
    id: int
    kind: str
    support: tuple
    instance: int
    step: int
    position: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "support": list(self.support),
            "instance": self.instance,
            "step": self.step,
        }


def _owner_of_slot(cp: ComposedPattern, sched: PrepSchedule, step: int, node) -> int:
    """Instance owning a storage fault: the last instance acting on ``node`` up to ``step``.

    ``-1`` means the node is an untouched circuit input (a wire-level fault at the start).
    """
    owner = -1
    for i in range(step + 1):
        st = sched.steps[i]
        if node not in st.nodes:
            continue
        k = _step_owner(cp, st)
        if k is not None:
            owner = k
    return owner


def _step_owner(cp: ComposedPattern, st: Step):
    if st.kind == "prep":
        return cp.nodes[st.nodes[0]].owner
    if st.kind == "cphase":
        if st.edge is not None:
            return cp.edge_owner[st.edge]
        e = tuple(st.nodes)
        for (u, v), o in zip(cp.edges, cp.edge_owner):
            if (u, v) == e or (v, u) == e:
                return o
    if st.kind == "measure":
        return cp.meas_owner[st.meas][0]
    return None


def enumerate_locations(cp, mode: str = "full", schedule: PrepSchedule | None = None) -> list[Location]:
    """Locations in schedule order; within a step the step itself comes first, then
    storage on idle qubits in live order.  Paper mode keeps only cphase/measurement."""
    if isinstance(cp, Pattern):
        cp = single(cp)
    if mode not in ("paper", "full"):
        raise ValueError(f"unknown location mode {mode!r}")
    sched = cp.schedule if schedule is None else schedule
    idle: dict = {}
    if mode == "full":
        for i, v in idle_slots(cp, sched):
            idle.setdefault(i, []).append(v)
    locs: list[Location] = []
    for i, st in enumerate(sched.steps):
        if st.kind == "prep" and mode == "full":
            locs.append(Location(len(locs), "prep", st.nodes, _step_owner(cp, st), i, i))
        elif st.kind == "cphase":
            locs.append(Location(len(locs), "cphase", st.nodes, _step_owner(cp, st), i, i))
        elif st.kind == "measure":
            locs.append(Location(len(locs), "measurement", st.nodes, _step_owner(cp, st), i, i - 1))
        for v in idle.get(i, ()):
            locs.append(Location(len(locs), "storage", (v,), _owner_of_slot(cp, sched, i, v), i, i))
    return locs


# -- noise model -----------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    """Per-kind fault probability and a product Pauli distribution.

    ``weights`` are relative single-qubit weights of (I, X, Y, Z); a fault on ``k``
    qubits draws a product of single-qubit Paulis conditioned on being nontrivial.
    Equal weights give the uniform (depolarizing) distribution over the 4^k - 1
    nontrivial Paulis.
    """

    p: dict = field(default_factory=lambda: {k: 0.0 for k in KINDS})
    weights: tuple = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        for k, v in self.p.items():
            if k not in KINDS:
                raise ValueError(f"unknown location kind {k!r}")
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"fault probability {v} for {k} outside [0, 1]")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,) or np.any(w < 0) or w[1:].sum() <= 0:
            raise ValueError("weights must be four non-negative numbers with some nontrivial mass")

    @classmethod
    def depolarizing(cls, p: float, kinds=KINDS) -> NoiseModel:
        return cls({k: (p if k in kinds else 0.0) for k in KINDS})

    @classmethod
    def independent_xz(cls, p: float, q: float = 0.5, kinds=KINDS) -> NoiseModel:
        """Faults made of independent X and Z flips, each with conditional probability ``q``."""
        return cls({k: (p if k in kinds else 0.0) for k in KINDS}, ((1 - q) ** 2, q * (1 - q), q * q, q * (1 - q)))

    def rate(self, kind: str) -> float:
        return float(self.p.get(kind, 0.0))

    def distribution(self, k: int) -> tuple[list[PauliOp], np.ndarray]:
        ops = all_paulis(k, nontrivial=True)
        w = np.asarray(self.weights, dtype=float)
        idx = {"I": 0, "X": 1, "Y": 2, "Z": 3}
        probs = np.array([math.prod(w[idx[c]] for c in op.letters) for op in ops])
        return ops, probs / probs.sum()

    def to_dict(self) -> dict:
        return {"p": dict(self.p), "weights": list(self.weights)}


@dataclass(frozen=True)
class FaultPath:
    events: tuple[tuple[int, PauliOp], ...]
    probability: float

    def __len__(self):
        return len(self.events)

    def to_dict(self) -> dict:
        return {"events": [[i, op.label] for i, op in self.events], "probability": self.probability}


def path_probability(nm: NoiseModel, locs, events) -> float:
    faulty = dict(events)
    prob = 1.0
    cache: dict = {}
    for loc in locs:
        p = nm.rate(loc.kind)
        if loc.id in faulty:
            k = len(loc.support)
            if k not in cache:
                ops, probs = nm.distribution(k)
                cache[k] = {op.label: q for op, q in zip(ops, probs)}
            prob *= p * cache[k].get(faulty[loc.id].label, 0.0)
        else:
            prob *= 1.0 - p
    return prob


def sample_fault_path(nm: NoiseModel, locs, rng: np.random.Generator, with_probability: bool = True) -> FaultPath:
    """Independent Bernoulli(p) per location; on a fault a Pauli drawn from the model."""
    locs = list(locs)
    rates = np.array([nm.rate(l.kind) for l in locs])
    hits = np.nonzero(rng.random(len(locs)) < rates)[0]
    events = []
    for i in hits:
        loc = locs[i]
        ops, probs = nm.distribution(len(loc.support))
        events.append((loc.id, ops[int(rng.choice(len(ops), p=probs))]))
    prob = path_probability(nm, locs, events) if with_probability else float("nan")
    return FaultPath(tuple(events), prob)


def injections_for(path: FaultPath, locs_by_id: dict) -> list:
    out = []
    for lid, op in path.events:
        loc = locs_by_id[lid]
        out.append((loc.position, loc.support, op))
    return out


# -- noisy runs --------------------------------------------------------------------


@dataclass
class ShotRecord:
    seed: int
    path: FaultPath
    outcomes: tuple[int, ...]
    e_out: PauliFrame
    results: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "path": self.path.to_dict(),
            "outcomes": "".join(map(str, self.outcomes)),
            "e_out": str(self.e_out),
            "results": "".join(map(str, self.results)),
        }


def run_noisy(
    cp: ComposedPattern,
    psi: StateVec | None,
    e_in: PauliFrame | None,
    nm: NoiseModel,
    seed: int,
    mode: str = "full",
    locs=None,
    return_state: bool = False,
):
    """One seeded shot: sample a fault path, then execute the dynamic schedule with it."""
    rng = np.random.default_rng(seed)
    locs = enumerate_locations(cp, mode) if locs is None else locs
    path = sample_fault_path(nm, locs, rng)
    if psi is None:
        psi = StateVec.zeros(cp.n_in)
    twisted = apply_pauli(psi, e_in.lift()) if (e_in is not None and cp.n_in) else psi
    run = run_composed(cp, twisted, e_in, rng=rng, injections=injections_for(path, {l.id: l for l in locs}))
    rec = ShotRecord(seed, path, run.outcomes, run.e_out, run.results)
    return (rec, run.state) if return_state else rec


def shot_seeds(seed: int, shots: int) -> list[int]:
    """Per-shot seeds spawned from one master seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(shots, np.uint64)]


def threads_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("GRAPHSIM_THREADS", default)))
    except ValueError:
        return default


def run_shots(cp, nm: NoiseModel, shots: int, seed: int, mode: str = "full", threads: int | None = None, psi=None):
    """Records for ``shots`` seeded shots; the result does not depend on ``threads``."""
    locs = enumerate_locations(cp, mode)
    seeds = shot_seeds(seed, shots)
    threads = threads_from_env() if threads is None else threads

    def one(s):
        return run_noisy(cp, psi, None, nm, s, mode, locs)

    if threads <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(one, seeds))


# -- localization -------------------------------------------------------------------


@dataclass(frozen=True)
class Descriptor:
    """Effective fault on a simulated operation.

    ``kind`` is ``"pauli"`` (``op`` is a PauliOp acting after the gate, or before an
    ideal measurement) or ``"operator"`` (``op`` is a matrix acting after the gate).
    """

    kind: str
    op: object
    fidelity: float

    @property
    def is_identity(self) -> bool:
        return self.kind == "pauli" and self.op.is_identity

    @property
    def label(self) -> str:
        return self.op.label if self.kind == "pauli" else "operator"


@dataclass
class Localization:
    descriptor: Descriptor | None
    e_in: PauliFrame
    branch: tuple
    e_out: PauliFrame | None
    skipped: bool = False


def _local_steps(pat: Pattern, steps):
    return pat.default_steps() if steps is None else tuple(steps)


def _branch_outputs(pat, e_in, branch, inputs, injections, steps):
    outs = []
    for psi in inputs:
        twisted = apply_pauli(psi, e_in.lift()) if pat.n_in else psi
        try:
            run = run_pattern(twisted, pat, e_in, outcomes=branch, injections=injections, steps=steps)
        except ZeroBranchError:
            outs.append(None)
            continue
        outs.append(run)
    return outs


def _branch_kraus(pat, e_in, branch, injections, steps) -> np.ndarray:
    """Unnormalized branch map on computational basis inputs (columns)."""
    d_in = 2**pat.n_in
    d_out = 2**pat.n_out
    K = np.zeros((d_out, d_in), dtype=complex)
    for j in range(d_in):
        basis = np.zeros(d_in, dtype=complex)
        basis[j] = 1
        psi = StateVec(basis, pat.n_in)
        twisted = apply_pauli(psi, e_in.lift()) if pat.n_in else psi
        try:
            run = run_pattern(twisted, pat, e_in, outcomes=branch, injections=injections, steps=steps)
        except ZeroBranchError:
            continue
        K[:, j] = math.sqrt(run.probability) * run.state.amps
    return K


def localize_fault(
    pat: Pattern,
    position: int,
    nodes,
    fault: PauliOp,
    branch,
    e_in: PauliFrame | None = None,
    steps=None,
    tol: float = LOCALIZE_TOL,
) -> Localization:
    """Effective fault on ``pat``'s simulated operation for one outcome branch.

    The fault ``fault`` on local ``nodes`` is applied after local step ``position``
    of the pattern's step list.  For gate and preparation patterns the result
    satisfies ``P_{e_out}^dag (noisy output) ~ D F |psi>`` for every input, with
    ``e_out`` from the pattern's own classical rule; for measurement patterns ``D`` is
    a Pauli applied before the ideal measurement, matching the corrected outcome
    distribution.  Branches of zero probability are reported as skipped.
    """
    steps = _local_steps(pat, steps)
    e_in = PauliFrame.zero(pat.n_in) if e_in is None else e_in
    branch = tuple(branch)
    inj = [(position, tuple(nodes), fault)]
    inputs = tomography_inputs(pat.n_in)
    if pat.kind == "measure":
        return _localize_measurement(pat, e_in, inj, steps, inputs, tol, branch)
    runs = _branch_outputs(pat, e_in, branch, inputs, inj, steps)
    live = [(psi, r) for psi, r in zip(inputs, runs) if r is not None]
    if not live:
        return Localization(None, e_in, branch, None, skipped=True)
    e_out = live[0][1].e_out
    F = ideal_operator(pat.gate)
    ideal = [StateVec(F @ psi.amps) for psi, _ in live]
    seen = [apply_pauli(r.state, e_out.lift()) if pat.n_out else r.state for _, r in live]
    for cand in all_paulis(pat.n_out):
        worst = min(fidelity(apply_pauli(t, cand), s) for t, s in zip(ideal, seen))
        if worst >= 1 - tol:
            return Localization(Descriptor("pauli", cand, worst), e_in, branch, e_out)
    # non-Pauli descriptor: R = P_{e_out}^dag K F^+ restricted to the branch
    K = _branch_kraus(pat, e_in, branch, inj, steps)
    P = e_out.lift().matrix()
    R = P.conj().T @ K @ np.linalg.pinv(F)
    nrm = np.linalg.norm(R, 2)
    if nrm > 0:
        R = R / nrm
        worst = min(fidelity(StateVec(R @ t.amps) if np.linalg.norm(R @ t.amps) > 0 else t, s) for t, s in zip(ideal, seen))
        if worst >= 1 - tol:
            return Localization(Descriptor("operator", R, worst), e_in, branch, e_out)
    raise LocalizationError(
        f"{pat.gate}: fault {fault.label} on {tuple(nodes)} after step {position}, "
        f"e_in={e_in}, branch={branch} has no single descriptor"
    )


def _localize_measurement(pat, e_in, inj, steps, inputs, tol, branch):
    """Match corrected result probabilities against an ideal measurement after a Pauli."""
    basis = ideal_basis(pat.gate)
    vecs = basis.vectors()
    got = []
    for psi in inputs:
        twisted = apply_pauli(psi, e_in.lift())
        row = [0.0, 0.0]
        for s in (0, 1):
            try:
                run = run_pattern(twisted, pat, e_in, outcomes=(s,), injections=inj, steps=steps)
            except ZeroBranchError:
                continue
            row[run.results[0]] += run.probability
        got.append(row)
    for cand in all_paulis(pat.n_in):
        worst = 0.0
        for psi, row in zip(inputs, got):
            moved = apply_pauli(psi, cand).amps
            want = [abs(np.vdot(vecs[b], moved)) ** 2 for b in (0, 1)]
            worst = max(worst, abs(want[0] - row[0]), abs(want[1] - row[1]))
        if worst <= tol:
            return Localization(Descriptor("pauli", cand, 1.0 - worst), e_in, branch, None)
    raise LocalizationError(f"{pat.gate}: fault {inj} has no single descriptor")


def local_locations(pat: Pattern, mode: str = "paper") -> list[Location]:
    """Locations of a single pattern in its own node ids and default step list."""
    steps = pat.default_steps()
    cp = single(pat)
    sched = PrepSchedule(tuple(_to_global_step(cp, st) for st in steps))
    return enumerate_locations(cp, mode, sched)


def _to_global_step(cp: ComposedPattern, st: Step) -> Step:
    nm = cp.instances[0].node_map
    return Step(st.kind, tuple(nm[v] for v in st.nodes), st.meas, st.edge)


@dataclass(frozen=True)
class ContextFault:
    """A composed-pattern location mapped into its owning instance."""

    instance: int
    steps: tuple
    position: int
    nodes: tuple


def instance_steps(cp: ComposedPattern, k: int, schedule: PrepSchedule | None = None):
    """Local step list of instance ``k`` in the order the schedule runs them, plus the
    schedule index of each local step."""
    sched = cp.schedule if schedule is None else schedule
    inst = cp.instances[k]
    back = {g: l for l, g in inst.node_map.items()}
    steps = [Step("input", (v,)) for v in inst.pattern.inputs]
    where = [-1] * len(steps)
    local_meas = {mid: j for j, mid in enumerate(inst.meas_ids)}
    for i, st in enumerate(sched.steps):
        if st.kind == "input" or _step_owner(cp, st) != k:
            continue
        meas = local_meas.get(st.meas) if st.kind == "measure" else None
        edge = None
        if st.kind == "cphase":
            edge = inst.pattern.edges.index(tuple(back[v] for v in st.nodes)) if st.edge is None else st.edge - _first_edge(cp, k)
        steps.append(Step(st.kind, tuple(back[v] for v in st.nodes), meas, edge))
        where.append(i)
    return tuple(steps), where


def _first_edge(cp: ComposedPattern, k: int) -> int:
    return cp.edge_owner.index(k)


def to_context(cp: ComposedPattern, loc: Location, schedule: PrepSchedule | None = None) -> ContextFault | None:
    """Owning instance, its local step list and the local injection position.

    Returns ``None`` for storage faults on untouched circuit inputs, which act on the
    wire before any gate.
    """
    k = loc.instance
    if k == -1:
        return None
    steps, where = instance_steps(cp, k, schedule)
    back = {g: l for l, g in cp.instances[k].node_map.items()}
    nodes = tuple(back[v] for v in loc.support)
    if loc.kind == "measurement":
        pos = where.index(loc.step) - 1
    else:
        pos = max(j for j, w in enumerate(where) if w <= loc.step)
    return ContextFault(k, steps, pos, nodes)


def wire_of(cp: ComposedPattern, node) -> int:
    return cp.input_wires[cp.input_nodes.index(node)]


def equivalent_reference(cp, loc, fault, run, psi, schedule=None, cache=None):
    """Ideal-circuit run with the localized fault of ``loc`` inserted after its gate.

    ``run`` is the noisy composed run whose outcomes and frames fix the branch.
    Returns ``(reference_run, descriptor)``.
    """
    ctx = to_context(cp, loc, schedule)
    if ctx is None:
        w = wire_of(cp, loc.support[0])
        return _reference_with_start(cp, psi, run.results, fault, w), Descriptor("pauli", fault, 1.0)
    inst = cp.instances[ctx.instance]
    e_loc = PauliFrame(tuple(run.local_frames[ctx.instance]))
    s_loc = tuple(run.outcomes[m] for m in inst.meas_ids)
    key = (ctx.instance, loc.id, fault.label, e_loc.bits, s_loc)
    if cache is not None and key in cache:
        d = cache[key]
    else:
        d = localize_fault(inst.pattern, ctx.position, ctx.nodes, fault, s_loc, e_loc, ctx.steps).descriptor
        if cache is not None:
            cache[key] = d
    ref = run_reference(cp, psi, results=run.results, insertions={ctx.instance: [(d.op, inst.wires)]})
    return ref, d


def _reference_with_start(cp, psi, results, fault, wire):
    moved = apply_pauli(psi, fault.on(cp.n_in, [cp.input_wires.index(wire)]))
    return run_reference(cp, moved, results=results)


@dataclass
class EquivalenceReport:
    cases: int
    skipped: int
    worst_infidelity: float
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


def check_fault_equivalence(
    cp: ComposedPattern,
    mode: str = "paper",
    frames=None,
    inputs=None,
    tol: float = LOCALIZE_TOL,
) -> EquivalenceReport:
    """Single-fault noisy graph runs against ideal circuits with the localized fault.

    Every location, every nontrivial Pauli on its support, every outcome history and
    every input is checked state by state.
    """
    locs = enumerate_locations(cp, mode)
    inputs = tomography_inputs(cp.n_in) if inputs is None else inputs
    frames = [PauliFrame.zero(cp.n_in)] if frames is None else frames
    hist = list(product((0, 1), repeat=len(cp.measured_nodes)))
    cache: dict = {}
    worst, failures, cases, skipped = 0.0, [], 0, 0
    for loc in locs:
        for fault in all_paulis(len(loc.support), nontrivial=True):
            inj = [(loc.position, loc.support, fault)]
            for e_in in frames:
                for k, psi in enumerate(inputs):
                    twisted = apply_pauli(psi, e_in.lift()) if cp.n_in else psi
                    for h in hist:
                        try:
                            run = run_composed(cp, twisted, e_in, outcomes=h, injections=inj)
                        except ZeroBranchError:
                            skipped += 1
                            continue
                        cases += 1
                        ref, d = equivalent_reference(cp, loc, fault, run, psi, cache=cache)
                        target = apply_pauli(ref.state, run.e_out.lift()) if cp.n_out else ref.state
                        bad = 1 - fidelity(target, run.state)
                        worst = max(worst, bad)
                        if bad > tol:
                            failures.append({"location": loc.id, "fault": fault.label, "input": k, "history": h, "infidelity": bad})
    return EquivalenceReport(cases, skipped, worst, failures)


@dataclass
class LocalizationReport:
    gate: str
    checked: int
    skipped: int
    worst_infidelity: float
    failures: list
    descriptors: dict

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "passed": self.passed,
            "checked": self.checked,
            "skipped_zero_probability": self.skipped,
            "worst_infidelity": self.worst_infidelity,
            "failures": self.failures[:50],
        }


def localization_suite(pat: Pattern, mode: str = "paper", tol: float = LOCALIZE_TOL) -> LocalizationReport:
    """Every location, every nontrivial Pauli, every ``e_in`` and every outcome branch."""
    steps = pat.default_steps()
    locs = local_locations(pat, mode)
    nm = single(pat).instances[0].node_map
    back = {g: l for l, g in nm.items()}
    m = len(pat.measurements)
    checked = skipped = 0
    worst = 0.0
    failures = []
    descriptors = {}
    for loc in locs:
        nodes = tuple(back[v] for v in loc.support)
        for fault in all_paulis(len(nodes), nontrivial=True):
            for e_in in all_frames(pat.n_in):
                for s in product((0, 1), repeat=m):
                    try:
                        res = localize_fault(pat, loc.position, nodes, fault, s, e_in, steps, tol)
                    except LocalizationError as exc:
                        failures.append({"location": loc.id, "fault": fault.label, "e_in": str(e_in), "s": s, "error": str(exc)})
                        continue
                    if res.skipped:
                        skipped += 1
                        continue
                    checked += 1
                    worst = max(worst, 1 - res.descriptor.fidelity)
                    descriptors[(loc.id, fault.label, e_in.bits, s)] = res.descriptor.label
                    if pat.kind == "measure":
                        break  # the measurement descriptor covers both outcomes at once
    return LocalizationReport(pat.gate, checked, skipped, worst, failures, descriptors)


# -- p_sim and threshold translation -------------------------------------------------


def psim_exact(p: float, L: int) -> float:
    return 1.0 - (1.0 - p) ** L


@dataclass
class PsimEstimate:
    p: float
    L: int
    mode: str
    shots: int
    hits: int
    exact: float
    ci_low: float
    ci_high: float

    @property
    def mc(self) -> float:
        return self.hits / self.shots if self.shots else 0.0

    @property
    def sigma(self) -> float:
        q = self.exact
        return math.sqrt(q * (1 - q) / self.shots) if self.shots else 0.0

    def within(self, n_sigma: float = 3.0) -> bool:
        if self.sigma == 0:
            return self.mc == self.exact
        return abs(self.mc - self.exact) <= n_sigma * self.sigma


def psim_estimate(obj, p: float, shots: int, mode: str = "paper", rng: np.random.Generator | None = None, chunk: int = 1 << 16) -> PsimEstimate:
    """Monte Carlo frequency of at least one fault among the locations, with the closed form."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    L = count_locations(obj, mode).total
    rng = np.random.default_rng() if rng is None else rng
    hits = 0
    left = shots
    while left > 0:
        n = min(left, chunk)
        hits += int(np.count_nonzero((rng.random((n, L)) < p).any(axis=1))) if L else 0
        left -= n
    if shots:
        ci = binomtest(hits, shots).proportion_ci(confidence_level=0.95, method="wilson")
        lo, hi = float(ci.low), float(ci.high)
    else:
        lo, hi = 0.0, 1.0
    return PsimEstimate(p, L, mode, shots, hits, psim_exact(p, L), lo, hi)


CSS_CAVEAT = (
    "only CPHASE, preparations and measurements are simulated; the bound assumes the "
    "code's logical gates are transversal CPHASEs (self-dual CSS codes), as in the "
    "circuit-model scheme being translated"
)


@dataclass
class ThresholdReport:
    p0: float
    mode: str
    per_gate: dict
    worst_gate: str
    bound: float
    caveat: str = ""


def gate_location_count(gate: str, mode: str = "paper") -> int:
    g = gate.upper()
    if g == "CNOT":
        from .composer import compose, parse_circuit

        return count_locations(compose(parse_circuit("qubits 2\ncnot 0 1\n")), mode).total
    if g == "PREP_ZERO":
        from .composer import compose, parse_circuit

        return count_locations(compose(parse_circuit("qubits 1\nprep_zero 0\n")), mode).total
    return count_locations(elementary_pattern(g), mode).total


NATIVE = ("H", "S", "T", "CPHASE")


def threshold_translate(p0: float, gates=NATIVE, mode: str = "paper") -> ThresholdReport:
    """Graph-state bound ``p0 / max location count`` over the gates an architecture uses."""
    if not 0.0 < p0 < 1.0:
        raise ValueError("p0 must lie in (0, 1)")
    gates = [g.upper() for g in gates]
    per = {g: gate_location_count(g, mode) for g in gates}
    worst = max(per, key=lambda g: (per[g], g))
    caveat = ""
    if set(gates) <= {"CPHASE", "PREP_PLUS", "PREP_ZERO", "MEASURE_X", "MEASURE_Y", "MEASURE_Z"}:
        caveat = CSS_CAVEAT
    return ThresholdReport(p0, mode, per, worst, p0 / max(per[worst], 1), caveat)
