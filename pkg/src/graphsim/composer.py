"""Circuit IR, composition of catalog patterns, execution and location counting.

Composition chains catalog patterns in circuit order, identifying each pattern's
output vertices with the next pattern's input vertices, and threads the classical
frame register through the per-pattern update rules.  A CNOT is expanded into
H (target), CPHASE, H (target).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .graphstate import PrepSchedule, schedule_dynamic
from .pauli import PauliFrame, PauliOp, all_frames
from .patterns import (
    AdaptiveBasis,
    Pattern,
    elementary_pattern,
    ideal_basis,
    ideal_operator,
)
from .register import Register
from .statevec import SQ2, MeasBasis, StateVec, ZeroBranchError, apply_pauli, fidelity, tomography_inputs

OP_ARITY = {
    "prep_plus": 1,
    "prep_zero": 1,
    "h": 1,
    "s": 1,
    "t": 1,
    "cphase": 2,
    "cnot": 2,
    "measure_x": 1,
    "measure_y": 1,
    "measure_z": 1,
}
_PREPS = ("prep_plus", "prep_zero")
_MEASURES = ("measure_x", "measure_y", "measure_z")

EXHAUSTIVE_MEASUREMENTS = 10
SAMPLED_HISTORIES = 10_000


class CircuitSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class CircuitRangeError(CircuitSyntaxError):
    pass


class ScheduleError(RuntimeError):
    pass


@dataclass(frozen=True)
class Op:
    name: str
    qubits: tuple[int, ...]
    line: int = 0


@dataclass(frozen=True)
class CircuitIR:
    n_qubits: int
    ops: tuple[Op, ...] = ()

    def __len__(self):
        return len(self.ops)


def _validate(n: int, ops) -> None:
    started = [False] * n
    dead = [False] * n
    for op in ops:
        if op.name not in OP_ARITY:
            raise CircuitSyntaxError(op.line, f"unknown op {op.name!r}")
        if len(op.qubits) != OP_ARITY[op.name]:
            raise CircuitSyntaxError(op.line, f"{op.name} takes {OP_ARITY[op.name]} qubit(s)")
        if len(set(op.qubits)) != len(op.qubits):
            raise CircuitSyntaxError(op.line, f"{op.name} on repeated qubit")
        for q in op.qubits:
            if not 0 <= q < n:
                raise CircuitRangeError(op.line, f"qubit {q} out of range for {n} qubits")
            if dead[q]:
                raise CircuitRangeError(op.line, f"qubit {q} used after its terminal measurement")
        if op.name in _PREPS and started[op.qubits[0]]:
            raise CircuitRangeError(op.line, f"{op.name} on qubit {op.qubits[0]} which is already in use")
        for q in op.qubits:
            started[q] = True
        if op.name in _MEASURES:
            dead[op.qubits[0]] = True


def parse_circuit(text: str) -> CircuitIR:
    """Parse the line format: ``qubits N`` header, then ``mnemonic q [q2]`` per line.

    Blank lines and ``#`` comments are ignored.  An empty text is the empty circuit.
    """
    n = None
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word = parts[0]
        if not re.fullmatch(r"[a-z_]+", word):
            raise CircuitSyntaxError(lineno, f"bad mnemonic {word!r}")
        try:
            args = [int(a) for a in parts[1:]]
        except ValueError:
            raise CircuitSyntaxError(lineno, f"non-integer argument in {line!r}") from None
        if any(not re.fullmatch(r"\d+", a) for a in parts[1:]):
            raise CircuitSyntaxError(lineno, f"qubit indices must be non-negative decimals: {line!r}")
        if word == "qubits":
            if n is not None or ops:
                raise CircuitSyntaxError(lineno, "'qubits' header must come first, once")
            if len(args) != 1:
                raise CircuitSyntaxError(lineno, "'qubits' takes one argument")
            n = args[0]
            continue
        if n is None:
            raise CircuitSyntaxError(lineno, "missing 'qubits N' header")
        if word not in OP_ARITY:
            raise CircuitSyntaxError(lineno, f"unknown op {word!r}")
        if len(args) != OP_ARITY[word]:
            raise CircuitSyntaxError(lineno, f"{word} takes {OP_ARITY[word]} qubit(s), got {len(args)}")
        ops.append(Op(word, tuple(args), lineno))
    circ = CircuitIR(n or 0, tuple(ops))
    _validate(circ.n_qubits, circ.ops)
    return circ


def format_circuit(circ: CircuitIR) -> str:
    lines = [f"qubits {circ.n_qubits}"]
    lines += [" ".join([op.name, *map(str, op.qubits)]) for op in circ.ops]
    return "\n".join(lines) + "\n"


def expand(op: Op) -> list[tuple[str, tuple[int, ...]]]:
    """Elementary pattern sequence simulating one circuit op."""
    q = op.qubits
    if op.name == "prep_plus":
        return [("PREP_PLUS", q)]
    if op.name == "prep_zero":
        return [("PREP_PLUS", q), ("H", q)]
    if op.name in ("h", "s", "t"):
        return [(op.name.upper(), q)]
    if op.name == "cphase":
        return [("CPHASE", q)]
    if op.name == "cnot":
        c, t = q
        return [("H", (t,)), ("CPHASE", (c, t)), ("H", (t,))]
    if op.name in _MEASURES:
        return [(op.name.upper(), q)]
    raise ValueError(f"unsupported op {op.name}")


# -- composed patterns ------------------------------------------------------------------


def _compile_rule(rule):
    """Per branch, per output bit: (frame indices, outcome indices, constant)."""
    out = []
    for br in rule.branches:
        rows = []
        for i in range(br.A.shape[0]):
            rows.append(
                (
                    tuple(int(j) for j in np.nonzero(br.A[i])[0]),
                    tuple(int(j) for j in np.nonzero(br.B[i])[0]),
                    int(br.c[i]),
                )
            )
        out.append(rows)
    readout = None
    if rule.readout is not None:
        readout = [tuple(int(j) for j in np.nonzero(r)[0]) for r in rule.readout]
    return out, readout


@dataclass(frozen=True, eq=False)
class Instance:
    index: int
    op_index: int
    pattern: Pattern
    wires: tuple[int, ...]
    node_map: dict
    meas_ids: tuple[int, ...]
    result_slot: int | None = None

    @property
    def gate(self) -> str:
        return self.pattern.gate

    def local_frame_index(self, global_n: int) -> list[int]:
        """Global frame positions backing the local ``e_in`` bits."""
        return [w for w in self.wires] + [global_n + w for w in self.wires]

    @cached_property
    def compiled(self):
        return _compile_rule(self.pattern.rule)


@dataclass(frozen=True)
class NodeInfo:
    owner: int  # instance index, -1 for circuit inputs
    local: int | None
    role: str


@dataclass(eq=False)
class ComposedPattern:
    n_qubits: int
    instances: tuple[Instance, ...]
    nodes: dict
    input_wires: tuple[int, ...]
    input_nodes: tuple
    output_wires: tuple[int, ...]
    output_nodes: tuple
    edges: tuple[tuple[int, int], ...]
    edge_owner: tuple[int, ...]
    measured_nodes: tuple
    meas_owner: tuple[tuple[int, int], ...]
    partial_order: tuple[tuple[int, int], ...]
    n_results: int
    result_wires: tuple[int, ...] = field(default=())

    @property
    def node_ids(self) -> tuple:
        return tuple(self.nodes)

    @cached_property
    def schedule(self) -> PrepSchedule:
        return schedule_dynamic(self)

    @property
    def n_in(self) -> int:
        return len(self.input_wires)

    @property
    def n_out(self) -> int:
        return len(self.output_wires)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "instances": [
                {
                    "gate": inst.gate,
                    "op_index": inst.op_index,
                    "wires": list(inst.wires),
                    "node_map": {str(k): v for k, v in inst.node_map.items()},
                    "meas_ids": list(inst.meas_ids),
                    "pattern": inst.pattern.to_dict(),
                }
                for inst in self.instances
            ],
            "nodes": [
                {"id": v, "owner": info.owner, "local": info.local, "role": info.role}
                for v, info in self.nodes.items()
            ],
            "edges": [[u, v, o] for (u, v), o in zip(self.edges, self.edge_owner)],
            "measurements": [
                {"id": m, "node": v, "owner": o[0], "local_index": o[1]}
                for m, (v, o) in enumerate(zip(self.measured_nodes, self.meas_owner))
            ],
            "partial_order": [list(p) for p in self.partial_order],
            "inputs": {"wires": list(self.input_wires), "nodes": list(self.input_nodes)},
            "outputs": {"wires": list(self.output_wires), "nodes": list(self.output_nodes)},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> ComposedPattern:
        parts = [
            (Pattern.from_dict(i["pattern"]), tuple(i["wires"]), i["op_index"]) for i in d["instances"]
        ]
        return compose_patterns(d["n_qubits"], parts)

    @classmethod
    def from_json(cls, text: str) -> ComposedPattern:
        return cls.from_dict(json.loads(text))


def compose_patterns(n_qubits: int, parts) -> ComposedPattern:
    """Chain ``(pattern, wires, op_index)`` triples into one composed pattern."""
    parts = list(parts)
    first_kind = {}
    for pat, wires, _ in parts:
        for w in wires:
            first_kind.setdefault(w, pat.kind)
    nodes: dict = {}
    current: dict = {}
    input_wires, input_nodes = [], []
    for w in range(n_qubits):
        if first_kind.get(w) != "prep":
            v = len(nodes)
            nodes[v] = NodeInfo(-1, None, "input")
            current[w] = v
            input_wires.append(w)
            input_nodes.append(v)
    instances = []
    edges, edge_owner = [], []
    measured, meas_owner = [], []
    order = []
    n_results = 0
    result_wires = []
    # support of each global frame bit: measurement ids it may depend on
    support = [frozenset()] * (2 * n_qubits)
    for k, (pat, wires, op_index) in enumerate(parts):
        if pat.rule is None or not pat.rule.affine:
            raise ValueError(f"pattern {pat.gate} needs an affine update rule to be composed")
        if pat.kind == "prep" and any(w in current for w in wires):
            raise ValueError(f"{pat.gate} on wire {wires} which is already live")
        if len(wires) != pat.n_io:
            raise ValueError(f"{pat.gate} on wires {wires}")
        node_map = {}
        for local, w in zip(pat.inputs, wires):
            if w not in current:
                raise ValueError(f"wire {w} is not live before {pat.gate}")
            node_map[local] = current[w]
        for local, role in pat.nodes:
            if local not in node_map:
                v = len(nodes)
                nodes[v] = NodeInfo(k, local, role)
                node_map[local] = v
        for u, v in pat.edges:
            edges.append((node_map[u], node_map[v]))
            edge_owner.append(k)
        meas_ids = []
        for j, m in enumerate(pat.measurements):
            mid = len(measured)
            measured.append(node_map[m.node])
            meas_owner.append((k, j))
            meas_ids.append(mid)
        slot = None
        if pat.kind == "measure":
            slot = n_results
            n_results += 1
            result_wires.append(wires[0])
        inst = Instance(k, op_index, pat, tuple(wires), node_map, tuple(meas_ids), slot)
        instances.append(inst)
        # frame support propagation and adaptive dependencies
        in_wires = wires if pat.n_in else ()
        local_sup = [support[w] for w in in_wires] + [support[n_qubits + w] for w in in_wires]
        pred_sup = frozenset()
        for j, m in enumerate(pat.measurements):
            if isinstance(m.basis, AdaptiveBasis):
                deps = set()
                for b in m.basis.frame_bits:
                    deps |= local_sup[b]
                for b in m.basis.outcome_bits:
                    deps.add(meas_ids[b])
                pred_sup |= frozenset(deps)
                order.extend((d, meas_ids[j]) for d in sorted(deps))
        if pat.kind == "measure":
            for w in wires:
                support[w] = support[n_qubits + w] = frozenset()
                del current[w]
            continue
        new = []
        branches = pat.rule.branches
        for i in range(2 * pat.n_out):
            s = set()
            for br in branches:
                s |= {x for j in np.nonzero(br.A[i])[0] for x in local_sup[j]}
                s |= {meas_ids[t] for t in np.nonzero(br.B[i])[0]}
            if len(branches) > 1 and any(
                not (np.array_equal(br.A[i], branches[0].A[i]) and np.array_equal(br.B[i], branches[0].B[i]) and br.c[i] == branches[0].c[i])
                for br in branches
            ):
                s |= pred_sup
            new.append(frozenset(s))
        for idx, w in enumerate(wires):
            support[w] = new[idx]
            support[n_qubits + w] = new[pat.n_out + idx]
            current[w] = node_map[pat.outputs[idx]]
    output_wires = tuple(sorted(current))
    return ComposedPattern(
        n_qubits=n_qubits,
        instances=tuple(instances),
        nodes=nodes,
        input_wires=tuple(input_wires),
        input_nodes=tuple(input_nodes),
        output_wires=output_wires,
        output_nodes=tuple(current[w] for w in output_wires),
        edges=tuple(edges),
        edge_owner=tuple(edge_owner),
        measured_nodes=tuple(measured),
        meas_owner=tuple(meas_owner),
        partial_order=tuple(sorted(set(order))),
        n_results=n_results,
        result_wires=tuple(result_wires),
    )


def compose(circ: CircuitIR) -> ComposedPattern:
    parts = []
    for i, op in enumerate(circ.ops):
        for gate, wires in expand(op):
            parts.append((elementary_pattern(gate), wires, i))
    return compose_patterns(circ.n_qubits, parts)


def single(pat: Pattern) -> ComposedPattern:
    """A one-pattern composed object on wires ``0..n_io-1``."""
    return compose_patterns(pat.n_io, [(pat, tuple(range(pat.n_io)), 0)])


# -- frame chaining ------------------------------------------------------------------------


def _eval_rows(rows, e, s):
    out = []
    for fe, fs, c in rows:
        v = c
        for j in fe:
            if e[j] is None:
                v = None
                break
            v ^= e[j]
        if v is not None:
            for j in fs:
                if s[j] is None:
                    v = None
                    break
                v ^= s[j]
        out.append(v)
    return out


def _select(pat: Pattern, e, s):
    """Branch index, or None when an adaptive predicate is not yet determined."""
    b = 0
    for k, j in enumerate(pat.adaptive_steps):
        ab = pat.measurements[j].basis
        bit = 0
        for i in ab.frame_bits:
            if e[i] is None:
                return None
            bit ^= e[i]
        for i in ab.outcome_bits:
            if s[i] is None:
                return None
            bit ^= s[i]
        b |= bit << k
    return b


@dataclass
class FrameTrace:
    local_in: list  # per instance: local e_in bits (None = unknown)
    frame: list  # final global frame bits
    results: list  # corrected classical results per result slot


def chain_frames(cp: ComposedPattern, e_in_global, outcomes, upto: int | None = None) -> FrameTrace:
    """Thread the frame register through the instances' update rules.

    Unknown outcomes (``None``) propagate as unknown bits.  With ``upto`` the chain
    stops before instance ``upto``.
    """
    n = cp.n_qubits
    frame = list(e_in_global)
    local_in = []
    results = [None] * cp.n_results
    stop = len(cp.instances) if upto is None else upto
    for inst in cp.instances[:stop]:
        pat = inst.pattern
        w = inst.wires
        e = [frame[q] for q in w] + [frame[n + q] for q in w] if pat.n_in else []
        local_in.append(e)
        s = [outcomes[m] for m in inst.meas_ids]
        branches, readout = inst.compiled
        if readout is not None:
            for r_idx, fe in enumerate(readout):
                v = s[r_idx]
                if v is not None:
                    for j in fe:
                        if e[j] is None:
                            v = None
                            break
                        v ^= e[j]
                results[inst.result_slot] = v
            for q in w:
                frame[q] = frame[n + q] = 0
            continue
        b = _select(pat, e, s)
        if b is None:
            vals = [_eval_rows(rows, e, s) for rows in branches]
            out = [v if all(x[i] == v for x in vals) else None for i, v in enumerate(vals[0])]
        else:
            out = _eval_rows(branches[b], e, s)
        k = pat.n_out
        for idx, q in enumerate(w):
            frame[q] = out[idx]
            frame[n + q] = out[k + idx]
    return FrameTrace(local_in, frame, results)


def global_frame(cp: ComposedPattern, e_in: PauliFrame | None) -> list[int]:
    """Embed a frame on the input wires into the ``2 n_qubits`` global register."""
    n = cp.n_qubits
    g = [0] * (2 * n)
    if e_in is None:
        return g
    if e_in.n != cp.n_in:
        raise ValueError(f"frame on {e_in.n} qubits, circuit has {cp.n_in} input wires")
    for i, w in enumerate(cp.input_wires):
        g[w] = e_in.x[i]
        g[n + w] = e_in.z[i]
    return g


def output_frame(cp: ComposedPattern, frame) -> PauliFrame:
    n = cp.n_qubits
    return PauliFrame.from_xz([frame[w] for w in cp.output_wires], [frame[n + w] for w in cp.output_wires])


# -- execution ----------------------------------------------------------------------------


@dataclass
class ComposedRun:
    state: StateVec
    e_out: PauliFrame
    outcomes: tuple[int, ...]
    results: tuple[int, ...]
    probability: float
    local_frames: list = field(default_factory=list)


def run_composed(
    cp: ComposedPattern,
    psi: StateVec,
    e_in: PauliFrame | None = None,
    outcomes=None,
    rng: np.random.Generator | None = None,
    schedule: PrepSchedule | None = None,
    injections=(),
) -> ComposedRun:
    """Execute a composed pattern step by step along ``schedule`` (dynamic by default).

    ``psi`` lives on the input wires (wire order) and must already carry the
    byproduct ``P_{e_in}``.  ``injections`` are ``(step, nodes, op)`` with ``op``
    applied right after schedule step ``step`` (``-1``: before the first step).
    """
    sched = cp.schedule if schedule is None else schedule
    if psi.n != cp.n_in:
        raise ValueError(f"input state has {psi.n} qubits, circuit has {cp.n_in} input wires")
    g = global_frame(cp, e_in)
    reg = Register(psi, cp.input_nodes)
    n_meas = len(cp.measured_nodes)
    outs: list = [None] * n_meas
    prob = 1.0
    by_pos: dict = {}
    for pos, nodes, op in injections:
        by_pos.setdefault(pos, []).append((nodes, op))
    for nodes, op in by_pos.get(-1, ()):
        reg.apply(op, nodes)
    for i, st in enumerate(sched.steps):
        kind = st.kind
        if kind == "prep":
            reg.add(st.nodes[0])
        elif kind == "cphase":
            reg.cz(*st.nodes)
        elif kind == "measure":
            mid = st.meas
            k, j = cp.meas_owner[mid]
            inst = cp.instances[k]
            step = inst.pattern.measurements[j]
            if isinstance(step.basis, AdaptiveBasis):
                trace = chain_frames(cp, g, outs, upto=k + 1)
                local_s = [outs[m] for m in inst.meas_ids]
                try:
                    bit = step.basis.select(trace.local_in[k], local_s)
                except (TypeError, ValueError) as exc:
                    raise ScheduleError(f"measurement {mid} scheduled before its dependencies") from exc
                basis = step.basis.basis(bit)
            else:
                basis = step.basis
            forced = None if outcomes is None else outcomes[mid]
            bit, p = reg.measure(st.nodes[0], basis, rng=rng, forced=forced)
            outs[mid] = bit
            prob *= p
        for nodes, op in by_pos.get(i, ()):
            reg.apply(op, nodes)
    trace = chain_frames(cp, g, outs)
    return ComposedRun(
        reg.state(cp.output_nodes),
        output_frame(cp, trace.frame),
        tuple(outs),
        tuple(trace.results),
        prob,
        trace.local_in,
    )


# -- reference circuit simulator ----------------------------------------------------------


@dataclass
class ReferenceRun:
    state: StateVec
    results: tuple[int, ...]
    probability: float


def run_reference(
    cp: ComposedPattern,
    psi: StateVec,
    results=None,
    rng: np.random.Generator | None = None,
    insertions: dict | None = None,
) -> ReferenceRun:
    """Ideal circuit-model run over the elementary gates of ``cp``.

    ``insertions`` maps an instance index to ``(op, wires)`` pairs applied right after
    that gate; ``op`` is a PauliOp, a matrix, or the string ``"flip"`` (measurement
    patterns: flip the recorded result).
    """
    insertions = insertions or {}
    reg = Register(psi, [("w", w) for w in cp.input_wires])
    res: list = [None] * cp.n_results
    prob = 1.0
    for inst in cp.instances:
        pat = inst.pattern
        labels = [("w", w) for w in inst.wires]
        flip = 0
        extra = insertions.get(inst.index, ())
        if pat.kind == "prep":
            reg.add(labels[0], np.array([SQ2, SQ2], dtype=complex))
        elif pat.kind == "measure":
            # a Pauli descriptor on a measured wire acts before the ideal measurement
            for op, wires in extra:
                if isinstance(op, str):
                    flip ^= 1
                else:
                    reg.apply(op, [("w", w) for w in wires])
            forced = None
            if results is not None:
                forced = results[inst.result_slot] ^ flip
            bit, p = reg.measure(labels[0], ideal_basis(pat.gate), rng=rng, forced=forced)
            res[inst.result_slot] = bit ^ flip
            prob *= p
            continue
        else:
            F = ideal_operator(pat.gate)
            reg.apply(F, labels)
        for op, wires in extra:
            reg.apply(op, [("w", w) for w in wires])
    return ReferenceRun(reg.state([("w", w) for w in cp.output_wires]), tuple(res), prob)


# -- sequence verification --------------------------------------------------------------------


@dataclass
class SequenceReport:
    n_runs: int
    worst_infidelity: float
    failures: list
    prob_error: float
    exhaustive: bool
    tol: float
    frame_mismatches: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures and self.prob_error <= self.tol and self.frame_mismatches == 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "runs": self.n_runs,
            "worst_infidelity": self.worst_infidelity,
            "prob_error": self.prob_error,
            "exhaustive": self.exhaustive,
            "failures": self.failures[:50],
        }


def _histories(cp, rng):
    m = len(cp.measured_nodes)
    if m <= EXHAUSTIVE_MEASUREMENTS:
        return list(product((0, 1), repeat=m)), True
    return None, False


def verify_sequence(
    cp: ComposedPattern,
    circ: CircuitIR | None = None,
    frames: str = "all",
    inputs=None,
    tol: float = 1e-9,
    seed: int = 0,
) -> SequenceReport:
    """Check the composed simulation against the ideal circuit for every outcome history.

    Each history's output (after removing ``P_{e_out}``) must match the ideal output
    conditioned on the same corrected classical results, and history probabilities
    must add up to the ideal result probabilities.  Histories are enumerated when
    there are at most ten measurements and sampled (10^4, seeded) otherwise.
    ``frames`` is ``"all"`` (every input frame, n_in <= 2) or ``"zero"``.
    """
    rng = np.random.default_rng(seed)
    if inputs is None:
        if cp.n_in <= 2:
            inputs = tomography_inputs(cp.n_in)
        else:
            pool = tomography_inputs(1)
            inputs = [
                StateVec.product([pool[rng.integers(4)].amps for _ in range(cp.n_in)]) for _ in range(16)
            ]
    if frames == "all" and cp.n_in <= 2:
        frame_list = all_frames(cp.n_in)
    else:
        frame_list = [PauliFrame.zero(cp.n_in)]
    histories, exhaustive = _histories(cp, rng)
    worst, failures, n_runs = 0.0, [], 0
    prob_err = 0.0
    for e_in in frame_list:
        for k, psi in enumerate(inputs):
            twisted = apply_pauli(psi, e_in.lift()) if cp.n_in else psi
            mass: dict = {}
            hs = histories if exhaustive else [None] * SAMPLED_HISTORIES
            for h in hs:
                try:
                    run = run_composed(cp, twisted, e_in, outcomes=h, rng=None if exhaustive else rng)
                except ZeroBranchError:
                    continue
                n_runs += 1
                ref = run_reference(cp, psi, results=run.results)
                target = ref.state
                if cp.n_out:
                    target = apply_pauli(target, run.e_out.lift())
                bad = 1 - fidelity(target, run.state)
                worst = max(worst, bad)
                if bad > tol:
                    failures.append({"e_in": str(e_in), "input": k, "history": "".join(map(str, run.outcomes)), "infidelity": bad})
                mass.setdefault(run.results, [0.0, ref.probability])[0] += run.probability
            if exhaustive:
                for got, want in mass.values():
                    prob_err = max(prob_err, abs(got - want))
    return SequenceReport(n_runs, worst, failures, prob_err, exhaustive, tol)


# -- location counting ----------------------------------------------------------------------


def idle_slots(cp: ComposedPattern, schedule: PrepSchedule | None = None) -> list[tuple[int, object]]:
    """``(step, node)`` pairs: a live qubit untouched during a schedule step."""
    sched = cp.schedule if schedule is None else schedule
    live: list = []
    slots = []
    for i, st in enumerate(sched.steps):
        if st.kind == "input":
            live.append(st.nodes[0])
            continue
        slots.extend((i, v) for v in live if v not in st.nodes)
        if st.kind == "prep":
            live.append(st.nodes[0])
        elif st.kind == "measure":
            live.remove(st.nodes[0])
    return slots


@dataclass
class LocationCount:
    total: int
    breakdown: dict

    def __int__(self):
        return self.total


def count_locations(obj, mode: str = "paper", schedule: PrepSchedule | None = None) -> LocationCount:
    """``paper``: cphase edges + measurements.  ``full``: also |+> preparations and
    one storage location per idle qubit per schedule step."""
    cp = single(obj) if isinstance(obj, Pattern) else obj
    if mode not in ("paper", "full"):
        raise ValueError(f"unknown location mode {mode!r}")
    b = {"cphase": len(cp.edges), "measurement": len(cp.measured_nodes)}
    if mode == "full":
        b["prep"] = sum(1 for info in cp.nodes.values() if info.role != "input")
        b["storage"] = len(idle_slots(cp, schedule))
    return LocationCount(sum(b.values()), b)
