"""Graphs, graph states, stabilizer checks and just-in-time preparation schedules."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

import numpy as np

from .pauli import PauliOp
from .statevec import MAX_QUBITS, CapacityError, StateVec, apply_cz, apply_pauli


class MalformedPattern(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex ids")
        clean = set()
        for e in self.edges:
            u, v = tuple(e)
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if u not in verts or v not in verts:
                raise ValueError(f"edge {(u, v)} has an endpoint outside the vertex set")
            key = (u, v) if verts.index(u) < verts.index(v) else (v, u)
            if key in clean:
                raise ValueError(f"duplicate edge {key}")
            clean.add(key)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, vertices, edges) -> Graph:
        return cls(tuple(vertices), frozenset(tuple(e) for e in edges))

    def neighbors(self, v) -> list:
        out = [b for a, b in self.edges if a == v] + [a for a, b in self.edges if b == v]
        return sorted(out, key=self.vertices.index)

    def sorted_edges(self) -> list[tuple]:
        idx = self.vertices.index
        return sorted(self.edges, key=lambda e: (idx(e[0]), idx(e[1])))

    def to_json(self) -> str:
        return json.dumps({"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]})

    @classmethod
    def from_json(cls, text: str) -> Graph:
        d = json.loads(text)
        return cls.from_edges(d["vertices"], d["edges"])


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(range(n), edges)


def build_graph_state(g: Graph) -> StateVec:
    """``|+>^V`` followed by a CPHASE on every edge."""
    n = len(g.vertices)
    if n > MAX_QUBITS:
        raise CapacityError(f"graph with {n} vertices exceeds capacity {MAX_QUBITS}")
    s = StateVec.plus(n)
    t = s.tensor
    idx = g.vertices.index
    for u, v in g.sorted_edges():
        t = apply_cz(t, idx(u), idx(v))
    return StateVec(t, n)


def stabilizer(g: Graph, v) -> PauliOp:
    """``K_v = X_v prod_{w in N(v)} Z_w`` on the vertex order of ``g``."""
    n = len(g.vertices)
    x = [0] * n
    z = [0] * n
    x[g.vertices.index(v)] = 1
    for w in g.neighbors(v):
        z[g.vertices.index(w)] = 1
    return PauliOp(tuple(x), tuple(z))


@dataclass
class StabilizerReport:
    residuals: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def failing(self) -> list:
        return [v for v, r in self.residuals.items() if r > self.tol]

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)


def stabilizer_check(s: StateVec, g: Graph, tol: float = 1e-10) -> StabilizerReport:
    if s.n != len(g.vertices):
        raise ValueError(f"state has {s.n} qubits, graph has {len(g.vertices)} vertices")
    res = {}
    for v in g.vertices:
        diff = apply_pauli(s, stabilizer(g, v)).amps - s.amps
        res[v] = float(np.linalg.norm(diff))
    return StabilizerReport(res, tol)


# -- preparation schedules --------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One schedule entry: ``input`` (boundary vertex), ``prep``, ``cphase`` or ``measure``.

    ``meas`` is the measurement id for ``measure`` steps; ``edge`` the edge index for
    ``cphase`` steps (composed patterns may contain parallel edges).
    """

    kind: str
    nodes: tuple
    meas: int | None = None
    edge: int | None = None

    def to_dict(self) -> dict:
        d = {"op": self.kind, "nodes": list(self.nodes)}
        if self.meas is not None:
            d["meas"] = self.meas
        if self.edge is not None:
            d["edge"] = self.edge
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Step:
        return cls(d["op"], tuple(d["nodes"]), d.get("meas"), d.get("edge"))


@dataclass(frozen=True)
class PrepSchedule:
    steps: tuple[Step, ...]

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def to_json(self) -> str:
        return json.dumps([s.to_dict() for s in self.steps])

    @classmethod
    def from_json(cls, text: str) -> PrepSchedule:
        return cls(tuple(Step.from_dict(d) for d in json.loads(text)))


def measurement_order(cp) -> list[int]:
    """Topological order of measurement ids, smallest id first among ready ones."""
    n_meas = len(cp.measured_nodes)
    preds = {m: set() for m in range(n_meas)}
    for a, b in cp.partial_order:
        preds[b].add(a)
    ts = TopologicalSorter(preds)
    try:
        ts.prepare()
    except CycleError as exc:
        raise MalformedPattern(f"cyclic measurement dependencies: {exc.args[1]}") from exc
    heap: list[int] = []
    order = []
    while ts.is_active():
        for m in ts.get_ready():
            heapq.heappush(heap, m)
        m = heapq.heappop(heap)
        order.append(m)
        ts.done(m)
    return order


def schedule_dynamic(cp) -> PrepSchedule:
    """Linearize a composed pattern, preparing every vertex only when first needed.

    ``cp`` needs ``node_ids``, ``input_nodes``, ``edges``, ``measured_nodes`` and
    ``partial_order`` (pairs of measurement ids).
    """
    inputs = list(cp.input_nodes)
    steps = [Step("input", (v,)) for v in inputs]
    prepared = set(inputs)
    done: set = set()
    edges = [tuple(e) for e in cp.edges]
    incident: dict = {v: [] for v in cp.node_ids}
    for i, e in enumerate(edges):
        incident[e[0]].append(i)
        incident[e[1]].append(i)

    def ensure(i):
        if i in done:
            return
        for v in edges[i]:
            if v not in prepared:
                steps.append(Step("prep", (v,)))
                prepared.add(v)
        steps.append(Step("cphase", edges[i], edge=i))
        done.add(i)

    for m in measurement_order(cp):
        v = cp.measured_nodes[m]
        for i in incident[v]:
            ensure(i)
        if v not in prepared:
            steps.append(Step("prep", (v,)))
            prepared.add(v)
        steps.append(Step("measure", (v,), m))
    for i in range(len(edges)):
        ensure(i)
    for v in cp.node_ids:
        if v not in prepared:
            steps.append(Step("prep", (v,)))
            prepared.add(v)
    return PrepSchedule(tuple(steps))


def upfront_schedule(cp) -> PrepSchedule:
    """Whole graph state first, then measurements in dependency order."""
    steps = [Step("input", (v,)) for v in cp.input_nodes]
    steps += [Step("prep", (v,)) for v in cp.node_ids if v not in set(cp.input_nodes)]
    steps += [Step("cphase", tuple(e), edge=i) for i, e in enumerate(cp.edges)]
    steps += [Step("measure", (cp.measured_nodes[m],), m) for m in measurement_order(cp)]
    return PrepSchedule(tuple(steps))


def validate_schedule(cp, sched: PrepSchedule) -> list[str]:
    """Return a list of invariant violations (empty when the schedule is valid)."""
    problems = []
    inputs = set(cp.input_nodes)
    edges = [tuple(e) for e in cp.edges]
    live: set = set()
    prepared_count: dict = {}
    applied = [0] * len(edges)
    measured: dict = {}
    for i, st in enumerate(sched):
        if st.kind == "input":
            (v,) = st.nodes
            if v not in inputs:
                problems.append(f"step {i}: {v} marked input but is not a boundary vertex")
            live.add(v)
        elif st.kind == "prep":
            (v,) = st.nodes
            if v in inputs:
                problems.append(f"step {i}: boundary vertex {v} prepared")
            prepared_count[v] = prepared_count.get(v, 0) + 1
            live.add(v)
        elif st.kind == "cphase":
            idx = st.edge
            if idx is None:
                # untagged step: first unapplied edge on these endpoints
                cands = [j for j, e in enumerate(edges) if set(e) == set(st.nodes) and not applied[j]]
                idx = cands[0] if cands else None
                if idx is None and any(set(e) == set(st.nodes) for e in edges):
                    problems.append(f"step {i}: edge {st.nodes} applied twice")
                    continue
            if idx is None or not 0 <= idx < len(edges) or set(edges[idx]) != set(st.nodes):
                problems.append(f"step {i}: {st.nodes} is not an edge")
                continue
            if applied[idx]:
                problems.append(f"step {i}: edge {st.nodes} applied twice")
            applied[idx] += 1
            for v in st.nodes:
                if v not in live:
                    problems.append(f"step {i}: cphase on {v} before it exists or after measurement")
        elif st.kind == "measure":
            (v,) = st.nodes
            if v not in live:
                problems.append(f"step {i}: measuring {v} which is not live")
            for j, e in enumerate(edges):
                if v in e and not applied[j]:
                    problems.append(f"step {i}: {v} measured before edge {e}")
            measured[st.meas] = i
            live.discard(v)
        else:
            problems.append(f"step {i}: unknown step kind {st.kind!r}")
    for v in cp.node_ids:
        if v not in inputs and prepared_count.get(v, 0) != 1:
            problems.append(f"vertex {v} prepared {prepared_count.get(v, 0)} times")
    missing = [edges[j] for j in range(len(edges)) if not applied[j]]
    if missing:
        problems.append(f"edges never applied: {missing}")
    if set(measured) != set(range(len(cp.measured_nodes))):
        problems.append("not every measurement appears exactly once")
    for a, b in cp.partial_order:
        if a in measured and b in measured and measured[a] > measured[b]:
            problems.append(f"measurement {b} precedes its dependency {a}")
    return problems


def laziness(sched: PrepSchedule) -> int:
    """Number of preparations occurring after the first measurement."""
    first = next((i for i, s in enumerate(sched) if s.kind == "measure"), len(sched))
    return sum(1 for s in sched.steps[first:] if s.kind == "prep")
