"""Three-qubit bit-flip repetition code: graph-state noise versus localized circuit noise.

Wires 0-2 hold the code, wires 3-4 are syndrome ancillas.  The encoder copies wire 0
onto wires 1 and 2, the extractor measures Z0Z1 and Z1Z2 onto the ancillas, and the
decoder corrects the measured data bits with the syndrome and takes a majority vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .composer import ComposedPattern, compose, parse_circuit, run_reference
from .faults import (
    NoiseModel,
    enumerate_locations,
    localize_fault,
    run_noisy,
    sample_fault_path,
    shot_seeds,
    to_context,
)
from .pauli import all_frames, all_paulis
from .statevec import StateVec, apply_pauli

CIRCUIT = """qubits 5
# encode
prep_zero 0
prep_zero 1
prep_zero 2
cnot 0 1
cnot 0 2
# extract
prep_zero 3
prep_zero 4
cnot 0 3
cnot 1 3
cnot 1 4
cnot 2 4
# read out
measure_z 0
measure_z 1
measure_z 2
measure_z 3
measure_z 4
"""

# syndrome (Z0Z1, Z1Z2) -> data bit to flip
_CORRECTION = {(0, 0): None, (1, 0): 0, (1, 1): 1, (0, 1): 2}


def decode(results) -> int:
    """Logical bit from (d0, d1, d2, s01, s12); the encoded value is 0."""
    d = list(results[:3])
    flip = _CORRECTION[(results[3], results[4])]
    if flip is not None:
        d[flip] ^= 1
    return int(sum(d) >= 2)


def circuit() -> ComposedPattern:
    return compose(parse_circuit(CIRCUIT))


class BranchDependent(RuntimeError):
    pass


@dataclass
class ChannelTable:
    """Per-location localized Paulis: ``table[loc.id][fault label] = (instance, wires, R)``.

    ``instance`` is ``-1`` for wire-level faults on untouched inputs.
    """

    table: dict
    locs: list


def localized_channels(cp: ComposedPattern, mode: str = "full") -> ChannelTable:
    """Localize every (location, Pauli) and check that the descriptor does not depend
    on the owning instance's input frame or outcome branch."""
    locs = enumerate_locations(cp, mode)
    cache: dict = {}
    table: dict = {}
    for loc in locs:
        ctx = to_context(cp, loc)
        entry = {}
        for fault in all_paulis(len(loc.support), nontrivial=True):
            if ctx is None:
                w = cp.input_wires[cp.input_nodes.index(loc.support[0])]
                entry[fault.label] = (-1, (w,), fault)
                continue
            inst = cp.instances[ctx.instance]
            pat = inst.pattern
            key = (pat.gate, ctx.steps, ctx.position, ctx.nodes, fault.label)
            if key not in cache:
                found = set()
                rep = None
                m = len(pat.measurements)
                for e in all_frames(pat.n_in):
                    for s in np.ndindex(*(2,) * m):
                        res = localize_fault(pat, ctx.position, ctx.nodes, fault, s, e, ctx.steps)
                        if res.skipped:
                            continue
                        d = res.descriptor
                        if d.kind != "pauli":
                            raise BranchDependent(f"non-Pauli descriptor for {pat.gate}")
                        found.add(d.op.phaseless().label)
                        rep = d.op.phaseless()
                        if pat.kind == "measure":
                            break
                if len(found) != 1:
                    raise BranchDependent(f"{pat.gate} location {loc.id} {fault.label}: {sorted(found)}")
                cache[key] = rep
            entry[fault.label] = (ctx.instance, inst.wires, cache[key])
        table[loc.id] = entry
    return ChannelTable(table, locs)


@dataclass
class FlipEstimate:
    shots: int
    flips: int

    @property
    def rate(self) -> float:
        return self.flips / self.shots if self.shots else 0.0

    @property
    def sigma(self) -> float:
        r = self.rate
        return math.sqrt(max(r * (1 - r), 1e-300) / self.shots) if self.shots else 0.0


def graph_flips(cp: ComposedPattern, nm: NoiseModel, shots: int, seed: int, mode: str = "full", locs=None) -> FlipEstimate:
    """Noisy graph-state runs of the full composed pattern."""
    locs = enumerate_locations(cp, mode) if locs is None else locs
    flips = 0
    for s in shot_seeds(seed, shots):
        rec = run_noisy(cp, None, None, nm, s, mode, locs)
        flips += decode(rec.results)
    return FlipEstimate(shots, flips)


def circuit_flips(cp: ComposedPattern, nm: NoiseModel, channels: ChannelTable, shots: int, seed: int) -> FlipEstimate:
    """Ideal circuit runs with the localized Paulis inserted after their gates."""
    flips = 0
    for s in shot_seeds(seed, shots):
        rng = np.random.default_rng(s)
        path = sample_fault_path(nm, channels.locs, rng, with_probability=False)
        ins: dict = {}
        psi = StateVec.zeros(cp.n_in)
        for lid, fault in path.events:
            k, wires, R = channels.table[lid][fault.label]
            if k == -1:
                psi = apply_pauli(psi, R.on(cp.n_in, [cp.input_wires.index(wires[0])]))
            else:
                ins.setdefault(k, []).append((R, wires))
        ref = run_reference(cp, psi, rng=rng, insertions=ins)
        flips += decode(ref.results)
    return FlipEstimate(shots, flips)


def z_score(a: FlipEstimate, b: FlipEstimate) -> float:
    sd = math.sqrt(a.sigma**2 + b.sigma**2)
    return abs(a.rate - b.rate) / sd if sd > 0 else 0.0
