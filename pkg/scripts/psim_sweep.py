"""p_sim Monte Carlo versus 1 - (1-p)^L for every catalog gate and the composed CNOT."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from graphsim.composer import compose, parse_circuit
from graphsim.faults import psim_estimate
from graphsim.patterns import GATE_PATTERNS, elementary_pattern


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ps", default="0.001,0.003,0.01,0.03,0.1")
    ap.add_argument("--shots", type=int, default=100_000)
    ap.add_argument("--mode", choices=("paper", "full"), default="paper")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    targets = [(g, elementary_pattern(g)) for g in GATE_PATTERNS]
    targets.append(("CNOT", compose(parse_circuit("qubits 2\ncnot 0 1\n"))))
    ps = [float(x) for x in args.ps.split(",")]
    seeds = np.random.SeedSequence(args.seed).spawn(len(targets) * len(ps))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["gate", "L", "p", "psim_mc", "psim_exact", "ci_low", "ci_high", "z"])
    i = 0
    for name, obj in targets:
        for p in ps:
            est = psim_estimate(obj, p, args.shots, args.mode, np.random.default_rng(seeds[i]))
            i += 1
            z = (est.mc - est.exact) / est.sigma if est.sigma else 0.0
            w.writerow([name, est.L, p, est.mc, est.exact, est.ci_low, est.ci_high, f"{z:.3f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
