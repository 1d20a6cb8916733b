"""Exhaustive sequence verification over every gate word up to a given length."""

from __future__ import annotations

import argparse
import itertools
import sys
import time

from graphsim.composer import compose, parse_circuit, verify_sequence

ALPHABET = {
    1: ["h 0", "s 0", "t 0"],
    2: ["h 0", "h 1", "s 0", "s 1", "t 0", "t 1", "cphase 0 1", "cnot 0 1", "cnot 1 0"],
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, choices=(1, 2), default=2)
    ap.add_argument("--max-length", type=int, default=3)
    ap.add_argument("--frames", choices=("all", "zero"), default="zero")
    args = ap.parse_args(argv)

    failures = 0
    for n in range(1, args.max_length + 1):
        t0 = time.perf_counter()
        words = list(itertools.product(ALPHABET[args.qubits], repeat=n))
        for word in words:
            text = f"qubits {args.qubits}\n" + "\n".join(word) + "\n"
            rep = verify_sequence(compose(parse_circuit(text)), frames=args.frames)
            if not rep.passed:
                failures += 1
                print("FAIL", "; ".join(word), rep.to_dict()["worst_infidelity"])
        print(f"length {n}: {len(words)} words, {time.perf_counter() - t0:.1f} s")
    print("failures:", failures)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
