"""Command-line front end: ``graphsim {compile,run,verify,sweep}``.

Exit codes: 0 success (verify: everything passed), 1 verification failure,
2 bad input (parse errors, unreadable files, bad arguments).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .composer import (
    CircuitSyntaxError,
    ComposedPattern,
    compose,
    count_locations,
    parse_circuit,
    run_composed,
    verify_sequence,
)
from .faults import (
    RNG_ALGORITHM,
    NoiseModel,
    check_fault_equivalence,
    localization_suite,
    psim_estimate,
    run_shots,
    threads_from_env,
)
from .patterns import GATE_PATTERNS, Pattern, catalog, elementary_pattern, verify_composability
from .statevec import StateVec

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SWEEP_COLUMNS = ["p", "L_mode", "shots", "psim_mc", "psim_exact", "ci_low", "ci_high"]


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    shots: int = 1000
    noise_p: tuple = (0.0,)
    loc_mode: str = "full"
    out: str | None = None
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise_p"] = list(self.noise_p)
        d["rng"] = RNG_ALGORITHM
        d["numpy"] = np.__version__
        d["version"] = __version__
        return d


# -- input loading ---------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_target(path: str | None):
    """A circuit file, a pattern JSON, a list of pattern JSONs or a composed-pattern JSON.

    Returns ``("circuit", CircuitIR)``, ``("patterns", [Pattern])``, ``("composed", cp)``
    or ``("default", None)`` when no file is given.
    """
    if path is None:
        return "default", None
    text = _read(path)
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        try:
            if isinstance(data, list):
                return "patterns", [Pattern.from_dict(d) for d in data]
            if "instances" in data:
                return "composed", ComposedPattern.from_dict(data)
            return "patterns", [Pattern.from_dict(data)]
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"{path}: not a pattern description ({exc})") from None
    try:
        return "circuit", parse_circuit(text)
    except CircuitSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from None


def _composed(kind, obj) -> ComposedPattern:
    from .composer import single

    if kind == "circuit":
        return compose(obj)
    if kind == "composed":
        return obj
    if kind != "patterns" or len(obj) != 1:
        raise InputError("expected a circuit or a single pattern")
    return single(obj[0])


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _ps(text: str) -> tuple[float, ...]:
    try:
        ps = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"bad probability list {text!r}") from None
    if not ps or any(not 0.0 <= p <= 1.0 for p in ps):
        raise InputError("probabilities must lie in [0, 1]")
    return ps


def _config(args) -> RunConfig:
    threads = args.threads if getattr(args, "threads", None) else threads_from_env()
    return RunConfig(
        seed=args.seed,
        shots=args.shots,
        noise_p=_ps(args.noise_p),
        loc_mode=args.loc_mode,
        out=args.out,
        threads=threads,
    )


# -- commands ---------------------------------------------------------------------


def cmd_compile(args) -> int:
    try:
        circ = parse_circuit(_read(args.circuit))
    except CircuitSyntaxError as exc:
        print(f"{args.circuit}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cp = compose(circ)
    d = cp.to_dict()
    d["locations"] = {m: count_locations(cp, m).breakdown | {"total": count_locations(cp, m).total} for m in ("paper", "full")}
    d["schedule"] = [s.to_dict() for s in cp.schedule]
    _emit(json.dumps(d, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    kind, obj = load_target(args.circuit)
    cp = _composed(kind, obj)
    nm = NoiseModel.depolarizing(cfg.noise_p[0])
    lines = [json.dumps({"meta": cfg.to_dict()})]
    if cfg.noise_p[0] == 0.0 and args.noiseless_state:
        run = run_composed(cp, StateVec.zeros(cp.n_in), rng=np.random.default_rng(cfg.seed))
        lines.append(json.dumps({"e_out": str(run.e_out), "results": list(run.results)}))
    else:
        recs = run_shots(cp, nm, cfg.shots, cfg.seed, cfg.loc_mode, cfg.threads)
        lines += [json.dumps(r.to_dict()) for r in recs]
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _verify(target: str, kind: str, obj, args) -> dict:
    if target == "composability":
        if kind not in ("patterns", "default"):
            raise InputError("composability verification takes pattern JSON")
        pats = obj if kind == "patterns" else list(catalog().values())
        reports = [verify_composability(p).to_dict() for p in pats]
        return {"target": target, "passed": all(r["passed"] for r in reports), "reports": reports}
    if target == "sequence":
        if kind == "default":
            kind, obj = "circuit", parse_circuit("qubits 2\ncnot 0 1\n")
        r = verify_sequence(_composed(kind, obj)).to_dict()
        return {"target": target, "passed": r["passed"], "reports": [r]}
    if target == "localization":
        reports = []
        if kind in ("patterns", "default"):
            pats = obj or list(catalog().values())
        else:
            cp = _composed(kind, obj)
            eq = check_fault_equivalence(cp, args.loc_mode)
            reports.append(
                {
                    "check": "equivalence",
                    "passed": eq.passed,
                    "cases": eq.cases,
                    "worst_infidelity": eq.worst_infidelity,
                    "failures": eq.failures[:50],
                }
            )
            seen, pats = set(), []
            for inst in cp.instances:
                if id(inst.pattern) not in seen:
                    seen.add(id(inst.pattern))
                    pats.append(inst.pattern)
        reports += [localization_suite(p, args.loc_mode).to_dict() for p in pats]
        return {"target": target, "passed": all(r["passed"] for r in reports), "reports": reports}
    if target == "purified":
        from .purified import purify_pattern, verify_purified

        pats = obj if kind == "patterns" else [elementary_pattern(g) for g in GATE_PATTERNS]
        if kind not in ("patterns", "default"):
            raise InputError("purified verification takes pattern JSON")
        reports = [verify_purified(purify_pattern(p)).to_dict() for p in pats]
        return {"target": target, "passed": all(r["passed"] for r in reports), "reports": reports}
    if target == "norms":
        from .purified import norm_study

        if kind not in ("patterns", "default"):
            raise InputError("norm study takes pattern JSON")
        pats = obj if kind == "patterns" else [elementary_pattern("S")]
        rows = []
        for p in pats:
            rows += norm_study(p, etas=(0.01, 0.1), draws=args.draws, seed=args.seed)
        return {"target": target, "passed": all(r["pass"] for r in rows), "reports": rows}
    raise InputError(f"unknown verification target {target!r}")


def cmd_verify(args) -> int:
    kind, obj = load_target(args.file)
    report = _verify(args.target, kind, obj, args)
    _emit(json.dumps(report, indent=1, default=str) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def sweep_rows(cp: ComposedPattern, cfg: RunConfig, logical: bool = False) -> list[dict]:
    """One row per p; every row draws from its own child of the master seed."""
    rows = []
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(cfg.noise_p))
    channels = None
    for p, ss in zip(cfg.noise_p, seeds):
        rng = np.random.default_rng(ss)
        est = psim_estimate(cp, p, cfg.shots, cfg.loc_mode, rng)
        row = {
            "p": repr(p),
            "L_mode": cfg.loc_mode,
            "shots": cfg.shots,
            "psim_mc": repr(est.mc),
            "psim_exact": repr(est.exact),
            "ci_low": repr(est.ci_low),
            "ci_high": repr(est.ci_high),
            "L": est.L,
        }
        if logical:
            from .repetition import circuit_flips, graph_flips, localized_channels, z_score

            if channels is None:
                channels = localized_channels(cp, cfg.loc_mode)
            nm = NoiseModel.depolarizing(p)
            sa, sb = (int(x) for x in ss.generate_state(2, np.uint64))
            a = graph_flips(cp, nm, cfg.shots, sa, cfg.loc_mode, channels.locs)
            b = circuit_flips(cp, nm, channels, cfg.shots, sb)
            row.update(
                {
                    "flip_graph": repr(a.rate),
                    "flip_circuit": repr(b.rate),
                    "flip_sigma": repr(float(np.hypot(a.sigma, b.sigma))),
                    "z": repr(z_score(a, b)),
                }
            )
        rows.append(row)
    return rows


def write_csv(rows: list[dict]) -> str:
    if not rows:
        return ",".join(SWEEP_COLUMNS + ["L"]) + "\n"
    cols = SWEEP_COLUMNS + [c for c in rows[0] if c not in SWEEP_COLUMNS]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if args.repetition:
        from .repetition import circuit

        cp = circuit()
    else:
        if args.circuit is None:
            raise InputError("sweep needs a circuit file or --repetition")
        kind, obj = load_target(args.circuit)
        cp = _composed(kind, obj)
    text = write_csv(sweep_rows(cp, cfg, logical=args.repetition))
    _emit(text, cfg.out)
    if cfg.out:
        meta = cfg.to_dict() | {"circuit": args.circuit, "repetition": args.repetition}
        Path(cfg.out + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, shots: int = 1000, noise: str = "0.0") -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--shots", type=int, default=shots)
    p.add_argument("--noise-p", default=noise, help="fault probability, or comma-separated list for sweep")
    p.add_argument("--loc-mode", choices=("paper", "full"), default="full")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--threads", type=int, default=None, help="shot-level parallelism (default $GRAPHSIM_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphsim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"graphsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="circuit file -> composed-pattern JSON")
    c.add_argument("circuit")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_compile)

    r = sub.add_parser("run", help="seeded noisy shots as JSON lines")
    r.add_argument("circuit")
    _common(r, shots=10)
    r.add_argument("--noiseless-state", action="store_true", help="with p = 0, print one noiseless run")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="run a verification suite; exit 0 iff it passes")
    v.add_argument("target", choices=("composability", "sequence", "localization", "purified", "norms"))
    v.add_argument("file", nargs="?", default=None, help="circuit or pattern JSON (default: catalog)")
    _common(v)
    v.set_defaults(loc_mode="paper")
    v.add_argument("--draws", type=int, default=20, help="fault draws per strength (norms)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="p_sim sweep as CSV")
    s.add_argument("circuit", nargs="?", default=None)
    _common(s, shots=10_000, noise="0.001,0.01,0.1")
    s.add_argument("--repetition", action="store_true", help="built-in repetition-code demo with logical flip columns")
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
