"""Command-line front end.

Exit codes: 0 success, 2 unreadable or malformed input, 3 contradictory verdicts.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chains import (
    Polynomial,
    birth_death_chain,
    integer_line_chain,
    integer_line_pi1,
    integer_line_pi2,
)
from .classify import InconsistentVerdict, classify_birth_death, multiple_stationary_rule
from .model import as_ctmc
from .parser import CrnSyntaxError, read_network
from .report import analyze_network, classification_json
from .simulate import (
    SimConfig,
    empirical_occupancy,
    ssa_batch,
    ssa_run,
    tv_distance,
    write_occupancy,
    write_trajectory,
)
from .stationary import (
    balance_residual,
    box_window,
    interval_window,
    product_form_poisson,
    table_measure,
)
from .structure import find_complex_balanced_equilibrium

EXIT_OK, EXIT_INPUT, EXIT_INCONSISTENT = 0, 2, 3


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return read_network(path)
    except CrnSyntaxError as exc:
        raise InputError(f"{path}:{exc.line}:{exc.column}: {exc.message}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _state(text: str, dim: int) -> tuple[int, ...]:
    try:
        x = tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise InputError(f"bad state {text!r}: expected comma-separated integers") from exc
    if len(x) != dim:
        raise InputError(f"state {text!r} has dimension {len(x)}, network has {dim} species")
    if any(v < 0 for v in x):
        raise InputError("counts must be non-negative")
    return x


def cmd_analyze(args) -> int:
    net = _load(args.path)
    report = analyze_network(net, window=args.window, tol=args.tol, terms=args.terms)
    report.validate()
    print(report.summary())
    if args.json:
        Path(args.json).write_text(report.to_json(indent=2) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = _load(args.path)
    x0 = _state(args.x0, net.dimension)
    if args.runs > 1 and args.seed is None:
        raise InputError("--seed is required for batch runs")
    try:
        cfg = SimConfig(
            seed=0 if args.seed is None else args.seed,
            time_horizon=args.T,
            max_jumps=args.max_jumps,
            state_norm_cap=args.cap,
            record=args.record,
            burn_in=args.burn_in,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    spec = as_ctmc(net)
    trajs = [ssa_run(spec, x0, cfg)] if args.runs == 1 else ssa_batch(spec, x0, cfg, args.runs)
    for i, tr in enumerate(trajs):
        print(f"run {i}: {tr.summary()}")
    out = Path(args.out) if args.out else None
    if out and cfg.record == "full":
        for i, tr in enumerate(trajs):
            write_trajectory(out.with_name(f"{out.name}.run{i}.traj"), tr)
    finished = [tr for tr in trajs if tr.horizon_reached]
    if cfg.record != "none" and finished:
        occ = empirical_occupancy(finished, None if cfg.record == "occupancy" else cfg.burn_in)
        if out:
            write_occupancy(out.with_name(f"{out.name}.occupancy"), occ)
        c = find_complex_balanced_equilibrium(net)
        if c is not None:
            pi = product_form_poisson(c)
            tv = tv_distance(occ, pi, box_window([args.tv_window] * net.dimension))
            print(f"total variation to product Poisson{tuple(round(float(v), 6) for v in c)} "
                  f"on box {args.tv_window}: {tv:.4f}")
    symptoms = len(trajs) - len(finished)
    if symptoms:
        print(f"explosion symptom in {symptoms} of {len(trajs)} runs")
    return EXIT_OK


def _polynomial(text: str) -> Polynomial:
    try:
        return Polynomial.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_classify_bd(args) -> int:
    b, d = _polynomial(args.birth), _polynomial(args.death)
    try:
        rep = classify_birth_death(b, d, lowest=args.lowest, window=args.window, terms=args.terms, tol=args.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(f"birth {b}, death {d}")
    print("verdicts: " + ", ".join(rep.tags))
    for e in rep.evidence:
        print(f"  - {e.criterion}: {e.value} in [{e.bound[0]}, {e.bound[1]}] {e.detail}")
    if args.json:
        Path(args.json).write_text(json.dumps(classification_json(rep), indent=2) + "\n")
    return EXIT_OK


def _registry():
    def integer_line(window):
        states = interval_window(-window - 2, window + 2)
        pis = [table_measure({x: f(x) for x in states}, name) for f, name in
               ((integer_line_pi1, "2^-|n| / 3"), (integer_line_pi2, "two-sided geometric mixture"))]
        return integer_line_chain(), pis, interval_window(-window, window)

    def birth_death(b, d, lowest):
        def build(window):
            from .stationary import birth_death_stationary

            return (birth_death_chain(b, d, lowest), [birth_death_stationary(b, d, lowest)],
                    interval_window(lowest, lowest + window))
        return build

    P = Polynomial.parse
    return {
        "integer-line": integer_line,
        "quartic-birth-death": birth_death(P("x^4"), P("x^2*(x-1)^2"), 1),
        "cubic-birth-death": birth_death(P("x^3"), P("x^2*(x-1)"), 1),
        "infinite-server": birth_death(P("1"), P("x"), 0),
    }


def cmd_verify_stationary(args) -> int:
    registry = _registry()
    if args.chain not in registry:
        raise InputError(f"unknown chain {args.chain!r}; choose from {', '.join(registry)}")
    spec, pis, window = registry[args.chain](args.window)
    for pi in pis:
        res = balance_residual(spec, pi, window)
        status = "passes" if res.passes(args.tol) else "FAILS"
        print(f"{pi.description}: max scaled residual {res.max_scaled:.3g} on {len(res.residuals)} interior states, "
              f"{status} at tol {args.tol}")
    rule = multiple_stationary_rule(spec, pis, window, tol=args.tol)
    if rule is not None:
        print("verdicts: " + ", ".join(rule.tags) + " (two distinct stationary measures, irreducible on window)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnx", description="Explosion analysis for stochastic reaction networks.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="structure, stationary measures and verdicts of a .crn network")
    a.add_argument("path")
    a.add_argument("--window", type=int, default=None, help="verification window: box side, or interval length")
    a.add_argument("--tol", type=float, default=1e-8, help="relative balance tolerance")
    a.add_argument("--terms", type=int, default=100_000, help="terms summed before tail bounds")
    a.add_argument("--json", help="write the report here")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="exact stochastic simulation")
    s.add_argument("path")
    s.add_argument("--x0", required=True, help="initial counts, e.g. 0,0,2")
    s.add_argument("--T", type=float, default=100.0, help="time horizon")
    s.add_argument("--seed", type=int, default=None, help="root seed (required when --runs > 1)")
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--max-jumps", type=int, default=10**7)
    s.add_argument("--cap", type=float, default=1e6, help="state norm cap")
    s.add_argument("--record", choices=("full", "occupancy", "none"), default="occupancy")
    s.add_argument("--burn-in", type=float, default=0.1)
    s.add_argument("--tv-window", type=int, default=8)
    s.add_argument("--out", help="output prefix for trajectory and occupancy files")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("classify-bd", help="classify a birth-death chain with polynomial rates")
    c.add_argument("--birth", required=True, help="e.g. x^4")
    c.add_argument("--death", required=True, help="e.g. x^2*(x-1)^2")
    c.add_argument("--lowest", type=int, default=None)
    c.add_argument("--window", type=int, default=200)
    c.add_argument("--terms", type=int, default=100_000)
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--json")
    c.set_defaults(func=cmd_classify_bd)

    v = sub.add_parser("verify-stationary", help="check built-in chains against their stationary measures")
    v.add_argument("chain")
    v.add_argument("--window", type=int, default=30)
    v.add_argument("--tol", type=float, default=1e-10)
    v.set_defaults(func=cmd_verify_stationary)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InconsistentVerdict as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
