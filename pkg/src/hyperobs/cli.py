"""Command line interface.

    hyperobs global FILE --sigma 1,1,1
    hyperobs chain FILE
    hyperobs structural FILE
    hyperobs local FILE [--point 1,0,1]
    hyperobs design FILE [--d-max 2 --p 1 --sigma 0,0,0]
    hyperobs simulate FILE --x0 1,1,1 [--compare 2,1,0]

Exit status: 0 when the analysis completed, 1 when it was aborted or found
nothing (resource limit, failed design), 2 on usage or input-file errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from . import report as rpt
from .design import DesignConfig, design_outputs
from .globalobs import Verdict, build_chain, decide_global
from .groebner import DEFAULT_MAX_REDUCTIONS, GroebnerBudgetExceeded
from .local import local_observability
from .simulate import output_gap, simulate_outputs
from .structural import structural_observability_test
from .sysfile import SystemFileError, load_system

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_vector(text: str, n: int, what: str) -> List[Fraction]:
    try:
        vals = [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be comma-separated rationals, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} needs {n} entries, got {len(vals)}")
    return vals


def _sigmas(args, sf, n) -> List[List[Fraction]]:
    if args.sigma:
        return [parse_vector(s, n, "--sigma") for s in args.sigma]
    if sf.sigma is not None:
        return [sf.sigma]
    raise UsageError("no sigma given on the command line or in the file")


def _decide_one(payload):
    chain, sigma, budget = payload
    return decide_global(chain, sigma, budget)


def cmd_global(args, sf) -> tuple:
    sys_ = sf.effective()
    sigmas = _sigmas(args, sf, sys_.n)
    try:
        chain = build_chain(sys_, args.r_cap, args.two_step_stabilization, args.budget)
    except GroebnerBudgetExceeded as exc:
        return {"verdict": Verdict.INCONCLUSIVE.value, "reason": f"resource limit: {exc}"}, EXIT_FAIL
    jobs = [(chain, s, args.budget) for s in sigmas]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_decide_one, jobs))
    else:
        results = [_decide_one(j) for j in jobs]
    body = {"chain": rpt.chain_report(chain), "decisions": [rpt.global_report(r) for r in results]}
    code = EXIT_FAIL if any(r.reason.startswith("resource limit") for r in results) else EXIT_OK
    return body, code


def cmd_chain(args, sf) -> tuple:
    try:
        chain = build_chain(sf.effective(), args.r_cap, args.two_step_stabilization, args.budget)
    except GroebnerBudgetExceeded as exc:
        return {"reason": f"resource limit: {exc}"}, EXIT_FAIL
    return rpt.chain_report(chain), EXIT_OK


def cmd_structural(args, sf) -> tuple:
    res = structural_observability_test(sf.effective(), fix_outputs=not args.permute_outputs, max_n=args.max_n)
    return rpt.structural_report(res), EXIT_OK


def cmd_local(args, sf) -> tuple:
    sys_ = sf.effective()
    point = parse_vector(args.point, sys_.n, "--point") if args.point else None
    res = local_observability(sys_, point, args.seed, args.samples, with_conditions=not args.no_conditions)
    return rpt.local_report(res), EXIT_OK


def cmd_design(args, sf) -> tuple:
    sys_ = sf.effective()
    if args.sigma:
        sigma = parse_vector(args.sigma[0], sys_.n, "--sigma")
    else:
        sigma = sf.sigma if sf.sigma is not None else [Fraction(0)] * sys_.n
    cfg = DesignConfig(
        d_max=args.d_max or sf.design.get("d_max", 2),
        p=args.p or sf.design.get("p", 1),
        r_relax=args.r_relax or sf.design.get("r_relax", 3),
        r_cap=args.r_cap,
        max_reductions=args.budget,
    )
    res = design_outputs(sys_, cfg, sigma)
    body = rpt.design_report(res)
    body["sigma"] = rpt.vec(sigma)
    return body, EXIT_OK if res.success else EXIT_FAIL


def cmd_simulate(args, sf) -> tuple:
    sys_ = sf.effective()
    x0 = parse_vector(args.x0, sys_.n, "--x0")
    u = parse_vector(args.u, sys_.m, "--u") if args.u else None
    a = simulate_outputs(sys_, [float(v) for v in x0], [float(v) for v in u] if u else None, args.horizon, args.step)
    body = {
        "x0": rpt.vec(x0),
        "horizon": args.horizon,
        "step": args.step,
        "completed": a.completed,
        "final_outputs": [float(v) for v in a.outputs[-1]] if a.completed else None,
    }
    if args.compare:
        w = parse_vector(args.compare, sys_.n, "--compare")
        b = simulate_outputs(sys_, [float(v) for v in w], [float(v) for v in u] if u else None, args.horizon, args.step)
        body["compare"] = rpt.vec(w)
        body["max_output_gap"] = output_gap(a, b)
    return body, EXIT_OK


COMMANDS = {
    "global": cmd_global,
    "chain": cmd_chain,
    "structural": cmd_structural,
    "local": cmd_local,
    "design": cmd_design,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperobs", description="Observability of polynomial systems on hypergraphs")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, chain_opts=False):
        sp.add_argument("file", help="system description (JSON)")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        if chain_opts:
            sp.add_argument("--r-cap", type=int, default=None, help="largest Lie level examined")
            sp.add_argument("--budget", type=int, default=DEFAULT_MAX_REDUCTIONS, help="S-polynomial reductions per basis")
            sp.add_argument("--two-step-stabilization", action="store_true", help="require two equal steps before stopping")
        return sp

    g = common(sub.add_parser("global", help="decide observability at given initial states"), True)
    g.add_argument("--sigma", action="append", help="initial state, e.g. 1,1/2,0 (repeatable)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for several sigma")
    common(sub.add_parser("chain", help="print the ideal chain"), True)
    s = common(sub.add_parser("structural", help="closure and automorphism test"))
    s.add_argument("--permute-outputs", action="store_true", help="allow outputs to be permuted among themselves")
    s.add_argument("--max-n", type=int, default=10)
    l = common(sub.add_parser("local", help="rank of the observability matrix"))
    l.add_argument("--point", help="evaluate at this state instead of random points")
    l.add_argument("--samples", type=int, default=3)
    l.add_argument("--no-conditions", action="store_true", help="skip factoring the maximal minors")
    d = common(sub.add_parser("design", help="design outputs constant along the drift"), True)
    d.add_argument("--sigma", action="append")
    d.add_argument("--d-max", type=int, default=None)
    d.add_argument("--p", type=int, default=None)
    d.add_argument("--r-relax", type=int, default=None)
    m = common(sub.add_parser("simulate", help="integrate outputs with RK4"))
    m.add_argument("--x0", required=True)
    m.add_argument("--compare", help="second initial state; reports the largest output gap")
    m.add_argument("--u", help="constant input values")
    m.add_argument("--horizon", type=float, default=1.0)
    m.add_argument("--step", type=float, default=1e-3)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        sf = load_system(args.file)
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except SystemFileError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        body, code = COMMANDS[args.command](args, sf)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = rpt.envelope(args.command, os.path.basename(args.file), body)
    if args.format == "json":
        sys.stdout.write(rpt.dumps(report))
    else:
        sys.stdout.write("\n".join(rpt.text_lines(report)) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
