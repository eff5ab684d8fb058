"""Command-line interface: theta tables, E_0 listings, classification,
rank-one decompositions, Chebotarev minors and the verification suites.

Sets of group elements are given as comma-separated indices into the
lexicographic enumeration of G (for Z2xZ3: 0=(0,0), 1=(0,1), 2=(0,2),
3=(1,0), ...).

Exit codes: 0 success, 1 usage error, 2 a mathematical invariant failed.
"""

import argparse
import csv
import io
import json
import os
import sys

from .errors import (
    EmptyRowSet,
    FullRank,
    GroupTooLarge,
    InvariantViolation,
    MeshulamError,
    SideConditionViolated,
    UnsupportedGroup,
)
from .groups import parse_group
from .oracle import enumerate_E0, oracle_cap, theta_oracle, MAX_ORACLE_CAP
from .uncertainty import family_of, theta_closed, theta_profile, meshulam_bound

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

THETA_COLUMNS = ("group", "k", "theta_closed", "theta_oracle", "u_bound", "equality_cases_count")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Failed(Exception):
    """A report was produced but some check in it failed."""

    def __init__(self, report, payload=None):
        super().__init__("check failed")
        self.report = report
        self.payload = payload


# argument helpers ---------------------------------------------------------------------


def _group(args):
    if not args.group:
        raise UsageError("a group is required (e.g. Z9 or Z2xZ5)")
    return parse_group(args.group)


def _index_set(text, G, name):
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        idx = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise UsageError(f"--{name} must be comma-separated integers, got {text!r}")
    if not idx:
        raise UsageError(f"--{name} must not be empty")
    if idx[0] < 0 or idx[-1] >= G.order:
        raise UsageError(f"--{name} indices must lie in [0, {G.order - 1}]")
    return tuple(idx)


def _ks(args, G):
    if args.k is None:
        return list(range(1, G.order + 1))
    if not 1 <= args.k <= G.order:
        raise UsageError(f"--k must lie in [1, {G.order}]")
    return [args.k]


def _cap(args):
    if args.oracle_cap is not None and not 1 <= args.oracle_cap <= MAX_ORACLE_CAP:
        raise UsageError(f"--oracle-cap must lie in [1, {MAX_ORACLE_CAP}]")
    return oracle_cap(args.oracle_cap)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# commands -------------------------------------------------------------------------------


def cmd_theta(args):
    G = _group(args)
    cap = _cap(args)
    within = G.order <= cap
    fam = family_of(G)
    supported = fam is not None and fam.ordered
    prof = theta_profile(G) if theta_closed(1, G) is not None else None
    rows = []
    problems = []
    for k in _ks(args, G):
        closed = prof[k] if prof is not None else None
        oracle = theta_oracle(k, G, cap=cap, jobs=args.jobs) if within else None
        if closed is None and oracle is None:
            raise GroupTooLarge(f"no closed form for {G.spec} and the order exceeds the oracle cap {cap}")
        th = closed if closed is not None else oracle
        count = None
        if within:
            entries = enumerate_E0(k, th, G, cap=cap, jobs=args.jobs, theta_value=th, line_check=supported)
            count = len(entries)
        u = meshulam_bound(k, G)
        if closed is not None and oracle is not None and closed != oracle:
            problems.append({"k": k, "theta_closed": closed, "theta_oracle": oracle})
        if -(-u.numerator // u.denominator) > th or th > G.order - k + 1:
            problems.append({"k": k, "theta": th, "u": str(u), "reason": "outside the bounds sandwich"})
        rows.append(
            {
                "group": G.spec,
                "k": k,
                "theta_closed": closed,
                "theta_oracle": oracle,
                "u_bound": str(u),
                "equality_cases_count": count,
            }
        )
    fmt = args.format or "csv"
    if fmt == "json":
        text = _dump_json({"group": G.spec, "rows": rows})
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=THETA_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: "" if r[c] is None else r[c] for c in THETA_COLUMNS})
        text = buf.getvalue()
    else:
        header = f"{'k':>4} {'closed':>7} {'oracle':>7} {'u(k)':>9} {'E0 pairs':>9}"
        lines = [f"theta on {G.spec}", header]
        for r in rows:
            cells = ["-" if r[c] is None else str(r[c]) for c in THETA_COLUMNS[1:]]
            lines.append(f"{cells[0]:>4} {cells[1]:>7} {cells[2]:>7} {cells[3]:>9} {cells[4]:>9}")
        text = "\n".join(lines) + "\n"
    if problems:
        raise _Failed(text, {"group": G.spec, "disagreements": problems})
    return text


def cmd_enumerate(args):
    from .equality import classify

    G = _group(args)
    cap = _cap(args)
    if args.k is None:
        raise UsageError("--k is required")
    (k,) = _ks(args, G)
    fam = family_of(G)
    supported = fam is not None and fam.ordered
    closed = theta_closed(k, G)
    th = closed[0] if closed is not None else theta_oracle(k, G, cap=cap, jobs=args.jobs)
    entries = enumerate_E0(k, th, G, cap=cap, jobs=args.jobs, theta_value=th, line_check=supported)
    out = []
    for e in entries:
        item = {"A": list(e.key(G)[0]), "B": list(e.key(G)[1]), "representative": e.function.to_json()}
        if supported:
            desc = classify(e.function)
            if not desc:
                raise InvariantViolation(
                    f"enumerated function on {G.spec} at k = {k} is not extremal", {"function": e.function.to_json()}
                )
            item["family"] = desc.family
            item["params"] = desc.to_json()["params"]
        else:
            item["family"] = None
        out.append(item)
    report = {"group": G.spec, "k": k, "theta": th, "count": len(out), "entries": out}
    if args.format == "text":
        lines = [f"E_0({k}, {th}) on {G.spec}: {len(out)} pairs"]
        lines += [f"A={e['A']} B={e['B']} family={e['family']}" for e in out]
        return "\n".join(lines) + "\n"
    return _dump_json(report)


def cmd_classify(args):
    from .equality import classify, verify_classification
    from .transform import GroupFunction

    if args.function:
        with open(args.function) as fh:
            f = GroupFunction.from_json(json.load(fh))
        desc = classify(f)
        report = {"group": f.group.spec, "extremal": bool(desc), "descriptor": desc.to_json()}
        if args.format == "text":
            if desc:
                return f"{desc.family} on {f.group.spec}, k = {desc.k}\n"
            return f"not extremal: support {len(f)}, spectrum {report['descriptor']['spectrum']}, theta {report['descriptor']['theta']}\n"
        return _dump_json(report)
    G = _group(args)
    cap = _cap(args)
    ks = _ks(args, G)
    rows = verify_classification(G, cap=cap, ks=ks)
    report = {"group": G.spec, "rows": [r.to_json() for r in rows]}
    if args.format == "text":
        lines = [f"classification on {G.spec}"]
        for r in rows:
            fams = ", ".join(f"{name}:{n}" for name, n in sorted(r.classified.items())) or "none"
            note = "" if r.rule_agrees else "  (drop rule disagrees)"
            lines.append(f"k={r.k:<3} theta={r.theta:<3} lines={r.observed_lines:<5} {fams}{note}")
        return "\n".join(lines) + "\n"
    return _dump_json(report)


def cmd_decompose(args):
    from .rankdecomp import decompose_rank_one, extract_matrix, kernel_function_support, verify_decomposition

    G = _group(args)
    A = _index_set(args.A, G, "A")
    B = _index_set(args.B, G, "B")
    k = len(A)
    M = extract_matrix(A, B, G)
    A0, dim = kernel_function_support(A, B, G)
    report = {"group": G.spec, "A": list(A), "B": list(B), "k": k, "rank": k - dim}
    closed = theta_closed(k, G)
    if closed is not None:
        report["theta"] = closed[0]
    if dim == 0:
        report["message"] = "full rank; no decomposition required"
    else:
        try:
            D = decompose_rank_one(A, B, G, kernel=(A0, dim))
        except (UnsupportedGroup, SideConditionViolated, FullRank) as exc:
            report["message"] = str(exc)
        else:
            report["decomposition"] = D.to_json()
            report["verified"] = verify_decomposition(M, D)
            if not report["verified"]:
                raise _Failed(_dump_json(report), {"decomposition": D.to_json()})
    if args.format == "text":
        lines = [f"M_(A,B) on {G.spec}: k = {k}, rank {report['rank']}"]
        if "decomposition" in report:
            d = report["decomposition"]
            lines.append(f"{len(d['blocks'])} rank-one blocks ({d['recipe']})")
            lines += [f"  rows {b['rows']} x cols {b['cols']}" for b in d["blocks"]]
        else:
            lines.append(report["message"])
        return "\n".join(lines) + "\n"
    return _dump_json(report)


def cmd_chebotarev(args):
    from .groups import is_prime
    from .rankdecomp import chebotarev_check

    if args.p is None or not is_prime(args.p) or args.p > 13:
        raise UsageError("--p must be a prime at most 13")
    rep = chebotarev_check(args.p, args.max_minor)
    text = _dump_json(rep.to_json()) if args.format != "text" else (
        f"p={rep.p}: {rep.checked} minors up to size {rep.max_minor}, {'all nonzero' if rep.ok else 'vanishing minor found'}\n"
    )
    if not rep.ok:
        raise _Failed(text, rep.to_json())
    return text


def _render_checks(suite, results, fmt):
    passed = all(r.passed for r in results)
    if fmt == "text":
        lines = [r.line(timing=False) if hasattr(r, "number") else r.line() for r in results]
        lines.append(f"{suite}: {'all pass' if passed else 'FAILURES'}")
        return "\n".join(lines) + "\n", passed
    items = [r.to_json(timing=False) if hasattr(r, "number") else r.to_json() for r in results]
    return _dump_json({"suite": suite, "passed": passed, "results": items}), passed


def cmd_verify(args):
    from . import verify as V
    from .uncertainty import duality_check

    suite = args.suite
    if suite == "acceptance":
        results = V.run_all(args.criterion or None, seed=args.seed, jobs=args.jobs)
    elif suite == "families":
        cap = _cap(args)
        specs = [args.group] if args.group else V.family_groups(args.max_order)
        results = []
        for spec in specs:
            results += V.check_group(parse_group(spec), cap=cap, jobs=args.jobs)
    elif suite == "chebotarev":
        if args.p is None:
            results = [V.check_chebotarev()]
        else:
            from .groups import is_prime
            from .rankdecomp import chebotarev_check

            if not is_prime(args.p) or args.p > 13:
                raise UsageError("--p must be a prime at most 13")
            rep = chebotarev_check(args.p, args.max_minor)
            results = [V.GroupCheck(f"Z{args.p}", "chebotarev", rep.ok, rep.to_json())]
    else:  # duality
        groups = [_group(args)] if args.group else [parse_group(s) for s in V.family_groups(args.max_order)]
        results = []
        for G in groups:
            prof = theta_profile(G, use_oracle=theta_closed(1, G) is None, cap=_cap(args))

            def body(G=G, prof=prof):
                return True, {"drops_checked": [k for k in range(2, G.order + 1) if duality_check(k, G, prof)]}

            results.append(V._guarded(G.spec, "duality", body))
    text, passed = _render_checks(suite, results, args.format)
    if not passed:
        raise _Failed(text)
    return text


COMMANDS = {
    "theta": cmd_theta,
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "chebotarev": cmd_chebotarev,
    "verify": cmd_verify,
}


def build_parser():
    parser = _Parser(
        prog="meshulam",
        description="Exact uncertainty-principle computations on finite Abelian groups.",
        epilog="Sets (--A, --B) are comma-separated indices into the lexicographic list of G's elements.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (theta defaults to csv, everything else to json)")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive searches")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    common.add_argument("--oracle-cap", type=int, default=None,
                        help=f"largest |G| for brute force (default from FAG_ORACLE_CAP, at most {MAX_ORACLE_CAP})")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theta", parents=[common], help="theta table with oracle cross-check")
    p.add_argument("group", nargs="?", help="group spec such as Z9 or Z2xZ5")
    p.add_argument("--k", type=int)

    p = sub.add_parser("enumerate", parents=[common], help="list E_0(k, theta(k)) with classifications")
    p.add_argument("group", nargs="?")
    p.add_argument("--k", type=int)

    p = sub.add_parser("classify", parents=[common], help="compare E_0 with the constructed families")
    p.add_argument("group", nargs="?")
    p.add_argument("--k", type=int)
    p.add_argument("--function", help="JSON file holding one function to classify")

    p = sub.add_parser("decompose", parents=[common], help="rank and rank-one blocks of M_(A,B)")
    p.add_argument("group", nargs="?")
    p.add_argument("--A", help="support indices, e.g. 0,3,6")
    p.add_argument("--B", help="spectrum indices")

    p = sub.add_parser("chebotarev", parents=[common], help="check square minors of the Z_p Fourier matrix")
    p.add_argument("--p", type=int)
    p.add_argument("--max-minor", type=int, default=None)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("group", nargs="?")
    p.add_argument("--suite", choices=("acceptance", "families", "chebotarev", "duality"), default="acceptance")
    p.add_argument("--max-order", type=int, default=16)
    p.add_argument("--criterion", type=int, action="append", choices=range(1, 11), metavar="N",
                   help="acceptance criterion to run (repeatable; default all)")
    p.add_argument("--p", type=int)
    p.add_argument("--max-minor", type=int, default=None)
    return parser


def _emit(text, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the final flush
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        from .verify import DEFAULT_SEED

        args.seed = DEFAULT_SEED
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if args.format == "csv" and args.command != "theta":
        parser.error("csv output is only available for theta")
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except _Failed as exc:
        _emit(exc.report, args)
        if exc.payload is not None:
            sys.stderr.write(_dump_json({"counterexample": exc.payload}))
        return EXIT_INVARIANT
    except InvariantViolation as exc:
        sys.stderr.write(_dump_json({"error": str(exc), "counterexample": exc.payload}))
        return EXIT_INVARIANT
    except (GroupTooLarge, UnsupportedGroup, EmptyRowSet, ValueError) as exc:
        sys.stderr.write(f"meshulam: error: {exc}\n")
        return EXIT_USAGE
    except MeshulamError as exc:
        sys.stderr.write(f"meshulam: error: {exc}\n")
        return EXIT_USAGE
    _emit(text, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
