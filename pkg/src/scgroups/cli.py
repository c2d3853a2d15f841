"""``scg`` command line.

Exit codes: 0 success, 1 the checked property fails, 2 usage or input
format error, 3 a resource limit was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import cpr
from .enumeration import (
    DEDUP_DUAL,
    DEDUP_ISO,
    EnumConfig,
    EnumerationAborted,
    enumerate_reps,
    format_table,
    table1_row,
)
from .perm import DEFAULT_INTERSECTION_LIMIT, IntersectionLimitExceeded
from .rat import PreconditionError, augment_all, candidate_edges
from .rrt import NotApplicable, reduce_and_verify
from .sggi import GeneratorTuple, NotStringError, dual, is_string_c_group, schlafli

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

BIG_N = 9


class UsageError(Exception):
    pass


def _limit() -> int:
    raw = os.environ.get("SCG_INTERSECTION_LIMIT")
    if not raw:
        return DEFAULT_INTERSECTION_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"SCG_INTERSECTION_LIMIT must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("SCG_INTERSECTION_LIMIT must be positive")
    return value


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_tuple(path: str) -> GeneratorTuple:
    """Read a representation from a JSON record or CPR text, sniffed by the first token."""
    text = _read(path)
    head = ""
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            head = body
            break
    try:
        if head.startswith("{"):
            return GeneratorTuple.from_json(text)
        if head.startswith("cpr"):
            return cpr.to_tuple(cpr.parse_text(text))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    raise UsageError(f"{path}: neither a JSON record nor CPR text")


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# -- subcommands ------------------------------------------------------------------


def cmd_check(args) -> int:
    t = load_tuple(args.file)
    rep = is_string_c_group(t, _limit())
    if args.json:
        print(json.dumps(rep.to_dict() | {"is_string_c_group": rep.is_string_c_group}))
        return EXIT_OK if rep.is_string_c_group else EXIT_FAIL
    print(f"degree: {t.degree}")
    print(f"rank: {t.rank}")
    print(f"string property: {'ok' if rep.string_ok else 'fails'}")
    if rep.string_ok:
        print(f"intersection property: {'ok' if rep.ip_ok else 'fails'}")
    print(f"group order: {rep.group_order}")
    print(f"full symmetric group: {_yes(rep.is_full_symmetric)}")
    if rep.failure_witness:
        print(f"witness: {json.dumps(rep.failure_witness)}")
    if args.verbose:
        if rep.string_ok:
            print(f"schlafli type: {schlafli(t)}")
        print(f"orbits: {[list(o) for o in t.orbits()]}")
        for label, g in zip(t.labels, t.gens):
            print(f"rho_{label} = {g!r}")
    print(f"string C-group: {_yes(rep.is_string_c_group)}")
    return EXIT_OK if rep.is_string_c_group else EXIT_FAIL


def cmd_schlafli(args) -> int:
    t = load_tuple(args.file)
    try:
        print(schlafli(t))
    except NotStringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_dual(args) -> int:
    t = load_tuple(args.file)
    _write(dual(t).to_json() + "\n", args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    t = load_tuple(args.file)
    try:
        res = reduce_and_verify(t, _limit())
    except NotStringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not res.applicable:
        print(f"not applicable: {res.reason}", file=sys.stderr)
        return EXIT_FAIL
    print(f"# {res.reason}", file=sys.stderr)
    if args.check:
        print(f"# string C-group: {_yes(res.is_string_c_group)}", file=sys.stderr)
        print(f"# group order preserved: {_yes(res.same_order)}", file=sys.stderr)
    _write(res.reduced.to_json() + "\n", args.out)
    if args.check and not (res.is_string_c_group and res.same_order):
        return EXIT_FAIL
    return EXIT_OK


def _parse_edge(text: str) -> tuple:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--edge expects 'a,b', got {text!r}") from None
    return a, b


def cmd_augment(args) -> int:
    t = load_tuple(args.file)
    limit = _limit()
    try:
        if args.edge:
            edge = tuple(sorted(_parse_edge(args.edge)))
            if edge not in candidate_edges(t):
                print(f"error: {{{edge[0]},{edge[1]}}} is not a candidate edge", file=sys.stderr)
                return EXIT_FAIL
            results = [a for a in augment_all(t, verify=args.check, limit=limit) if a.edge == edge]
        else:
            results = augment_all(t, verify=args.check, limit=limit)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        out = []
        for a in results:
            rec = {"edge": list(a.edge), "report": a.report.to_dict(), "augmented": a.augmented.to_record()}
            if args.check:
                rec["verified"] = a.verified
            out.append(rec)
        print(json.dumps(out))
        return EXIT_OK
    print(f"{len(results)} candidate edge{'s' if len(results) != 1 else ''}")
    for a in results:
        r = a.report
        line = f"edge {{{a.edge[0]},{a.edge[1]}}}: case {r.case or 'none'}, theorem applies: {_yes(r.theorem_applies)}"
        if r.failed:
            line += f" (fails: {', '.join(r.failed)})"
        if args.check:
            line += f", verified: {'true' if a.verified else 'false'}"
        print(line)
        if args.explain:
            for text in r.explain():
                print("  " + text)
        print("  " + a.augmented.to_json())
    return EXIT_OK


def _check_big(n: int, big: bool) -> None:
    if n >= BIG_N and not big:
        raise UsageError(f"n = {n} is expensive; pass --big to run it")


def cmd_enumerate(args) -> int:
    _check_big(args.n, args.big)
    checkpoint = args.checkpoint
    if args.big and checkpoint is None and args.out:
        checkpoint = args.out + ".ckpt"
    try:
        cfg = EnumConfig(
            n=args.n,
            rank=args.rank,
            dedup=DEDUP_ISO if args.no_dual else DEDUP_DUAL,
            jobs=args.jobs,
            intersection_limit=_limit(),
            include_s6_outer=not args.no_s6_outer,
            progress=args.big or args.progress,
            checkpoint=checkpoint,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    db = enumerate_reps(cfg)
    _write(db.to_jsonl(), args.out)
    print(f"{len(db)} representations (n={args.n}, rank={args.rank})", file=sys.stderr)
    return EXIT_OK


def cmd_table1(args) -> int:
    if not 5 <= args.n_from <= args.n_to:
        raise UsageError("need 5 <= --from <= --to")
    _check_big(args.n_to, args.big)
    limit = _limit()
    rows = []
    for n in range(args.n_from, args.n_to + 1):
        row, _, _ = table1_row(
            n, jobs=args.jobs, limit=limit, include_s6_outer=not args.no_s6_outer, progress=args.big or args.progress
        )
        rows.append(row)
        if args.progress:
            print(f"S_{n}: {row.as_tuple()}", file=sys.stderr)
    if args.json:
        print(json.dumps([{"n": r.n, "rk3": r.rk3, "rk4": r.rk4, "rrt": r.rrt, "rat": r.rat} for r in rows]))
    else:
        sys.stdout.write(format_table(rows))
    return EXIT_OK


def cmd_render(args) -> int:
    t = load_tuple(args.file)
    g = cpr.from_tuple(t)
    _write(cpr.emit_dot(g) if args.format == "dot" else cpr.emit_text(g), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scg", description="String C-group representations of symmetric groups.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("check", help="decide whether a tuple is a string C-group")
    s.add_argument("file")
    s.add_argument("--verbose", "-v", action="store_true")
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("schlafli", help="print the Schlafli type")
    s.add_argument("file")
    s.set_defaults(func=cmd_schlafli)

    s = sub.add_parser("dual", help="reverse the generators")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("reduce", help="rank reduction (rho_1, rho_0 rho_2, rho_3, ...)")
    s.add_argument("file")
    s.add_argument("--check", action="store_true", help="verify the reduced tuple")
    s.add_argument("--out")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("augment", help="rank augmentation from 3 to 4")
    s.add_argument("file")
    which = s.add_mutually_exclusive_group()
    which.add_argument("--edge", help="candidate edge as 'a,b'")
    which.add_argument("--all", action="store_true", help="every candidate edge (default)")
    s.add_argument("--check", action="store_true", help="verify each augmented tuple")
    s.add_argument("--explain", action="store_true", help="one line per hypothesis")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_augment)

    s = sub.add_parser("enumerate", help="enumerate representations up to isomorphism")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--rank", type=int, choices=(3, 4), required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--big", action="store_true", help=f"allow n >= {BIG_N}; enables progress and checkpoints")
    s.add_argument("--checkpoint", help="JSONL file of finished work items, resumed if present")
    s.add_argument("--progress", action="store_true")
    s.add_argument("--no-dual", action="store_true", help="count up to isomorphism only")
    s.add_argument("--no-s6-outer", action="store_true", help="do not identify S_6 outer automorphism images")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("table1", help="counts of rank 3 and 4 representations per degree")
    s.add_argument("--from", dest="n_from", type=int, required=True)
    s.add_argument("--to", dest="n_to", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--big", action="store_true")
    s.add_argument("--progress", action="store_true")
    s.add_argument("--json", action="store_true", help="print the rows as a JSON list")
    s.add_argument("--no-s6-outer", action="store_true")
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("render", help="CPR graph as DOT or text")
    s.add_argument("file")
    s.add_argument("--format", choices=("dot", "text"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntersectionLimitExceeded, EnumerationAborted) as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except NotApplicable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
