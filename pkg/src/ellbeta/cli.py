"""Command line entry point: ``ellbeta <command> ...``.

Every command prints JSON (CSV is available for ``verify``) and exits with
status 0 exactly when all checks performed by the invocation pass.
"""
from __future__ import annotations

import argparse
import json
import sys

from .forms import DEFAULT_GUARD, eisenstein_even_star, eisenstein_odd

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


def cmd_eisenstein(args) -> int:
    if args.weight < 1 or args.prec < 1:
        print("weight and prec must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.weight % 2:
        series = eisenstein_odd(args.weight, args.prec)
        name = f"E{args.weight}"
    else:
        series = eisenstein_even_star(args.weight, args.prec)
        name = f"G*{args.weight}"
    print(_dump({"name": name, "weight": args.weight, "series": series.to_json()}))
    return EXIT_OK


def cmd_genus(args) -> int:
    from .genus import genus_series

    if args.xmax < 1:
        print("xmax must be positive", file=sys.stderr)
        return EXIT_USAGE
    print(_dump(genus_series(args.xmax, args.prec).to_json()))
    return EXIT_OK


def cmd_finv(args) -> int:
    from .beta import BetaIndex, admissible, compute_finv, expected_finv, formula_case
    from .congruence import finv_equal

    b = BetaIndex(args.s, args.n, args.j, args.i, args.kind)
    ok, why = admissible(b)
    if not ok:
        print(_dump({"instance": b.to_json(), "admissible": False, "diagnostic": why}))
        return EXIT_FAIL
    got = compute_finv(b, args.prec_guard)
    want = expected_finv(b)
    match = finv_equal(got, want, args.prec_guard)
    print(_dump({"instance": b.to_json(), "label": b.label(), "case": formula_case(b), "admissible": True,
                 "computed": got.to_json(), "expected": want.to_json(False), "match": match}))
    return EXIT_OK if match else EXIT_FAIL


def cmd_verify(args) -> int:
    from .beta import reports_to_csv, reports_to_json, verify_suite

    try:
        reports = verify_suite(args.suite, args.max_weight, args.jobs)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        sys.stdout.write(reports_to_csv(reports))
    else:
        print(reports_to_json(reports, timings=not args.no_timings))
    return EXIT_OK if all(r.match for r in reports) else EXIT_FAIL


def cmd_lattice(args) -> int:
    from .lattice import d_lattice

    if args.weight < 0:
        print("weight must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    print(_dump(d_lattice(args.weight).to_json(args.dump)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellbeta", description="Level-3 forms, divided congruences and beta f-invariants")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eisenstein", help="q-expansion of E_W (odd W) or G*_W (even W)")
    e.add_argument("--weight", type=int, required=True)
    e.add_argument("--prec", type=int, required=True)
    e.set_defaults(func=cmd_eisenstein)

    g = sub.add_parser("genus", help="recognized coefficients of the level-3 genus")
    g.add_argument("--xmax", type=int, required=True)
    g.add_argument("--prec", type=int, default=None)
    g.set_defaults(func=cmd_genus)

    f = sub.add_parser("finv", help="f-invariant of one beta element")
    f.add_argument("--s", type=int, required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--j", type=int, required=True)
    f.add_argument("--i", type=int, required=True)
    f.add_argument("--kind", choices=("simple", "higher"), required=True)
    f.add_argument("--prec-guard", type=int, default=DEFAULT_GUARD)
    f.set_defaults(func=cmd_finv)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=("lemmas", "theorem1", "theorem2", "relations", "identities"), required=True)
    v.add_argument("--max-weight", type=int, default=None)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--no-timings", action="store_true", help="omit timings (byte-identical output)")
    v.set_defaults(func=cmd_verify)

    lat = sub.add_parser("lattice", help="HNF basis of the divided-congruence lattice D_T")
    lat.add_argument("--weight", type=int, required=True)
    lat.add_argument("--dump", action="store_true")
    lat.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
