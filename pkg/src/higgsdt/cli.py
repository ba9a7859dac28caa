"""Command-line entry point: ``higgsdt <subcommand> ...``.

Exit codes: 0 success, 2 precondition violation, 3 identity or acceptance
failure, 4 resource budget exceeded.  JSON output is sorted and carries no
timestamps, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from higgsdt.curve import CurveData, CurveError
from higgsdt.oracle import DEFAULT_BUDGET, BudgetExceeded

EXIT_OK, EXIT_PRECONDITION, EXIT_IDENTITY, EXIT_BUDGET = 0, 2, 3, 4


class PreconditionError(ValueError):
    pass


def encode(x) -> str:
    """Canonical exact string of a scalar (reduced fraction or rational function in v)."""
    from higgsdt.dt import level1

    x = level1(x)
    if hasattr(x, "ring") and not x.ring.field.key().startswith("numeric"):
        return str(x)
    if hasattr(x, "sqrt_pair"):
        a, b = x.sqrt_pair()
        return str(a) if b == 0 else str(x)
    return str(x)


# -- configuration -----------------------------------------------------

def _curve(args) -> CurveData:
    spec = {"genus": args.genus}
    if args.q is not None:
        spec.update(backend="numeric", q=args.q, point_counts=args.points or [])
    else:
        spec["backend"] = "symbolic"
    return CurveData.from_config(spec)


def _explicit(parser, argv) -> set[str]:
    """Destinations of the options actually typed on the command line."""
    given = set()
    for action in parser._actions:
        for opt in action.option_strings:
            if any(tok == opt or tok.startswith(opt + "=") for tok in argv):
                given.add(action.dest)
    return given


def _merge_config(args, parser, argv) -> argparse.Namespace:
    """Config-file values fill every flag not given on the command line."""
    if not getattr(args, "config", None):
        return args
    data = json.loads(Path(args.config).read_text())
    given = _explicit(parser, argv)
    for key, value in data.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise PreconditionError(f"unknown config key {key!r}")
        if key not in given:
            setattr(args, key, value)
    return args


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- subcommands -------------------------------------------------------

def cmd_omega(args) -> int:
    from higgsdt.dt import TwistSpec, omega_table

    curve = _curve(args)
    spec = TwistSpec.positive(curve.genus, args.l)
    table = omega_table(curve, args.l, args.rmax, args.method)
    rows = [(r, d, encode(v)) for (r, d), v in sorted(table.entries.items())]
    doc = {
        "curve": curve.to_config(),
        "l": args.l,
        "flavor": spec.flavor,
        "method": args.method,
        "truncation": {"R": args.rmax},
        "omega": [{"r": r, "d_mod_r": d, "value": val} for r, d, val in rows],
        "residue": [{"r": r, "d_mod_r": d, "value": encode(v)}
                    for (r, d), v in sorted(table.residue.items())],
        "methods_agree": table.agree(),
        "pole_audit": [{"r": a.r, "ok": a.ok, "only_mu_r": a.only_mu_r, "detail": a.detail}
                       for a in table.audits],
        "stabilization": [{"r": r, "d_mod_r": d, "threshold": t, "checked_upto": u}
                          for (r, d), (t, u) in sorted(table.margins.items())],
    }
    if args.json:
        _emit(_json(doc), args.json)
    _emit(_csv(("r", "d_mod_r", "omega"), rows), args.csv)
    ok = table.agree() and all(a.ok for a in table.audits)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_kac(args) -> int:
    from higgsdt.dt import kac_positive

    A = kac_positive(_curve(args), args.rmax, args.dmax)
    rows = [(r, d, encode(c)) for (r, d), c in A.items() if (r, d) != (0, 0)]
    if args.json:
        _emit(_json(A.to_json(encode)), args.json)
    _emit(_csv(("r", "d", "A"), rows), args.csv)
    return EXIT_OK


def cmd_series(args) -> int:
    from higgsdt.dt import nil_full_series, nil_vec_series, positive_vec_series
    from higgsdt.hall import positive_full_series
    from higgsdt.series import rf_to_series

    curve = _curve(args)
    if args.kind == "nil-vec":
        f = rf_to_series(nil_vec_series(curve, args.l, args.rmax), args.dmax)
    elif args.kind == "nil-full":
        f = nil_full_series(curve, args.l, args.rmax, args.dmax)
    elif args.kind == "positive-vec":
        f = rf_to_series(positive_vec_series(curve, args.l, args.rmax), args.dmax)
    else:
        f = positive_full_series(curve, args.l, args.rmax, args.dmax)
    doc = f.to_json(encode)
    doc.update(curve=curve.to_config(), l=args.l, kind=args.kind)
    _emit(_json(doc), args.json)
    return EXIT_OK


def _read_json(path: str):
    return json.loads(sys.stdin.read() if path == "-" else Path(path).read_text())


def cmd_hn_factor(args) -> int:
    from higgsdt.hall import QTSeries, hn_factorize, zero

    A = QTSeries.from_json(_read_json(args.input))
    b = hn_factorize(A)
    factors = QTSeries(A.L, {zero(A.L.n): 1, **b}, A.bounds, A.unit)
    doc = factors.to_document()
    doc["kind"] = "hn-factors"
    _emit(_json(doc), args.output)
    return EXIT_OK


def cmd_hn_expand(args) -> int:
    from higgsdt.hall import QTSeries, hn_expand, zero

    F = QTSeries.from_json(_read_json(args.input))
    b = {k: c for k, c in F.coeffs.items() if k != zero(F.L.n)}
    A = hn_expand(b, F.L, F.bounds, F.unit)
    doc = A.to_document()
    doc["kind"] = "series"
    _emit(_json(doc), args.output)
    return EXIT_OK


def _oracle_case(job):
    from higgsdt.oracle import oracle_vol

    q, l, r, d, budget = job
    return oracle_vol(q, l, r, d, budget)


def cmd_oracle(args) -> int:
    from higgsdt.oracle import formula_side

    if any(l > 0 for l in args.l):
        raise PreconditionError("the oracle needs l <= 0")
    jobs = [(q, l, r, d, args.budget) for q in args.q for l in args.l
            for r in range(1, args.rmax + 1) for d in range(args.dmax + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            vols = list(pool.map(_oracle_case, jobs))
    else:
        vols = [_oracle_case(j) for j in jobs]
    formulas = {(q, l): formula_side(q, l, args.rmax, args.dmax) for q in args.q for l in args.l}
    rows, ok = [], True
    for (q, l, r, d, _), vol in zip(jobs, vols):
        f = formulas[(q, l)][(r, d)]
        match = f == vol
        ok &= match
        rows.append((q, l, r, d, vol.numerator, vol.denominator, encode(f), match))
    _emit(_csv(("q", "l", "r", "d", "volume_num", "volume_den", "formula_side", "match"), rows),
          args.csv)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_selfcheck(args) -> int:
    from higgsdt.checks import run

    results = run(args.suite)
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        line = f"{status} {r.suite} {r.name}"
        print(line if r.ok or not r.detail else f"{line}: {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_IDENTITY


# -- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="higgsdt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def curve_flags(sp):
        sp.add_argument("--genus", type=int, default=0)
        sp.add_argument("--q", type=int, default=None, help="field size; selects the numeric backend")
        sp.add_argument("--points", type=int, nargs="*", default=None,
                        help="point counts N_1 .. N_g over F_q, ..., F_{q^g}")
        sp.add_argument("--config", default=None, help="JSON file mirroring the flags")

    sp = sub.add_parser("omega", help="DT invariants Omega_D(r, d)")
    curve_flags(sp)
    sp.add_argument("--l", type=int, default=None, help="deg D (flag or config)")
    sp.add_argument("--rmax", type=int, default=2)
    sp.add_argument("--method", choices=("stabilized", "residue", "both"), default="stabilized")
    sp.add_argument("--csv", default=None)
    sp.add_argument("--json", default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(fn=cmd_omega)

    sp = sub.add_parser("kac", help="positive Kac series A^{>=0}_{r,d}")
    curve_flags(sp)
    sp.add_argument("--rmax", type=int, default=2)
    sp.add_argument("--dmax", type=int, default=4)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--json", default=None)
    sp.set_defaults(fn=cmd_kac)

    sp = sub.add_parser("series", help="generating series as JSON")
    curve_flags(sp)
    sp.add_argument("--kind", choices=("nil-vec", "nil-full", "positive-vec", "positive-full"),
                    default="nil-vec")
    sp.add_argument("--l", type=int, default=None, help="deg D (flag or config)")
    sp.add_argument("--rmax", type=int, default=2)
    sp.add_argument("--dmax", type=int, default=4)
    sp.add_argument("--json", default=None)
    sp.set_defaults(fn=cmd_series)

    for name, fn, text in (("hn-factor", cmd_hn_factor, "Harder-Narasimhan factors of a series"),
                           ("hn-expand", cmd_hn_expand, "ordered product of HN factors")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--input", default="-")
        sp.add_argument("--output", default=None)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("oracle", help="genus-0 brute-force volumes against the formula")
    sp.add_argument("--q", type=int, nargs="+", default=[2])
    sp.add_argument("--l", type=int, nargs="+", default=[0])
    sp.add_argument("--rmax", type=int, default=2)
    sp.add_argument("--dmax", type=int, default=3)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--csv", default=None)
    sp.add_argument("--config", default=None)
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("selfcheck", help="run invariant and identity suites")
    sp.add_argument("--suite", default="all")
    sp.add_argument("--config", default=None)
    sp.set_defaults(fn=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    from higgsdt.dt import StabilizationError, TwistError

    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        sp = parser._subparsers._group_actions[0].choices[args.command]
        args = _merge_config(args, sp, argv)
        if getattr(args, "l", 0) is None:
            raise PreconditionError("--l is required (on the command line or in --config)")
        return args.fn(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PreconditionError, TwistError, CurveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except StabilizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IDENTITY


if __name__ == "__main__":
    sys.exit(main())
