"""Command-line driver.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal error.
Resolutions persist only when ``--store DIR`` is given or ``ADAMSEXT_STORE``
is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .formula import FormulaError, compile_formula, parse_range
from .fplinalg import FpError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
STORE_ENV = "ADAMSEXT_STORE"
MODULES = ("sphere", "M", "K", "V2")


class UsageError(Exception):
    pass


def _prime(text: str) -> int:
    from .fplinalg import check_prime

    try:
        return check_prime(int(text))
    except (ValueError, FpError) as exc:
        raise argparse.ArgumentTypeError(f"p must be an odd prime: {text}") from exc


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("bounds must be nonnegative")
    return v


def _bidegree(text: str):
    try:
        s, t = text.split(",")
        return int(s), int(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected S,T, got {text!r}") from exc


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _store_dir(args) -> Optional[str]:
    return args.store or os.environ.get(STORE_ENV) or None


def _module(ctx, name):
    from .amodules import sphere_module, toda_smith_module

    return sphere_module(ctx) if name == "sphere" else toda_smith_module(ctx, {"M": 0, "K": 1, "V2": 2}[name])


def _resolve(args):
    from .milnor import AlgebraContext
    from .resolution import FreeResolution, load, save

    ctx = AlgebraContext(args.p)
    store = _store_dir(args)
    r = None
    path = None
    if store:
        os.makedirs(store, exist_ok=True)
        path = os.path.join(store, f"{args.module}_p{args.p}.json")
        if os.path.exists(path):
            r = load(path)
    if r is None:
        r = FreeResolution(_module(ctx, args.module))
    if r.max_s < args.max_s or r.max_t < args.max_t:
        r.extend(max(args.max_s, r.max_s), max(args.max_t, r.max_t), workers=args.workers,
                 time_budget=args.time_budget)
        if path:
            save(r, path)
    return r


def cmd_resolve(args) -> int:
    from .charts import render
    from .resolution import ExtChart, ext_chart

    r = _resolve(args)
    full = ext_chart(r)
    max_s = min(args.max_s, full.max_s)
    max_t = min(args.max_t, full.max_t)
    entries = {k: v for k, v in full.entries.items() if k[0] <= max_s and k[1] <= max_t}
    labels = {k: v for k, v in full.labels.items() if k in entries}
    chart = ExtChart(full.p, full.module, max_s, max_t, entries, labels)
    _emit(render(chart, args.format), args.output)
    if r.partial:
        print(f"warning: time budget reached; chart certified only for s<={max_s}, t<={max_t}", file=sys.stderr)
    return EXIT_OK


def cmd_may(args) -> int:
    from .may import e1_basis, scan_entry, vanishing_scan
    from .milnor import AlgebraContext

    ctx = AlgebraContext(args.p)
    f = compile_formula(args.t)
    if f.uses_n:
        if not args.n:
            raise UsageError("formula uses n; pass --n, e.g. --n 3..10")
        entries = vanishing_scan(ctx, args.s, f, parse_range(args.n))
    else:
        entries = [scan_entry(args.p, args.s, f(args.p))]
    if args.format == "json":
        sys.stdout.write(json.dumps(entries, indent=1, sort_keys=True) + "\n")
    else:
        for e in entries:
            tag = f"n={e['n']} " if "n" in e else ""
            body = "empty" if e["empty"] else ", ".join(e["witnesses"])
            print(f"{tag}E1^{{{e['s']},{e['t']}}}: {body}")
    if args.expect_empty:
        return EXIT_OK if all(e["empty"] for e in entries) else EXIT_FAIL
    return EXIT_OK


def cmd_les(args) -> int:
    from .les_solver import PROPOSITIONS, cross_check, load_factbase, replay_proposition

    if args.cross_check is not None:
        rep = cross_check(args.p, args.cross_check, args.max_s, args.max_t)
        sys.stdout.write(json.dumps(rep, indent=1, sort_keys=True) + "\n")
        return EXIT_OK if rep["ok"] else EXIT_FAIL
    fb = load_factbase(args.facts, p=args.p)
    idents = PROPOSITIONS if args.prop == "all" else [args.prop]
    reports = [replay_proposition(i, fb, args.p) for i in idents]
    if args.format == "json":
        sys.stdout.write(json.dumps([r.to_json() for r in reports], indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n\n".join(r.to_text() for r in reports) + "\n")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def cmd_product(args) -> int:
    from .milnor import AlgebraContext
    from .resolution import FreeResolution, basis_cocycle, yoneda_product

    (sa, ta), (sb, tb) = args.a, args.b
    ctx = AlgebraContext(args.p)
    r = FreeResolution(_module(ctx, "sphere")).extend(sa + sb, ta + tb, workers=args.workers)
    x = basis_cocycle(r, sa, ta, args.a_index)
    y = basis_cocycle(r, sb, tb, args.b_index)
    z = yoneda_product(x, y)
    out = {"p": args.p, "a": [sa, ta, args.a_index], "b": [sb, tb, args.b_index], "product": [z.s, z.t],
           "vector": list(z.vector), "zero": z.is_zero()}
    sys.stdout.write(json.dumps(out, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    kw = {"factbase_path": args.facts} if args.suite in ("les", "all") else {}
    results = run_suite(args.suite, p=args.p, **kw)
    if args.format == "json":
        sys.stdout.write(json.dumps({"suite": args.suite, "p": args.p, "ok": all(r.ok for r in results),
                                     "checks": [r.to_json() for r in results]}, indent=1, sort_keys=True, default=str) + "\n")
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_export(args) -> int:
    from .charts import render
    from .resolution import ExtChart

    with open(args.chart) as fh:
        chart = ExtChart.from_json(json.load(fh))
    _emit(render(chart, args.format), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adamsext", description="Ext over the odd-primary Steenrod algebra")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, p_default=5):
        sp.add_argument("--p", type=_prime, default=p_default, help="odd prime (default 5)")

    sp = sub.add_parser("resolve", help="compute or extend a minimal resolution and print its chart")
    common(sp)
    sp.add_argument("--module", choices=MODULES, default="sphere")
    sp.add_argument("--max-s", type=_nonneg, required=True)
    sp.add_argument("--max-t", type=_nonneg, required=True)
    sp.add_argument("--format", choices=("json", "text", "svg"), default="json")
    sp.add_argument("--store", help=f"resolution store directory (default: ${STORE_ENV}; unset means no persistence)")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--time-budget", type=float, default=None, help="seconds; stop early with an honest window")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_resolve)

    sp = sub.add_parser("may", help="May E1 basis or vanishing scan")
    common(sp)
    sp.add_argument("--s", type=_nonneg, required=True)
    sp.add_argument("--t", required=True, help="degree formula in integers, p, q, n, +, *, ^")
    sp.add_argument("--n", help="range for n, e.g. 3..10")
    sp.add_argument("--expect-empty", action="store_true")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.set_defaults(func=cmd_may)

    sp = sub.add_parser("les", help="replay exact-sequence arguments")
    common(sp)
    sp.add_argument("--prop", choices=("all", "2.2", "2.3", "2.5", "2.6", "2.7"), default="all")
    sp.add_argument("--facts", help="fact-base JSON (default: the shipped file for p)")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.add_argument("--cross-check", type=int, choices=(0, 1, 2), default=None,
                    help="compare solver dims with direct charts for this cofibration")
    sp.add_argument("--max-s", type=_nonneg, default=3)
    sp.add_argument("--max-t", type=_nonneg, default=60)
    sp.set_defaults(func=cmd_les)

    sp = sub.add_parser("product", help="Yoneda product of two basis classes of Ext(Z_p, Z_p)")
    common(sp)
    sp.add_argument("--a", type=_bidegree, required=True, help="S,T")
    sp.add_argument("--b", type=_bidegree, required=True, help="S,T")
    sp.add_argument("--a-index", type=int, default=0)
    sp.add_argument("--b-index", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp)
    sp.add_argument("--suite", choices=("all", "ext1", "ext2", "products", "may", "les", "structure"), default="all")
    sp.add_argument("--facts")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export", help="render a chart JSON file")
    sp.add_argument("--chart", required=True)
    sp.add_argument("--format", choices=("json", "text", "svg"), required=True)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_export)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    from .resolution import CorruptResolution, WindowError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FormulaError, WindowError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, CorruptResolution, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # stable contract: anything unexpected is internal
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
