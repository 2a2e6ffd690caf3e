"""``stepcat`` command line: generate, table, verify, dynamic, asymptotics.

Exit status is 0 when everything passes, 1 on a verification failure and 2 on
a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import math
import sys
from typing import List, Optional

from . import reference
from .analysis import asymptotics, bound_constant, gradient_bound, objective_bound
from .checks import SUITES, run_suite
from .dp import Family, dom_pp, pri_dp, tri_family
from .errors import StepcatError
from .io import schedule_to_dict
from .schedule import Kind, Schedule, reverse
from .sequences import dynamic_gp, dynamic_pp, grimmer_length_index, grimmer_recursion, rotaru, teboulle_vaisbourd

log = logging.getLogger("stepcat")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_N_MAX = 8192
DEFAULT_L_MAX = 12

FAMILY_ALIASES = {
    "primitive": Family.CIRC,
    "circ": Family.CIRC,
    "dominant": Family.BULLET,
    "bullet": Family.BULLET,
    "gbounded": Family.TRIANGLE,
    "triangle": Family.TRIANGLE,
}
METHODS = {
    "objective": ("teboulle", "grimmer", "dasgupta_reference", "ours"),
    "gradient": ("rotaru", "grimmer", "ours"),
}
UNAVAILABLE = "unavailable"
DASGUPTA_NOTE = "dasgupta_reference is reference (not computed)"


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def _csv(header: List[str], rows: List[list]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else f"{v:.6f}"


def _parse_rows(text: Optional[str]) -> List[int]:
    if not text:
        return list(reference.TABLE_ROWS)
    rows = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-", 1)
            rows.extend(range(int(a), int(b) + 1))
        else:
            rows.append(int(part))
    if not rows or min(rows) < 0:
        raise UsageError(f"bad --rows {text!r}")
    return rows


def _family_store(family: Family, n: int):
    if family is Family.CIRC:
        return pri_dp(n)
    if family is Family.BULLET:
        return dom_pp(n)
    return tri_family(n)


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    family = FAMILY_ALIASES[args.family]
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.n > args.n_max:
        raise UsageError(f"--n {args.n} exceeds --n-max {args.n_max}")
    h = _family_store(family, args.n)[args.n]
    if args.format == "csv":
        rows = [[i, repr(v)] for i, v in enumerate(h.tolist())]
        _emit(_csv(["i", "step"], rows), args.out)
    else:
        _emit(_json(schedule_to_dict(h, {"family": family.value})), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# table


def table_cells(metric: str, rows: List[int], methods: List[str]):
    """``(header, rows)``: one row per n, ``None`` where a method has no value."""
    n_top = max(rows)
    ours = dom_pp(n_top).sums if metric == "objective" else tri_family(n_top).sums
    out = []
    for n in rows:
        vals, notes = [], []
        for m in methods:
            v = None
            if m == "ours":
                v = bound_constant(ours[n])
            elif m == "teboulle":
                v = objective_bound(teboulle_vaisbourd(n))
            elif m == "rotaru":
                v = gradient_bound(rotaru(n))
            elif m == "grimmer":
                l = grimmer_length_index(n)
                if l is not None:
                    g = grimmer_recursion(l)
                    v = objective_bound(g) if metric == "objective" else gradient_bound(reverse(g))
            elif m == "dasgupta_reference":
                v = reference.OBJ_DASGUPTA.get(n)
            if v is None:
                notes.append(f"{m}: {UNAVAILABLE}")
            vals.append(v)
        if "dasgupta_reference" in methods:
            notes.append(DASGUPTA_NOTE)
        out.append((n, vals, "; ".join(notes)))
    return out


def cmd_table(args) -> int:
    rows = _parse_rows(args.rows)
    if max(rows) > args.n_max:
        raise UsageError(f"row n={max(rows)} exceeds --n-max {args.n_max}")
    methods = args.methods.split(",") if args.methods else list(METHODS[args.metric])
    bad = [m for m in methods if m not in METHODS[args.metric]]
    if bad:
        raise UsageError(f"method(s) {bad} not available for metric {args.metric}")
    cells = table_cells(args.metric, rows, methods)
    if args.format == "json":
        recs = [{"n": n, **dict(zip(methods, vals)), "note": note} for n, vals, note in cells]
        _emit(_json({"metric": args.metric, "methods": methods, "rows": recs}), args.out)
    else:
        body = [[n] + [_fmt(v) for v in vals] + [note] for n, vals, note in cells]
        _emit(_csv(["n"] + methods + ["note"], body), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.n_max_verify, args.threads)
    ok = all(c.passed for c in checks)
    if args.format == "csv":
        body = [[c.suite, c.name, c.achieved, c.expected, c.tolerance, "pass" if c.passed else "FAIL", c.detail] for c in checks]
        _emit(_csv(["suite", "check", "achieved", "expected", "tolerance", "status", "detail"], body), args.out)
    else:
        _emit(_json({"suite": args.suite, "passed": ok, "checks": [c.to_dict() for c in checks]}), args.out)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        log.error("FAIL %s/%s: achieved=%r expected=%r %s", c.suite, c.name, c.achieved, c.expected, c.detail)
    if args.out not in (None, "-"):
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# dynamic


def cmd_dynamic(args) -> int:
    L = args.length
    if L < 0:
        raise UsageError("--length must be >= 0")
    meta = {"variant": args.variant}
    if args.variant in ("tv", "rotaru"):
        h = teboulle_vaisbourd(L) if args.variant == "tv" else rotaru(L)
        prefix, s = [], 0.0
        for i, v in enumerate(h.tolist(), 1):
            s += v
            prefix.append((i, bound_constant(s)))
    else:
        if args.block_n < 0:
            raise UsageError("--block-n must be >= 0")
        block = pri_dp(args.block_n)[args.block_n]
        make = dynamic_pp if args.variant == "pp" else dynamic_gp
        seq = make(block=block)
        K = math.ceil(L / (len(block) + 1))
        seq.extend(K)
        full = seq.schedule()
        kind = seq.kind if L in seq.prefix_lengths else Kind.UNCLASSIFIED
        h = Schedule(full.steps[:L], kind)
        prefix = [(n, c) for n, c in seq.prefix_bounds() if n <= L]
        meta.update(block=block.tolist(), blocks=sum(1 for n, _ in prefix if n > 0))
    metric = "gradient" if args.variant in ("gp", "rotaru") else "objective"
    if args.format == "csv":
        _emit(_csv(["n", f"{metric}_constant"], [[n, _fmt(c)] for n, c in prefix]), args.out)
    else:
        d = schedule_to_dict(h, {"dynamic": dict(meta, metric=metric, prefix_bounds=[{"n": n, "constant": c} for n, c in prefix])})
        _emit(_json(d), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# asymptotics


def cmd_asymptotics(args) -> int:
    rep = asymptotics(args.l_max, args.n_max)
    rows = rep.rows()
    if args.format == "json":
        d = {k: v for k, v in rows}
        d.update(gate=rep.gate, partial=rep.partial, n_max=args.n_max, l_max=args.l_max)
        _emit(_json(d), args.out)
    else:
        body = [[k, repr(float(v))] for k, v in rows]
        body.append(["gate", rep.gate])
        if rep.partial:
            body.append(["status", "partial result: budget exceeded"])
        _emit(_csv(["quantity", "value"], body), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stepcat", description="Concatenated stepsize schedules for gradient descent.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="json"):
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt)
        sp.add_argument("--threads", type=int, default=1, help="worker threads for independent checks")

    g = sub.add_parser("generate", help="write one schedule of a family")
    g.add_argument("--family", choices=sorted(FAMILY_ALIASES), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    common(g)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("table", help="bound-constant comparison table")
    t.add_argument("--metric", choices=("objective", "gradient"), default="objective")
    t.add_argument("--rows", default=None, help="comma list / ranges of n, e.g. 1-15,25,31")
    t.add_argument("--methods", default=None, help="comma list of columns")
    t.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    common(t, "csv")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--n-max", dest="n_max_verify", type=int, default=None,
                   help="largest n per suite (defaults: tightness 64, identities 256, bounds 8192)")
    common(v)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dynamic", help="anytime dynamic sequence with per-prefix bounds")
    d.add_argument("--variant", choices=("pp", "gp", "tv", "rotaru"), required=True)
    d.add_argument("--block-n", type=int, default=0, help="block is the primitive schedule of this length")
    d.add_argument("--length", type=int, required=True)
    common(d)
    d.set_defaults(func=cmd_dynamic)

    a = sub.add_parser("asymptotics", help="rho, omega, nu_l and ratio-scan extrema")
    a.add_argument("--l-max", type=int, default=DEFAULT_L_MAX)
    a.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    common(a, "csv")
    a.set_defaults(func=cmd_asymptotics)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"stepcat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"stepcat: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except StepcatError as exc:
        print(f"stepcat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
