"""Command-line front end: dimension queries, bounds, curated verification
suites, and batch scans emitting machine-readable verdict records.

Exit codes: 0 success, 1 usage error, 2 defect suspected, 3 verification
failure, 4 resource refusal.

Environment overrides: OSCSEC_PRIME replaces the default 62-bit working
prime, OSCSEC_MAX_ENTRIES replaces the jet-matrix entry budget.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import bounds, certificates, jets
from .indices import Shape, shape, veronese
from .modp import DEFAULT_PRIME, is_prime, random_prime
from .osculation import OsculatingCenter, osc_basis, osc_dim_formula

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEFECT = 2
EXIT_FAILURE = 3
EXIT_REFUSED = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; our contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}")


def _shape_of(args) -> Shape:
    ns = _int_list(args.n)
    ds = _int_list(args.d)
    try:
        return shape(ns, ds)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _validated_prime(p):
    if p.bit_length() > 62 or not is_prime(p):
        raise _UsageError(f"prime must be a prime of at most 62 bits, got {p}")
    return p


def _resolve_prime(arg, seed):
    if arg is None:
        env = os.environ.get("OSCSEC_PRIME")
        if env is None:
            return DEFAULT_PRIME
        try:
            return _validated_prime(int(env))
        except ValueError:
            raise _UsageError(f"OSCSEC_PRIME is not an integer: {env!r}")
    if arg == "auto":
        return random_prime(62, random.Random(f"oscsec-prime|{seed}"))
    try:
        return _validated_prime(int(arg))
    except ValueError:
        raise _UsageError(f"--prime takes an integer or 'auto', got {arg!r}")


def _emit(record, as_json):
    if as_json:
        print(json.dumps(record, sort_keys=True))
        return True
    return False


def _base_record(kind, t0):
    return {"schema": SCHEMA_VERSION, "kind": kind, "wall_time": round(time.perf_counter() - t0, 6)}


# ---------------------------------------------------------------------------
# osc-dim
# ---------------------------------------------------------------------------


def _cmd_osc_dim(args):
    t0 = time.perf_counter()
    sh = _shape_of(args)
    s = args.order
    if s < 0:
        raise _UsageError("--order must be >= 0")
    dim = osc_dim_formula(sh, s)
    rec = {
        "shape_dims": list(sh.factor_dims),
        "shape_degrees": list(sh.degrees),
        "label": sh.label(),
        "order": s,
        "dim": dim,
        "ambient_dim": sh.ambient_dim,
    }
    status = EXIT_OK
    if args.check:
        prime = _resolve_prime(args.prime, args.seed)
        basis_dim = len(osc_basis(sh, OsculatingCenter((0,) * sh.r, s))) - 1
        m = jets.segre_veronese_map(sh)
        pt = jets.sample_point(m, prime, random.Random(f"{args.seed}|osc-dim|{sh.label()}"))
        jet_dim = jets.jet_rank(m, pt, s) - 1
        rec.update({"basis_dim": basis_dim, "jet_dim": jet_dim, "prime": prime, "seed": args.seed})
        if not dim == basis_dim == jet_dim:
            status = EXIT_FAILURE
    rec.update(_base_record("osc-dim", t0))
    if not _emit(rec, args.json):
        line = f"dim T^{s} {sh.label()} = {dim}  (ambient N = {sh.ambient_dim})"
        if args.check:
            verdict = "agree" if status == EXIT_OK else "MISMATCH"
            line += f"  [basis {rec['basis_dim']}, jets {rec['jet_dim']}: {verdict}]"
        print(line)
    if status != EXIT_OK:
        print(
            f"three-way check failed: formula {dim}, basis {rec['basis_dim']}, jets {rec['jet_dim']}",
            file=sys.stderr,
        )
    return status


# ---------------------------------------------------------------------------
# sec-dim
# ---------------------------------------------------------------------------


def _cmd_sec_dim(args):
    t0 = time.perf_counter()
    sh = _shape_of(args)
    if args.h < 1:
        raise _UsageError("--h must be >= 1")
    if args.trials < 1:
        raise _UsageError("--trials must be >= 1")
    prime = _resolve_prime(args.prime, args.seed)
    m = jets.segre_veronese_map(sh)
    verdict = jets.secant_rank(m, args.h, prime=prime, seed=args.seed, trials=args.trials)
    rec = verdict.to_record()
    rec.update(
        {
            "shape_dims": list(sh.factor_dims),
            "shape_degrees": list(sh.degrees),
            "label": sh.label(),
        }
    )
    rec.update(_base_record("sec-dim", t0))
    if not _emit(rec, args.json):
        print(
            f"sec_{args.h} {sh.label()}: projective dim {verdict.projective_dim} "
            f"(expected {verdict.expected_projective_dim}) -> {verdict.verdict} "
            f"[prime {prime}, trials {verdict.trials_run}]"
        )
    return EXIT_OK if verdict.verdict == "not_defective_certified" else EXIT_DEFECT


# ---------------------------------------------------------------------------
# bound / table
# ---------------------------------------------------------------------------


def _cmd_bound(args):
    t0 = time.perf_counter()
    sh = _shape_of(args)
    rep = bounds.main_bound(sh)
    rec = rep.to_record()
    rec["label"] = sh.label()
    rec.update(_base_record("bound", t0))
    if not _emit(rec, args.json):
        print(f"{sh.label()}  (total degree d = {sh.d})")
        if rep.h_main is not None:
            print(f"  h_main        {rep.h_main}   (not h-defective for h <= {rep.h_main})")
        print(f"  h_baseline    {rep.h_baseline}")
        if rep.h_asymptotic is not None:
            print(f"  h_asymptotic  {rep.h_asymptotic}")
        if rep.decomposition is not None:
            p = rep.decomposition
            terms = " + ".join(f"2^{l}" for l in p.lambdas)
            if p.epsilon or not p.lambdas:
                terms = (terms + " + 1") if terms else "1"
            print(f"  decomposition d-1 = {p.value} = {terms}")
        for note in rep.notes:
            print(f"  note: {note}")
    return EXIT_OK


def _cmd_table(args):
    t0 = time.perf_counter()
    if args.n1 < 1:
        raise _UsageError("--n1 must be >= 1")
    rows = bounds.reproduce_table(args.n1)
    if args.csv:
        print("d,formula,h")
        for row in rows:
            print(f"{row.d},{row.formula},{row.h}")
    elif args.json:
        rec = {
            "n1": args.n1,
            "rows": [{"d": r.d, "formula": r.formula, "h": r.h} for r in rows],
        }
        rec.update(_base_record("table", t0))
        print(json.dumps(rec, sort_keys=True))
    else:
        print(f"n1 = {args.n1}")
        print(f"{'d':>3}  {'closed form':<28} h")
        for row in rows:
            print(f"{row.d:>3}  {row.formula:<28} {row.h}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

# The four sporadic Alexander-Hirschowitz exceptions, as (n, d, h).
AH_EXCEPTIONS = ((2, 4, 5), (3, 4, 9), (4, 3, 7), (4, 4, 14))

SHARP_CASES = (
    (((1, 1), (2, 2)), 3),
    (((1, 1, 1), (1, 1, 2)), 3),
    (((1, 1, 1, 1), (1, 1, 1, 1)), 3),
    (((2, 2, 2), (1, 1, 1)), 4),
)

REGULARITY_CASES = (
    ("strong-2", ((1, 1), (2, 2)), (0, 1)),
    ("strong-2", ((2,), (4,)), (1, 1)),
    ("strong-2", ((1,), (6,)), (2, 2)),
    ("m-regularity", ((2, 2), (1, 2)), (0,)),
    ("m-regularity", ((1,), (4,)), (1,)),
    ("m-regularity", ((1, 1), (2, 2)), (1,)),
)


def _suite_ah(prime, seed):
    items = []
    for n, d, h in AH_EXCEPTIONS:
        sh = veronese(n, d)
        m = jets.segre_veronese_map(sh)
        v = jets.secant_rank(m, h, prime=prime, seed=seed)
        items.append(
            (
                f"{sh.label()} defective at h={h}",
                v.verdict == "defect_suspected" and v.deficit >= 1,
                f"deficit {v.deficit}",
            )
        )
        c = jets.secant_rank(m, h - 1, prime=prime, seed=seed)
        items.append(
            (
                f"{sh.label()} certified at h={h - 1}",
                c.verdict == "not_defective_certified",
                f"trials {c.trials_run}",
            )
        )
    return items


def _suite_remarks(prime, seed):
    items = []
    for (ns, ds), h_def in SHARP_CASES:
        sh = shape(ns, ds)
        m = jets.segre_veronese_map(sh)
        v = jets.secant_rank(m, h_def, prime=prime, seed=seed)
        items.append(
            (
                f"{sh.label()} defective at h={h_def}",
                v.verdict == "defect_suspected",
                f"deficit {v.deficit}",
            )
        )
        c = jets.secant_rank(m, h_def - 1, prime=prime, seed=seed)
        items.append(
            (
                f"{sh.label()} certified at h={h_def - 1}",
                c.verdict == "not_defective_certified",
                f"trials {c.trials_run}",
            )
        )
    return items


def _suite_scroll(prime, seed):
    m = jets.scroll_map((1, 7))
    pt = jets.sample_point(m, prime, random.Random(f"{seed}|scroll"))
    jr = jets.jet_rank(m, pt, 3)
    items = [
        (
            "X_(1,7) order-3 osculating dim = 6 (jet rank 7, published value)",
            jr == 7,
            f"computed jet rank {jr} (osculating dim {jr - 1}): the second "
            f"u-derivative row is alpha times the mixed alpha,u,u row, an "
            f"identity the published count misses",
        )
    ]
    v = jets.secant_rank(m, 3, prime=prime, seed=seed)
    items.append(
        (
            "X_(1,7) sec_3 projective dim = 7",
            v.projective_dim == 7,
            f"computed {v.projective_dim} ({v.verdict})",
        )
    )
    return items


def _suite_table(prime, seed):
    detail = "n1 = 1..50"
    ok = True
    try:
        for n1 in range(1, 51):
            bounds.reproduce_table(n1)
    except AssertionError as exc:
        ok, detail = False, str(exc)
    items = [("table closed forms match the general bound", ok, detail)]
    ok2 = all(
        bounds.intro_bound_value(n1, d) == bounds.main_bound_value(n1, d)
        for n1 in range(1, 51)
        for d in range(3, 1001)
    )
    items.append(("profile form of the bound agrees for d <= 1000", ok2, "n1 <= 50"))
    return items


def _suite_regularity(prime, seed):
    items = []
    for kind, (ns, ds), orders in REGULARITY_CASES:
        sh = shape(ns, ds)
        if kind == "strong-2":
            bundle = certificates.strong2_certificate(sh, *orders)
        else:
            bundle = certificates.m_regularity_certificate(sh, *orders)
        items.append(
            (
                f"{kind} {sh.label()} orders {orders}",
                bundle.all_verified,
                f"{len(bundle.certificates)} hyperplanes "
                f"({bundle.profile_solved} profile, {bundle.fallback_solved} full)",
            )
        )
    return items


SUITES = {
    "ah": _suite_ah,
    "remarks": _suite_remarks,
    "scroll": _suite_scroll,
    "table": _suite_table,
    "regularity": _suite_regularity,
}


def _cmd_verify(args):
    t0 = time.perf_counter()
    prime = _resolve_prime(args.prime, args.seed)
    items = SUITES[args.suite](prime, args.seed)
    all_ok = all(ok for _, ok, _ in items)
    if args.json:
        rec = {
            "suite": args.suite,
            "prime": prime,
            "seed": args.seed,
            "ok": all_ok,
            "items": [{"name": n, "ok": ok, "detail": d} for n, ok, d in items],
        }
        rec.update(_base_record("verify", t0))
        print(json.dumps(rec, sort_keys=True))
    else:
        for name, ok, detail in items:
            print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
        n_ok = sum(ok for _, ok, _ in items)
        print(f"suite {args.suite}: {n_ok}/{len(items)} passed")
    return EXIT_OK if all_ok else EXIT_FAILURE


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def _scan_shapes(caps, d_max, ambient_max):
    """Canonical shapes with factor dimensions fitting under the caps
    (compared sorted descending), total degree 3..d_max, and N+1 within the
    ambient budget."""
    caps_sorted = sorted(caps, reverse=True)

    def fits(dims):
        ds = sorted(dims, reverse=True)
        return all(a <= b for a, b in zip(ds, caps_sorted))

    found = []

    def rec(pairs, d_left):
        if pairs:
            dims = tuple(n for n, _ in pairs)
            degs = tuple(d for _, d in pairs)
            if sum(degs) >= 3 and fits(dims):
                sh = Shape(dims, degs, tuple(pairs))
                if sh.lambda_size <= ambient_max:
                    found.append(sh)
        if len(pairs) == len(caps_sorted):
            return
        lo = pairs[-1] if pairs else (1, 1)
        for n in range(1, max(caps_sorted) + 1):
            for d in range(1, d_left + 1):
                if (n, d) >= lo:
                    rec(pairs + [(n, d)], d_left - d)

    rec([], d_max)
    return found


def _scan_worker(task):
    dims, degs, h_mode, h_max, shift, prime, seed, trials = task
    sh = Shape(tuple(dims), tuple(degs), tuple(zip(dims, degs)))
    t0 = time.perf_counter()
    h_bound = bounds.main_bound_value(sh.factor_dims[0], sh.d) + shift
    sweep_to = h_bound if h_mode == "bound" else h_max
    m = jets.segre_veronese_map(sh)
    verdicts = jets.secant_sweep(
        m, sweep_to, prime=prime, seed=f"{seed}|{sh.label()}", trials=trials
    )
    wall = round(time.perf_counter() - t0, 6)
    records = []
    for v in verdicts:
        rec = v.to_record()
        rec.update(
            {
                "schema": SCHEMA_VERSION,
                "kind": "scan",
                "shape_dims": list(sh.factor_dims),
                "shape_degrees": list(sh.degrees),
                "label": sh.label(),
                "h_bound": h_bound,
                "wall_time": wall,
            }
        )
        records.append(rec)
    return records


def _cmd_scan(args):
    caps = _int_list(args.n_max)
    if not caps or min(caps) < 1:
        raise _UsageError("--n-max needs positive factor-dimension caps")
    if args.h_mode == "range" and args.h_max is None:
        raise _UsageError("--h-mode range needs --h-max")
    if args.jobs < 1:
        raise _UsageError("--jobs must be >= 1")
    prime = _resolve_prime(args.prime, args.seed)
    shapes = _scan_shapes(caps, args.d_max, args.ambient_max)
    tasks = [
        (
            sh.factor_dims,
            sh.degrees,
            args.h_mode,
            args.h_max,
            args.bound_shift,
            prime,
            args.seed,
            args.trials,
        )
        for sh in shapes
    ]
    out = open(args.out, "w") if args.out else sys.stdout
    contradictions = 0
    written = 0
    try:
        if args.jobs == 1:
            batches = map(_scan_worker, tasks)
            for batch in batches:
                for rec in batch:
                    out.write(json.dumps(rec, sort_keys=True) + "\n")
                    written += 1
                    if rec["verdict"] == "defect_suspected" and rec["h"] <= rec["h_bound"]:
                        contradictions += 1
                out.flush()
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for batch in pool.map(_scan_worker, tasks):
                    for rec in batch:
                        out.write(json.dumps(rec, sort_keys=True) + "\n")
                        written += 1
                        if rec["verdict"] == "defect_suspected" and rec["h"] <= rec["h_bound"]:
                            contradictions += 1
                    out.flush()
    except KeyboardInterrupt:
        out.flush()
        print(f"interrupted: {written} records flushed", file=sys.stderr)
        return 130
    finally:
        if args.out:
            out.close()
    print(
        f"scan: {len(shapes)} shapes, {written} records, {contradictions} below-bound defects",
        file=sys.stderr,
    )
    return EXIT_DEFECT if contradictions else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_prime_seed(p):
    p.add_argument("--prime", default=None, help="working prime (<= 62 bits) or 'auto'")
    p.add_argument("--seed", type=int, default=0, help="deterministic seed")


def _build_parser():
    parser = _Parser(prog="oscsec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("osc-dim", help="osculating space dimension", parents=[])
    p.add_argument("--n", required=True, help="factor dimensions, e.g. 1,2")
    p.add_argument("--d", required=True, help="factor degrees, e.g. 2,3")
    p.add_argument("--order", type=int, required=True, help="osculating order s")
    p.add_argument("--check", action="store_true", help="cross-check basis and jet ranks")
    p.add_argument("--json", action="store_true")
    _add_prime_seed(p)
    p.set_defaults(func=_cmd_osc_dim)

    p = sub.add_parser("sec-dim", help="secant variety dimension verdict")
    p.add_argument("--n", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--h", type=int, required=True, help="number of points")
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--json", action="store_true")
    _add_prime_seed(p)
    p.set_defaults(func=_cmd_sec_dim)

    p = sub.add_parser("bound", help="non-defectivity bound report")
    p.add_argument("--n", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("table", help="the eight tabulated closed forms")
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("verify", help="curated verification suites")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--json", action="store_true")
    _add_prime_seed(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("scan", help="batch non-defectivity sweep (JSON lines)")
    p.add_argument("--n-max", default="1,1", help="factor dimension caps, e.g. 2,2")
    p.add_argument("--d-max", type=int, default=5, help="total degree cap")
    p.add_argument("--ambient-max", type=int, default=400, help="cap on N+1")
    p.add_argument("--h-mode", choices=("bound", "range"), default="bound")
    p.add_argument("--h-max", type=int, default=None, help="sweep limit for --h-mode range")
    p.add_argument(
        "--bound-shift",
        type=int,
        default=0,
        help="offset injected into the theorem bound (negative-control testing)",
    )
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    _add_prime_seed(p)
    p.set_defaults(func=_cmd_scan)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except jets.Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
