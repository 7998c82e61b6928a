"""``lrdraw`` command line: gen, draw, width, oracle, verify-lemma, bench, fit.

Exit status: 0 success, 1 a drawing failed validation or a numeric bound
failed, 2 usage or input error.  All tabular output is TSV.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .construct import ALGORITHMS, Diagnostics, draw_continuation
from .decomposition import continuation_width
from .family import FamilyParams, build_family, phi_for
from .layout import assemble_continuation, emit, validate
from .numerics import (
    family_params,
    holder_fuzz,
    lambda_base,
    lambda_refined,
    exponent_residual,
    lower_bound_exponent,
    power_fit,
)
from .oracle import BRUTEFORCE_MAX_N, wstar, wstar_bruteforce, worst_case_table
from .tree import (
    ENUMERATE_MAX_N,
    TreeSyntaxError,
    enumerate_trees,
    generate,
    parse_tree,
    serialize_tree,
)

FAMILIES = ("lower-bound", "random", "bst", "complete", "left-path", "right-path")
_KIND = {"random": "uniform", "bst": "bst_shape", "complete": "complete",
         "left-path": "left_path", "right-path": "right_path"}
VERIFY_TARGETS = ("base", "refined", "exponent", "family-params", "holder")


class UsageError(Exception):
    pass


def make_tree(family: str, n: int, seed: int, p=None, mu=None, c0=None):
    if family == "lower-bound":
        kw = {k: v for k, v in (("p", p), ("mu", mu), ("c0", c0)) if v is not None}
        return build_family(n, FamilyParams(**kw))
    return generate(_KIND[family], n, seed)


def parse_grid(spec: str) -> list[int]:
    """``a:b:step`` (arithmetic) or ``a:b:xF`` (geometric, factor F), both inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"--n-grid: expected a:b:step, got {spec!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
        if parts[2].startswith("x"):
            factor = float(parts[2][1:])
            if factor <= 1:
                raise ValueError
            out, x = [], float(a)
            while round(x) <= b:
                if not out or round(x) != out[-1]:
                    out.append(round(x))
                x *= factor
        else:
            step = int(parts[2])
            if step < 1:
                raise ValueError
            out = list(range(a, b + 1, step))
    except ValueError:
        raise UsageError(f"--n-grid: bad value {spec!r}") from None
    if a < 1 or b < a or not out:
        raise UsageError(f"--n-grid: empty or nonpositive range {spec!r}")
    return out


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_tree(path: str):
    try:
        return parse_tree(_read_text(path))
    except TreeSyntaxError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _overrides(args) -> dict:
    return {"delta": args.delta, "h": args.h, "n0": args.n0}


def _tsv(rows) -> str:
    return "".join("\t".join(str(x) for x in row) + "\n" for row in rows)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------- verbs

def cmd_gen(args) -> int:
    tree = make_tree(args.family, args.n, args.seed, args.p, args.mu, args.c0)
    _write(serialize_tree(tree) + "\n", args.out)
    return 0


def cmd_draw(args) -> int:
    tree = _read_tree(args.input)
    diag = Diagnostics()
    cont = draw_continuation(tree, args.algo, diag=diag, **_overrides(args))
    layout = assemble_continuation(tree, cont)
    report = validate(tree, layout)
    if not report.ok:
        print(f"lrdraw: drawing failed validation: {report}", file=sys.stderr)
        return 1
    text = emit(layout, tree, args.format)
    if args.diagnostics:
        rows = [("key", "value"), ("width", layout.width), ("height", layout.height),
                ("fallbacks", diag.fallbacks)]
        rows += [(f"case:{k}", v) for k, v in sorted(diag.cases.items())]
        block = _tsv(rows)
        if args.format == "tsv":
            text += "\n" + block
        else:
            sys.stderr.write(block)
    _write(text, args.out)
    return 0


def cmd_width(args) -> int:
    tree = _read_tree(args.input)
    cont = draw_continuation(tree, args.algo, **_overrides(args))
    print(continuation_width(tree, cont))
    return 0


def cmd_oracle(args) -> int:
    if not 1 <= args.n <= ENUMERATE_MAX_N:
        raise UsageError(f"--n must lie in 1..{ENUMERATE_MAX_N}")
    rows = [("n", "worst_width", "witness_tree")]
    if args.exhaustive:
        for n, width, witness in worst_case_table(args.n):
            rows.append((n, width, serialize_tree(witness)))
        if args.check:
            if args.n > BRUTEFORCE_MAX_N:
                raise UsageError("--check is limited by the brute-force size cap")
            for n in range(1, args.n + 1):
                for t in enumerate_trees(n):
                    if wstar(t) != wstar_bruteforce(t):
                        print(f"lrdraw: oracle mismatch on {serialize_tree(t)}", file=sys.stderr)
                        return 1
    else:
        # sampled lower estimate of the worst case
        rng = random.Random(args.seed)
        for n in range(1, args.n + 1):
            best, witness = 0, None
            for _ in range(args.samples):
                t = generate("uniform", n, rng.randrange(1 << 62))
                w = wstar(t)
                if w > best:
                    best, witness = w, t
            rows.append((n, best, serialize_tree(witness)))
    _write(_tsv(rows), args.out)
    return 0


def cmd_verify(args) -> int:
    rows: list[tuple] = [("check", "value", "ok")]
    ok = True
    if args.which == "base":
        for h in (args.h_value, 7):
            r = lambda_base(args.p or 0.438, args.a0, h)
            rows.append((f"rho[h={h}]", _fmt(r.rho), "-"))
            good = r.lam < (0.9984 if h == args.h_value else 1.0)
            rows.append((f"lambda[h={h}]", _fmt(r.lam), int(good)))
            ok &= good
    elif args.which == "refined":
        p = args.p or 0.437
        for istar in range(1, args.h_refined + 2):
            r = lambda_refined(p, args.gamma, args.h_refined, args.a0, istar)
            rows.append((f"lambda[i*={istar}]", _fmt(r.lam), int(r.lam < 1)))
            ok &= r.lam < 1
    elif args.which == "exponent":
        x, p = lower_bound_exponent()
        res = abs(exponent_residual(x))
        good = 0.429 <= p < 0.430 and res < 1e-12
        rows += [("x", _fmt(x), "-"), ("residual", f"{res:.3g}", int(res < 1e-12)),
                 ("p", _fmt(p), int(0.429 <= p < 0.430))]
        ok &= good
    elif args.which == "family-params":
        p = args.p or 0.429
        mu, phi = family_params(p)
        opt = phi ** p + mu ** p
        rows += [("p", _fmt(p), "-"), ("mu_opt", _fmt(mu), "-"), ("phi_opt", _fmt(phi), "-"),
                 ("power_sum_opt", _fmt(opt), int(opt >= 1 - 1e-6))]
        ok &= opt >= 1 - 1e-6
        mu0 = args.mu
        phi0 = phi_for(p, mu0)
        fp = FamilyParams(p=p, mu=mu0) if phi0 ** p + mu0 ** p >= 1 else None
        rows += [(f"phi[mu={mu0}]", _fmt(phi0), "-"),
                 ("linear_residual", f"{abs(phi0 + mu0 / (1 - 2 ** (-(1 - p) / p)) - 0.5):.3g}", 1),
                 ("power_sum", _fmt(phi0 ** p + mu0 ** p), int(fp is not None))]
        ok &= fp is not None
    else:
        bad_h, bad_s = holder_fuzz(args.count, args.seed)
        rows += [("instances", args.count, "-"), ("holder_violations", bad_h, int(bad_h == 0)),
                 ("refined_step_violations", bad_s, int(bad_s == 0))]
        ok &= bad_h == 0 and bad_s == 0
    _write(_tsv(rows), args.out)
    return 0 if ok else 1


def _bench_one(task):
    family, n, seed, algo, overrides, fam_kw, timing = task
    tree = make_tree(family, n, seed, **fam_kw)
    t0 = time.perf_counter()
    cont = draw_continuation(tree, algo, **overrides)
    elapsed = time.perf_counter() - t0
    layout = assemble_continuation(tree, cont)
    ok = validate(tree, layout).ok if n <= 200_000 else None
    row = [family, n, seed, algo, layout.width, layout.height, "-" if ok is None else int(ok)]
    if timing:
        row.append(f"{elapsed:.4f}")
    return (family, n, seed, ALGORITHMS.index(algo)), row


def cmd_bench(args) -> int:
    grid = parse_grid(args.n_grid)
    algos = args.algo or ["twist438"]
    fam_kw = {"p": args.p, "mu": args.mu, "c0": args.c0}
    seeds = [args.seed + r for r in range(args.reps)] if args.family in ("random", "bst") else [args.seed]
    if args.family == "random" and grid[-1] > 500:
        raise UsageError("--family random supports n <= 500; use bst for larger trees")
    tasks = [(args.family, n, s, a, _overrides(args), fam_kw, args.timing)
             for n in grid for s in seeds for a in algos]
    jobs = args.jobs or int(os.environ.get("LRDRAW_JOBS", "1") or 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_one, tasks))
    else:
        results = [_bench_one(t) for t in tasks]
    header = ["family", "n", "seed", "algo", "width", "height", "valid"] + (["seconds"] if args.timing else [])
    rows = [header] + [row for _, row in sorted(results, key=lambda r: r[0])]
    _write(_tsv(rows), args.out)
    return 0 if all(r[6] != 0 for r in rows[1:]) else 1


def read_points(text: str) -> list[tuple[float, float]]:
    pts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cols = line.split("\t") if "\t" in line else line.split()
        try:
            n, w = float(cols[0]), float(cols[1])
        except (ValueError, IndexError):
            if not pts and lineno == 1:
                continue  # header
            raise UsageError(f"line {lineno}: expected 'n<TAB>width'") from None
        pts.append((n, w))
    return pts


def cmd_fit(args) -> int:
    pts = read_points(_read_text(args.input))
    try:
        a, b, c = power_fit(pts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(_tsv([("a", "b", "c"), (_fmt(a), _fmt(b), _fmt(c))]), args.out)
    return 0


# ---------------------------------------------------------------- parser

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_construct_overrides(sp) -> None:
    sp.add_argument("--delta", type=float, help="slack in the spine conditions")
    sp.add_argument("--h", type=int, help="number of ruler levels")
    sp.add_argument("--n0", type=int, help="subtrees up to this size are drawn optimally")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrdraw", description="LR drawings of binary trees.")
    ap.add_argument("--version", action="version", version=f"lrdraw {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")

    sp = sub.add_parser("gen", help="generate a tree in text format")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--p", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--c0", type=_positive)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("draw", help="draw a tree and write SVG or TSV")
    sp.add_argument("--algo", choices=ALGORITHMS, required=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("svg", "tsv"), default="svg")
    sp.add_argument("--diagnostics", action="store_true", help="append a key/value TSV block")
    _add_construct_overrides(sp)
    sp.set_defaults(func=cmd_draw)

    sp = sub.add_parser("width", help="print the width of a drawing")
    sp.add_argument("--algo", choices=ALGORITHMS, required=True)
    sp.add_argument("--in", dest="input", required=True)
    _add_construct_overrides(sp)
    sp.set_defaults(func=cmd_width)

    sp = sub.add_parser("oracle", help="worst-case minimum width for n = 1..K")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--exhaustive", action="store_true", help="enumerate every tree (default: sample)")
    sp.add_argument("--check", action="store_true", help="cross-check against the brute-force formula")
    sp.add_argument("--samples", type=_positive, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify-lemma", help="numeric checks behind the width bounds")
    sp.add_argument("--which", choices=VERIFY_TARGETS, required=True)
    sp.add_argument("--p", type=float)
    sp.add_argument("--a0", type=float, default=0.247)
    sp.add_argument("--h-value", type=int, default=64, help="ruler depth standing in for the limit (base)")
    sp.add_argument("--h-refined", type=int, default=7)
    sp.add_argument("--gamma", type=float, default=0.1)
    sp.add_argument("--mu", type=float, default=0.122)
    sp.add_argument("--count", type=_positive, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="widths over a grid of sizes")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--n-grid", required=True, help="a:b:step or a:b:xFACTOR")
    sp.add_argument("--algo", choices=ALGORITHMS, action="append")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--reps", type=_positive, default=1, help="seeds per size for random families")
    sp.add_argument("--jobs", type=_positive)
    sp.add_argument("--timing", action="store_true", help="add a wall-clock column")
    sp.add_argument("--p", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--c0", type=_positive)
    sp.add_argument("--out")
    _add_construct_overrides(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("fit", help="fit width = a n^b - c to TSV points")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)
    return ap


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"lrdraw {args.verb}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
