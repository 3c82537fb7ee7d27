"""``combbmm`` command line.

Exit codes: 0 success, 1 a "yes" answer from ``threesum`` or a failed
``verify``, 2 bad input, 3 an engine mismatch under ``--check``.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._rational import as_fraction
from .bench import SUITES, format_csv, run_bench, timing_ratios
from .bitmatrix import BoolMatrix, TripartiteGraph, bool_product
from .decompose import (a_decomposition, ab_decomposition, verify_a_decomposition,
                        verify_ab_decomposition)
from .gridnorm import DEFAULT_COST_CAP, EXACT, SAMPLED
from .textio import (FormatError, format_decomposition, format_matrix, format_triangles,
                     format_values, parse_decomposition, read_graph, read_matrix, read_values,
                     write_graph, write_matrix)
from .threesum import ThreeSumInstance, solve_3sum_naive, solve_3sum_via_triangles
from .triangle import (FourRussiansParams, ListingParams, ListingStats, bmm_via_triangle,
                       brute_force_triangles, detect_triangle, enum_next, enum_preprocess,
                       four_russians_list, list_triangles, sparse_list)

EXIT_YES = 1
EXIT_BAD_INPUT = 2
EXIT_MISMATCH = 3


class CheckFailed(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected num/den, got {text!r}") from exc


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="ascii", newline="\n")


def _graph_arg(paths) -> TripartiteGraph:
    if len(paths) not in (1, 3):
        raise FormatError("give a graph prefix or three matrix files A B C")
    return read_graph(*paths)


# -- gen ---------------------------------------------------------------------


def _blockdiag(n: int, blocks: int) -> np.ndarray:
    D = np.zeros((n, n), dtype=bool)
    edges = np.linspace(0, n, blocks + 1).round().astype(int)
    for a, b in zip(edges[:-1], edges[1:]):
        D[a:b, a:b] = True
    return D


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    kind = args.kind
    if kind == "random":
        if args.graph:
            n = args.n
            write_graph(TripartiteGraph.random(n, n, n, args.p, rng), args.out, args.sparse)
        else:
            rows = args.rows if args.rows is not None else args.n
            cols = args.cols if args.cols is not None else args.n
            write_matrix(BoolMatrix.random(rows, cols, args.p, rng), args.out, args.sparse)
    elif kind == "blockdiag":
        write_matrix(BoolMatrix.from_dense(_blockdiag(args.n, args.blocks)), args.out, args.sparse)
    elif kind == "planted-triangle":
        n = args.n
        G = TripartiteGraph.random(n, n, n, args.p, rng)
        x, y, z = (int(v) for v in rng.integers(0, n, size=3))
        A, B, C = (M.dense.copy() for M in (G.A, G.B, G.C))
        A[x, y] = B[y, z] = C[x, z] = True
        planted = TripartiteGraph(*(BoolMatrix.from_dense(M) for M in (A, B, C)))
        write_graph(planted, args.out, args.sparse)
    elif kind in ("threesum-random", "threesum-planted"):
        n = args.n
        bound = args.bound if args.bound is not None else max(1, n) ** 3
        vals = rng.integers(-bound, bound + 1, size=n)
        if kind == "threesum-planted" and n:
            a, b = (int(v) for v in rng.integers(-(bound // 2), bound // 2 + 1, size=2))
            trio = [a, b, -a - b][:n]
            pos = rng.choice(n, size=len(trio), replace=False)
            vals[pos] = trio
        _write(format_values(vals.tolist()), args.out)
    return 0


# -- multiply / detect / list / enumerate ------------------------------------


def cmd_multiply(args) -> int:
    A, B = read_matrix(args.a), read_matrix(args.b)
    if A.cols != B.rows:
        raise FormatError(f"dimension mismatch: {A.shape} x {B.shape}")
    if args.engine == "naive":
        P = bool_product(A, B)
    else:
        P = bmm_via_triangle(A, B, args.eps, args.d, args.block, args.mode)
    if args.check and P != bool_product(A, B):
        raise CheckFailed("bmm-decomp disagrees with the naive product")
    _write(format_matrix(P, args.sparse), args.out)
    return 0


def cmd_detect(args) -> int:
    G = _graph_arg(args.graph)
    res = detect_triangle(G, args.eps, args.d, witness=args.witness, mode=args.mode)
    if args.check and res.found != (brute_force_triangles(G).shape[0] > 0):
        raise CheckFailed("detection disagrees with brute force")
    lines = ["yes" if res.found else "no"]
    if res.witness is not None:
        w = res.witness
        if not (G.A[w.x, w.y] and G.B[w.y, w.z] and G.C[w.x, w.z]):
            raise CheckFailed("reported witness is not a triangle")
        lines.append(f"{w.x} {w.y} {w.z}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _fr(args):
    if args.s is None:
        return None
    return FourRussiansParams(args.s, args.r if args.r is not None else min(8, args.s))


def _listing_params(args, n) -> ListingParams:
    eps = args.eps if args.eps is not None else Fraction(1, 160)
    base = ListingParams.desk_defaults(n, eps, args.d, args.H, args.delta)
    gamma = args.gamma if args.gamma is not None else base.gamma
    fr = _fr(args)
    return ListingParams(base.epsilon, gamma, base.delta, base.d, base.H, fr, args.mode)


def cmd_list(args) -> int:
    G = _graph_arg(args.graph)
    n = max(G.nx, G.ny, G.nz)
    stats = ListingStats()
    if args.engine == "listing":
        tri = list_triangles(G, _listing_params(args, n), stats)
    elif args.engine == "four-russians":
        fr = _fr(args)
        tri = four_russians_list(G, fr)
    elif args.engine == "sparse":
        tri = sparse_list(G)
    else:
        tri = brute_force_triangles(G)
    if args.check and not np.array_equal(tri, brute_force_triangles(G)):
        raise CheckFailed(f"{args.engine} listing disagrees with brute force")
    _write(f"{tri.shape[0]}\n" if args.count else format_triangles(tri), args.out)
    if args.stats and args.engine == "listing":
        cases = " ".join(f"{k}={v}" for k, v in stats.cases.items())
        print(f"cases {cases} pieces={stats.pieces}", file=sys.stderr)
    return 0


def cmd_enumerate(args) -> int:
    G = _graph_arg(args.graph)
    n = max(G.nx, G.ny, G.nz, 1)
    e = enum_preprocess(G, _listing_params(args, n), args.counting, args.budget, args.f,
                        seed=args.seed)
    emitted = []
    while (t := enum_next(e)) is not None:
        emitted.append(t)
    tri = np.array(emitted, dtype=np.int64).reshape(-1, 3)
    if args.check:
        order = np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))
        if not np.array_equal(tri[order], brute_force_triangles(G)):
            raise CheckFailed("enumeration disagrees with brute force")
    _write(f"{tri.shape[0]}\n" if args.count else format_triangles(tri), args.out)
    print(f"budget={e.budget} max_steps={e.max_steps} overruns={e.overruns}", file=sys.stderr)
    return 0


# -- decompose / verify ------------------------------------------------------


def cmd_decompose(args) -> int:
    A = read_matrix(args.a)
    if args.b is None:
        pieces = a_decomposition(A, args.eps, args.d, args.mode)
    else:
        pieces = ab_decomposition(A, read_matrix(args.b), args.eps, args.d, args.mode)
    _write(format_decomposition(pieces, args.eps, args.d), args.out)
    return 0


def cmd_verify(args) -> int:
    kind, eps, d, pieces = parse_decomposition(Path(args.dump).read_text(encoding="ascii"))
    A = read_matrix(args.a)
    cap = None if args.cap == 0 else args.cap
    if kind == "AB" or args.b is not None:
        if args.b is None:
            raise FormatError("an AB dump needs both A and B")
        if kind != "AB" and pieces:
            raise FormatError("dump holds A-decomposition pieces")
        report = verify_ab_decomposition(pieces, A, read_matrix(args.b), eps, d, cap)
        keys = ("product", "certs", "volume_bound")
    else:
        report = verify_a_decomposition(pieces, A, eps, d, cap)
        keys = ("partition", "certs", "area_bound")
    for k in keys:
        print(f"{k} {'pass' if report[k] else 'FAIL'}")
    print(f"pieces {report['pieces']}")
    print(f"regularity_unchecked {report['regularity_unchecked']}")
    for msg in report.get("failures", [])[:20]:
        print(f"failure {msg}")
    print("all_pass" if report["all_pass"] else "FAILED")
    return 0 if report["all_pass"] else 1


# -- threesum / bench --------------------------------------------------------


def cmd_threesum(args) -> int:
    vals = read_values(args.path)
    inst = ThreeSumInstance.from_values(vals, args.c, args.bound)
    if args.engine == "naive":
        res = solve_3sum_naive(inst)
    else:
        res = solve_3sum_via_triangles(inst, args.bucket_bits, args.seed)
    if args.check and res.found != solve_3sum_naive(inst).found:
        raise CheckFailed("triangle engine disagrees with the naive solver")
    if res.found:
        print(" ".join(str(v) for v in res.witness))
        return EXIT_YES
    return 0


def cmd_bench(args) -> int:
    rows = run_bench(args.suite, args.sizes, args.seeds, args.p, args.reps, args.jobs)
    _write(format_csv(rows), args.out)
    engines = SUITES[args.suite]
    for other in engines[1:]:
        for n, ratio in timing_ratios(rows, engines[0], other).items():
            print(f"{engines[0]}/{other} n={n} ratio={ratio:.3f}", file=sys.stderr)
    return 0


# -- parser ------------------------------------------------------------------


def _add_eps_d(p, eps_default="1/160", d_default=3):
    p.add_argument("--eps", type=_rational, default=_rational(eps_default) if eps_default else None,
                   help="epsilon as num/den")
    p.add_argument("--d", type=int, default=d_default)
    p.add_argument("--mode", choices=(EXACT, SAMPLED), default=EXACT,
                   help="regularity tests: exact or sampled")


def _add_listing(p):
    _add_eps_d(p, eps_default=None)
    p.add_argument("--gamma", type=_rational)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--H", type=int, default=2)
    p.add_argument("--s", type=int, help="Four-Russians group size")
    p.add_argument("--r", type=int, help="Four-Russians chunk size, default min(8, s)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="combbmm",
                                 description="Regularity-based Boolean matrix multiplication "
                                             "and triangle algorithms.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate seeded inputs")
    g.add_argument("kind", choices=("random", "blockdiag", "planted-triangle",
                                    "threesum-random", "threesum-planted"))
    g.add_argument("--n", type=int, default=16)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--p", type=_rational, default=Fraction(1, 2))
    g.add_argument("--blocks", type=int, default=2)
    g.add_argument("--bound", type=int)
    g.add_argument("--graph", action="store_true", help="random: write a graph prefix.A/.B/.C")
    g.add_argument("--sparse", action="store_true")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", required=True, help="file, or prefix for graphs")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("multiply", help="Boolean product of two matrix files")
    m.add_argument("a")
    m.add_argument("b")
    m.add_argument("--engine", choices=("naive", "bmm-decomp"), default="naive")
    _add_eps_d(m)
    m.add_argument("--block", type=int)
    m.add_argument("--sparse", action="store_true")
    m.add_argument("--check", action="store_true")
    m.add_argument("--out")
    m.set_defaults(func=cmd_multiply)

    dt = sub.add_parser("detect", help="triangle detection")
    dt.add_argument("graph", nargs="+", help="prefix or A B C files")
    _add_eps_d(dt)
    dt.add_argument("--witness", action="store_true")
    dt.add_argument("--check", action="store_true")
    dt.add_argument("--out")
    dt.set_defaults(func=cmd_detect)

    ls = sub.add_parser("list", help="list all triangles")
    ls.add_argument("graph", nargs="+")
    ls.add_argument("--engine", choices=("listing", "four-russians", "sparse", "brute"),
                    default="listing")
    _add_listing(ls)
    ls.add_argument("--count", action="store_true")
    ls.add_argument("--stats", action="store_true")
    ls.add_argument("--check", action="store_true")
    ls.add_argument("--out")
    ls.set_defaults(func=cmd_list)

    en = sub.add_parser("enumerate", help="constant-delay enumeration")
    en.add_argument("graph", nargs="+")
    _add_listing(en)
    en.add_argument("--counting", choices=("exact", "sampled"), default="exact")
    en.add_argument("--budget", type=int)
    en.add_argument("--f", type=_rational, default=Fraction(4))
    en.add_argument("--seed", type=_seed, default=0)
    en.add_argument("--count", action="store_true")
    en.add_argument("--check", action="store_true")
    en.add_argument("--out")
    en.set_defaults(func=cmd_enumerate)

    dc = sub.add_parser("decompose", help="A- or AB-decomposition dump")
    dc.add_argument("a")
    dc.add_argument("b", nargs="?")
    _add_eps_d(dc)
    dc.add_argument("--out")
    dc.set_defaults(func=cmd_decompose)

    vf = sub.add_parser("verify", help="check a decomposition dump")
    vf.add_argument("dump")
    vf.add_argument("a")
    vf.add_argument("b", nargs="?")
    vf.add_argument("--cap", type=int, default=DEFAULT_COST_CAP,
                    help="regularity check cost cap, 0 for none")
    vf.set_defaults(func=cmd_verify)

    ts = sub.add_parser("threesum", help="3-SUM on one integer per line")
    ts.add_argument("path")
    ts.add_argument("--engine", choices=("naive", "triangle"), default="triangle")
    ts.add_argument("--seed", type=_seed, default=0)
    ts.add_argument("--bucket-bits", type=int)
    ts.add_argument("--c", type=int, default=3, help="values lie in [-n^c, n^c]")
    ts.add_argument("--bound", type=int, help="explicit value bound")
    ts.add_argument("--check", action="store_true")
    ts.set_defaults(func=cmd_threesum)

    bn = sub.add_parser("bench", help="timing CSV")
    bn.add_argument("--suite", choices=sorted(SUITES), default="listing")
    bn.add_argument("--sizes", type=_int_list, default=[16, 32])
    bn.add_argument("--seeds", type=_int_list, default=[1, 2, 3])
    bn.add_argument("--p", default="1/2")
    bn.add_argument("--reps", type=int, default=3)
    bn.add_argument("--jobs", type=int, default=1)
    bn.add_argument("--out")
    bn.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
