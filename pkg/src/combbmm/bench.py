"""Benchmark harness: seeded instances, per-engine median wall time, CSV rows.

Schema: ``engine,n,density,seed,wall_ns,triangles,pieces``.  For the ``bmm``
suite ``triangles`` is the number of 1-entries of the product (one witness
triangle each); for ``threesum`` it is the number of hash-graph triangles
listed (0 for the naive scan and for answers found by pair sampling), and
``density`` is the probability that a solution is planted.  ``pieces`` is the
number of decomposition pieces an engine worked through, 0 for engines
without one.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._rational import as_fraction, format_fraction
from .bitmatrix import BoolMatrix, TripartiteGraph, bool_product
from .threesum import ThreeSumInstance, solve_3sum_naive, solve_3sum_via_triangles
from .triangle import (FourRussiansParams, ListingStats, bmm_via_triangle, brute_force_triangles,
                       four_russians_list, list_triangles)

__all__ = ["CSV_HEADER", "SUITES", "BenchRow", "instance_rng", "run_bench", "format_csv",
           "timing_ratios"]

CSV_HEADER = "engine,n,density,seed,wall_ns,triangles,pieces"

SUITES = {
    "listing": ("naive", "four-russians", "listing"),
    "bmm": ("naive", "bmm-decomp"),
    "threesum": ("naive", "triangle"),
}


@dataclass(frozen=True, order=True)
class BenchRow:
    engine: str
    n: int
    density: str
    seed: int
    wall_ns: int
    triangles: int
    pieces: int

    def csv(self) -> str:
        return (f"{self.engine},{self.n},{self.density},{self.seed},{self.wall_ns},"
                f"{self.triangles},{self.pieces}")


def instance_rng(seed: int, n: int) -> np.random.Generator:
    return np.random.default_rng([seed, n])


def _graph(n, p, seed):
    return TripartiteGraph.random(n, n, n, p, instance_rng(seed, n))


def _run_listing(engine, n, p, seed):
    G = _graph(n, p, seed)
    if engine == "naive":
        return lambda: (brute_force_triangles(G).shape[0], 0)
    if engine == "four-russians":
        return lambda: (four_russians_list(G, FourRussiansParams.default(n)).shape[0], 0)

    def listing():
        st = ListingStats()
        return list_triangles(G, stats=st).shape[0], st.pieces
    return listing


def _run_bmm(engine, n, p, seed):
    rng = instance_rng(seed, n)
    A = BoolMatrix.random(n, n, p, rng)
    B = BoolMatrix.random(n, n, p, rng)
    if engine == "naive":
        return lambda: (bool_product(A, B).nnz(), 0)

    def decomp():
        st = {}
        nnz = bmm_via_triangle(A, B, stats=st).nnz()
        return nnz, st["pieces"]
    return decomp


def _run_threesum(engine, n, p, seed):
    rng = instance_rng(seed, n)
    bound = max(1, n) ** 3
    vals = rng.integers(-bound, bound + 1, size=n)
    if rng.random() < float(p):
        a, b = (int(v) for v in rng.integers(-bound // 2, bound // 2 + 1, size=2))
        vals[:3] = [a, b, -a - b][: min(3, n)]
    inst = ThreeSumInstance.from_values(vals, bound=bound)
    if engine == "naive":
        def naive():
            solve_3sum_naive(inst)
            return 0, 0
        return naive

    def tri():
        r = solve_3sum_via_triangles(inst, seed=seed)
        return r.triangles, 0
    return tri


_BUILDERS = {"listing": _run_listing, "bmm": _run_bmm, "threesum": _run_threesum}


def _one(task) -> BenchRow:
    suite, engine, n, p, seed, reps = task
    fn = _BUILDERS[suite](engine, n, p, seed)
    times = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        result = fn()
        times.append(time.perf_counter_ns() - t0)
    tri, pieces = result
    return BenchRow(engine, n, format_fraction(as_fraction(p)), seed,
                    int(statistics.median(times)), int(tri), int(pieces))


def run_bench(suite: str, sizes, seeds, density="1/2", reps: int = 3, jobs: int = 1,
              engines=None) -> list[BenchRow]:
    """One row per (engine, size, seed), sorted; ``jobs > 1`` spreads the
    instances over worker processes."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if reps < 3:
        raise ValueError("need at least 3 repetitions for a median")
    engines = SUITES[suite] if engines is None else tuple(engines)
    p = as_fraction(density)
    tasks = [(suite, e, int(n), p, int(s), reps) for e in engines for n in sizes for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_one, tasks))
    else:
        rows = [_one(t) for t in tasks]
    return sorted(rows)


def format_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"


def timing_ratios(rows, base: str, other: str) -> dict:
    """Median over seeds of ``wall(base) / wall(other)`` per size."""
    by = {}
    for r in rows:
        by.setdefault((r.n, r.seed), {})[r.engine] = r.wall_ns
    out = {}
    for (n, _), t in sorted(by.items()):
        if base in t and other in t and t[other] > 0:
            out.setdefault(n, []).append(t[base] / t[other])
    return {n: statistics.median(v) for n, v in out.items()}
