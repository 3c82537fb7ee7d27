"""Acceptance checks.  Each check prints one PASS/FAIL line; the soft
performance check only warns.  Run standalone with
``python tests/test_acceptance.py`` or as part of pytest."""

import hashlib
import itertools
import statistics
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from combbmm.bench import format_csv, run_bench
from combbmm.bitmatrix import BoolMatrix, TripartiteGraph, bool_product, count_product, submatrix
from combbmm.decompose import (DENSITY_INCREMENT, MIN_DEGREE_OK, REGULAR_MIN_DEG, SPARSE,
                               a_decomposition, ab_decomposition, min_degree,
                               verify_a_decomposition)
from combbmm.gridnorm import check_uniform_product, grid_norm_power, is_min_degree
from combbmm.sift import sift
from combbmm.textio import format_decomposition, format_triangles
from combbmm.threesum import (PROVEN_PHI, ThreeSumInstance, default_bucket_bits, measure_phi,
                              sample_linear_hash, solve_3sum_naive, solve_3sum_via_triangles)
from combbmm.triangle import (FourRussiansParams, ListingParams, bmm_via_triangle,
                              brute_force_triangles, detect_triangle, enum_next, enum_preprocess,
                              four_russians_detect, four_russians_list, list_triangles,
                              naive_detect_scalar)

EPS = Fraction(1, 160)
DENSITIES = (0.1, 0.3, 0.5, 0.9)


def rng_for(check: int, i: int) -> np.random.Generator:
    return np.random.default_rng([check, i])


def random_graph(rng, max_part, densities):
    nx, ny, nz = (int(v) for v in rng.integers(1, max_part + 1, size=3))
    return TripartiteGraph.random(nx, ny, nz, float(rng.choice(densities)), rng)


# -- 1 -----------------------------------------------------------------------


def check_ab_decomposition():
    start = time.perf_counter()
    bad = []
    for i in range(100):
        rng = rng_for(1, i)
        nx, ny, nz = (int(v) for v in rng.choice([16, 32, 64], size=3))
        p, d = DENSITIES[i % 4], (2, 3, 4)[i % 3]
        A = BoolMatrix.random(nx, ny, p, rng)
        B = BoolMatrix.random(ny, nz, p, rng)
        pieces = ab_decomposition(A, B, EPS, d)
        total = np.zeros((nx, nz), dtype=np.int64)
        vol = 0
        for pc in pieces:
            total[np.ix_(pc.xs, pc.zs)] += count_product(pc.A_part, pc.B_part)
            vol += pc.xs.size * pc.ys.size * pc.zs.size
        if not np.array_equal(total, count_product(A, B)) or vol > 2 * (d + 2) ** 2 * nx * ny * nz:
            bad.append(i)
    elapsed = time.perf_counter() - start
    return not bad and elapsed < 120, f"100 instances, failures={bad}, {elapsed:.1f}s (limit 120s)"


# -- 2 -----------------------------------------------------------------------


def check_a_decomposition():
    bad, certs = [], {REGULAR_MIN_DEG: 0, SPARSE: 0}
    for i in range(100):
        rng = rng_for(2, i)
        nx, ny = (int(v) for v in rng.choice([16, 32, 64], size=2))
        p, d = DENSITIES[i % 4], (2, 3, 4)[i % 3]
        A = BoolMatrix.random(nx, ny, p, rng)
        pieces = a_decomposition(A, EPS, d)
        for pc in pieces:
            certs[pc.cert] += 1
        # no cost cap: every regular piece is re-checked exactly
        report = verify_a_decomposition(pieces, A, EPS, d, feasibility_cap=None)
        if not report["all_pass"] or report["regularity_unchecked"]:
            bad.append((i, report["failures"][:2]))
    return not bad, f"100 instances, pieces by certificate={certs}, failures={bad[:5]}"


# -- 3 -----------------------------------------------------------------------


def check_sift():
    violations, outcomes = 0, {"regular": 0, "denser": 0}
    for i in range(1000):
        rng = rng_for(3, i)
        rows, cols = (int(v) for v in rng.integers(16, 33, size=2))
        D = rng.random((rows, cols)) < rng.choice([0.1, 0.3, 0.5, 0.8])
        if i % 2:
            r, c = int(rng.integers(2, rows)), int(rng.integers(2, cols))
            D[:r, :c] |= rng.random((r, c)) < 0.9
        if not D.any():
            D[0, 0] = True
        eps = (Fraction(1, 10), Fraction(1, 2))[i % 2 == 0]
        ell = 2 + (i // 2) % 2
        A = BoolMatrix.from_dense(D)
        out = sift(A, eps, 2, ell)
        dens = Fraction(int(D.sum()), D.size)
        if out.regular:
            outcomes["regular"] += 1
            ok = grid_norm_power(A, 2, ell, cap=None) <= ((1 + eps) * dens) ** (2 * ell)
        else:
            outcomes["denser"] += 1
            area = out.rows.size * out.cols.size
            sub = D[np.ix_(out.rows, out.cols)]
            ok = (area >= eps / 16 * dens ** (2 * ell) * D.size
                  and Fraction(int(sub.sum()), area) >= (1 + eps / 2) * dens)
        violations += not ok
    return violations == 0, f"1000 matrices, outcomes={outcomes}, violations={violations}"


# -- 4 -----------------------------------------------------------------------


def _min_degree_ok(D, eps, gamma):
    A = BoolMatrix.from_dense(D)
    out = min_degree(A, eps, gamma)
    sub = submatrix(A, out.kept_rows, None)
    dens = Fraction(A.nnz(), D.size)
    sub_dens = Fraction(sub.nnz(), max(1, sub.rows * sub.cols))
    if out.case == MIN_DEGREE_OK:
        return out.case, is_min_degree(sub, eps) and sub_dens >= dens
    target = D.shape[0] * (gamma.denominator - gamma.numerator) // gamma.denominator
    return out.case, out.kept_rows.size == target and sub_dens >= (1 + gamma * eps) * dens


def check_min_degree():
    eps = Fraction(1, 10)
    violations, cases = 0, {MIN_DEGREE_OK: 0, DENSITY_INCREMENT: 0}
    inputs = [np.array(bits, dtype=bool).reshape(3, 3)
              for bits in itertools.product([0, 1], repeat=9)]
    for i in range(200):
        rng = rng_for(4, i)
        D = rng.random((64, 64)) < rng.choice([0.1, 0.3, 0.5, 0.9])
        if i % 2:
            D[: int(rng.integers(1, 32))] &= rng.random((1, 64)) < 0.2
        inputs.append(D)
    for D in inputs:
        for gamma in (Fraction(1, 4), Fraction(1, 2)):
            case, ok = _min_degree_ok(D, eps, gamma)
            cases[case] += 1
            violations += not ok
    return violations == 0, f"all 512 3x3 + 200 64x64, cases={cases}, violations={violations}"


# -- 5 -----------------------------------------------------------------------


def check_detection():
    wrong = 0
    for bits in itertools.product([False, True], repeat=12):
        M = np.array(bits).reshape(3, 2, 2)
        G = TripartiteGraph(*(BoolMatrix.from_dense(m) for m in M))
        wrong += detect_triangle(G, d=2 + sum(bits) % 3).found != (
            brute_force_triangles(G).shape[0] > 0)
    answers = {True: 0, False: 0}
    for i in range(500):
        rng = rng_for(5, i)
        G = random_graph(rng, 96, [0.003, 0.01, 0.03, 0.1, 0.3, 0.6, 0.9])
        res = detect_triangle(G, d=(2, 3, 4)[i % 3], witness=True)
        truth = brute_force_triangles(G).shape[0] > 0
        answers[truth] += 1
        if res.found != truth:
            wrong += 1
        elif res.found:
            x, y, z = res.witness
            wrong += not (G.A[x, y] and G.B[y, z] and G.C[x, z])
    return wrong == 0, f"4096 exhaustive + 500 random (yes={answers[True]}, no={answers[False]}), wrong={wrong}"


# -- 6 -----------------------------------------------------------------------


def check_bmm():
    bad = []
    for i in range(50):
        rng = rng_for(6, i)
        p = (0.01, 0.05, 0.1, 0.3, 0.5, 0.9)[i % 6]
        A = BoolMatrix.random(64, 64, p, rng)
        B = BoolMatrix.random(64, 64, p, rng)
        if bmm_via_triangle(A, B) != bool_product(A, B):
            bad.append(i)
    return not bad, f"50 instances 64x64, mismatches={bad}"


# -- 7 -----------------------------------------------------------------------


def check_listing():
    bad, total = [], 0
    for i in range(200):
        rng = rng_for(7, i)
        G = random_graph(rng, 128, [0.01, 0.05, 0.1, 0.3, 0.5, 0.8])
        ref = brute_force_triangles(G)
        total += ref.shape[0]
        for s, r in ((4, 2), (8, 3), (16, 4)):
            if not np.array_equal(four_russians_list(G, FourRussiansParams(s, r)), ref):
                bad.append((i, f"four-russians {s},{r}"))
        if not np.array_equal(list_triangles(G), ref):
            bad.append((i, "listing"))
    return not bad, f"200 instances, {total} triangles, mismatches={bad[:5]}"


# -- 8 -----------------------------------------------------------------------


def check_enumeration():
    bad, worst, heavy_calls, budget = [], 0, 0, None
    for i in range(50):
        rng = rng_for(8, i)
        G = random_graph(rng, 96, [0.05, 0.3, 0.6, 0.9, 1.0])
        e = enum_preprocess(G)
        emitted = []
        while (t := enum_next(e)) is not None:
            emitted.append(tuple(t))
            if e.steps_last > e.budget:
                bad.append((i, "budget"))
            heavy_calls += e.steps_last > 0
        worst, budget = max(worst, e.max_steps), e.budget
        if sorted(emitted) != list(map(tuple, brute_force_triangles(G).tolist())):
            bad.append((i, "multiset"))
    return not bad, f"50 instances, max steps/call={worst} (budget {budget}), calls doing scan work={heavy_calls}, failures={bad[:5]}"


# -- 9 -----------------------------------------------------------------------


def check_product_band():
    rng = rng_for(9, 0)
    A = BoolMatrix.random(256, 256, 0.5, rng)
    B = BoolMatrix.random(256, 256, 0.5, rng)
    cert = check_uniform_product(A, B, Fraction(1, 100))
    frac = float(cert.outside_fraction)
    return frac <= 0.01, f"256x256 density 1/2, band 80eps=0.8, outside fraction={frac:.4f}"


# -- 10 ----------------------------------------------------------------------


def check_threesum():
    bound = 10**6
    wrong, phases = 0, {1: 0, 2: 0}
    for i in range(200):
        rng = rng_for(10, i)
        n = int(rng.integers(3, 129))
        vals = rng.integers(-bound, bound + 1, size=n)
        if i % 2:
            a, b = (int(v) for v in rng.integers(-bound // 2, bound // 2 + 1, size=2))
            vals[rng.choice(n, size=3, replace=False)] = [a, b, -a - b]
        inst = ThreeSumInstance.from_values(vals, bound=bound)
        res = solve_3sum_via_triangles(inst, seed=i)
        wrong += res.found != solve_3sum_naive(inst).found
        if res.found:
            phases[res.phase] += 1
            wrong += sum(res.witness) != 0
    h = sample_linear_hash(default_bucket_bits(128), 10, offset=bound)
    phi = measure_phi(h, bound, pairs=100_000, seed=10)
    ok = wrong == 0 and len(phi) <= 4 and phi <= set(PROVEN_PHI)
    return ok, f"200 instances, wrong={wrong}, found by phase={phases}, measured offsets={sorted(phi)}"


# -- 11 (soft) ---------------------------------------------------------------


def _dense_triangle_free(n, p, rng):
    """Dense random tripartite graph with no triangle: A and B live on the
    diagonal halves, C on the off-diagonal halves."""
    h = n // 2
    diag = np.zeros((n, n), dtype=bool)
    diag[:h, :h] = diag[h:, h:] = True
    A = diag & (rng.random((n, n)) < p)
    B = diag & (rng.random((n, n)) < p)
    C = ~diag & (rng.random((n, n)) < p)
    return TripartiteGraph(*(BoolMatrix.from_dense(M) for M in (A, B, C)))


def check_performance(n=2048, sample_rows=8):
    G = _dense_triangle_free(n, 0.9, rng_for(11, 0))
    fr_times, naive_times = [], []
    for _ in range(3):
        t0 = time.perf_counter()
        found = four_russians_detect(G).found
        fr_times.append(time.perf_counter() - t0)
        # the scalar scan does identical work on every row of this input, so
        # its full time is setup plus per-row time scaled to all rows
        t0 = time.perf_counter()
        naive_detect_scalar(G, rows=range(0))
        setup = time.perf_counter() - t0
        t0 = time.perf_counter()
        naive_detect_scalar(G, rows=range(sample_rows))
        per_row = (time.perf_counter() - t0 - setup) / sample_rows
        naive_times.append(setup + per_row * n)
    fr, naive = statistics.median(fr_times), statistics.median(naive_times)
    ratio = naive / fr
    return (ratio >= 1.5 and not found,
            f"parts={n}, four-russians {fr:.3f}s, scalar loop {naive:.1f}s "
            f"(extrapolated from {sample_rows} rows), speedup {ratio:.0f}x")


# -- 12 ----------------------------------------------------------------------


def _digest_run():
    h = hashlib.sha256()
    rng = rng_for(12, 0)
    A = BoolMatrix.random(24, 20, 0.5, rng)
    B = BoolMatrix.random(20, 22, 0.4, rng)
    h.update(format_decomposition(a_decomposition(A, EPS, 3), EPS, 3).encode())
    h.update(format_decomposition(ab_decomposition(A, B, EPS, 3), EPS, 3).encode())
    G = TripartiteGraph.random(30, 30, 30, 0.4, rng)
    for tri in (brute_force_triangles(G), four_russians_list(G), list_triangles(G),
                list_triangles(G, ListingParams(Fraction(3, 4), Fraction(3, 4), Fraction(3, 4), 4, 1))):
        h.update(format_triangles(tri).encode())
    h.update(repr([tuple(t) for t in enum_preprocess(G)]).encode())
    h.update(repr(len(enum_preprocess(G, counting="sampled", seed=5).heavy)).encode())
    h.update(repr(detect_triangle(G, witness=True)).encode())
    h.update(bmm_via_triangle(A, B).words.tobytes())
    inst = ThreeSumInstance.from_values(rng.integers(-1000, 1001, size=40), bound=1000)
    h.update(repr(solve_3sum_via_triangles(inst, seed=3, pair_factor=0)).encode())
    for suite in ("listing", "bmm", "threesum"):
        csv = format_csv(run_bench(suite, [8, 12], [1, 2], reps=3))
        stripped = [",".join(f for k, f in enumerate(line.split(",")) if k != 4)
                    for line in csv.splitlines()]
        h.update("\n".join(stripped).encode())
    return h.hexdigest()


def check_determinism():
    first, second = _digest_run(), _digest_run()
    return first == second, f"two full reruns, digests {first[:12]} / {second[:12]}"


CHECKS = [
    (1, "AB-decomposition exactness and volume bound", check_ab_decomposition, False),
    (2, "A-decomposition partition, area bound, piece certificates", check_a_decomposition, False),
    (3, "sift soundness", check_sift, False),
    (4, "min-degree trimming outcomes", check_min_degree, False),
    (5, "triangle detection equals brute force", check_detection, False),
    (6, "BMM via triangle detection equals Boolean product", check_bmm, False),
    (7, "Four-Russians and recursive listing equal brute force", check_listing, False),
    (8, "enumeration multiset and per-call step budget", check_enumeration, False),
    (9, "uniform product band on random matrices", check_product_band, False),
    (10, "3-SUM via triangles equals naive; hash offsets", check_threesum, False),
    (11, "Four-Russians detection speed vs scalar loop (soft)", check_performance, True),
    (12, "determinism of reruns", check_determinism, False),
]


def _line(num, title, ok, detail, soft):
    tag = "PASS" if ok else ("WARN" if soft else "FAIL")
    return f"{tag}  [{num:2d}] {title}: {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("num,title,fn,soft", CHECKS, ids=[f"check_{c[0]:02d}" for c in CHECKS])
def test_acceptance(num, title, fn, soft, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, detail, soft))
    if soft and not ok:
        warnings.warn(f"soft check {num} missed: {detail}")
        return
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, fn, soft in CHECKS:
        t0 = time.perf_counter()
        ok, detail = fn()
        print(_line(num, title, ok, detail, soft) + f"  ({time.perf_counter() - t0:.0f}s)",
              flush=True)
        failed += not ok and not soft
    raise SystemExit(1 if failed else 0)
