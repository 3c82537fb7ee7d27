"""Regularity decompositions driven by density increments and decrements.

* ``min_degree`` trims low-degree rows until the rest is eps-min-degree, or
  until enough rows are gone that the density has provably gone up.
* ``reg_rect`` alternates trimming and sifting until it lands on a rectangle
  that is both (eps, 2, d)-regular and eps-min-degree.
* ``a_decomposition`` peels such rectangles off ``A`` until what is left has
  density at most ``2^-d``.
* ``reg_cube`` does the same for a pair ``(A, B)``: a rectangle ``Y* x Z*`` of
  ``B`` plus a decomposition of ``A[X, Y*]`` whose pieces see a regular,
  min-degree slice of ``B``.
* ``ab_decomposition`` repeatedly removes good cubes from ``B`` and recurses
  on the leftover parts of each cube, so that the pieces' 2-path counts add up
  to those of ``(A, B)`` exactly.

The drivers work on dense ``bool`` arrays with index arrays into the original
parts; pieces are only wrapped as labelled :class:`BoolMatrix` on output.
All thresholds are exact rational comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rational import as_fraction
from .bitmatrix import BoolMatrix, count_product
from .gridnorm import DEFAULT_COST_CAP, EXACT, RegularityParams, grid_norm_power, is_min_degree
from .sift import sift_dense

__all__ = [
    "MIN_DEGREE_OK",
    "DENSITY_INCREMENT",
    "SPARSE",
    "REGULAR_MIN_DEG",
    "SPARSE_A",
    "SPARSE_B",
    "REGULAR_PAIR",
    "MinDegreeOutcome",
    "ADecompPiece",
    "ABDecompPiece",
    "GoodCube",
    "DecompositionStats",
    "ab_gamma",
    "min_degree",
    "reg_rect",
    "a_decomposition",
    "reg_cube",
    "ab_decomposition",
    "ab_decomposition_arrays",
    "verify_a_decomposition",
    "verify_ab_decomposition",
    "verify_good_cube",
]

MIN_DEGREE_OK = "MinDegreeOk"
DENSITY_INCREMENT = "DensityIncrement"

SPARSE = "Sparse"
REGULAR_MIN_DEG = "RegularMinDeg"
SPARSE_A = "SparseA"
SPARSE_B = "SparseB"
REGULAR_PAIR = "RegularPair"

# Guard against runaway density-increment loops; every loop provably
# terminates far below this.
MAX_ROUNDS = 10**6


@dataclass(frozen=True)
class MinDegreeOutcome:
    kept_rows: np.ndarray
    case: str


@dataclass(frozen=True)
class ADecompPiece:
    rows: np.ndarray
    cols: np.ndarray
    matrix: BoolMatrix
    cert: str


@dataclass(frozen=True)
class ABDecompPiece:
    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    A_part: BoolMatrix
    B_part: BoolMatrix
    cert: str


@dataclass(frozen=True)
class GoodCube:
    y_star: np.ndarray
    z_star: np.ndarray
    pieces: tuple  # of (xs, ys, zs, A_part as dense array)
    a_certs: tuple = ()


@dataclass
class DecompositionStats:
    """Counters filled in by the drivers (optional ``stats=`` argument)."""

    reg_rect_rounds: int = 0
    reg_cube_rounds: int = 0
    sift_calls: int = 0
    good_cubes: int = 0
    max_depth: int = 0
    base_partitions: int = 0
    density_trail: list = field(default_factory=list)


def ab_gamma(d: int) -> Fraction:
    """Trimming parameter used by the AB-decomposition: 1 / (2 (d+2)^2)."""
    return Fraction(1, 2 * (d + 2) ** 2)


def _sparse(nnz: int, area: int, d: int) -> bool:
    # nnz / area <= 2^-d
    return nnz << d <= area


def _ratio_ge(n1: int, a1: int, factor: Fraction, n0: int, a0: int) -> bool:
    """n1/a1 >= factor * n0/a0 with integer cross-multiplication."""
    return n1 * a0 * factor.denominator >= factor.numerator * n0 * a1


# -- MinDegree ---------------------------------------------------------------


def _min_degree_counts(counts: np.ndarray, epsilon: Fraction, gamma: Fraction):
    """Ascending-degree removal with a maintained edge count.

    Row ``x`` (smallest remaining degree) goes while
    ``deg(x) < (1 - eps) E[A']``, i.e. ``c * r * q < (q - p) * e`` for
    ``eps = p/q``, ``r`` remaining rows and ``e`` remaining edges.  Removal
    stops early once at most ``(1 - gamma) |X|`` rows remain.
    """
    n = counts.size
    p, q = epsilon.numerator, epsilon.denominator
    total = int(counts.sum())
    # rows that must go before the density-increment case fires
    limit = n - (n * (gamma.denominator - gamma.numerator)) // gamma.denominator
    if n == 0:
        return np.zeros(0, dtype=np.int64), MIN_DEGREE_OK
    if n <= 48:
        # small inputs: a plain loop beats the array round trips
        cl = counts.tolist()
        idx = sorted(range(n), key=cl.__getitem__)
        first_stop, r, e = 0, n, total
        while first_stop < n and cl[idx[first_stop]] * r * q < (q - p) * e:
            e -= cl[idx[first_stop]]
            r -= 1
            first_stop += 1
        cut = limit if limit <= first_stop else first_stop
        kept = np.array(sorted(idx[cut:]), dtype=np.int64)
        return kept, (DENSITY_INCREMENT if limit <= first_stop else MIN_DEGREE_OK)
    order = np.argsort(counts, kind="stable")
    if q < 1 << 24 and total < 1 << 36 and n < 1 << 20:
        c = counts[order].astype(np.int64)
        before = np.concatenate(([0], np.cumsum(c)[:-1]))
        r = n - np.arange(n, dtype=np.int64)
        cond = c * r * q < (q - p) * (total - before)
        bad = np.flatnonzero(~cond)
        first_stop = int(bad[0]) if bad.size else n
    else:
        first_stop = 0
        r, e = n, total
        cl = counts[order].tolist()
        while first_stop < n and cl[first_stop] * r * q < (q - p) * e:
            e -= cl[first_stop]
            r -= 1
            first_stop += 1
    if limit <= first_stop:
        return np.sort(order[limit:]), DENSITY_INCREMENT
    return np.sort(order[first_stop:]), MIN_DEGREE_OK


def min_degree(A: BoolMatrix, epsilon, gamma) -> MinDegreeOutcome:
    """Trim rows of degree below ``(1 - eps)`` times the current density.

    ``MinDegreeOk``: the kept rows induce an eps-min-degree matrix at least as
    dense as ``A``.  ``DensityIncrement``: exactly ``floor((1-gamma)|X|)`` rows
    remain and their density is at least ``(1 + gamma eps) E[A]``.
    """
    epsilon, gamma = as_fraction(epsilon), as_fraction(gamma)
    if epsilon <= 0 or gamma <= 0:
        raise ValueError("epsilon and gamma must be positive")
    if A.rows == 0 or A.cols == 0:
        raise ValueError("min_degree needs a nonempty matrix")
    kept, case = _min_degree_counts(A.row_counts(), epsilon, gamma)
    return MinDegreeOutcome(kept, case)


# -- RegRect / ADecomposition ------------------------------------------------


def _reg_rect_dense(D, epsilon, d, mode, stats):
    rows = np.arange(D.shape[0], dtype=np.int64)
    cols = np.arange(D.shape[1], dtype=np.int64)
    half = Fraction(1, 2)
    grow = 1 + epsilon / 2
    sub = D
    for _ in range(MAX_ROUNDS):
        if stats is not None:
            stats.reg_rect_rounds += 1
        counts = sub.sum(axis=1)
        nnz = int(counts.sum())
        area = sub.size
        if stats is not None:
            stats.density_trail.append(Fraction(nnz, area))
        kept, _ = _min_degree_counts(counts, epsilon, half)
        trimmed = sub[kept]
        t_nnz = int(counts[kept].sum())
        if _ratio_ge(t_nnz, trimmed.size, grow, nnz, area):
            rows, sub = rows[kept], trimmed
            continue
        if stats is not None:
            stats.sift_calls += 1
        res = sift_dense(trimmed, epsilon, 2, d, mode)
        if res is not None:
            r2, c2 = res
            rows, cols = rows[kept][r2], cols[c2]
            sub = trimmed[np.ix_(r2, c2)]
            continue
        return rows[kept], cols
    raise RuntimeError("reg_rect did not converge")


def reg_rect(A: BoolMatrix, epsilon, d: int, mode: str = EXACT, stats=None):
    """Good rectangle ``(rows, cols)`` (local indices) of a matrix with
    density at least ``2^-d``: regular, min-degree and at least as dense."""
    epsilon = as_fraction(epsilon)
    _check_eps_d(epsilon, d)
    if A.rows == 0 or A.cols == 0 or _sparse_strict(A.nnz(), A.rows * A.cols, d):
        raise ValueError("reg_rect needs density at least 2^-d")
    return _reg_rect_dense(A.dense, epsilon, d, mode, stats)


def _sparse_strict(nnz, area, d):
    # nnz / area < 2^-d
    return nnz << d < area


def _check_eps_d(epsilon, d):
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if d < 1:
        raise ValueError("d must be at least 1")


def _a_decomposition_iter(D, epsilon, d, mode, stats):
    """Yield (rows, cols, dense piece, cert) with local indices, one good
    rectangle at a time.  Consumers that stop early skip the remaining work
    without changing the pieces already produced."""
    R = np.array(D, dtype=bool, copy=True)
    n_rows, n_cols = R.shape
    if n_rows == 0 or n_cols == 0:
        return
    nnz = int(R.sum())
    for _ in range(MAX_ROUNDS):
        if _sparse(nnz, R.size, d):
            yield (np.arange(n_rows, dtype=np.int64), np.arange(n_cols, dtype=np.int64), R, SPARSE)
            return
        rows, cols = _reg_rect_dense(R, epsilon, d, mode, stats)
        ix = np.ix_(rows, cols)
        piece = R[ix].copy()
        yield rows, cols, piece, REGULAR_MIN_DEG
        nnz -= int(piece.sum())
        R[ix] = False
    raise RuntimeError("a_decomposition did not converge")


def _a_decomposition_dense(D, epsilon, d, mode, stats):
    return list(_a_decomposition_iter(D, epsilon, d, mode, stats))


def a_decomposition(A: BoolMatrix, epsilon, d: int, mode: str = EXACT, stats=None):
    """Pieces whose 1-entries partition those of ``A``; every piece is either
    sparse (density at most ``2^-d``) or (eps, 2, d)-regular and min-degree."""
    epsilon = as_fraction(epsilon)
    _check_eps_d(epsilon, d)
    gr, gc = A.global_rows(), A.global_cols()
    pieces = []
    for rows, cols, M, cert in _a_decomposition_dense(A.dense, epsilon, d, mode, stats):
        pieces.append(ADecompPiece(gr[rows], gc[cols], BoolMatrix.from_dense(M, gr[rows], gc[cols]), cert))
    return pieces


# -- RegCube / ABDecomposition -----------------------------------------------


def _reg_cube_dense(DA, DB, epsilon, gamma, d, mode, stats):
    """Returns (y_star, z_star, pieces) with pieces (xs, ys, zs, A_piece, a_cert),
    all indices local to DA's rows, DB's rows and DB's columns."""
    y_cur = np.arange(DB.shape[0], dtype=np.int64)
    z_cur = np.arange(DB.shape[1], dtype=np.int64)
    left_eps = epsilon * gamma / 2
    left_grow = 1 + epsilon * gamma / 4
    right_grow = 1 + epsilon * gamma
    half = Fraction(1, 2)
    for _ in range(MAX_ROUNDS):
        if stats is not None:
            stats.reg_cube_rounds += 1
        B = DB[np.ix_(y_cur, z_cur)]
        counts = B.sum(axis=1)
        nnz = int(counts.sum())
        kept, _ = _min_degree_counts(counts, left_eps, half)
        k_nnz = int(counts[kept].sum())
        if _ratio_ge(k_nnz, kept.size * B.shape[1], left_grow, nnz, B.size):
            y_cur = y_cur[kept]
            continue
        y_prime = y_cur[kept]
        a_pieces = _a_decomposition_iter(DA[:, y_prime], epsilon, d, mode, stats)
        restart = False
        found = []
        for xs, ys_loc, Ap, a_cert in a_pieces:
            ys = y_prime[ys_loc]
            B_full = DB[np.ix_(ys, z_cur)]
            col_counts = B_full.sum(axis=0)
            keep_z, _ = _min_degree_counts(col_counts, epsilon, gamma)
            B_l = B_full[:, keep_z]
            if _ratio_ge(int(col_counts[keep_z].sum()), B_l.size, right_grow,
                         int(col_counts.sum()), B_full.size):
                y_cur, z_cur = ys, z_cur[keep_z]
                restart = True
                break
            if stats is not None:
                stats.sift_calls += 1
            res = sift_dense(B_l.T, epsilon, 2, d, mode)
            if res is not None:
                z2, y2 = res
                y_cur, z_cur = ys[y2], z_cur[keep_z][z2]
                restart = True
                break
            found.append((xs, ys, z_cur[keep_z], Ap, a_cert))
        if not restart:
            return y_prime, z_cur, found
    raise RuntimeError("reg_cube did not converge")


def reg_cube(A: BoolMatrix, B: BoolMatrix, epsilon, gamma, d: int, mode: str = EXACT,
             stats=None) -> GoodCube:
    """Good cube for ``(A, B)``; requires ``E[B] >= 2^-d`` and gamma in (0, 1/2)."""
    epsilon, gamma = as_fraction(epsilon), as_fraction(gamma)
    _check_eps_d(epsilon, d)
    if not 0 < gamma < Fraction(1, 2):
        raise ValueError("gamma must lie in (0, 1/2)")
    if A.cols != B.rows:
        raise ValueError("dimension mismatch")
    if B.rows == 0 or B.cols == 0 or _sparse_strict(B.nnz(), B.rows * B.cols, d):
        raise ValueError("reg_cube needs E[B] >= 2^-d")
    y_star, z_star, found = _reg_cube_dense(A.dense, B.dense, epsilon, gamma, d, mode, stats)
    pieces = tuple((xs, ys, zs, Ap) for xs, ys, zs, Ap, _ in found)
    return GoodCube(y_star, z_star, pieces, tuple(c for *_, c in found))


def _base_partition(xs, ys, zs, DA, DB, d, emit):
    """Split B's edges into parts of density at most 2^-d (row-major greedy).

    When ``|Y||Z| < 2^d`` no nonzero part can be that sparse; each edge
    ``(y, z)`` then becomes its own all-ones piece ``(N_A(y), {y}, {z})``.
    """
    n_y, n_z = DB.shape
    cap = (n_y * n_z) >> d
    ey, ez = np.nonzero(DB)
    if cap == 0:
        for y, z in zip(ey.tolist(), ez.tolist()):
            nx = np.flatnonzero(DA[:, y])
            if nx.size == 0:
                continue
            emit(xs[nx], ys[[y]], zs[[z]], np.ones((nx.size, 1), bool), np.ones((1, 1), bool),
                 REGULAR_PAIR)
        return
    for start in range(0, ey.size, cap):
        part = np.zeros_like(DB)
        part[ey[start:start + cap], ez[start:start + cap]] = True
        emit(xs, ys, zs, DA, part, SPARSE_B)


def _ab_rec(xs, ys, zs, DA, DB, epsilon, d, h, mode, stats, emit):
    gamma = ab_gamma(d)
    DB = np.array(DB, dtype=bool, copy=True)
    if stats is not None:
        stats.max_depth = max(stats.max_depth, h)
    for _ in range(MAX_ROUNDS):
        if xs.size == 0 or ys.size == 0 or zs.size == 0:
            return
        nnz = int(DB.sum())
        if _sparse(nnz, DB.size, d):
            emit(xs, ys, zs, DA, DB, SPARSE_B)
            return
        if h == d:
            if stats is not None:
                stats.base_partitions += 1
            _base_partition(xs, ys, zs, DA, DB, d, emit)
            return
        y_star, z_star, found = _reg_cube_dense(DA, DB, epsilon, gamma, d, mode, stats)
        if stats is not None:
            stats.good_cubes += 1
        in_star = np.zeros(DB.shape[1], dtype=bool)
        in_star[z_star] = True
        for lx, ly, lz, Ap, _ in found:
            cert = SPARSE_A if _sparse(int(Ap.sum()), Ap.size, d) else REGULAR_PAIR
            emit(xs[lx], ys[ly], zs[lz], Ap, DB[np.ix_(ly, lz)], cert)
            rest_mask = in_star.copy()
            rest_mask[lz] = False
            rest = np.flatnonzero(rest_mask)
            if rest.size:
                _ab_rec(xs[lx], ys[ly], zs[rest], Ap, DB[np.ix_(ly, rest)], epsilon, d, h + 1,
                        mode, stats, emit)
        DB[np.ix_(y_star, z_star)] = False
    raise RuntimeError("ab_decomposition did not converge")


def ab_decomposition(A: BoolMatrix, B: BoolMatrix, epsilon, d: int, mode: str = EXACT,
                     stats=None) -> list[ABDecompPiece]:
    """Pieces ``(X_k, Y_k, Z_k, A_k, B_k)`` with ``sum_k A_k B_k = A B`` (as
    2-path counts, embedded at global coordinates).  Each piece has a sparse
    side (density at most ``2^-d``) or ``A_k`` and ``B_k^T`` are both
    (eps, 2, d)-regular and eps-min-degree."""
    epsilon = as_fraction(epsilon)
    _check_eps_d(epsilon, d)
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    pieces: list[ABDecompPiece] = []

    def emit(xs, ys, zs, Ap, Bp, cert):
        if xs.size == 0 or ys.size == 0 or zs.size == 0:
            return
        pieces.append(ABDecompPiece(
            xs, ys, zs, BoolMatrix.from_dense(Ap, xs, ys), BoolMatrix.from_dense(Bp, ys, zs), cert))

    _ab_rec(A.global_rows(), A.global_cols(), B.global_cols(), A.dense, B.dense, epsilon, d, 0,
            mode, stats, emit)
    return pieces


def ab_decomposition_arrays(DA: np.ndarray, DB: np.ndarray, epsilon, d: int, mode: str = EXACT,
                            stats=None) -> list[tuple]:
    """Array form of :func:`ab_decomposition`: tuples
    ``(xs, ys, zs, A_k, B_k, cert)`` with local indices and dense pieces."""
    epsilon = as_fraction(epsilon)
    _check_eps_d(epsilon, d)
    if DA.shape[1] != DB.shape[0]:
        raise ValueError(f"dimension mismatch: {DA.shape} x {DB.shape}")
    out = []

    def emit(xs, ys, zs, Ap, Bp, cert):
        if xs.size and ys.size and zs.size:
            out.append((xs, ys, zs, Ap, Bp, cert))

    _ab_rec(np.arange(DA.shape[0], dtype=np.int64), np.arange(DA.shape[1], dtype=np.int64),
            np.arange(DB.shape[1], dtype=np.int64), np.asarray(DA, dtype=bool),
            np.asarray(DB, dtype=bool), epsilon, d, 0, mode, stats, emit)
    return out


# -- verification ------------------------------------------------------------


def _regular_check(D: np.ndarray, epsilon: Fraction, d: int, cap):
    """True/False when exactly checkable within ``cap``, else None."""
    rows, cols = D.shape
    if rows == 0 or cols == 0:
        return True
    nnz = int(D.sum())
    bound = ((1 + epsilon) * Fraction(nnz, rows * cols)) ** (2 * d)
    cost = min(rows * rows * cols, cols**d * rows)
    if cap is not None and cost > cap:
        return None
    return grid_norm_power(BoolMatrix.from_dense(D), 2, d, None) <= bound


def _area_pow2_le(nnz, area, d):
    return area > 0 and _sparse(nnz, area, d)


def _piece_globals(M: BoolMatrix):
    return M.global_rows(), M.global_cols()


def verify_a_decomposition(pieces, A: BoolMatrix, epsilon, d: int,
                           feasibility_cap: int | None = DEFAULT_COST_CAP) -> dict:
    """Machine-check the A-decomposition guarantees.

    Report keys: ``partition``, ``certs``, ``area_bound`` (booleans) and
    ``all_pass``; plus ``regularity_unchecked`` (pieces beyond the cap),
    ``pieces``, ``area_sum``, ``min_area`` for information.
    """
    epsilon = as_fraction(epsilon)
    n_rows, n_cols = A.shape
    cover = np.zeros((n_rows, n_cols), dtype=np.int64)
    certs_ok = True
    unchecked = 0
    area_sum = 0
    min_area = None
    bad = []
    gr, gc = A.global_rows(), A.global_cols()
    row_pos = {int(g): i for i, g in enumerate(gr)}
    col_pos = {int(g): i for i, g in enumerate(gc)}
    for idx, p in enumerate(pieces):
        try:
            r = np.array([row_pos[int(v)] for v in p.rows], dtype=np.int64)
            c = np.array([col_pos[int(v)] for v in p.cols], dtype=np.int64)
        except KeyError:
            certs_ok = False
            bad.append((idx, "index outside A"))
            continue
        if p.matrix.shape != (r.size, c.size):
            certs_ok = False
            bad.append((idx, "matrix shape mismatch"))
            continue
        M = p.matrix.dense
        cover[np.ix_(r, c)] += M
        area = r.size * c.size
        area_sum += area
        min_area = area if min_area is None else min(min_area, area)
        nnz = int(M.sum())
        if p.cert == SPARSE:
            ok = _area_pow2_le(nnz, area, d)
        elif p.cert == REGULAR_MIN_DEG:
            ok = is_min_degree(p.matrix, epsilon)
            reg = _regular_check(M, epsilon, d, feasibility_cap)
            if reg is None:
                unchecked += 1
            else:
                ok = ok and reg
        else:
            ok = False
        if not ok:
            certs_ok = False
            bad.append((idx, p.cert))
    partition = bool(np.array_equal(cover, A.dense.astype(np.int64)))
    area_ok = area_sum <= (d + 2) * n_rows * n_cols
    return {
        "partition": partition,
        "certs": certs_ok,
        "area_bound": area_ok,
        "all_pass": partition and certs_ok and area_ok,
        "regularity_unchecked": unchecked,
        "pieces": len(pieces),
        "area_sum": area_sum,
        "min_area": min_area,
        "failures": bad,
    }


def verify_ab_decomposition(pieces, A: BoolMatrix, B: BoolMatrix, epsilon, d: int,
                            feasibility_cap: int | None = DEFAULT_COST_CAP) -> dict:
    """Machine-check the AB-decomposition guarantees (see
    :func:`verify_a_decomposition` for the report layout; the area bound is
    replaced by ``volume_bound``: sum of ``|X_k||Y_k||Z_k|`` at most
    ``2 (d+2)^2 |X||Y||Z|``)."""
    epsilon = as_fraction(epsilon)
    if A.cols != B.rows:
        raise ValueError("dimension mismatch")
    nx, ny, nz = A.rows, A.cols, B.cols
    total = np.zeros((nx, nz), dtype=np.int64)
    xpos = {int(g): i for i, g in enumerate(A.global_rows())}
    ypos = {int(g): i for i, g in enumerate(A.global_cols())}
    zpos = {int(g): i for i, g in enumerate(B.global_cols())}
    certs_ok = True
    consistent = True
    unchecked = 0
    vol_sum = 0
    min_vol = None
    bad = []
    for idx, p in enumerate(pieces):
        try:
            xi = np.array([xpos[int(v)] for v in p.xs], dtype=np.int64)
            yi = np.array([ypos[int(v)] for v in p.ys], dtype=np.int64)
            zi = np.array([zpos[int(v)] for v in p.zs], dtype=np.int64)
        except KeyError:
            consistent = False
            bad.append((idx, "index outside parts"))
            continue
        if p.A_part.shape != (xi.size, yi.size) or p.B_part.shape != (yi.size, zi.size):
            consistent = False
            bad.append((idx, "matrix shape mismatch"))
            continue
        Ad, Bd = p.A_part.dense, p.B_part.dense
        # pieces may only use edges that exist in the input
        if np.any(Ad & ~A.dense[np.ix_(xi, yi)]) or np.any(Bd & ~B.dense[np.ix_(yi, zi)]):
            consistent = False
            bad.append((idx, "piece edge not in input"))
        total[np.ix_(xi, zi)] += count_product(p.A_part, p.B_part)
        vol = xi.size * yi.size * zi.size
        vol_sum += vol
        min_vol = vol if min_vol is None else min(min_vol, vol)
        if p.cert == SPARSE_A:
            ok = _area_pow2_le(int(Ad.sum()), Ad.size, d)
        elif p.cert == SPARSE_B:
            ok = _area_pow2_le(int(Bd.sum()), Bd.size, d)
        elif p.cert == REGULAR_PAIR:
            ok = is_min_degree(p.A_part, epsilon) and is_min_degree(p.B_part.T, epsilon)
            for M in (Ad, Bd.T):
                reg = _regular_check(M, epsilon, d, feasibility_cap)
                if reg is None:
                    unchecked += 1
                else:
                    ok = ok and reg
        else:
            ok = False
        if not ok:
            certs_ok = False
            bad.append((idx, p.cert))
    product = bool(np.array_equal(total, count_product(A, B))) and consistent
    vol_ok = vol_sum <= 2 * (d + 2) ** 2 * nx * ny * nz
    return {
        "product": product,
        "certs": certs_ok,
        "volume_bound": vol_ok,
        "all_pass": product and certs_ok and vol_ok,
        "regularity_unchecked": unchecked,
        "pieces": len(pieces),
        "volume_sum": vol_sum,
        "min_volume": min_vol,
        "failures": bad,
    }


def verify_good_cube(cube: GoodCube, A: BoolMatrix, B: BoolMatrix, epsilon, gamma, d: int,
                     feasibility_cap: int | None = DEFAULT_COST_CAP) -> dict:
    """Check the good-cube guarantees: edge partition of ``A[X, Y*]``, piece
    certificates, ``E[B[Y*, Z*]] >= E[B]`` and the two volume sums.  The
    size and piece-count bounds are reported, not asserted."""
    epsilon, gamma = as_fraction(epsilon), as_fraction(gamma)
    DA, DB = A.dense, B.dense
    ys_star, zs_star = cube.y_star, cube.z_star
    cover = np.zeros((A.rows, ys_star.size), dtype=np.int64)
    ypos = {int(y): i for i, y in enumerate(ys_star)}
    z_in_star = set(zs_star.tolist())
    certs_ok = True
    vol4 = vol5 = 0
    for i, (xs, ys, zs, Ap) in enumerate(cube.pieces):
        yi = np.array([ypos[int(y)] for y in ys], dtype=np.int64)
        cover[np.ix_(xs, yi)] += Ap
        if not set(zs.tolist()) <= z_in_star:
            certs_ok = False
        vol4 += xs.size * ys.size * zs.size
        vol5 += xs.size * ys.size * (zs_star.size - zs.size)
        a_sparse = _area_pow2_le(int(Ap.sum()), Ap.size, d)
        Bl = DB[np.ix_(ys, zs)]
        ok_b = is_min_degree(BoolMatrix.from_dense(Bl.T), epsilon)
        reg_b = _regular_check(Bl.T, epsilon, d, feasibility_cap)
        ok_b = ok_b and reg_b is not False
        if a_sparse:
            ok = ok_b
        else:
            reg_a = _regular_check(Ap, epsilon, d, feasibility_cap)
            ok = ok_b and is_min_degree(BoolMatrix.from_dense(Ap), epsilon) and reg_a is not False
        certs_ok = certs_ok and ok
    partition = bool(np.array_equal(cover, DA[:, ys_star].astype(np.int64)))
    sub = DB[np.ix_(ys_star, zs_star)]
    dens_ok = Fraction(int(sub.sum()), max(1, sub.size)) >= Fraction(int(DB.sum()), DB.size)
    base = A.rows * ys_star.size * zs_star.size
    p4 = vol4 <= (d + 2) * base
    p5 = vol5 <= gamma * (d + 2) * base
    return {
        "partition": partition,
        "certs": certs_ok,
        "density": dens_ok,
        "volume": p4,
        "leftover_volume": p5,
        "all_pass": partition and certs_ok and dens_ok and p4 and p5,
        "cube_area_fraction": Fraction(ys_star.size * zs_star.size, B.rows * B.cols),
        "pieces": len(cube.pieces),
    }


def default_params(d: int = 3) -> RegularityParams:
    return RegularityParams(Fraction(1, 160), 2, d, d)
