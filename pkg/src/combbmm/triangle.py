"""Triangles in tripartite graphs ``(X, Y, Z, A, B, C)``: detection through the
AB-decomposition, Boolean products through detection, Four-Russians listing,
the recursive listing algorithm, constant-delay enumeration and brute-force
oracles.

Triangle sets are returned as ``(t, 3)`` int64 arrays of local node indices
``(x, y, z)``, sorted lexicographically.  :func:`as_triangles` converts one to
a list of :class:`Triangle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._rational import as_fraction, le_pow2_neg
from .bitmatrix import BoolMatrix, TripartiteGraph, _pack, count_product
from .decompose import ab_decomposition_arrays
from .gridnorm import EXACT, klm_premise_ok

__all__ = [
    "Triangle",
    "DetectResult",
    "FourRussiansParams",
    "ListingParams",
    "ListingStats",
    "Enumerator",
    "as_triangles",
    "brute_force_triangles",
    "brute_force_triangles_scalar",
    "count_triangles_exact",
    "sparse_list",
    "sparse_detect",
    "detect_triangle",
    "bmm_via_triangle",
    "four_russians_list",
    "four_russians_product",
    "four_russians_detect",
    "naive_detect_scalar",
    "list_triangles",
    "enum_preprocess",
    "enum_next",
]

# bits held at once by the word-parallel joins
_JOIN_BITS = 1 << 23


class Triangle(NamedTuple):
    x: int
    y: int
    z: int


def _empty() -> np.ndarray:
    return np.zeros((0, 3), dtype=np.int64)


def _sorted(tri: np.ndarray) -> np.ndarray:
    if tri.shape[0] == 0:
        return _empty()
    order = np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))
    return np.ascontiguousarray(tri[order], dtype=np.int64)


def as_triangles(tri: np.ndarray) -> list[Triangle]:
    return [Triangle(*row) for row in np.asarray(tri).tolist()]


def _dense(G: TripartiteGraph):
    return G.A.dense, G.B.dense, G.C.dense


# -- oracles -----------------------------------------------------------------


def brute_force_triangles(G: TripartiteGraph) -> np.ndarray:
    """Every ``(x, y, z)`` with ``A(x,y) = B(y,z) = C(x,z) = 1``, sorted.

    For each ``x`` the packed row of ``A`` is ANDed with the packed rows of
    ``B^T`` for all ``z`` in ``N_C(x)``.
    """
    ny = G.ny
    Bt = _pack(np.ascontiguousarray(G.B.dense.T))
    Aw = G.A.words
    Cd = G.C.dense
    out = []
    for x in range(G.nx):
        zs = np.flatnonzero(Cd[x])
        if zs.size == 0:
            continue
        common = Bt[zs] & Aw[x]
        bits = np.unpackbits(common.view(np.uint8).reshape(zs.size, -1), axis=1,
                             count=ny, bitorder="little")
        zi, ys = np.nonzero(bits)
        if ys.size:
            out.append(np.column_stack((np.full(ys.size, x), ys, zs[zi])))
    return _sorted(np.concatenate(out)) if out else _empty()


def brute_force_triangles_scalar(G: TripartiteGraph) -> np.ndarray:
    """Plain triple loop over Python lists; the cross-check for the packed oracle."""
    A = G.A.dense.tolist()
    B = G.B.dense.tolist()
    C = G.C.dense.tolist()
    found = []
    for x in range(G.nx):
        for y in range(G.ny):
            if not A[x][y]:
                continue
            for z in range(G.nz):
                if B[y][z] and C[x][z]:
                    found.append((x, y, z))
    return np.array(found, dtype=np.int64).reshape(-1, 3)


def count_triangles_exact(G: TripartiteGraph) -> int:
    paths = count_product(G.A, G.B)
    return int(paths[G.C.dense].sum())


# -- sparse search -------------------------------------------------------------


def _edge_join(u, w, P, Q, m, first_only=False):
    """For edge ``e = (u[e], w[e])`` the middle nodes in ``P[u] & Q[w]``.

    Returns ``(edge index, middle node)`` arrays, or only the first hit when
    ``first_only`` is set.
    """
    nw = P.shape[1]
    chunk = max(1, _JOIN_BITS // (nw * 64))
    e_out, m_out = [], []
    for start in range(0, u.size, chunk):
        stop = min(u.size, start + chunk)
        common = P[u[start:stop]] & Q[w[start:stop]]
        if first_only:
            hit = np.flatnonzero(common.any(axis=1))
            if hit.size == 0:
                continue
            row = common[hit[0]]
            bits = np.unpackbits(row.view(np.uint8), count=m, bitorder="little")
            return np.array([start + hit[0]]), np.array([np.flatnonzero(bits)[0]])
        live = np.flatnonzero(common.any(axis=1))
        if live.size == 0:
            continue
        bits = np.unpackbits(common[live].view(np.uint8).reshape(live.size, -1), axis=1,
                             count=m, bitorder="little")
        ei, mi = np.nonzero(bits)
        e_out.append(live[ei] + start)
        m_out.append(mi)
    if first_only or not e_out:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(e_out), np.concatenate(m_out)


def _sparse_search(DA, DB, DC, first_only):
    """Drive the search from the edge set whose size times the opposite part
    is smallest; triangles come back in local ``(x, y, z)`` columns."""
    nx, ny = DA.shape
    nz = DB.shape[1]
    if nx == 0 or ny == 0 or nz == 0:
        return _empty()
    nA, nB, nC = int(DA.sum()), int(DB.sum()), int(DC.sum())
    cost = [nA * nz, nB * nx, nC * ny]
    pick = int(np.argmin(cost))
    if pick == 0:
        # edges (x, y); middle z in B[y] & C[x]
        xs, ys = np.nonzero(DA)
        e, zs = _edge_join(ys, xs, _pack(DB), _pack(DC), nz, first_only)
        tri = np.column_stack((xs[e], ys[e], zs))
    elif pick == 1:
        # edges (y, z); middle x in A^T[y] & C^T[z]
        ys, zs = np.nonzero(DB)
        e, xs = _edge_join(ys, zs, _pack(np.ascontiguousarray(DA.T)),
                           _pack(np.ascontiguousarray(DC.T)), nx, first_only)
        tri = np.column_stack((xs, ys[e], zs[e]))
    else:
        # edges (x, z); middle y in A[x] & B^T[z]
        xs, zs = np.nonzero(DC)
        e, ys = _edge_join(xs, zs, _pack(DA), _pack(np.ascontiguousarray(DB.T)), ny,
                           first_only)
        tri = np.column_stack((xs[e], ys, zs[e]))
    return tri.astype(np.int64, copy=False).reshape(-1, 3)


def sparse_list(G: TripartiteGraph) -> np.ndarray:
    """All triangles, found by walking the sparsest edge set."""
    return _sorted(_sparse_search(*_dense(G), first_only=False))


def sparse_detect(G: TripartiteGraph) -> Triangle | None:
    tri = _sparse_search(*_dense(G), first_only=True)
    return Triangle(*tri[0].tolist()) if tri.shape[0] else None


# -- detection ---------------------------------------------------------------


@dataclass(frozen=True)
class DetectResult:
    found: bool
    witness: Triangle | None = None
    dense_shortcut: bool = False

    def __bool__(self) -> bool:
        return self.found


def _piece_sparse(nnz, area, d):
    return nnz << d <= area


def _dense_witness(DA, DB, DC):
    """Scan C's 1-entries against the 2-path counts."""
    paths = np.rint(DA.astype(np.float64) @ DB.astype(np.float64)) > 0
    hits = np.argwhere(paths & DC)
    if hits.shape[0] == 0:
        return None
    x, z = (int(v) for v in hits[0])
    y = int(np.flatnonzero(DA[x] & DB[:, z])[0])
    return (x, y, z)


def _detect_arrays(DA, DB, DC, epsilon, d, witness, pieces):
    shortcut_ok = klm_premise_ok(epsilon, d)
    c_exp = epsilon * d / 2
    for xs, ys, zs, Ak, Bk, _ in pieces:
        Ck = DC[np.ix_(xs, zs)]
        nC = int(Ck.sum())
        if nC == 0:
            continue
        sparse = (_piece_sparse(int(Ak.sum()), Ak.size, d)
                  or _piece_sparse(int(Bk.sum()), Bk.size, d)
                  or le_pow2_neg(Fraction(nC, Ck.size), c_exp))
        if not sparse and shortcut_ok:
            if not witness:
                return DetectResult(True, None, True)
            w = _dense_witness(Ak, Bk, Ck)
            if w is not None:
                x, y, z = w
                return DetectResult(True, Triangle(int(xs[x]), int(ys[y]), int(zs[z])), True)
        tri = _sparse_search(Ak, Bk, Ck, first_only=True)
        if tri.shape[0]:
            x, y, z = tri[0].tolist()
            w = Triangle(int(xs[x]), int(ys[y]), int(zs[z])) if witness else None
            return DetectResult(True, w)
    return DetectResult(False)


def _local_pieces(G: TripartiteGraph, decomposition):
    """Translate ``ab_decomposition`` pieces (global labels) to local arrays."""
    rows, mids, cols = G.A.global_rows(), G.A.global_cols(), G.B.global_cols()
    out = []
    for p in decomposition:
        out.append((np.searchsorted(rows, p.xs), np.searchsorted(mids, p.ys),
                    np.searchsorted(cols, p.zs), p.A_part.dense, p.B_part.dense, p.cert))
    return out


def detect_triangle(G: TripartiteGraph, epsilon=Fraction(1, 160), d: int = 3,
                    witness: bool = False, mode: str = EXACT,
                    decomposition=None) -> DetectResult:
    """Decide whether ``G`` has a triangle.

    ``(A, B)`` is cut into AB-decomposition pieces.  A piece with a sparse side
    (``E[A_k]`` or ``E[B_k]`` at most ``2^-d``, or ``E[C_k]`` at most
    ``2^(-eps d/2)``) is searched edge by edge.  A dense piece answers Yes
    outright when the regular-product guarantee applies (``eps < 1/80`` and
    ``d >= 2/eps``); otherwise it is searched too, so the answer is always
    exact.  A precomputed ``ab_decomposition(G.A, G.B, ...)`` may be passed in.
    """
    epsilon = as_fraction(epsilon)
    DA, DB, DC = _dense(G)
    if decomposition is None:
        pieces = ab_decomposition_arrays(DA, DB, epsilon, d, mode)
    else:
        pieces = _local_pieces(G, decomposition)
    return _detect_arrays(DA, DB, DC, epsilon, d, witness, pieces)


def _ceil_cbrt(n: int) -> int:
    b = 1
    while b**3 < n:
        b += 1
    return b


def bmm_via_triangle(A: BoolMatrix, B: BoolMatrix, epsilon=Fraction(1, 160), d: int = 3,
                     block: int | None = None, mode: str = EXACT,
                     stats: dict | None = None) -> BoolMatrix:
    """Boolean product by repeated witness detection on block subgraphs.

    For every output block ``(X_i, Z_k)`` and middle block ``Y_j`` the
    residual ``C`` holds the output cells not yet known to be 1.  Each Yes
    marks its ``(x, z)`` and removes it from the residual; a No retires the
    middle block.  The decomposition of ``(A_ij, B_jk)`` is computed once per
    cell since the residual only changes ``C``.  ``stats`` (a dict) receives
    ``pieces`` and ``detections`` counts.
    """
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    epsilon = as_fraction(epsilon)
    n = max(A.rows, A.cols, B.cols, 1)
    b = _ceil_cbrt(n) if block is None else int(block)
    if b < 1:
        raise ValueError("block size must be positive")
    DA, DB = A.dense, B.dense
    out = np.zeros((A.rows, B.cols), dtype=bool)
    n_pieces = calls = 0
    xb = [np.arange(s, min(s + b, A.rows)) for s in range(0, A.rows, b)]
    yb = [np.arange(s, min(s + b, A.cols)) for s in range(0, A.cols, b)]
    zb = [np.arange(s, min(s + b, B.cols)) for s in range(0, B.cols, b)]
    for X in xb:
        for Z in zb:
            residual = np.ones((X.size, Z.size), dtype=bool)
            for Y in yb:
                Ab = DA[np.ix_(X, Y)]
                Bb = DB[np.ix_(Y, Z)]
                pieces = ab_decomposition_arrays(Ab, Bb, epsilon, d, mode)
                n_pieces += len(pieces)
                while residual.any():
                    calls += 1
                    res = _detect_arrays(Ab, Bb, residual, epsilon, d, True, pieces)
                    if not res.found:
                        break
                    residual[res.witness.x, res.witness.z] = False
                    out[X[res.witness.x], Z[res.witness.z]] = True
    if stats is not None:
        stats["pieces"] = n_pieces
        stats["detections"] = calls
    return BoolMatrix.from_dense(out, A.row_labels, B.col_labels)


# -- Four-Russians -----------------------------------------------------------


@dataclass(frozen=True)
class FourRussiansParams:
    s: int
    r: int

    def __post_init__(self):
        if not (self.s >= self.r >= 1):
            raise ValueError("need s >= r >= 1")

    @classmethod
    def default(cls, max_part: int) -> "FourRussiansParams":
        s = max(1, min(64, max_part))
        return cls(s, min(8, s))


def _group_bits(D: np.ndarray, s: int) -> list[list[int]]:
    """``out[row][j]`` is row's restriction to column group ``j`` as an int."""
    rows, cols = D.shape
    J = -(-cols // s)
    out = [[0] * J for _ in range(rows)]
    for j in range(J):
        block = D[:, j * s:(j + 1) * s]
        packed = np.packbits(block, axis=1, bitorder="little")
        for x in range(rows):
            out[x][j] = int.from_bytes(packed[x].tobytes(), "little")
    return out


def _chunks(nbrs: np.ndarray, s: int, r: int) -> list[tuple[int, int]]:
    """Split a sorted neighbour list into (group, bitmask) pieces of at most
    ``r`` members inside one group of size ``s``."""
    out = []
    group, mask, size = -1, 0, 0
    for v in nbrs.tolist():
        g, bit = divmod(v, s)
        if g != group or size == r:
            if size:
                out.append((group, mask))
            group, mask, size = g, 0, 0
        mask |= 1 << bit
        size += 1
    if size:
        out.append((group, mask))
    return out


def _bit_positions(mask: int) -> list[int]:
    pos = []
    while mask:
        low = mask & -mask
        pos.append(low.bit_length() - 1)
        mask ^= low
    return pos


def _four_russians(DA, DB, DC, s, r):
    """Local ``(x, y, z)`` triangles.

    ``X`` and ``Z`` are cut into groups of ``s``.  For every ``y`` and group
    pair, ``N_A(y)`` and ``N_B(y)`` are cut into chunks of at most ``r``; the
    edge list of ``C[S, T]`` for each chunk pair comes from a table keyed by
    ``(i, j, S, T)`` and filled on first use.
    """
    nx, ny = DA.shape
    nz = DB.shape[1]
    if nx == 0 or ny == 0 or nz == 0 or not DC.any():
        return _empty()
    cbits = _group_bits(DC, s)
    table: dict[tuple[int, int, int, int], tuple[np.ndarray, np.ndarray]] = {}
    At = np.ascontiguousarray(DA.T)
    xs_out, ys_out, zs_out = [], [], []
    for y in range(ny):
        S_parts = _chunks(np.flatnonzero(At[y]), s, r)
        if not S_parts:
            continue
        T_parts = _chunks(np.flatnonzero(DB[y]), s, r)
        for i, S in S_parts:
            for j, T in T_parts:
                key = (i, j, S, T)
                hit = table.get(key)
                if hit is None:
                    ex, ez = [], []
                    for b in _bit_positions(S):
                        x = i * s + b
                        for c in _bit_positions(cbits[x][j] & T):
                            ex.append(x)
                            ez.append(j * s + c)
                    hit = (np.array(ex, dtype=np.int64), np.array(ez, dtype=np.int64))
                    table[key] = hit
                if hit[0].size:
                    xs_out.append(hit[0])
                    zs_out.append(hit[1])
                    ys_out.append(np.full(hit[0].size, y, dtype=np.int64))
    if not xs_out:
        return _empty()
    return np.column_stack((np.concatenate(xs_out), np.concatenate(ys_out),
                            np.concatenate(zs_out)))


def four_russians_list(G: TripartiteGraph, params: FourRussiansParams | None = None) -> np.ndarray:
    if params is None:
        params = FourRussiansParams.default(max(G.nx, G.ny, G.nz))
    return _sorted(_four_russians(*_dense(G), params.s, params.r))


def four_russians_product(A: BoolMatrix, B: BoolMatrix, r: int = 8) -> BoolMatrix:
    """Boolean product by table lookup.  The middle dimension is cut into
    chunks of ``r``; for each chunk the ORs of all ``2^r`` subsets of its
    packed ``B`` rows are tabulated, and each row of ``A`` picks one entry."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    if r < 1:
        raise ValueError("chunk size must be positive")
    DA, Bw = A.dense, B.words
    acc = np.zeros((A.rows, Bw.shape[1]), dtype=np.uint64)
    weights = np.uint64(1) << np.arange(r, dtype=np.uint64)
    for start in range(0, A.cols, r):
        width = min(r, A.cols - start)
        table = np.zeros((1 << width, Bw.shape[1]), dtype=np.uint64)
        for b in range(width):
            half = 1 << b
            table[half:2 * half] = table[:half] | Bw[start + b]
        idx = DA[:, start:start + width].astype(np.uint64) @ weights[:width]
        acc |= table[idx.astype(np.int64)]
    return BoolMatrix(acc, A.rows, B.cols, A.row_labels, B.col_labels)


def four_russians_detect(G: TripartiteGraph, r: int = 8) -> DetectResult:
    """Triangle detection through :func:`four_russians_product`; the witness
    is the smallest ``(x, z)`` hit with its smallest middle node."""
    paths = four_russians_product(G.A, G.B, r).words & G.C.words
    rows = np.flatnonzero(paths.any(axis=1))
    if rows.size == 0:
        return DetectResult(False)
    x = int(rows[0])
    z = int(np.flatnonzero(np.unpackbits(paths[x].view(np.uint8), count=G.nz,
                                         bitorder="little"))[0])
    y = int(np.flatnonzero(G.A.dense[x] & G.B.dense[:, z])[0])
    return DetectResult(True, Triangle(x, y, z))


def naive_detect_scalar(G: TripartiteGraph, rows=None) -> Triangle | None:
    """Triple loop over Python lists with early exit; ``rows`` limits the
    ``x`` values scanned (for timing samples)."""
    A = G.A.dense.tolist()
    B = G.B.dense.tolist()
    C = G.C.dense.tolist()
    nz = G.nz
    for x in (range(G.nx) if rows is None else rows):
        Ax, Cx = A[x], C[x]
        for y in range(G.ny):
            if Ax[y]:
                By = B[y]
                for z in range(nz):
                    if By[z] and Cx[z]:
                        return Triangle(x, y, z)
    return None


# -- recursive listing -------------------------------------------------------


def _log2_floor2(n: int) -> float:
    return max(2.0, math.log2(max(n, 1)))


@dataclass(frozen=True)
class ListingParams:
    epsilon: Fraction
    gamma: Fraction
    delta: Fraction
    d: int
    H: int
    fr: FourRussiansParams | None = None
    mode: str = EXACT

    def __post_init__(self):
        for name in ("epsilon", "gamma", "delta"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.gamma <= 0 or self.delta <= 0:
            raise ValueError("gamma and delta must be positive")
        if self.d < 1 or self.H < 0:
            raise ValueError("need d >= 1 and H >= 0")

    @property
    def L(self) -> int:
        return math.ceil(self.epsilon * self.d / 2)

    @staticmethod
    def gamma_for(epsilon, d: int) -> Fraction:
        L = math.ceil(as_fraction(epsilon) * d / 2)
        return Fraction(1, 8 * L * (d + 2) ** 2)

    @classmethod
    def desk_defaults(cls, n: int, epsilon=Fraction(1, 160), d: int = 3, H: int = 2,
                      delta=None) -> "ListingParams":
        """``gamma = 1/(8 L (d+2)^2)`` and
        ``delta = (log log n)^2 / (gamma (log n)^2)`` with ``log n`` read as
        ``max(2, log2 n)``; ``delta`` may be overridden."""
        epsilon = as_fraction(epsilon)
        gamma = cls.gamma_for(epsilon, d)
        if delta is None:
            lg = _log2_floor2(n)
            delta = Fraction(math.log2(lg) ** 2 / (float(gamma) * lg * lg)).limit_denominator(10**6)
        return cls(epsilon, gamma, delta, d, H)


CASES = ("1", "2", "3.1", "3.2", "3.3", "4", "base")


@dataclass
class ListingStats:
    cases: dict = field(default_factory=lambda: {c: 0 for c in CASES})
    density_checks: int = 0
    max_depth: int = 0
    pieces: int = 0


class _Lister:
    def __init__(self, params: ListingParams, stats: ListingStats, n: int):
        self.p = params
        self.stats = stats
        self.fr = params.fr or FourRussiansParams.default(n)
        self.out: list[np.ndarray] = []
        self.sparse_exp = params.epsilon * params.d / 4

    def emit(self, tri, labels, flip):
        """Local triangles of an instance whose parts carry ``labels``; a
        flipped instance has its first and last parts swapped."""
        if tri.shape[0] == 0:
            return
        lx, ly, lz = labels
        g = np.column_stack((lx[tri[:, 0]], ly[tri[:, 1]], lz[tri[:, 2]]))
        self.out.append(g[:, ::-1] if flip else g)

    def fr_list(self, DA, DB, DC):
        return _four_russians(DA, DB, DC, self.fr.s, self.fr.r)

    def run(self, labels, DA, DB, DC, h, flip):
        st = self.stats
        st.max_depth = max(st.max_depth, h)
        if any(v.size == 0 for v in labels):
            return
        if h >= self.p.H:
            st.cases["base"] += 1
            self.emit(_sparse_search(DA, DB, DC, False), labels, flip)
            return
        lx, ly, lz = labels
        pieces = ab_decomposition_arrays(DA, DB, self.p.epsilon, self.p.d, self.p.mode)
        st.pieces += len(pieces)
        delta = self.p.delta
        for xs, ys, zs, Ak, Bk, _ in pieces:
            Ck = DC[np.ix_(xs, zs)]
            plabels = (lx[xs], ly[ys], lz[zs])
            eA = Fraction(int(Ak.sum()), Ak.size)
            eB = Fraction(int(Bk.sum()), Bk.size)
            if le_pow2_neg(eA, self.sparse_exp) or le_pow2_neg(eB, self.sparse_exp):
                st.cases["1"] += 1
                self.emit(_sparse_search(Ak, Bk, Ck, False), plabels, flip)
            elif eA <= delta and eB <= delta:
                st.cases["2"] += 1
                self.emit(self.fr_list(Ak, Bk, Ck), plabels, flip)
            elif eB >= delta:
                self.case3(plabels, Ak, Bk, Ck, h, flip)
            else:
                st.cases["4"] += 1
                mirrored = (plabels[2], plabels[1], plabels[0])
                self.case3(mirrored, np.ascontiguousarray(Bk.T), np.ascontiguousarray(Ak.T),
                           np.ascontiguousarray(Ck.T), h, not flip)

    def case3(self, labels, Ak, Bk, Ck, h, flip):
        """Split ``X_k`` by ``C``-degree into ``L`` buckets and handle each."""
        st = self.stats
        L = self.p.L
        gamma = self.p.gamma
        nx, nz = Ck.shape
        deg = Ck.sum(axis=1).astype(np.int64)
        lx, ly, lz = labels
        for ell in range(1, L + 1):
            # 2^-ell < deg/nz <= 2^(1-ell); the last bucket keeps everything below
            upper = deg << (ell - 1) <= nz
            if ell < L:
                rows = np.flatnonzero(upper & ((deg << ell) > nz))
            else:
                rows = np.flatnonzero(upper)
            nnz = int(deg[rows].sum())
            e_cl = Fraction(nnz, nx * nz)
            if e_cl <= Fraction(1, 2 ** (L - 1)):
                st.cases["3.1"] += 1
                self.emit(_sparse_search(Ak[rows], Bk, Ck[rows], False), (lx[rows], ly, lz), flip)
            elif rows.size < gamma * nx:
                st.cases["3.2"] += 1
                self.run((lx[rows], ly, lz), Ak[rows], Bk, Ck[rows], h + 1, flip)
            else:
                st.cases["3.3"] += 1
                if e_cl < gamma / 2**ell:
                    raise AssertionError("bucket density below gamma 2^-ell")
                st.density_checks += 1
                Cl = np.zeros_like(Ck)
                Cl[rows] = Ck[rows]
                # triangles (y, x, z) of (Y, X, Z, A^T, C_l, B)
                tri = self.fr_list(np.ascontiguousarray(Ak.T), Cl, Bk)
                self.emit(tri[:, [1, 0, 2]], labels, flip)


def list_triangles(G: TripartiteGraph, params: ListingParams | None = None,
                   stats: ListingStats | None = None) -> np.ndarray:
    """All triangles of ``G``, sorted, via the decomposition-driven recursion.

    Pieces with a sparse side are searched directly, balanced sparse pieces go
    to Four-Russians, and pieces with a dense side are bucketed by
    ``C``-degree.  Recursion stops at depth ``H`` with a brute-force search.
    """
    n = max(G.nx, G.ny, G.nz)
    if params is None:
        params = ListingParams.desk_defaults(n)
    if stats is None:
        stats = ListingStats()
    lister = _Lister(params, stats, max(n, 1))
    labels = tuple(np.arange(k, dtype=np.int64) for k in (G.nx, G.ny, G.nz))
    lister.run(labels, *_dense(G), 0, False)
    if not lister.out:
        return _empty()
    return _sorted(np.concatenate(lister.out))


# -- enumeration -------------------------------------------------------------


class _PairScan:
    """Resumable word-parallel lister for one subgraph.  One step inspects one
    ``(x, z)`` pair or stores one triangle."""

    def __init__(self, DA, DB, DC, labels):
        self.lx, self.ly, self.lz = labels
        self.Aw = [int.from_bytes(r.tobytes(), "little") for r in _pack(DA)]
        Bt = _pack(np.ascontiguousarray(DB.T))
        self.Bw = [int.from_bytes(r.tobytes(), "little") for r in Bt]
        self.pairs = np.argwhere(DC).tolist()
        self.pos = 0
        self.pending: list[int] = []
        self.pending_xz = (0, 0)
        self.found: list[Triangle] = []

    @property
    def work(self) -> int:
        """Pair inspections; each stored triangle costs one more step."""
        return len(self.pairs)

    @property
    def done(self) -> bool:
        return self.pos == len(self.pairs) and not self.pending

    def step(self) -> None:
        if self.pending:
            y = self.pending.pop()
            x, z = self.pending_xz
            self.found.append(Triangle(int(self.lx[x]), int(self.ly[y]), int(self.lz[z])))
            return
        x, z = self.pairs[self.pos]
        self.pos += 1
        common = self.Aw[x] & self.Bw[z]
        if common:
            self.pending = _bit_positions(common)[::-1]
            self.pending_xz = (x, z)


@dataclass
class Enumerator:
    """Constant-delay triangle stream.

    ``light`` holds the triangles of every light subgraph.  Heavy subgraphs
    are streamed in descending count order; while the active one is emitted,
    ``budget`` steps of the pair scan for the next one run per call.
    """

    light: list
    heavy: list  # _PairScan per heavy subgraph, in emission order
    counts: list
    budget: int
    light_pos: int = 0
    active: int = 0
    active_pos: int = 0
    steps_last: int = 0
    max_steps: int = 0
    overruns: int = 0
    calls: int = 0

    def __iter__(self):
        while True:
            t = enum_next(self)
            if t is None:
                return
            yield t


def _group_ranges(size: int, q: int) -> list[np.ndarray]:
    return [np.arange(s, min(s + q, size), dtype=np.int64) for s in range(0, size, q)]


def _block_counts(DA, DB, DC, gx, gy, gz):
    """Exact triangle counts of every induced ``(X_i, Y_j, Z_k)`` subgraph."""
    Cf = DC.astype(np.float64)
    x_starts = [g[0] for g in gx]
    z_starts = [g[0] for g in gz]
    counts = np.zeros((len(gx), len(gy), len(gz)), dtype=np.int64)
    for j, Y in enumerate(gy):
        paths = DA[:, Y].astype(np.float64) @ DB[Y].astype(np.float64)
        per = np.rint(paths * Cf)
        per = np.add.reduceat(np.add.reduceat(per, x_starts, axis=0), z_starts, axis=1)
        counts[:, j, :] = per.astype(np.int64)
    return counts


def _sampled_counts(DA, DB, DC, gx, gy, gz, samples, seed):
    rng = np.random.default_rng(seed)
    counts = np.zeros((len(gx), len(gy), len(gz)), dtype=np.int64)
    for i, X in enumerate(gx):
        for k, Z in enumerate(gz):
            xs = rng.choice(X, size=samples)
            zs = rng.choice(Z, size=samples)
            keep = DC[xs, zs]
            for j, Y in enumerate(gy):
                codeg = (DA[np.ix_(xs, Y)] & DB[np.ix_(Y, zs)].T).sum(axis=1)
                est = (codeg * keep).mean() * X.size * Z.size
                counts[i, j, k] = int(round(est))
    return counts


def default_step_budget(f) -> int:
    """Steps per call that always suffice: with light threshold
    ``n^1.5 / f`` and groups of at most ``ceil(sqrt n)`` nodes, a heavy
    subgraph has more triangles than ``1/(4 f)`` times the pairs of the next."""
    return math.ceil(4 * as_fraction(f)) + 1


def enum_preprocess(G: TripartiteGraph, listing: ListingParams | None = None,
                    counting: str = "exact", budget: int | None = None, f=4,
                    samples: int = 64, seed: int = 0) -> Enumerator:
    """Split each part into ``ceil(sqrt n)`` groups, list every light
    subgraph (at most ``n^1.5 / f`` triangles) with :func:`list_triangles`,
    order the heavy subgraphs by descending count and fully list the first.

    With exact counting the budget is validated against every consecutive
    heavy pair, so each call stays within it.
    """
    if counting not in ("exact", "sampled"):
        raise ValueError(f"unknown counting backend {counting!r}")
    f = as_fraction(f)
    if f <= 0:
        raise ValueError("f must be positive")
    DA, DB, DC = _dense(G)
    n = max(G.nx, G.ny, G.nz, 1)
    g = math.isqrt(n - 1) + 1
    q = -(-n // g)
    gx, gy, gz = _group_ranges(G.nx, q), _group_ranges(G.ny, q), _group_ranges(G.nz, q)
    if counting == "exact":
        counts = _block_counts(DA, DB, DC, gx, gy, gz) if gx and gy and gz else np.zeros((0, 0, 0))
    else:
        counts = _sampled_counts(DA, DB, DC, gx, gy, gz, samples, seed)
    threshold = Fraction(n) ** 3 / f**2  # compare count^2 with n^3 / f^2
    light_parts, heavy_keys = [], []
    for (i, j, k), t in np.ndenumerate(counts):
        if Fraction(int(t)) ** 2 <= threshold:
            X, Y, Z = gx[i], gy[j], gz[k]
            sub = TripartiteGraph(BoolMatrix.from_dense(DA[np.ix_(X, Y)]),
                                  BoolMatrix.from_dense(DB[np.ix_(Y, Z)]),
                                  BoolMatrix.from_dense(DC[np.ix_(X, Z)]))
            tri = list_triangles(sub, listing)
            if tri.shape[0]:
                light_parts.append(tri + np.array([X[0], Y[0], Z[0]]))
        else:
            heavy_keys.append((-int(t), i, j, k))
    heavy_keys.sort()
    light = as_triangles(np.concatenate(light_parts)) if light_parts else []
    heavy = []
    for _, i, j, k in heavy_keys:
        X, Y, Z = gx[i], gy[j], gz[k]
        heavy.append(_PairScan(DA[np.ix_(X, Y)], DB[np.ix_(Y, Z)], DC[np.ix_(X, Z)], (X, Y, Z)))
    heavy_counts = [-key[0] for key in heavy_keys]
    if budget is None:
        budget = default_step_budget(f)
    if budget < 1:
        raise ValueError("step budget must be positive")
    if counting == "exact":
        for a in range(len(heavy) - 1):
            need = heavy[a + 1].work + heavy_counts[a + 1]
            if budget * heavy_counts[a] < need:
                raise ValueError(
                    f"step budget {budget} cannot finish heavy subgraph {a + 1} "
                    f"({need} steps) within {heavy_counts[a]} calls")
    if heavy:
        first = heavy[0]
        while not first.done:
            first.step()
    return Enumerator(light, heavy, heavy_counts, int(budget))


def enum_next(e: Enumerator) -> Triangle | None:
    """Next triangle or ``None`` at the end of the stream."""
    e.calls += 1
    steps = 0
    if e.light_pos < len(e.light):
        t = e.light[e.light_pos]
        e.light_pos += 1
        e.steps_last = 0
        return t
    while e.active < len(e.heavy):
        cur = e.heavy[e.active]
        if e.active_pos < len(cur.found):
            t = cur.found[e.active_pos]
            e.active_pos += 1
            if e.active + 1 < len(e.heavy):
                nxt = e.heavy[e.active + 1]
                while steps < e.budget and not nxt.done:
                    nxt.step()
                    steps += 1
            e.steps_last = steps
            e.max_steps = max(e.max_steps, steps)
            return t
        # active subgraph exhausted: release it and promote the next one
        e.heavy[e.active] = None
        e.active += 1
        e.active_pos = 0
        if e.active < len(e.heavy):
            nxt = e.heavy[e.active]
            if not nxt.done:
                e.overruns += 1
                while not nxt.done:
                    nxt.step()
                    steps += 1
    e.steps_last = steps
    e.max_steps = max(e.max_steps, steps)
    return None
