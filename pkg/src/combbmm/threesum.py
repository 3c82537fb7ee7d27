"""3-SUM through triangle listing.

Three multiply-shift hash functions place every value of ``S`` on a small
grid.  Each value ``a`` labels a handful of edges whose endpoints differ by
``h(a)`` up to a bounded carry, so any solution ``a + b + c = 0`` shows up as
a triangle carrying the labels ``(a, b, c)``.  Listed triangles are checked
against their actual labels, which makes the answer exact; randomness only
affects how many spurious triangles have to be looked at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bitmatrix import BoolMatrix, TripartiteGraph
from .triangle import ListingParams, list_triangles

__all__ = [
    "ThreeSumInstance",
    "ThreeSumResult",
    "LinearHashFn",
    "LabeledTripartiteGraph",
    "PROVEN_PHI",
    "solve_3sum_naive",
    "sample_linear_hash",
    "measure_phi",
    "collision_fraction",
    "default_bucket_bits",
    "build_3sum_graph",
    "witness_nodes",
    "solve_3sum_via_triangles",
]

# h(a+b) - h(a) - h(b) + h(0) mod m for multiply-shift is the carry out of
# the discarded low bits, which is -1, 0 or 1
PROVEN_PHI = (-1, 0, 1)


@dataclass(frozen=True)
class ThreeSumInstance:
    values: tuple
    bound: int

    def __post_init__(self):
        for v in self.values:
            if abs(v) > self.bound:
                raise ValueError(f"value {v} outside [-{self.bound}, {self.bound}]")

    @classmethod
    def from_values(cls, values, c: int = 3, bound: int | None = None) -> "ThreeSumInstance":
        """Values in ``[-n^c, n^c]`` unless ``bound`` is given."""
        vals = tuple(int(v) for v in values)
        if bound is None:
            bound = max(1, len(vals)) ** c
        return cls(vals, int(bound))

    @property
    def distinct(self) -> np.ndarray:
        return np.unique(np.array(self.values, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ThreeSumResult:
    found: bool
    witness: tuple | None = None
    phase: int = 0
    triangles: int = 0

    def __bool__(self) -> bool:
        return self.found


def solve_3sum_naive(inst: ThreeSumInstance) -> ThreeSumResult:
    """Sorted two-pointer scan over ``a <= b <= c``; values may repeat."""
    v = inst.distinct.tolist()
    k = len(v)
    for i in range(k):
        j, l = i, k - 1
        while j <= l:
            s = v[i] + v[j] + v[l]
            if s == 0:
                return ThreeSumResult(True, (v[i], v[j], v[l]))
            if s < 0:
                j += 1
            else:
                l -= 1
    return ThreeSumResult(False)


@dataclass(frozen=True)
class LinearHashFn:
    """``h(x) = ((multiplier * (x + offset)) mod 2^word_bits) >> (word_bits - bucket_bits)``."""

    multiplier: int
    word_bits: int
    bucket_bits: int
    offset: int = 0

    def __post_init__(self):
        if self.multiplier % 2 == 0:
            raise ValueError("multiplier must be odd")
        if not 0 < self.bucket_bits <= self.word_bits:
            raise ValueError("need 0 < bucket_bits <= word_bits")

    @property
    def m(self) -> int:
        return 1 << self.bucket_bits

    def __call__(self, x: int) -> int:
        mask = (1 << self.word_bits) - 1
        return ((self.multiplier * (int(x) + self.offset)) & mask) >> (self.word_bits - self.bucket_bits)

    def many(self, xs) -> np.ndarray:
        return np.array([self(x) for x in np.asarray(xs).tolist()], dtype=np.int64)


def sample_linear_hash(bucket_bits: int, seed: int, word_bits: int = 64,
                       offset: int = 0) -> LinearHashFn:
    rng = np.random.default_rng(seed)
    mult = int.from_bytes(rng.bytes((word_bits + 7) // 8), "little") & ((1 << word_bits) - 1)
    return LinearHashFn(mult | 1, word_bits, bucket_bits, offset)


def measure_phi(h: LinearHashFn, bound: int, pairs: int = 100_000, seed: int = 0) -> set:
    """Offsets ``h(a+b) - h(a) - h(b) + h(0) mod m`` over random key pairs
    with ``a + b`` inside ``[-bound, bound]``, returned as signed residues."""
    rng = np.random.default_rng(seed)
    half = max(1, bound // 2)
    m = h.m
    h0 = h(0)
    seen = set()
    for a, b in rng.integers(-half, half + 1, size=(pairs, 2)).tolist():
        r = (h(a + b) - h(a) - h(b) + h0) % m
        seen.add(r - m if r > m // 2 else r)
    return seen


def collision_fraction(h: LinearHashFn, bound: int, pairs: int = 100_000, seed: int = 0) -> float:
    """Share of random distinct key pairs landing in the same bucket."""
    rng = np.random.default_rng(seed)
    ab = rng.integers(-bound, bound + 1, size=(pairs, 2))
    ab = ab[ab[:, 0] != ab[:, 1]]
    hits = sum(h(a) == h(b) for a, b in ab.tolist())
    return hits / max(1, ab.shape[0])


def default_bucket_bits(n: int) -> int:
    """``ceil(log2(n) / 3) + 3``: grid side ``m`` about ``8 n^(1/3)``."""
    return math.ceil(math.log2(max(n, 2)) / 3) + 3


class _EdgeLabels:
    """Labels per edge, kept as a sorted key array for range lookups."""

    def __init__(self, keys: np.ndarray, labels: np.ndarray):
        order = np.argsort(keys, kind="stable")
        self.keys = keys[order]
        self.labels = labels[order]

    def of(self, key: int) -> np.ndarray:
        lo = np.searchsorted(self.keys, key, side="left")
        hi = np.searchsorted(self.keys, key, side="right")
        return np.unique(self.labels[lo:hi])

    def __len__(self) -> int:
        return self.keys.size


@dataclass
class LabeledTripartiteGraph:
    """Grid graph with ``X = (x1, x2)``, ``Y = (y1, y3)``, ``Z = (z2, z3)``
    flattened to ``first * m + second``; the third coordinate of each part is
    the fixed ``h_i(0)``."""

    graph: TripartiteGraph
    m: int
    hashes: tuple
    phi: tuple
    A_labels: _EdgeLabels
    B_labels: _EdgeLabels
    C_labels: _EdgeLabels

    def labels(self, x: int, y: int, z: int):
        side = self.m * self.m
        return (self.A_labels.of(x * side + y), self.B_labels.of(y * side + z),
                self.C_labels.of(x * side + z))


def build_3sum_graph(inst: ThreeSumInstance, h1: LinearHashFn, h2: LinearHashFn,
                     h3: LinearHashFn, m: int, phi=PROVEN_PHI) -> LabeledTripartiteGraph:
    """Edges from the offset constraints, solved coordinate by coordinate.

    ``A`` (label ``a``): ``x2 = 2 h2(0) - h2(a) - f2``, ``y3 = h3(a) + f3``,
    ``y1 = x1 + h1(a) - h1(0) + f1`` for free ``x1``.
    ``B`` (label ``b``): ``y1 = 2 h1(0) - h1(b) - f1``, ``z2 = h2(b) + f2``,
    ``z3 = y3 + h3(b) - h3(0) + f3`` for free ``y3``.
    ``C`` (label ``c``): ``x1 = h1(c) + f1``, ``z3 = 2 h3(0) - h3(c) - f3``,
    ``x2 = z2 + h2(c) - h2(0) + f2`` for free ``z2``.
    All arithmetic is mod ``m``; ``f1, f2, f3`` range over ``phi``.
    """
    if any(h.m != m for h in (h1, h2, h3)):
        raise ValueError("hash ranges must equal m")
    vals = inst.distinct
    side = m * m
    H1, H2, H3 = h1.many(vals), h2.many(vals), h3.many(vals)
    z1, z2, z3 = h1(0), h2(0), h3(0)
    f = np.array(list(product(phi, repeat=3)), dtype=np.int64)  # (F, 3)
    free = np.arange(m, dtype=np.int64)
    # broadcast shape (values, offsets, free coordinate)
    V = slice(None), None, None
    O = None, slice(None), None
    R = None, None, slice(None)
    f1, f2, f3 = f[:, 0][O], f[:, 1][O], f[:, 2][O]
    shape = (vals.size, f.shape[0], m)

    def flat(a):
        return np.broadcast_to(a, shape).reshape(-1)

    lab = flat(vals[V])
    # A
    x1 = free[R]
    x2 = (2 * z2 - H2[V] - f2) % m
    y3 = (H3[V] + f3) % m
    y1 = (x1 + H1[V] - z1 + f1) % m
    ax, ay = flat(x1 * m + x2), flat(y1 * m + y3)
    # B
    y3b = free[R]
    y1b = (2 * z1 - H1[V] - f1) % m
    z2b = (H2[V] + f2) % m
    z3b = (y3b + H3[V] - z3 + f3) % m
    by, bz = flat(y1b * m + y3b), flat(z2b * m + z3b)
    # C
    z2c = free[R]
    x1c = (H1[V] + f1) % m
    z3c = (2 * z3 - H3[V] - f3) % m
    x2c = (z2c + H2[V] - z2 + f2) % m
    cx, cz = flat(x1c * m + x2c), flat(z2c * m + z3c)

    def matrix(r, c):
        D = np.zeros((side, side), dtype=bool)
        D[r, c] = True
        return BoolMatrix.from_dense(D)

    G = TripartiteGraph(matrix(ax, ay), matrix(by, bz), matrix(cx, cz))
    return LabeledTripartiteGraph(
        G, m, (h1, h2, h3), tuple(phi),
        _EdgeLabels(ax * side + ay, lab), _EdgeLabels(by * side + bz, lab),
        _EdgeLabels(cx * side + cz, lab))


def witness_nodes(a: int, b: int, c: int, h1, h2, h3, m: int) -> tuple[int, int, int]:
    """Node indices of the triangle a solution ``a + b + c = 0`` must produce."""
    x = h1(c) * m + h2(-a)
    y = h1(-b) * m + h3(a)
    z = h2(b) * m + h3(-c)
    return x, y, z


def solve_3sum_via_triangles(inst: ThreeSumInstance, bucket_bits: int | None = None,
                             seed: int = 0, pair_factor: float = 1.0,
                             listing: ListingParams | None = None) -> ThreeSumResult:
    """Phase 1 tests ``ceil(pair_factor * n max(1, log2 n))`` random pairs; phase 2
    lists the triangles of the hash graph and checks their labels."""
    vals = inst.distinct
    n = vals.size
    if n == 0:
        return ThreeSumResult(False, phase=2)
    rng = np.random.default_rng(seed)
    members = set(vals.tolist())
    samples = math.ceil(pair_factor * n * max(1.0, math.log2(n)))
    for a, b in vals[rng.integers(0, n, size=(samples, 2))].tolist():
        if -a - b in members:
            return ThreeSumResult(True, tuple(sorted((a, b, -a - b))), phase=1)
    bits = default_bucket_bits(n) if bucket_bits is None else int(bucket_bits)
    m = 1 << bits
    seeds = rng.integers(0, 1 << 62, size=3).tolist()
    hs = [sample_linear_hash(bits, s, offset=inst.bound) for s in seeds]
    LG = build_3sum_graph(inst, *hs, m)
    tri = list_triangles(LG.graph, listing)
    hit = _first_labelled_solution(LG, tri, inst.bound)
    if hit is not None:
        return ThreeSumResult(True, hit, 2, tri.shape[0])
    return ThreeSumResult(False, phase=2, triangles=tri.shape[0])


def _expand(labels: _EdgeLabels, keys: np.ndarray):
    """(triangle index, label) for every label on each triangle's edge."""
    lo = np.searchsorted(labels.keys, keys, side="left")
    hi = np.searchsorted(labels.keys, keys, side="right")
    cnt = hi - lo
    idx = np.repeat(np.arange(keys.size), cnt)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(cnt)[:-1])), cnt)
    return idx, labels.labels[np.arange(idx.size) + starts]


def _first_labelled_solution(LG: LabeledTripartiteGraph, tri: np.ndarray, bound: int):
    """Solution ``(a, b, c)`` on the first listed triangle that carries one."""
    if tri.shape[0] == 0:
        return None
    side = LG.m * LG.m
    x, y, z = tri[:, 0], tri[:, 1], tri[:, 2]
    ia, la = _expand(LG.A_labels, x * side + y)
    ib, lb = _expand(LG.B_labels, y * side + z)
    # pair every a with every b on the same triangle
    order_b = np.argsort(ib, kind="stable")
    ib, lb = ib[order_b], lb[order_b]
    b_lo = np.searchsorted(ib, ia, side="left")
    b_cnt = np.searchsorted(ib, ia, side="right") - b_lo
    t = np.repeat(ia, b_cnt)
    a = np.repeat(la, b_cnt)
    first = np.repeat(b_lo - np.concatenate(([0], np.cumsum(b_cnt)[:-1])), b_cnt)
    b = lb[np.arange(t.size) + first]
    c = -a - b
    # membership of (C edge, c) via one combined integer key
    span = 4 * bound + 1
    if side * side * span < 1 << 62:
        ckey = LG.C_labels.keys * span + (LG.C_labels.labels + 2 * bound)
        ckey.sort()
        want = (x[t] * side + z[t]) * span + (c + 2 * bound)
        pos = np.searchsorted(ckey, want)
        ok = (pos < ckey.size) & (ckey[np.minimum(pos, ckey.size - 1)] == want)
    else:
        # keys would overflow int64
        have = set(zip(LG.C_labels.keys.tolist(), LG.C_labels.labels.tolist()))
        ok = np.array([(k, v) in have for k, v in zip((x[t] * side + z[t]).tolist(), c.tolist())],
                      dtype=bool)
    good = np.flatnonzero(ok & (np.abs(c) <= bound))
    if good.size == 0:
        return None
    k = good[np.argmin(t[good])]
    return tuple(sorted((int(a[k]), int(b[k]), int(c[k]))))
