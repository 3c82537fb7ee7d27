"""Grid norms U(k, l), regularity tests and the uniform-product measurement.

The (k, l)-grid norm of a 0/1 matrix is the kl-th root of the fraction of
(k, l)-tuples ``(x_1..x_k, y_1..y_l)`` (repetitions allowed) whose k*l entries
are all 1.  Everything is computed in the power domain as an exact
``Fraction``; roots are only produced for display.

Two orientations give the same number::

    sum over x-tuples of (common neighbours in Y) ** l   / (|X|^k |Y|^l)
    sum over y-tuples of (common neighbours in X) ** k   / (|X|^k |Y|^l)

and the cheaper of ``|X|^k |Y|`` and ``|Y|^l |X|`` is used.  For k = 2 the
first one is just the codegree matrix ``A A^T``, so (eps, 2, d)-regularity is
checkable exactly at any d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._rational import as_fraction, le_pow2_neg, rational_root
from .bitmatrix import BoolMatrix, count_product, density
from .sampler import SamplerFamily, build_sampler, exhaustive_family

DEFAULT_COST_CAP = 10**8

EXACT = "exact"
SAMPLED = "sampled"


class GridNormInfeasible(ValueError):
    """Exact evaluation would exceed the configured cost cap."""


@dataclass(frozen=True)
class RegularityParams:
    epsilon: Fraction
    k: int = 2
    ell: int = 2
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if min(self.k, self.ell, self.d) < 1:
            raise ValueError("k, ell and d must be positive")


@dataclass(frozen=True)
class UniformityCert:
    alpha: Fraction
    eps_band: Fraction
    delta_frac: float | None
    outside_fraction: Fraction

    @property
    def satisfied(self) -> bool | None:
        if self.delta_frac is None:
            return None
        return float(self.outside_fraction) <= self.delta_frac


def _power_sum(values: np.ndarray, p: int) -> int:
    """Exact sum of ``v ** p`` over an integer array."""
    vals, mult = np.unique(values, return_counts=True)
    return sum(int(v) ** p * int(m) for v, m in zip(vals.tolist(), mult.tolist()))


def tuple_power_sum(D: np.ndarray, k: int, ell: int) -> int:
    """Sum over row k-tuples of (number of columns adjacent to all of them) ** ell."""
    if k == 1:
        return _power_sum(D.sum(axis=1), ell)
    if k == 2:
        M = D.astype(np.float64)
        return _power_sum(np.rint(M @ M.T).astype(np.int64), ell)
    total = 0
    for x in range(D.shape[0]):
        total += tuple_power_sum(D[:, D[x]], k - 1, ell)
    return total


def _orientation_costs(rows: int, cols: int, k: int, ell: int) -> tuple[int, int]:
    return rows**k * cols, cols**ell * rows


def _dense_power(D: np.ndarray, k: int, ell: int, cap: int | None) -> Fraction:
    rows, cols = D.shape
    if rows == 0 or cols == 0:
        raise ValueError("grid norm of an empty matrix is undefined")
    by_rows, by_cols = _orientation_costs(rows, cols, k, ell)
    if cap is not None and min(by_rows, by_cols) > cap:
        raise GridNormInfeasible(
            f"exact U({k},{ell}) on {rows}x{cols} needs {min(by_rows, by_cols)} products"
            f" (cap {cap}); use the sampled estimate"
        )
    if by_rows <= by_cols:
        num = tuple_power_sum(D, k, ell)
    else:
        num = tuple_power_sum(D.T, ell, k)
    return Fraction(num, rows**k * cols**ell)


def grid_norm_power(A: BoolMatrix, k: int, ell: int, cap: int | None = DEFAULT_COST_CAP) -> Fraction:
    """Exact ``||A||_{U(k,l)} ** (k l)``."""
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be positive")
    return _dense_power(A.dense, k, ell, cap)


def grid_norm_exact(A: BoolMatrix, k: int, ell: int, cap: int | None = DEFAULT_COST_CAP) -> float:
    return rational_root(grid_norm_power(A, k, ell, cap), k * ell)


def grid_norm_estimate_power(
    A: BoolMatrix, k: int, ell: int, samplers_S: SamplerFamily, samplers_T: SamplerFamily
) -> Fraction:
    """Average of ``||A[S, T]||^{kl}`` over all sampler pairs (exact rational)."""
    if samplers_S.ground_size != A.rows or samplers_T.ground_size != A.cols:
        raise ValueError("sampler ground sets do not match the matrix")
    D = A.dense
    total = Fraction(0)
    for S in samplers_S.sets:
        rows = D[S]
        for T in samplers_T.sets:
            total += _dense_power(rows[:, T], k, ell, None)
    return total / (len(samplers_S) * len(samplers_T))


def grid_norm_estimate(A, k, ell, samplers_S, samplers_T) -> float:
    return rational_root(grid_norm_estimate_power(A, k, ell, samplers_S, samplers_T), k * ell)


def sampler_accuracy(alpha, k: int, ell: int) -> Fraction:
    """Sampler (eps = delta) needed for additive error ``alpha`` on every row norm."""
    alpha = as_fraction(alpha)
    return alpha ** (k * ell) / (2 * k + 2 * ell + 2)


def rowlinked_norm_powers(
    A: BoolMatrix,
    k: int,
    ell: int,
    alpha,
    samplers_S: SamplerFamily | None = None,
    samplers_T: SamplerFamily | None = None,
) -> list[Fraction]:
    """Per-row ``v_x ** (k l)`` approximating ``||A_x||_{U(k,l)} ** (k l)``, where
    ``A_x`` keeps only the columns adjacent to ``x``.  Rows of degree 0 map to 0.

    With exhaustive (or omitted) samplers the values are exact and use the
    cheaper orientation directly.  Otherwise the two-stage sampled scheme runs:
    first ``u[T, y-tuple]`` from the row samplers, then one pass per row over
    the column samplers, then division by ``deg(x) ** l``.
    """
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    D = A.dense
    rows, cols = D.shape
    S_fam = samplers_S or exhaustive_family(rows)
    T_fam = samplers_T or exhaustive_family(cols)
    degs = D.sum(axis=1)
    if S_fam.is_exhaustive and T_fam.is_exhaustive:
        if k == 1:
            return _rowlinked_k1(D, ell, degs)
        out = []
        for x in range(rows):
            if degs[x] == 0:
                out.append(Fraction(0))
                continue
            out.append(_dense_power(D[:, D[x]], k, ell, None))
        return out
    return _two_stage_powers(D, k, ell, S_fam, T_fam, degs)


def _rowlinked_k1(D: np.ndarray, ell: int, degs: np.ndarray) -> list[Fraction]:
    # ||A_x||_{U(1,l)}^l = (1/|X|) sum_{x'} (codeg(x, x') / deg(x))^l
    M = D.astype(np.float64)
    codeg = np.rint(M @ M.T).astype(np.int64).astype(object)
    sums = (codeg**ell).sum(axis=1)
    rows = D.shape[0]
    out = []
    for x in range(rows):
        dx = int(degs[x])
        out.append(Fraction(0) if dx == 0 else Fraction(int(sums[x]), rows * dx**ell))
    return out


def rowlinked_k1_argmax(D: np.ndarray, ell: int, candidates: np.ndarray) -> int:
    """Candidate row with the largest (1, l) row-linked norm, smallest index on
    ties.  Same answer as an argmax over ``rowlinked_norm_powers(.., 1, l, ..)``
    without building a Fraction per row."""
    M = D.astype(np.float64)
    sub = M[candidates]
    codeg = np.rint(sub @ M.T).astype(np.int64)
    degs = D[candidates].sum(axis=1).astype(np.int64)
    rows, cols = D.shape
    if rows * cols**ell < 1 << 62:
        sums = (codeg**ell).sum(axis=1)
    else:
        sums = (codeg.astype(object) ** ell).sum(axis=1)
    safe = np.maximum(degs, 1).astype(np.float64)
    key = np.where(degs > 0, sums.astype(np.float64) / safe**ell, 0.0)
    top = key.max()
    near = np.flatnonzero(key >= top * (1 - 1e-9))
    best = None
    for i in near.tolist():
        dx = int(degs[i])
        val = Fraction(0) if dx == 0 else Fraction(int(sums[i]), dx**ell)
        if best is None or val > best[0]:
            best = (val, i)
    return int(candidates[best[1]])


def _two_stage_powers(D, k, ell, S_fam, T_fam, degs) -> list[Fraction]:
    rows, cols = D.shape
    acc = np.zeros(rows, dtype=np.float64)
    for T in T_fam.sets:
        tuples = np.array(list(itertools.product(range(T.size), repeat=ell)), dtype=np.int64)
        # P[x, t] = prod_j A(x, T[tuples[t, j]])
        P = D[:, T][:, tuples].all(axis=2).astype(np.float64)
        u = np.zeros(tuples.shape[0])
        for S in S_fam.sets:
            u += P[S].mean(axis=0) ** k
        u /= len(S_fam)
        acc += P @ u / tuples.shape[0]
    acc /= len(T_fam)
    out = []
    for x in range(rows):
        if degs[x] == 0:
            out.append(Fraction(0))
        else:
            out.append(Fraction(float(acc[x])) / Fraction(int(degs[x]), cols) ** ell)
    return out


def rowlinked_norms(A, k, ell, alpha, samplers_S=None, samplers_T=None) -> dict[int, float]:
    powers = rowlinked_norm_powers(A, k, ell, alpha, samplers_S, samplers_T)
    return {x: rational_root(p, k * ell) for x, p in enumerate(powers)}


def is_regular(A: BoolMatrix, params: RegularityParams, mode: str = EXACT,
               cap: int | None = DEFAULT_COST_CAP, seed: int = 0) -> bool:
    """``||A||_{U(k,l)} <= (1 + eps) E[A]``, compared as kl-th powers."""
    k, ell, eps = params.k, params.ell, params.epsilon
    if A.rows == 0 or A.cols == 0:
        return True
    bound = ((1 + eps) * density(A)) ** (k * ell)
    if mode == EXACT:
        try:
            return grid_norm_power(A, k, ell, cap) <= bound
        except GridNormInfeasible as exc:
            raise GridNormInfeasible(f"{exc}; call is_regular with mode='sampled'") from None
    if mode != SAMPLED:
        raise ValueError(f"unknown mode {mode!r}")
    acc = sampler_accuracy(eps * density(A) / 2 or Fraction(1, 2), k, ell)
    acc = min(acc, Fraction(1, 2))
    S = build_sampler(A.rows, acc, acc, seed)
    T = build_sampler(A.cols, acc, acc, seed + 1)
    return grid_norm_estimate_power(A, k, ell, S, T) <= bound


def is_min_degree(A: BoolMatrix, epsilon) -> bool:
    """Every row degree is at least ``(1 - eps) E[A]`` (exact)."""
    epsilon = as_fraction(epsilon)
    if A.rows == 0 or A.cols == 0:
        return True
    counts = A.row_counts()
    # deg(x) >= (1-eps) nnz / (rows cols)  <=>  count * rows >= (1-eps) nnz
    return Fraction(int(counts.min()) * A.rows) >= (1 - epsilon) * A.nnz()


def check_uniform_product(A: BoolMatrix, B: BoolMatrix, params) -> UniformityCert:
    """Measure how much of ``A o B`` falls outside ``(1 +- 80 eps) E[A] E[B]``.

    ``params`` is a :class:`RegularityParams` or a bare epsilon.  Pure
    measurement; nothing about the operands is assumed.
    """
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    if isinstance(params, RegularityParams):
        eps, d = params.epsilon, params.d
    else:
        eps, d = as_fraction(params), None
    alpha = density(A) * density(B)
    band = 80 * eps
    lo, hi = (1 - band) * alpha, (1 + band) * alpha
    counts = count_product(A, B)
    vals, mult = np.unique(counts, return_counts=True)
    inner = A.cols
    outside = 0
    for v, m in zip(vals.tolist(), mult.tolist()):
        val = Fraction(v, inner)
        if not (lo <= val <= hi):
            outside += m
    delta_frac = None if d is None else 2.0 ** (-float(eps) * d / 2)
    return UniformityCert(alpha, band, delta_frac, Fraction(outside, counts.size))


def power_error_bound(eps, k: int) -> Fraction:
    """If ``a = b +- eps`` on [0, 1] then ``a**k = b**k +- 2 eps k``."""
    return 2 * as_fraction(eps) * k


def root_error_bound(power_err, k: int) -> float:
    """If ``a**k = b**k +- e`` then ``a = b +- e**(1/k)``."""
    return rational_root(as_fraction(power_err), k)


def klm_premise_ok(epsilon, d: int) -> bool:
    """Parameter premise of the regular-product theorem: eps < 1/80, d >= 2/eps."""
    epsilon = as_fraction(epsilon)
    return 0 < epsilon < Fraction(1, 80) and d >= 2 / epsilon


__all__ = [
    "RegularityParams",
    "UniformityCert",
    "GridNormInfeasible",
    "grid_norm_power",
    "grid_norm_exact",
    "grid_norm_estimate",
    "grid_norm_estimate_power",
    "rowlinked_norm_powers",
    "rowlinked_norms",
    "rowlinked_k1_argmax",
    "is_regular",
    "is_min_degree",
    "check_uniform_product",
    "power_error_bound",
    "root_error_bound",
    "sampler_accuracy",
    "klm_premise_ok",
    "le_pow2_neg",
    "EXACT",
    "SAMPLED",
]
