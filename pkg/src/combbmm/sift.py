"""Sifting: certify that a matrix is grid-norm regular or hand back a large
rectangle that is noticeably denser than the whole.

``sift_prime`` takes the high-degree rows if there are enough of them;
otherwise it picks the row ``x`` whose neighbourhood ``A_x = A[X, N(x)]`` has
the largest (k-1, l)-grid norm and recurses on ``A_x`` with ``k - 1``.
``sift`` wraps it with ``delta = (1 + eps/2) E[A]`` and ``eps / 4`` and
re-checks the size and density guarantees of any rectangle before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._rational import as_fraction
from .bitmatrix import BoolMatrix
from .gridnorm import EXACT, SAMPLED, rowlinked_k1_argmax, rowlinked_norm_powers, sampler_accuracy
from .sampler import build_sampler

__all__ = ["SiftOutcome", "sift", "sift_prime", "sift_dense", "SiftPostconditionError"]


class SiftPostconditionError(AssertionError):
    """A returned rectangle failed its exact size or density recheck."""


@dataclass(frozen=True)
class SiftOutcome:
    regular: bool
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None
    achieved_density: Fraction | None = None

    def __post_init__(self):
        if not self.regular and (self.rows is None or self.rows.size == 0 or self.cols.size == 0):
            raise ValueError("a denser rectangle needs nonempty index sets")

    @classmethod
    def regular_outcome(cls) -> "SiftOutcome":
        return cls(True)

    @property
    def is_denser_rect(self) -> bool:
        return not self.regular

    def __repr__(self) -> str:
        if self.regular:
            return "SiftOutcome(Regular)"
        return (f"SiftOutcome(DenserRect {self.rows.size}x{self.cols.size},"
                f" density={self.achieved_density})")


def _count_threshold(frac: Fraction, size: int) -> int:
    """Smallest integer count c with c / size >= frac."""
    return max(0, math.ceil(frac * size))


def _check_params(epsilon, k, ell):
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be at least 1")
    return epsilon


def _row_norm_powers(D: np.ndarray, k: int, ell: int, alpha: Fraction, mode: str, seed: int):
    A = BoolMatrix.from_dense(D)
    if mode == EXACT:
        return rowlinked_norm_powers(A, k, ell, alpha)
    acc = min(sampler_accuracy(alpha, k, ell), Fraction(1, 2))
    S = build_sampler(D.shape[0], acc, acc, seed)
    T = build_sampler(D.shape[1], acc, acc, seed + 1)
    return rowlinked_norm_powers(A, k, ell, alpha, S, T)


def _sift_prime_dense(D, delta, epsilon, k, ell, mode, seed):
    """Returns ``None`` for Regular, else local ``(rows, cols)`` arrays."""
    cols = np.arange(D.shape[1], dtype=np.int64)
    while True:
        n_rows, n_cols = D.shape
        if n_rows == 0 or n_cols == 0:
            return None
        counts = D.sum(axis=1)
        high = np.flatnonzero(counts >= _count_threshold(delta, n_cols))
        if high.size and high.size >= epsilon / 2 * delta ** (k * ell) * n_rows:
            return high, cols
        if k == 1:
            return None
        alpha = epsilon * delta**2 / (2 * k * k)
        qualifying = np.flatnonzero(counts >= _count_threshold(delta**k, n_cols))
        if qualifying.size == 0:
            return None
        if mode == EXACT and k == 2:
            best = rowlinked_k1_argmax(D, ell, qualifying)
        else:
            powers = _row_norm_powers(D, k - 1, ell, alpha, mode, seed)
            best = int(qualifying[0])
            for x in qualifying[1:].tolist():
                if powers[x] > powers[best]:
                    best = x
        nbrs = np.flatnonzero(D[best])
        D = D[:, nbrs]
        cols = cols[nbrs]
        epsilon = epsilon * (1 - Fraction(1, k * k))
        k -= 1


def sift_prime(A: BoolMatrix, delta, epsilon, k: int, ell: int, mode: str = EXACT,
               seed: int = 0) -> SiftOutcome:
    delta = as_fraction(delta)
    epsilon = _check_params(epsilon, k, ell)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if mode not in (EXACT, SAMPLED):
        raise ValueError(f"unknown mode {mode!r}")
    res = _sift_prime_dense(A.dense, delta, epsilon, k, ell, mode, seed)
    if res is None:
        return SiftOutcome.regular_outcome()
    rows, cols = res
    sub = A.dense[np.ix_(rows, cols)]
    return SiftOutcome(False, rows, cols, Fraction(int(sub.sum()), sub.size))


def sift_dense(D: np.ndarray, epsilon, k: int, ell: int, mode: str = EXACT, seed: int = 0):
    """Array-level sift used by the decompositions.

    Returns ``None`` for Regular or local ``(rows, cols)`` of a denser rectangle
    whose guarantees have been rechecked exactly.
    """
    epsilon = _check_params(epsilon, k, ell)
    n_rows, n_cols = D.shape
    if n_rows == 0 or n_cols == 0:
        return None
    nnz = int(D.sum())
    if nnz == 0:
        return None
    if k > ell:
        res = sift_dense(D.T, epsilon, ell, k, mode, seed)
        return None if res is None else (res[1], res[0])
    density = Fraction(nnz, n_rows * n_cols)
    delta = (1 + epsilon / 2) * density
    res = _sift_prime_dense(D, delta, epsilon / 4, k, ell, mode, seed)
    if res is None:
        return None
    rows, cols = res
    sub_nnz = int(D[np.ix_(rows, cols)].sum())
    area = rows.size * cols.size
    if area < epsilon / 16 * density ** (k * ell) * n_rows * n_cols:
        raise SiftPostconditionError("denser rectangle is smaller than guaranteed")
    if Fraction(sub_nnz, area) < (1 + epsilon / 2) * density:
        raise SiftPostconditionError("denser rectangle is not dense enough")
    return rows, cols


def sift(A: BoolMatrix, epsilon, k: int, ell: int, mode: str = EXACT, seed: int = 0) -> SiftOutcome:
    """Regular, or a rectangle ``X' x Y'`` with area at least
    ``(eps/16) E[A]^{kl} |X||Y|`` and density at least ``(1 + eps/2) E[A]``.

    When ``k > l`` the work happens on the transpose.
    """
    if mode not in (EXACT, SAMPLED):
        raise ValueError(f"unknown mode {mode!r}")
    res = sift_dense(A.dense, epsilon, k, ell, mode, seed)
    if res is None:
        return SiftOutcome.regular_outcome()
    rows, cols = res
    sub = A.dense[np.ix_(rows, cols)]
    return SiftOutcome(False, rows, cols, Fraction(int(sub.sum()), sub.size))
