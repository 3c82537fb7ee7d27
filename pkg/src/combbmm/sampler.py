"""Oblivious samplers: fixed families of sample sets whose averages track the
global average of any bounded function for most members of the family.

Two backends:

* ``exhaustive`` -- one set, the whole ground set.  Estimates are exact, which
  makes every downstream grid-norm identity an equality.
* ``pairwise`` -- each member is the sequence ``(a*j + b) mod p`` for
  ``j < g`` (``p`` prime, ``(a, b)`` drawn from a seeded generator), folded onto
  the ground set.  Pairwise independence plus Chebyshev gives failure
  probability at most ``1 / (4 g eps^2)``, so ``g = ceil(1 / (4 eps^2 delta))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rational import as_fraction

EXHAUSTIVE = "exhaustive"
PAIRWISE = "pairwise"


@dataclass(frozen=True)
class SamplerFamily:
    ground_size: int
    epsilon: Fraction
    delta: Fraction
    sets: tuple = field(repr=False)
    kind: str = EXHAUSTIVE

    def __post_init__(self):
        for s in self.sets:
            if s.size == 0:
                raise ValueError("sampler sets must be nonempty")
            if s[0] < 0 or s[-1] >= self.ground_size:
                raise ValueError("sampler set leaves the ground range")

    @property
    def is_exhaustive(self) -> bool:
        return self.kind == EXHAUSTIVE

    def __len__(self) -> int:
        return len(self.sets)

    def estimates(self, values) -> np.ndarray:
        """Average of ``values`` (indexed by ground element) over each set."""
        values = np.asarray(values, dtype=np.float64)
        return np.array([values[s].mean() for s in self.sets])

    def fingerprint(self) -> bytes:
        return b"|".join(s.astype("<i8").tobytes() for s in self.sets)


def exhaustive_family(ground_size: int) -> SamplerFamily:
    if ground_size < 1:
        raise ValueError("ground set must be nonempty")
    return SamplerFamily(
        ground_size, Fraction(0), Fraction(0), (np.arange(ground_size, dtype=np.int64),)
    )


def _next_prime(n: int) -> int:
    n = max(2, n)
    while True:
        if all(n % q for q in range(2, math.isqrt(n) + 1)):
            return n
        n += 1


def sample_size(epsilon, delta) -> int:
    epsilon, delta = as_fraction(epsilon), as_fraction(delta)
    return math.ceil(1 / (4 * epsilon**2 * delta))


def build_sampler(ground_size: int, epsilon, delta, seed: int, family_size: int | None = None):
    """Seeded pairwise-independent sampler; falls back to the exhaustive family
    once the required sample size reaches the ground size."""
    epsilon, delta = as_fraction(epsilon), as_fraction(delta)
    if ground_size < 1:
        raise ValueError("ground set must be nonempty")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("epsilon and delta must lie in (0, 1)")
    g = sample_size(epsilon, delta)
    if g >= ground_size:
        fam = exhaustive_family(ground_size)
        return SamplerFamily(ground_size, epsilon, delta, fam.sets, EXHAUSTIVE)
    p = _next_prime(max(ground_size, g))
    rng = np.random.default_rng(seed)
    members = ground_size if family_size is None else family_size
    j = np.arange(g, dtype=np.int64)
    sets = []
    for _ in range(members):
        a, b = (int(v) for v in rng.integers(0, p, size=2))
        seq = (a * j + b) % p
        sets.append(np.sort(seq * ground_size // p))
    return SamplerFamily(ground_size, epsilon, delta, tuple(sets), PAIRWISE)


def validate_sampler(family: SamplerFamily, trial_functions) -> dict:
    """Empirical failure rate of the sampling guarantee.

    For each trial function (array over the ground set, values in [0, 1]) the
    failure fraction is the share of sets whose average misses the true mean
    by more than ``family.epsilon``.  Returns the worst fraction seen.
    """
    worst = 0.0
    fractions_seen = []
    eps = float(family.epsilon)
    for f in trial_functions:
        f = np.asarray(f, dtype=np.float64)
        truth = f.mean()
        est = family.estimates(f)
        frac = float(np.mean(np.abs(est - truth) > eps + 1e-12))
        fractions_seen.append(frac)
        worst = max(worst, frac)
    return {"max_err_fraction": worst, "fractions": fractions_seen}
