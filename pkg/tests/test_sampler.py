from fractions import Fraction

import numpy as np
import pytest

from combbmm.sampler import (EXHAUSTIVE, PAIRWISE, build_sampler, exhaustive_family,
                             sample_size, validate_sampler)


def test_sample_size_frozen():
    assert sample_size(Fraction(1, 10), Fraction(1, 10)) == 250
    assert sample_size(Fraction(1, 2), Fraction(1, 2)) == 2


def test_falls_back_to_exhaustive():
    fam = build_sampler(100, Fraction(1, 10), Fraction(1, 10), seed=1)
    assert fam.kind == EXHAUSTIVE and len(fam) == 1
    assert fam.sets[0].tolist() == list(range(100))


def test_pairwise_family_deterministic():
    a = build_sampler(5000, Fraction(1, 4), Fraction(1, 4), seed=7, family_size=50)
    b = build_sampler(5000, Fraction(1, 4), Fraction(1, 4), seed=7, family_size=50)
    c = build_sampler(5000, Fraction(1, 4), Fraction(1, 4), seed=8, family_size=50)
    assert a.kind == PAIRWISE and len(a) == 50
    assert all(s.size == 16 for s in a.sets)
    assert a.fingerprint() == b.fingerprint() != c.fingerprint()


def test_pairwise_failure_rate_within_chebyshev_bound():
    eps, delta = Fraction(1, 5), Fraction(1, 5)
    fam = build_sampler(20000, eps, delta, seed=3, family_size=400)
    rng = np.random.default_rng(0)
    trials = [rng.random(20000) < p for p in (0.1, 0.5, 0.9)]
    trials.append(np.arange(20000) < 10000)
    report = validate_sampler(fam, trials)
    assert report["max_err_fraction"] <= float(delta)


def test_exhaustive_estimates_exact():
    fam = exhaustive_family(6)
    assert fam.estimates(np.arange(6)).tolist() == [2.5]
    with pytest.raises(ValueError):
        exhaustive_family(0)
