import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monoloc import oracles
from monoloc.arithmetic import (PrecisionError, beta_estimate, best_approximation_check,
                                cf_from_coefficients, choose_scale, discrepancy, frequency,
                                golden, koksma_check, liouville_spike, multiple_distance, orbit,
                                orbit_fixed, three_distance_check, torus_distance)


def test_golden_convergents_are_fibonacci(gold):
    qs = gold.denominators
    assert list(qs[:15]) == [oracles.fibonacci(k + 1) for k in range(15)]
    ps = gold.numerators
    assert all(ps[k] == oracles.fibonacci(k) for k in range(15))


def test_value_matches_mpmath(gold, silv):
    mpmath.mp.dps = 60
    g = (mpmath.sqrt(5) - 1) / 2
    s = mpmath.sqrt(2) - 1
    assert abs(mpmath.mpf(gold.value_fixed) / gold.scale - g) < mpmath.mpf(10) ** -20
    assert abs(mpmath.mpf(silv.value_fixed) / silv.scale - s) < mpmath.mpf(10) ** -20


def test_cf_validation():
    with pytest.raises(ValueError):
        cf_from_coefficients([0, 1, 0, 2])
    with pytest.raises(ValueError):
        cf_from_coefficients([])
    with pytest.raises(ValueError):
        frequency([0, 1, 1], precision_bits=32)


def test_orbit_matches_exact_rational():
    f = frequency([0, 2, 3, 1, 4])
    p, q = f.numerators[-1], f.denominators[-1]
    ex = oracles.exact_orbit(Fraction(1, 7), p, q, q)
    got = orbit(Fraction(1, 7), f, q)
    assert np.max(np.abs(got - np.array([float(v) for v in ex]))) < 1e-15


def test_orbit_budget(gold):
    with pytest.raises(PrecisionError):
        orbit(0.1, gold, gold.max_orbit_length + 1)
    with pytest.raises(PrecisionError):
        orbit_fixed(0.1, gold, 10, start=-gold.max_orbit_length - 5)


def test_multiple_distance_against_mpmath(gold):
    mpmath.mp.dps = 80
    g = (mpmath.sqrt(5) - 1) / 2
    for j in (1, 13, 89, 1597, 10 ** 6 + 3):
        ref = float(abs(j * g - mpmath.nint(j * g)))
        assert multiple_distance(gold, j) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("k", range(2, 14))
def test_three_distance_golden(gold, k):
    assert three_distance_check(gold, k).passed


@pytest.mark.parametrize("k", range(2, 8))
def test_three_distance_silver(silv, k):
    r = three_distance_check(silv, k)
    assert r.passed, r.failures


def test_best_approximation(gold, silv):
    for f in (gold, silv):
        for k in range(2, 9):
            ok, j = best_approximation_check(f, k)
            assert ok, j


def test_discrepancy_brute_force():
    rng = np.random.default_rng(3)
    x = rng.random(37)
    ts = np.concatenate([x, np.nextafter(x, 2), [0.0, 1.0]])
    brute = max(abs(np.count_nonzero(x < t) / x.size - t) for t in ts)
    assert discrepancy(x).value == pytest.approx(brute, abs=1e-15)
    with pytest.raises(ValueError):
        discrepancy([0.2, 1.0])


def test_koksma_linear(gold):
    pts = orbit(0.0, gold, 89)
    r = koksma_check(lambda t: t, 1.0, pts)
    assert r.passed and r.lhs <= r.rhs + 1e-12


@given(st.integers(min_value=1, max_value=5000))
@settings(max_examples=200, deadline=None)
def test_choose_scale_matches_bruteforce(n):
    f = golden(30)
    sc = choose_scale(n, f)
    assert (sc.q, sc.s, sc.r) == oracles.brute_choose_scale(n, f.denominators)
    assert sc.s * sc.q + sc.r == n and sc.r * sc.r <= n and sc.q <= n


def test_beta_of_liouville_spike():
    f = liouville_spike([0, 1, 1, 1, 1, 1, 1], 0.776)
    k = 6
    ratio = beta_estimate(f.cf)[k][1]
    assert ratio == pytest.approx(0.776, rel=0.01)
    ref = math.log(f.denominators[k + 1]) / f.denominators[k]
    assert ratio == pytest.approx(ref)


def test_beta_golden_decreases(gold):
    rows = beta_estimate(gold.cf)
    assert rows[-1][1] < 0.01
    assert all(b >= r for _, r, b in rows)


def test_torus_distance():
    assert torus_distance(0.9) == pytest.approx(0.1)
    assert np.allclose(torus_distance(np.array([2.25, -0.4])), [0.25, 0.4])
