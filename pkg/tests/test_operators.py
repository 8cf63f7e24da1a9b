import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monoloc import oracles
from monoloc.operators import (NearSingularError, SingularOrbitError, bisect_eigenvalue,
                               box_from_diagonal, build_box, determinant, eigenvalues,
                               greens_boundary_rows, greens_entry, sturm_count,
                               transfer_lognorm)
from monoloc.potential import make_log_singular, make_sawtooth

diags = st.lists(st.floats(-30, 30, allow_nan=False), min_size=1, max_size=40)


@given(diags, st.floats(-35, 35))
@settings(max_examples=150, deadline=None)
def test_sturm_matches_dense(d, E):
    ev = oracles.dense_eigenvalues(d)
    if np.min(np.abs(ev - E)) < 1e-9:
        return
    assert sturm_count(box_from_diagonal(d), E) == oracles.dense_count(d, E)


@given(diags)
@settings(max_examples=100, deadline=None)
def test_eigenvalues_match_dense(d):
    box = box_from_diagonal(d)
    got = eigenvalues(box).eigenvalues
    assert np.allclose(got, oracles.dense_eigenvalues(d), atol=1e-10 * box.scale, rtol=0)


@given(diags, st.floats(-35, 35))
@settings(max_examples=100, deadline=None)
def test_determinant_matches_slogdet(d, E):
    s, ld = oracles.dense_logdet(d, E)
    if s == 0 or not math.isfinite(ld) or ld < -20:
        return
    got = determinant(box_from_diagonal(d), E)
    assert got.sign == int(s)
    assert got.log_magnitude == pytest.approx(ld, abs=1e-9 * max(1, abs(ld)))


def test_determinant_against_mpmath_large(gold, saw20):
    box = build_box(0.3, gold, saw20, 120)
    mpmath.mp.dps = 50
    M = mpmath.matrix(120, 120)
    for i, v in enumerate(box.diagonal):
        M[i, i] = mpmath.mpf(float(v)) - mpmath.mpf("3.3")
        if i:
            M[i, i - 1] = M[i - 1, i] = 1
    ref = mpmath.det(M)
    got = determinant(box, 3.3)
    assert got.sign == (1 if ref > 0 else -1)
    assert got.log_magnitude == pytest.approx(float(mpmath.log(abs(ref))), abs=1e-9)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=30), st.data())
@settings(max_examples=100, deadline=None)
def test_green_matches_dense(d, data):
    n = len(d)
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(0, n - 1))
    E = data.draw(st.floats(-12, 12))
    ev = oracles.dense_eigenvalues(d)
    if np.min(np.abs(ev - E)) < 1e-4:
        return
    g = greens_entry(box_from_diagonal(d), E, i, j)
    ref = oracles.dense_green(d, E, i, j)
    val = g.sign * math.exp(g.log_magnitude) if g.sign else 0.0
    assert val == pytest.approx(ref, rel=1e-8, abs=1e-12)


def test_boundary_rows_match_dense(gold, saw20):
    box = build_box(0.7, gold, saw20, 40)
    left, right = greens_boundary_rows(box, 5.123)
    for m in (0, 7, 20, 39):
        assert left[m] == pytest.approx(math.log(abs(oracles.dense_green(box.diagonal, 5.123, 0, m))), abs=1e-9)
        assert right[m] == pytest.approx(math.log(abs(oracles.dense_green(box.diagonal, 5.123, m, 39))), abs=1e-9)


def test_green_near_eigenvalue_raises(gold, saw20):
    box = build_box(0.2, gold, saw20, 20)
    lam = eigenvalues(box).eigenvalues[5]
    with pytest.raises(NearSingularError):
        greens_entry(box, float(lam), 0, 3)


def test_singular_sites_split_the_box(gold):
    pot = make_log_singular(5, 1)
    box = build_box(0, gold, pot, 12)
    assert box.is_singular and box.singular_sites.tolist() == [0]
    ev = eigenvalues(box).eigenvalues
    assert ev[0] == -math.inf
    assert np.allclose(ev[1:], oracles.dense_eigenvalues(box.diagonal)[1:])
    # entries across a singular site vanish
    assert greens_entry(box, 0.123, 0, 5).sign == 0
    with pytest.raises(SingularOrbitError):
        box.dense()


def test_bisection_agrees(gold, saw20):
    box = build_box(0.4, gold, saw20, 30)
    ev = eigenvalues(box).eigenvalues
    for k in (0, 11, 29):
        assert bisect_eigenvalue(box, k) == pytest.approx(ev[k], abs=1e-11)


def test_transfer_against_direct_product(gold, saw20):
    diag = build_box(0.1, gold, saw20, 50).diagonal
    E = 4.0
    mpmath.mp.dps = 80
    M = mpmath.eye(2)
    for v in diag:
        M = mpmath.matrix([[E - mpmath.mpf(float(v)), -1], [1, 0]]) * M
    ref = float(mpmath.log(max(mpmath.svd_r(M, compute_uv=False))) / 50)
    assert transfer_lognorm(0.1, gold, saw20, E, 50, diag=diag) == pytest.approx(ref, abs=1e-12)
