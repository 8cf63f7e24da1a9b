import numpy as np
import pytest

from monoloc.branches import (_float_to_fixed, branch_table, branch_value, check_branch_table, check_rank_one,
                              counting_lemma_check, counting_variation,
                              counting_variation_general, general_bound,
                              intersection_count_bound, intersection_points, jump_points)
from monoloc.operators import build_box, eigenvalues
from monoloc.potential import make_log_singular, make_sawtooth


def test_jump_points_are_minus_orbit(gold):
    jp = jump_points(gold, 8)
    ref = np.sort(np.mod(-np.arange(8) * gold.value, 1.0))
    assert np.allclose(jp.values, ref, atol=1e-15)
    assert jp.gaps().sum() == pytest.approx(1.0)


@pytest.mark.parametrize("pot", [make_sawtooth(5), make_log_singular(5, 1)])
@pytest.mark.parametrize("n", [3, 5, 8])
def test_branches_monotone_and_complete(gold, pot, n):
    t = branch_table(gold, pot, n)
    r = check_branch_table(t)
    assert r.passed, (r.worst_slope_defect, r.witness, r.multiset_error)


@pytest.mark.parametrize("n", [5, 8, 13])
def test_rank_one_interlacing(gold, saw20, n):
    assert check_rank_one(gold, saw20, n).passed


def test_intersection_points_cross_level(gold, saw20):
    n, E = 8, 7.5
    iset = intersection_points(gold, saw20, n, E)
    jp = jump_points(gold, n)
    assert iset.points.size == n
    # each branch is below E just before its point and at or above E just after
    for k, z in zip(iset.branches, iset.branch_coords):
        if 0 < z < 1:
            lo = branch_value(gold, saw20, jp, int(k), _float_to_fixed(z - 1e-9, gold.precision_bits))
            hi = branch_value(gold, saw20, jp, int(k), _float_to_fixed(z + 1e-9, gold.precision_bits))
            assert lo < E <= hi


def test_counting_lemma(gold, saw20):
    rng = np.random.default_rng(5)
    pairs = [tuple(sorted(rng.random(2))) for _ in range(40)]
    assert counting_lemma_check(gold, saw20, 8, 6.0, pairs) == []


def test_counting_variation_constant(gold, saw20):
    for q in (13, 21, 34):
        v = counting_variation(gold, saw20, q, np.linspace(1, 19, 5))
        assert np.max(v) <= 16


def test_general_counting_bound(silv):
    pot = make_log_singular(5, 1)
    for q in (12, 29):
        for n in (2 * q, 2 * q + 1, 3 * q - 2):
            v, b = counting_variation_general(silv, pot, n, q, np.array([-2.0, 0.5, 3.0]))
            assert np.max(v) <= b


def test_general_bound_formula():
    assert general_bound(2, -3) == 64 * 2 + 16 * 5


def test_intersection_count(gold, saw20):
    r = intersection_count_bound(gold, saw20, 55, 55, 3.3, 0.1, 0.4)
    assert r.passed and r.count <= r.bound


def test_not_a_denominator(gold, saw20):
    with pytest.raises(ValueError):
        counting_variation(gold, saw20, 14, 1.0)
