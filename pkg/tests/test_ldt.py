import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from monoloc.arithmetic import choose_scale, frequency, golden, liouville_spike
from monoloc.branches import intersection_points
from monoloc.ldt import (GoodInterval, GoodIntervalFailure, SamplingPreconditionError,
                         _orbit_points, build_sampling_set, find_good_interval, lagrange_bound,
                         lagrange_minimax, ldt_verify, resonance_map, sampling_lemma_bound,
                         split_determinant, uniform_upper_check)
from monoloc.operators import build_box, determinant
from monoloc.spectral import CutoffPair


@pytest.mark.parametrize("E", [-3.0, 0.5, 7.0, 19.5])
def test_split_identity(gold, saw20, E):
    box = build_box(0.23, gold, saw20, 89)
    sp = split_determinant(box, E, CutoffPair.for_scale(55, 4))
    assert sum(sp.counts) == 89
    assert sp.identity_gap(determinant(box, E)) < 1e-9


@pytest.mark.parametrize("n", [55, 89, 144])
@pytest.mark.parametrize("E", [-5.0, 3.3, 12.0])
def test_ldt_checks(gold, saw20, ids20, n, E):
    box = build_box(0.41, gold, saw20, n)
    rep = ldt_verify(box, E, None, ids20)
    assert rep.passed, [c.name for c in rep.failures()]
    assert uniform_upper_check(box, E, None, ids20).passed
    d = rep.as_dict()
    assert d["q"] == choose_scale(n, gold).q and all("slack" in c for c in d["checks"])


def test_ldt_needs_potential(gold, saw20):
    box = dataclasses.replace(build_box(0.1, gold, saw20, 21), potential=None)
    with pytest.raises(ValueError):
        ldt_verify(box, 1.0, None, None)


def _minimax_lp(x):
    # variables: lower coefficients c_0..c_{t-1}, and the level s
    t = len(x) - 1
    V = np.vander(x, t, increasing=True) if t else np.zeros((len(x), 0))
    lead = x ** t
    A = np.block([[V, -np.ones((len(x), 1))], [-V, -np.ones((len(x), 1))]])
    b = np.concatenate([-lead, lead])
    c = np.zeros(t + 1)
    c[-1] = 1
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * (t + 1), method="highs")
    assert res.status == 0
    return res.fun


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.2, 2.0), min_size=1, max_size=5), st.floats(-1, 1))
def test_lagrange_minimax_vs_lp(gaps, x0):
    x = x0 + np.concatenate([[0.0], np.cumsum(gaps)])
    mm = lagrange_minimax(x)
    assert mm == pytest.approx(_minimax_lp(x), rel=1e-6, abs=1e-9)
    assert mm >= lagrange_bound(x, len(x) - 1, min(gaps)) * (1 - 1e-12)


def test_lagrange_bound_validation():
    with pytest.raises(ValueError):
        lagrange_bound([0.0, 0.1], 1, d=0.2)
    with pytest.raises(ValueError):
        lagrange_bound([0.0], 2)
    assert lagrange_bound([0.0, 1.0, 2.0], 2) == pytest.approx(0.5)


def test_sampling_preconditions(gold, saw20):
    iset = intersection_points(gold, saw20, 13, 5.0)
    args = (iset, 20.0, gold, saw20, 1e-3)
    with pytest.raises(SamplingPreconditionError) as e:
        sampling_lemma_bound((0.1, 0.2), [0.11, 0.12], *args)
    assert e.value.kind == "interval"
    with pytest.raises(SamplingPreconditionError) as e:
        sampling_lemma_bound((0.1, 0.102), [0.11], *args)
    assert e.value.kind == "interval"
    with pytest.raises(SamplingPreconditionError) as e:
        sampling_lemma_bound((0.1, 0.102), [0.1005, 0.1006], *args, d=0.001)
    assert e.value.kind == "separation"


def test_sampling_bound_holds(gold, saw20):
    n, E = 13, 5.0
    iset = intersection_points(gold, saw20, n, E)
    z = float(np.sort(iset.points)[3])
    lo, hi = z - 1e-3, z + 1e-3
    pts = np.linspace(lo, hi, 4)
    try:
        r = sampling_lemma_bound((lo, hi), pts, iset, 20.0, gold, saw20, 1e-6)
    except SamplingPreconditionError as exc:
        pytest.skip(f"construction rejected: {exc.kind}")
    assert r.t >= 1 and r.passed


def test_resonance_map(gold):
    rm = resonance_map(gold, gold.index_of(55), 0.1)
    assert (rm.q_k, rm.q_next, rm.b_k) == (55, 89, 5)
    assert not rm.liouville
    assert rm.classify(40) == "base"
    assert rm.zone_of(3) == 0 and rm.zone_of(20) is None
    with pytest.raises(ValueError):
        resonance_map(gold, 3, tau=0.2)


def test_liouville_map_classifies():
    f = liouville_spike([0] + [1] * 6, 0.8)
    rm = resonance_map(f, 6, 0.1, c_d=3.0)
    assert (rm.q_k, rm.liouville) == (13, True) and rm.ell_max >= 1
    assert rm.classify(5 * 13 + 1) == "resonant"
    assert rm.classify(5 * 13 + 6) in ("nonres_dio", "nonres_lio")


def test_base_sampling_set(gold):
    rm = resonance_map(gold, gold.index_of(55), 0.1)
    ss = build_sampling_set(40, "base", rm)
    assert ss.J.size == 56 and ss.observed_separation >= ss.expected_separation
    with pytest.raises(ValueError):
        build_sampling_set(10, "base", rm)


def test_lio_clusters():
    f = frequency([0, 2, 60] + [1] * 40)
    rm = resonance_map(f, 9)
    ss = build_sampling_set(6, "lio_dio", rm)
    _, qp, _, s1 = rm.scale_data()
    assert len(ss.clusters) == qp
    assert all(len(c) == 2 * s1 for c in ss.clusters)
    assert all(length <= 13 / (18 * qp) for _, length in ss.cluster_arcs)


def test_resonant_sampling_pairs():
    f = liouville_spike([0] + [1] * 6, 0.8)
    rm = resonance_map(f, 6, 0.1, c_d=3.0)
    ss = build_sampling_set(rm.q_k, "resonant", rm)
    assert len(ss.clusters) == rm.q_k
    assert ss.pair_distance < 1 / (3 * rm.q_k)


def test_good_interval_and_failure(gold, saw20, ids20):
    rm = resonance_map(gold, gold.index_of(55), 0.1)
    res = find_good_interval(0.1, 40, 3.3, "base", rm, ids20, saw20)
    assert isinstance(res, GoodInterval)
    assert res.mu_at_m >= 0.5 * res.L
    assert res.window[0] <= 40 <= res.window[1]
    # near an eigenvector centre no interval can be good
    from monoloc.patching import central_eigenvalue
    n = 400
    box = build_box(0.1, gold, saw20, n, start=-(n // 2))
    E, c = central_eigenvalue(box, 2.8, 3.8)
    xc = float(_orbit_points(gold, [c - n // 2 - 40], 0.1)[0])
    bad = find_good_interval(xc, 40, E, "base", rm, ids20, saw20)
    assert isinstance(bad, GoodIntervalFailure)
    assert bad.to_csv().startswith("shift,")
