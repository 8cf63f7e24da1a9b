import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monoloc.acceptance import saturated_psi
from monoloc.ldt import resonance_map
from monoloc.operators import build_box
from monoloc.oracles import paths_recursive
from monoloc.patching import (GoodIntervalCollection, InconclusiveLocalization,
                              PathBudgetExceeded, SiteArray, block_collection, decay_profile,
                              dominating_check, enumerate_paths, fit_slope, min_weight,
                              profile_from_log, psi_regular, random_collection,
                              resonant_recursion_check, stable_log_profile,
                              verify_terminating_bound)


def _as_dicts(coll):
    N1, N2 = coll.inner
    iv = {m: coll.record(m)[:2] for m in range(N1, N2 + 1)}
    mus = {m: coll.record(m)[2] for m in range(N1, N2 + 1)}
    return iv, mus


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(8, 20), st.floats(2.0, 8.0))
def test_enumeration_matches_recursion(seed, L, cutoff):
    coll = random_collection(np.random.default_rng(seed), 30, L, mu=0.6, mu_spread=0.5)
    iv, mus = _as_dicts(coll)
    for m in (0, 15, 29):
        en = enumerate_paths(coll, m, cutoff)
        got = sorted((p.vertices, round(p.weight, 9)) for p in en.paths)
        ref = sorted((v, round(w, 9)) for v, w in paths_recursive(iv, coll.inner, m, mus, cutoff))
        assert got == ref
        for p in en.paths:
            assert p.recompute(coll) == pytest.approx(p.weight)


@pytest.mark.parametrize("side", ["left", "right"])
def test_min_weight_is_minimum(side):
    coll = random_collection(np.random.default_rng(3), 30, 10, mu=0.6)
    w0, path = min_weight(coll, 12, side)
    en = enumerate_paths(coll, 12, w0 + 3.0)
    N1, N2 = coll.inner
    ws = [p.weight for p in en.paths if (p.end < N1 if side == "left" else p.end > N2)]
    assert min(ws) == pytest.approx(w0)
    assert path.recompute(coll) == pytest.approx(w0)


def test_collection_validation():
    ok = block_collection(30, 12, 1.0)
    assert not ok.problems()
    with pytest.raises(ValueError, match="mu sigma L"):
        block_collection(30, 12, 0.01)
    with pytest.raises(ValueError, match="margin"):
        GoodIntervalCollection((-20, 50), (0, 2), np.array([0, 0, 0]), np.array([11, 12, 13]),
                               np.ones(3), 1.0, 12)


def test_saturated_identity():
    coll = block_collection(60, 12, 3.0)
    psi = saturated_psi(coll, 1.0, 0.5)
    for m in (0, 23, 59):
        rep = verify_terminating_bound(coll, psi, m, rtol=1e-12)
        assert rep.passed
        assert abs(rep.lhs - rep.path_sum) <= rep.remainder + 1e-9 * rep.lhs


def test_regularity_error_and_margin():
    coll = block_collection(30, 12, 3.0)
    psi = SiteArray(coll.outer[0], np.ones(coll.outer[1] - coll.outer[0] + 1))
    from monoloc.patching import RegularityError
    with pytest.raises(RegularityError) as e:
        verify_terminating_bound(coll, psi, 5)
    assert e.value.points
    with pytest.raises(ValueError):
        psi_regular(np.ones(40), 1, (0, 20), 1.0)


def test_path_budget():
    coll = random_collection(np.random.default_rng(0), 400, 8, mu=0.5, mu_spread=0.0)
    with pytest.raises(PathBudgetExceeded):
        enumerate_paths(coll, 200, 200.0, node_budget=1000)


@pytest.mark.parametrize("L", [500, 2000])
def test_dominating(L):
    coll = random_collection(np.random.default_rng(L), 5 * L, L, mu=1.0, mu_spread=0.5,
                             extra_len=L // 2)
    for m, side in ((L, "left"), (4 * L, "right")):
        assert dominating_check(coll, m, side).passed


def test_stable_profile_vs_mpmath(gold, saw20):
    n = 40
    box = build_box(0.1, gold, saw20, n)
    with mpmath.workdps(80):
        H = mpmath.matrix(n, n)
        for i in range(n):
            H[i, i] = mpmath.mpf(float(box.diagonal[i]))
            if i + 1 < n:
                H[i, i + 1] = H[i + 1, i] = 1
        w, V = mpmath.eigsy(H)
        k = min(range(n), key=lambda j: abs(w[j] - 3.3))
        vec = [V[i, k] for i in range(n)]
        c = max(range(n), key=lambda i: abs(vec[i]))
        ref = np.array([float(mpmath.log(abs(v))) for v in vec])
        E = float(w[k])
    lp = stable_log_profile(box.diagonal, E, c, ref[c])
    assert ref.min() < -40          # tails far below double precision
    assert np.max(np.abs(lp - ref)) < 1e-8


def test_fit_slope_exact():
    d = np.arange(1, 30)
    rate, c, rms = fit_slope(d, 2.0 - 1.5 * d)
    assert (rate, c) == (pytest.approx(1.5), pytest.approx(2.0)) and rms < 1e-12


def test_decay_profile_golden(gold, saw20, ids20):
    p = decay_profile(gold, saw20, 987, 3.3, ids20, x=0.1)
    assert p.ipr > 0.05
    rel = abs(p.overall_rate - p.L) / p.L
    assert rel < 0.15
    assert p.to_csv().startswith("m,log_abs_psi,zone")
    assert p.summary()["beta_convention"]


def test_weak_coupling_inconclusive(gold):
    from monoloc.potential import make_sawtooth
    from monoloc.spectral import ids_build
    weak = make_sawtooth(0.5)
    with pytest.raises(InconclusiveLocalization):
        decay_profile(gold, weak, 987, 0.3, ids_build(gold, weak, 987), x=0.1)


def test_resonant_check_needs_liouville(gold):
    rm = resonance_map(gold, 8, 0.1)
    p = profile_from_log(-np.abs(np.arange(-200, 201)) * 1.0, 200, L=1.0)
    with pytest.raises(ValueError, match="Liouville"):
        resonant_recursion_check(p, rm, 1.0)
