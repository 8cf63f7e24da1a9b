import math

import numpy as np
import pytest

from monoloc.arithmetic import golden
from monoloc.potential import make_log_singular, make_sawtooth
from monoloc.spectral import (CutoffPair, IDSTable, WindowRequired, default_energy_window,
                              ids_build, ids_inverse_check, l_corr, lyapunov_floor,
                              lyapunov_floor_check, lyapunov_table, quadrature_error,
                              synthetic_ids, thouless, truncated_thouless)
from monoloc.operators import transfer_lognorm


def test_cutoff_validation():
    CutoffPair(0.5, 11)
    for bm, bp in ((1.2, 20), (0.5, 9), (0.0, 20)):
        with pytest.raises(ValueError):
            CutoffPair(bm, bp)
    c = CutoffPair.for_scale(13, 4)
    assert c.B_minus == pytest.approx(13.0 ** -7) and c.B_plus == 13


def test_synthetic_atom_and_uniform():
    E = np.array([-2.0, 0.1, 3.0])
    assert np.allclose(thouless(synthetic_ids("atom", at=0.5), E), np.log(np.abs(E - 0.5)))
    uni = synthetic_ids("uniform", a=0.0, b=1.0)
    # int_0^1 log|E - t| dt at E = 3
    ref = (3 * math.log(3) - 2 * math.log(2)) - 1
    assert thouless(uni, 3.0) == pytest.approx(ref, abs=1e-12)


def test_truncated_thouless_monotone_in_cutoff():
    uni = synthetic_ids("uniform", a=-1.0, b=1.0, points=201)
    # only B_- matters here: everything lies within distance 2 < B_+
    wide = truncated_thouless(uni, 0.3, CutoffPair(1e-6, 11))
    narrow = truncated_thouless(uni, 0.3, CutoffPair(0.5, 11))
    assert narrow >= wide
    assert l_corr(uni, 0.3, CutoffPair(1e-6, 11)) < 1e-4


def test_ids_is_monotone_and_consistent(gold, saw20):
    a = ids_build(gold, saw20, 987)
    b = ids_build(gold, saw20, 4181)
    assert np.all(np.diff(a.values) >= 0)
    dev = np.max(np.abs(a(b.energy_grid) - b.values))
    assert dev <= a.error_bound + b.error_bound


def test_ids_lipschitz(ids20):
    # density of states of a gamma-monotone potential is at most 1/gamma
    assert ids20.lipschitz_defect() <= 2 * ids20.error_bound / ids20.spacing


def test_thouless_vs_transfer(gold, saw20, ids20):
    E = np.array([2.0, 7.0, 15.0])
    rel = np.abs(thouless(ids20, E) - transfer_lognorm(0.1, gold, saw20, E, 2000)) / thouless(ids20, E)
    assert np.all(rel < 0.05)


@pytest.mark.parametrize("gam", [10.0, 20.0, 40.0])
def test_floor(gam):
    ids = ids_build(golden(), make_sawtooth(gam), 4181)
    r = lyapunov_floor_check(lyapunov_table(ids), gam)
    assert r.passed and r.floor == pytest.approx(math.log(gam / (2 * math.e)))


def test_floor_clipped():
    assert lyapunov_floor(1.0) == 0.0


def test_inverse(ids20, saw20):
    assert ids_inverse_check(ids20, saw20).passed


def test_window_required():
    with pytest.raises(WindowRequired):
        default_energy_window(make_log_singular(5, 1))


def test_ids_table_validation():
    with pytest.raises(ValueError):
        IDSTable(np.array([0.0, 1.0]), np.array([0.5, 0.2]), None, 0.0)


def test_quadrature_error_shrinks(gold, saw20):
    coarse = ids_build(gold, saw20, 987, grid_points=128)
    fine = ids_build(gold, saw20, 987, grid_points=2048)
    assert quadrature_error(fine) < quadrature_error(coarse)
