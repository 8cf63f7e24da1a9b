import math

import mpmath
import numpy as np
import pytest

from monoloc.potential import (from_descriptor, make_custom, make_log_singular, make_sawtooth,
                               make_step_linear, validate)


@pytest.mark.parametrize("pot", [make_sawtooth(5), make_sawtooth(20, 1.5),
                                 make_log_singular(5, 1), make_step_linear(3, 4, 0.5)])
def test_families_validate(pot):
    assert validate(pot).passed


def test_non_monotone_rejected():
    bad = make_custom(lambda y: 20 * y + 3 * np.sin(8 * np.pi * y), 20.0)
    r = validate(bad)
    assert not r.passed and r.witness is not None


def test_overstated_gamma_rejected():
    assert not validate(make_custom(lambda y: 2 * y, 3.0)).passed


def test_log_singular_values():
    p = make_log_singular(5, 1)
    assert p.evaluate(0.0) == -math.inf
    assert p.evaluate(0.5) == pytest.approx(2.5 + math.log(0.5))
    assert p.evaluate(1.25) == pytest.approx(1.25 + math.log(0.25))


def test_log_integral_against_mpmath():
    p = make_log_singular(5, 1)
    mpmath.mp.dps = 30
    kink = mpmath.findroot(lambda y: 5 * y + mpmath.log(y), 0.25)
    ref = mpmath.quad(lambda y: mpmath.log(1 + abs(5 * y + mpmath.log(y))), [0, kink, 1])
    assert p.log_integral == pytest.approx(float(ref), rel=1e-8)


def test_log_moment_sawtooth():
    p = make_sawtooth(20)
    # int_0^1 log(|20y - E| + 2) dy in closed form for E inside (0, 20)
    E = 7.0
    F = lambda u: (u + 2) * math.log(u + 2) - u
    ref = (F(E) - F(0) + F(20 - E) - F(0)) / 20
    assert p.log_moment(E) == pytest.approx(ref, rel=1e-9)


def test_descriptors_round_trip():
    for p in (make_sawtooth(5), make_log_singular(5, 1), make_step_linear(2, 3)):
        q = from_descriptor(p.descriptor())
        x = np.linspace(0.01, 0.99, 7)
        assert np.allclose(p.evaluate(x), q.evaluate(x))
    with pytest.raises(ValueError):
        from_descriptor({"kind": "cosine"})
    with pytest.raises(ValueError):
        make_sawtooth(-1)
