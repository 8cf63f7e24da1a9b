"""Monotone 1-periodic potentials: built-in families and validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class MonotonePotential:
    """A gamma-monotone function on [0, 1), extended periodically.

    ``func`` receives wrapped arguments in (0, 1) (numpy arrays); the value
    at 0 is ``lower_limit_at_zero`` and may be -inf.
    """

    func: Callable[[np.ndarray], np.ndarray]
    gamma: float
    lower_limit_at_zero: float
    bounded_above: bool = True
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    sup_value: float = math.nan  # limit at 1-, if finite

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        y = np.mod(np.asarray(x, dtype=float), 1.0)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        out = np.empty_like(y)
        zero = y == 0.0
        out[zero] = self.lower_limit_at_zero
        if np.any(~zero):
            out[~zero] = self.func(y[~zero])
        return float(out[0]) if scalar else out

    @property
    def bounded_below(self) -> bool:
        return np.isfinite(self.lower_limit_at_zero)

    @property
    def inf_value(self) -> float:
        return self.lower_limit_at_zero

    def _quad(self, g) -> float:
        val, _ = integrate.quad(lambda t: g(float(self.func(np.array([t]))[0])),
                                0.0, 1.0, limit=400)
        return float(val)

    @property
    def log_integral(self) -> float:
        """int_0^1 log(1 + |f|)."""
        return self._cached("log_integral", lambda: self._quad(lambda v: math.log1p(abs(v))))

    def log_moment(self, E: float) -> float:
        """int_0^1 log(|f - E| + 2)."""
        return self._quad(lambda v: math.log(abs(v - E) + 2.0))

    def _cached(self, key, fn):
        cache = self.__dict__.setdefault("_cache", {})
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    def descriptor(self) -> dict:
        return {"kind": self.kind, **self.params}

    def to_json(self) -> str:
        return json.dumps(self.descriptor())


def make_sawtooth(lam: float, offset: float = 0.0) -> MonotonePotential:
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    lam, offset = float(lam), float(offset)
    return MonotonePotential(lambda y: lam * y + offset, lam, offset, True,
                             "sawtooth", {"lambda": lam, "offset": offset},
                             sup_value=lam + offset)


def make_log_singular(lam: float, mu: float) -> MonotonePotential:
    """f(x) = lam x + mu log x; f(0) = -inf (infinite coupling)."""
    if not lam > 0 or not mu > 0:
        raise ValueError("lambda and mu must be positive")
    lam, mu = float(lam), float(mu)
    return MonotonePotential(lambda y: lam * y + mu * np.log(y), lam, -math.inf, True,
                             "log_singular", {"lambda": lam, "mu": mu}, sup_value=lam)


def make_step_linear(lam: float, steps: int = 4, height: float = 1.0,
                     offset: float = 0.0) -> MonotonePotential:
    """Linear ramp plus ``steps`` upward jumps of size ``height``; still lam-monotone."""
    if not lam > 0 or steps < 0 or height < 0:
        raise ValueError("need lam > 0, steps >= 0, height >= 0")
    lam, height, offset = float(lam), float(height), float(offset)
    return MonotonePotential(
        lambda y: lam * y + height * np.floor(y * (steps + 1)) + offset,
        lam, offset, True, "step_linear",
        {"lambda": lam, "steps": steps, "height": height, "offset": offset},
        sup_value=lam + height * steps + offset)


def make_custom(func, gamma: float, lower_limit_at_zero: float | None = None,
                bounded_above: bool = True, name: str = "custom") -> MonotonePotential:
    """Wrap a user function; its gamma is taken at face value (see ``validate``)."""
    lo = float(func(np.array([0.0]))[0]) if lower_limit_at_zero is None else lower_limit_at_zero
    return MonotonePotential(func, float(gamma), lo, bounded_above, name, {"gamma": gamma})


FAMILIES = {
    "sawtooth": lambda d: make_sawtooth(d["lambda"], d.get("offset", 0.0)),
    "log_singular": lambda d: make_log_singular(d["lambda"], d["mu"]),
    "step_linear": lambda d: make_step_linear(d["lambda"], d.get("steps", 4),
                                              d.get("height", 1.0), d.get("offset", 0.0)),
}


def from_descriptor(d: dict) -> MonotonePotential:
    kind = d.get("kind")
    if kind not in FAMILIES:
        raise ValueError(f"unknown potential kind {kind!r}")
    return FAMILIES[kind](d)


@dataclass
class ValidationReport:
    passed: bool
    worst_defect: float
    witness: tuple[float, float] | None
    log_integral: float
    sample_count: int

    def as_dict(self):
        return dict(self.__dict__)


def validate(pot: MonotonePotential, sample_count: int = 4096, seed: int = 0,
             rtol: float = 1e-9) -> ValidationReport:
    """Randomized check of gamma-monotonicity and log-integrability.

    The minimum difference quotient over all pairs of a sorted sample is
    attained by an adjacent pair, so adjacent pairs give the exact
    worst case over the sample.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    rng = np.random.default_rng(seed)
    # mix uniform points with points clustered near the endpoints
    u = rng.random(sample_count)
    edge = np.concatenate([np.geomspace(1e-12, 1e-2, 32), 1 - np.geomspace(1e-12, 1e-2, 32)])
    x = np.unique(np.concatenate([u, edge]))
    x = x[(x > 0) & (x < 1)]
    fx = pot.evaluate(x)
    dx = np.diff(x)
    dq = np.diff(fx) / dx
    # floating-point allowance of each difference quotient
    slack = 4 * np.finfo(float).eps * (np.abs(fx[1:]) + np.abs(fx[:-1]) + x[1:] * pot.gamma) / dx
    defect = dq - pot.gamma + slack
    i = int(np.argmin(defect))
    worst = float(defect[i])
    ok_mono = worst >= -rtol * max(1.0, pot.gamma)
    try:
        li = pot.log_integral
    except Exception:  # noqa: BLE001
        li = math.inf
    ok = ok_mono and bool(np.isfinite(li))
    return ValidationReport(ok, worst, None if ok_mono else (float(x[i]), float(x[i + 1])),
                            float(li), int(x.size))
