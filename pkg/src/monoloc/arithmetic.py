"""Continued fractions, certified rotation orbits, three-distance structure and
discrepancy of point sets on the circle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate


class PrecisionError(RuntimeError):
    """Requested orbit exceeds the certified fixed-point budget."""


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple[int, ...]
    numerators: tuple[int, ...]
    denominators: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coefficients)

    @property
    def last(self) -> Fraction:
        return Fraction(self.numerators[-1], self.denominators[-1])


def cf_from_coefficients(coeffs: Sequence[int]) -> ContinuedFraction:
    coeffs = tuple(int(a) for a in coeffs)
    if not coeffs:
        raise ValueError("need at least one coefficient")
    if coeffs[0] < 0:
        raise ValueError(f"a_0 must be >= 0, got {coeffs[0]}")
    for k, a in enumerate(coeffs[1:], start=1):
        if a < 1:
            raise ValueError(f"a_{k} must be >= 1, got {a}")
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, 1
    ps, qs = [], []
    for a in coeffs:
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        ps.append(p)
        qs.append(q)
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
    return ContinuedFraction(coeffs, tuple(ps), tuple(qs))


@dataclass(frozen=True)
class FrequencyModel:
    """An irrational rotation number given by a finite continued fraction window.

    The rotation actually used is the last convergent p_K/q_K stored in
    fixed point with ``precision_bits`` fractional bits. Orbits are only
    served up to ``max_orbit_length`` so that they cannot see the
    periodicity of the truncation and stay inside the error budget.
    """

    cf: ContinuedFraction
    precision_bits: int = 256
    value_fixed: int = field(init=False)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        p, q = self.cf.numerators[-1], self.cf.denominators[-1]
        frac = p - (p // q) * q
        value = (frac << self.precision_bits) // q
        object.__setattr__(self, "value_fixed", value)

    @property
    def scale(self) -> int:
        return 1 << self.precision_bits

    @property
    def value(self) -> float:
        return self.value_fixed / self.scale

    @property
    def denominators(self) -> tuple[int, ...]:
        return self.cf.denominators

    @property
    def numerators(self) -> tuple[int, ...]:
        return self.cf.numerators

    @property
    def max_orbit_length(self) -> int:
        return min(self.cf.denominators[-1], 1 << (self.precision_bits // 2))

    @property
    def error_budget(self) -> float:
        """Certified absolute error of ``orbit`` entries (before float rounding)."""
        return 2.0 ** (-(self.precision_bits // 2))

    @property
    def beta_running(self) -> list[float]:
        return [r for _, r, _ in beta_estimate(self.cf)]

    def usable_denominators(self, limit: int | None = None) -> list[int]:
        """Distinct convergent denominators q_k, optionally capped at ``limit``."""
        out: list[int] = []
        for q in self.cf.denominators:
            if limit is not None and q > limit:
                break
            if not out or q != out[-1]:
                out.append(q)
        return out

    def index_of(self, q: int) -> int:
        """Largest k with q_k == q."""
        ks = [k for k, qk in enumerate(self.cf.denominators) if qk == q]
        if not ks:
            raise ValueError(f"{q} is not a convergent denominator")
        return ks[-1]

    def to_json(self) -> str:
        return json.dumps({"coefficients": list(self.cf.coefficients),
                           "precision_bits": self.precision_bits})

    @classmethod
    def from_dict(cls, d: dict) -> "FrequencyModel":
        return cls(cf_from_coefficients(d["coefficients"]),
                   int(d.get("precision_bits", 256)))


def frequency(coeffs: Sequence[int], precision_bits: int = 256) -> FrequencyModel:
    return FrequencyModel(cf_from_coefficients(coeffs), precision_bits)


def golden(depth: int = 60, precision_bits: int = 256) -> FrequencyModel:
    """(sqrt 5 - 1)/2 = [0; 1, 1, 1, ...]."""
    return frequency([0] + [1] * depth, precision_bits)


def silver(depth: int = 40, precision_bits: int = 256) -> FrequencyModel:
    """sqrt 2 - 1 = [0; 2, 2, 2, ...]."""
    return frequency([0] + [2] * depth, precision_bits)


def liouville_spike(prefix: Sequence[int], beta_target: float, tail: int = 30,
                    precision_bits: int = 512) -> FrequencyModel:
    """Continued fraction ``prefix`` followed by one huge partial quotient.

    The spike a_{k+1} is chosen so that log(q_{k+1})/q_k is as close as
    possible to ``beta_target`` where q_k is the last denominator of the
    prefix; a tail of ones keeps the truncation long.
    """
    cf = cf_from_coefficients(prefix)
    qk, qkm1 = cf.denominators[-1], (cf.denominators[-2] if len(cf) > 1 else 0)
    target = math.exp(beta_target * qk)
    a = max(1, round((target - qkm1) / qk))
    return frequency(list(prefix) + [a] + [1] * tail, precision_bits)


def beta_estimate(cf: ContinuedFraction) -> list[tuple[int, float, float]]:
    """Running estimate of the irrationality exponent beta.

    Returns (k, log(q_{k+1})/q_k, running max). For a finite coefficient
    window this is only an estimate of the limsup, never beta itself.
    """
    if len(cf) < 2:
        raise ValueError("need at least two convergents")
    out = []
    best = -math.inf
    qs = cf.denominators
    for k in range(len(qs) - 1):
        ratio = _log_int(qs[k + 1]) / qs[k]
        best = max(best, ratio)
        out.append((k, ratio, best))
    return out


def _log_int(n: int) -> float:
    # math.log accepts arbitrarily large ints
    return math.log(n)


def torus_distance(y):
    """Distance to the nearest integer, ||y||."""
    y = np.asarray(y, dtype=float)
    r = np.abs(y - np.round(y))
    return float(r) if r.ndim == 0 else r


def _to_fixed(x, bits: int) -> int:
    return math.floor(Fraction(x) * (1 << bits))


def orbit_fixed(x, freq: FrequencyModel, n: int, start: int = 0,
                x_fixed: int | None = None) -> list[int]:
    """Fixed-point numerators of {x + j alpha}, j = start..start+n-1.

    Entries are integers in [0, 2^precision_bits). ``x_fixed`` bypasses the
    conversion of ``x`` and is used for exact phases such as jump points.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    reach = max(abs(start), abs(start + n - 1)) + 1 if n else 0
    if reach > freq.max_orbit_length:
        raise PrecisionError(
            f"orbit reach {reach} exceeds certified length {freq.max_orbit_length}")
    mod = freq.scale
    base = (_to_fixed(x, freq.precision_bits) if x_fixed is None else x_fixed) % mod
    a = freq.value_fixed
    return [(base + j * a) % mod for j in range(start, start + n)]


def orbit(x, freq: FrequencyModel, n: int, start: int = 0,
          x_fixed: int | None = None) -> np.ndarray:
    """{x + j alpha} for j = start..start+n-1 as float64.

    Computed in fixed point (error <= n 2^-precision_bits against the
    stored rotation) and rounded once to double precision.
    """
    pts = orbit_fixed(x, freq, n, start, x_fixed)
    bits = freq.precision_bits
    return np.array([_fixed_to_float(v, bits) for v in pts], dtype=float)


def _fixed_to_float(v: int, bits: int) -> float:
    # shift first so that the int -> float conversion never overflows
    shift = bits - 60
    out = (v >> shift) / float(1 << 60)
    return 0.0 if out >= 1.0 else out


def rotation_phases(freq: FrequencyModel, n: int, start: int = 0) -> np.ndarray:
    """{j alpha} as floats; add a phase and wrap to get a batch of orbits."""
    return orbit(0, freq, n, start)


def multiple_distance(freq: FrequencyModel, j: int) -> float:
    """||j alpha|| computed in fixed point."""
    mod = freq.scale
    v = (j * freq.value_fixed) % mod
    return min(v, mod - v) / mod


@dataclass
class ThreeDistanceReport:
    k: int
    q: int
    gaps: list[float]
    expected_small: float
    expected_large: float
    paper_large: float
    degenerate: bool
    passed: bool
    failures: list[str]

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def three_distance_check(freq: FrequencyModel, k: int) -> ThreeDistanceReport:
    """Gap structure of {j alpha : 0 <= j < q_k} and the sandwich bounds.

    The two gap lengths are ||q_{k-1} alpha|| and ||q_{k-1} alpha|| +
    ||q_k alpha||; the latter equals ||(q_k - q_{k-1}) alpha|| except at the
    first couple of scales where the sum exceeds 1/2 (reported as
    degenerate). Sandwich bounds are only asserted off the degenerate scales.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    qs = freq.denominators
    if k + 1 >= len(qs):
        raise ValueError("k too large for the coefficient window")
    q, qm1, qp1 = qs[k], qs[k - 1], qs[k + 1]
    if qp1 > 1 << (freq.precision_bits // 2):
        # ||q_k alpha|| ~ 1/q_{k+1} would sink below the fixed-point error
        raise PrecisionError(f"q_{k + 1} = {qp1} is not resolved at {freq.precision_bits} bits")
    mod = freq.scale
    pts = sorted(orbit_fixed(0, freq, q))
    diffs = [b - a for a, b in zip(pts, pts[1:])] + [mod - pts[-1] + pts[0]]
    gaps = [d / mod for d in diffs]
    small = multiple_distance(freq, qm1)
    large = small + multiple_distance(freq, q)
    paper_large = multiple_distance(freq, q - qm1)
    tol = 4.0 * q / mod + 1e-15
    failures: list[str] = []
    degenerate = q == 1 or large > 0.5
    if q == 1:
        if abs(gaps[0] - 1.0) > tol:
            failures.append(f"single gap {gaps[0]} != 1")
    else:
        for g in gaps:
            if abs(g - small) > tol and abs(g - large) > tol:
                failures.append(f"gap {g!r} matches neither {small!r} nor {large!r}")
                break
        if not degenerate:
            if abs(paper_large - large) > tol:
                failures.append(f"||(q_k-q_(k-1))a|| = {paper_large} != {large}")
            if not (1.0 / (2 * q) - tol <= small):
                failures.append(f"1/(2q)={1 / (2 * q)} > ||q_(k-1)a||={small}")
            if not small < 1.0 / q:
                failures.append(f"||q_(k-1)a||={small} >= 1/q")
            if not 1.0 / q < paper_large:
                failures.append(f"||(q_k-q_(k-1))a||={paper_large} <= 1/q")
            if not paper_large <= 1.0 / q + 1.0 / qp1 + tol:
                failures.append(f"||(q_k-q_(k-1))a||={paper_large} > 1/q_k+1/q_(k+1)")
            if not paper_large <= 2.0 / q + tol:
                failures.append(f"||(q_k-q_(k-1))a||={paper_large} > 2/q")
    return ThreeDistanceReport(k, q, gaps, small, large, paper_large,
                               degenerate, not failures, failures)


def best_approximation_check(freq: FrequencyModel, k: int) -> tuple[bool, int | None]:
    """||j alpha|| >= ||q_k alpha|| for 1 <= j <= q_{k+1}-1.

    Returns (passed, offending j).
    """
    qs = freq.denominators
    qk, qk1 = qs[k], qs[k + 1]
    mod = freq.scale
    a = freq.value_fixed
    target = (qk * a) % mod
    target = min(target, mod - target)
    v = 0
    for j in range(1, qk1):
        v = (v + a) % mod
        if min(v, mod - v) < target - 4 * qk1:
            return False, j
    return True, None


@dataclass(frozen=True)
class DiscrepancyReport:
    n: int
    value: float
    witness_t: float


def discrepancy(points) -> DiscrepancyReport:
    """Star discrepancy sup_t |#{x_k < t}/n - t| from the sorted points."""
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("need at least one point")
    if x[0] < 0 or x[-1] >= 1:
        raise ValueError("points must lie in [0, 1)")
    n = x.size
    i = np.arange(1, n + 1)
    above = i / n - x           # t just above x_(i)
    below = x - (i - 1) / n     # t at x_(i)
    ia, ib = int(np.argmax(above)), int(np.argmax(below))
    if above[ia] >= below[ib]:
        return DiscrepancyReport(n, float(above[ia]), float(x[ia]))
    return DiscrepancyReport(n, float(below[ib]), float(x[ib]))


@dataclass
class KoksmaReport:
    lhs: float
    rhs: float
    passed: bool
    integral: float
    integration_error: float


class IntegrationFailure(RuntimeError):
    pass


def koksma_check(g: Callable[[float], float], total_variation: float, points,
                 tolerance: float = 1e-12, breakpoints=None) -> KoksmaReport:
    """Koksma's inequality |int g - mean g(x_k)| <= V(g) D*_n."""
    if not np.isfinite(total_variation) or total_variation < 0:
        raise ValueError("total variation must be finite and non-negative")
    pts = np.asarray(points, dtype=float)
    try:
        val, err = integrate.quad(g, 0.0, 1.0, points=breakpoints, limit=200)
    except Exception as exc:  # noqa: BLE001
        raise IntegrationFailure(str(exc)) from exc
    if not np.isfinite(val):
        raise IntegrationFailure("non-finite integral")
    mean = float(np.mean([g(float(p)) for p in pts]))
    lhs = abs(val - mean)
    rhs = total_variation * discrepancy(pts).value
    return KoksmaReport(lhs, rhs, lhs <= rhs + tolerance + err, val, err)


@dataclass(frozen=True)
class ScaleChoice:
    n: int
    q: int
    s: int
    r: int

    @property
    def ratio(self) -> float:
        """(s + |r|)/n."""
        return (self.s + abs(self.r)) / self.n


def choose_scale(n: int, freq: FrequencyModel) -> ScaleChoice:
    """Largest denominator q <= n with n = s q + r, s >= 1, |r| <= sqrt(n).

    Ties: larger q, then smaller |r|, then positive r.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    best = None
    for q in sorted(set(freq.denominators)):
        if q > n:
            break
        for s in {max(1, n // q), max(1, -(-n // q))}:
            r = n - s * q
            if r * r <= n:
                key = (q, -abs(r), r)
                if best is None or key > best[0]:
                    best = (key, ScaleChoice(n, q, s, r))
    if best is None:  # q_0 = 1 always works unless the window is empty
        raise ValueError("no admissible scale")
    return best[1]
