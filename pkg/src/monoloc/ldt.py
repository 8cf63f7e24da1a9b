"""Large-deviation machinery: the cutoff split of det(H - E), the finite
scale bounds, Lagrange/sampling lower bounds, resonance zones, sampling sets
and the good-interval search."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .arithmetic import FrequencyModel, PrecisionError, ScaleChoice, choose_scale, multiple_distance
from .branches import IntersectionSet, intersection_points
from .operators import (BoxOperator, SignedLogValue, build_box, determinant, eigenvalues,
                        greens_boundary_rows, NearSingularError)
from .potential import MonotonePotential
from .spectral import CutoffPair, IDSTable, l_corr, thouless, truncated_thouless

__all__ = [
    "ScaleChoice", "choose_scale", "DeterminantSplit", "split_determinant",
    "SubCheck", "LDTReport", "ldt_verify", "uniform_upper_check",
    "lagrange_bound", "lagrange_minimax", "lagrange_trials",
    "SamplingPreconditionError", "SamplingResult", "sampling_lemma_bound",
    "ResonanceMap", "resonance_map", "SamplingSet", "build_sampling_set",
    "GoodInterval", "GoodIntervalFailure", "find_good_interval", "R_of_n",
]

SIGMA = 0.2
TAU = 0.05
C_D = 4.0


# ---------------------------------------------------------------- split

@dataclass(frozen=True)
class DeterminantSplit:
    p_minus: SignedLogValue
    p_mid: SignedLogValue
    p_plus: SignedLogValue
    counts: tuple[int, int, int]
    cutoffs: CutoffPair
    total: SignedLogValue          # product of all factors, summed once
    n_singular: int = 0

    def product(self) -> SignedLogValue:
        return self.p_minus * self.p_mid * self.p_plus

    def identity_gap(self, reference: SignedLogValue | None = None) -> float:
        """|log|prod of parts| - log|reference||, inf on a sign mismatch."""
        ref = self.total if reference is None else reference
        p = self.product()
        if p.sign != ref.sign:
            return math.inf
        if p.sign == 0:
            return 0.0
        return abs(p.log_magnitude - ref.log_magnitude)


def split_determinant(box: BoxOperator, E: float, cutoffs: CutoffPair,
                      eigs: np.ndarray | None = None) -> DeterminantSplit:
    """Classify each factor (lambda - E) by |lambda - E| against (B_-, B_+).

    The mid class is closed. Singular sites (eigenvalue -inf) are dropped,
    matching the block-product determinant convention.
    """
    lam = eigenvalues(box).eigenvalues if eigs is None else np.asarray(eigs, dtype=float)
    fin = lam[np.isfinite(lam)]
    v = fin - E
    a = np.abs(v)
    lo = a < cutoffs.B_minus
    hi = a > cutoffs.B_plus
    mid = ~lo & ~hi
    return DeterminantSplit(
        SignedLogValue.product(v[lo]), SignedLogValue.product(v[mid]),
        SignedLogValue.product(v[hi]),
        (int(lo.sum()), int(mid.sum()), int(hi.sum())), cutoffs,
        SignedLogValue.product(v), int(lam.size - fin.size))


# ---------------------------------------------------------------- LDT checks

@dataclass
class SubCheck:
    name: str
    observed: float
    bound: float
    passed: bool
    anchor: str
    lower: float | None = None

    @property
    def slack(self) -> float:
        return self.bound - self.observed


@dataclass
class LDTReport:
    n: int
    E: float
    scale: ScaleChoice
    cutoffs: CutoffPair
    c_d: float
    checks: list
    identity_gap: float
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.identity_gap <= 1e-9

    def failures(self) -> list[SubCheck]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {
            "n": self.n, "E": self.E, "q": self.scale.q, "s": self.scale.s, "r": self.scale.r,
            "B_minus": self.cutoffs.B_minus, "B_plus": self.cutoffs.B_plus, "C_d": self.c_d,
            "identity_gap": self.identity_gap, "passed": self.passed,
            "checks": [dict(asdict(c), slack=c.slack) for c in self.checks],
            **self.extras,
        }


def _diag_sandwich(box: BoxOperator, E: float, cut: CutoffPair):
    d = box.diagonal[np.isfinite(box.diagonal)]
    g = abs(box.hopping)
    dist = np.abs(d - E)
    low_mask = dist > cut.B_plus + 2 * g
    up_mask = dist > cut.B_plus - 2 * g
    lower = float(np.sum(np.log(dist[low_mask] - 2 * g)))
    upper = float(np.sum(np.log(dist[up_mask] + 2 * g)))
    return lower, upper, int(low_mask.sum()), int(up_mask.sum())


def ldt_verify(box: BoxOperator, E: float, scale: ScaleChoice | None, ids: IDSTable,
               c_d: float = C_D, potential: MonotonePotential | None = None,
               iset: IntersectionSet | None = None,
               with_intersections: bool = True) -> LDTReport:
    """The four finite-scale checks of the large deviation bounds at one box.

    (a) mid product vs the truncated Thouless integral, (b) number of small
    factors, (c) number of large factors, (d) two-sided bound on the large
    factors from the diagonal.
    """
    pot = box.potential if potential is None else potential
    if pot is None or box.freq is None:
        raise ValueError("ldt_verify needs a box built from (freq, potential)")
    n = box.n
    sc = choose_scale(n, box.freq) if scale is None else scale
    cut = CutoffPair.for_scale(sc.q, c_d)
    sp = split_determinant(box, E, cut)
    ref = determinant(box, E)
    gap = sp.identity_gap(ref)
    gamma = pot.gamma
    checks = []

    trunc = truncated_thouless(ids, E, cut)
    obs_a = abs(sp.p_mid.log_magnitude / n - trunc)
    bound_a = 300 * sc.ratio * cut.log_ratio
    # the table approximates N; its error enters through the variation of the
    # clipped logarithm (4 log(B+/B-) over both sides)
    ids_slack = 4 * cut.log_ratio * ids.error_bound
    checks.append(SubCheck("mid_product", obs_a, bound_a + ids_slack,
                           obs_a <= bound_a + ids_slack, "ldt: 300 (s+|r|)/n log(B+/B-)"))

    bound_b = 2 * sc.s * sc.q * cut.B_minus / gamma + 100 * (sc.s + abs(sc.r)) + 20
    checks.append(SubCheck("minus_factors", sp.counts[0], bound_b, sp.counts[0] <= bound_b,
                           "small-factor count 100(s+|r|)+20"))
    extras = {"ids_slack": ids_slack, "truncated_thouless": trunc,
              "counts": list(sp.counts), "bounded_shortcut": False}
    if with_intersections:
        iset = intersection_points(box.freq, pot, n, E, hopping=box.hopping) \
            if iset is None else iset
        x0 = float(_orbit_points(box.freq, [box.start], float(box.x))[0])
        near = int(iset.near(x0, cut.B_minus / gamma).size)
        checks.append(SubCheck("minus_intersections", near, bound_b, near <= bound_b,
                               "intersection points within B-/gamma"))

    moment = pot.log_moment(E)
    bound_c = 4 * (sc.s + abs(sc.r)) + n / math.log(cut.B_plus) * moment
    checks.append(SubCheck("plus_factors", sp.counts[2], bound_c, sp.counts[2] <= bound_c,
                           "large-factor count via Markov"))

    lower, upper, c_lo, c_up = _diag_sandwich(box, E, cut)
    lp = sp.p_plus.log_magnitude
    tol = 1e-9 * max(1.0, abs(lp))
    ok_d = (lower - tol <= lp <= upper + tol) and (c_lo <= sp.counts[2] <= c_up)
    checks.append(SubCheck("plus_sandwich", lp, upper, ok_d,
                           "two-sided diagonal bound on large factors", lower=lower))
    extras["plus_sandwich_counts"] = [c_lo, sp.counts[2], c_up]
    if np.isfinite(pot.sup_value) and np.isfinite(pot.inf_value):
        fmax = max(abs(pot.sup_value - E), abs(pot.inf_value - E))
        extras["bounded_shortcut"] = bool(cut.B_plus > fmax + 2 * abs(box.hopping))
    return LDTReport(n, float(E), sc, cut, c_d, checks, gap, extras)


def uniform_upper_check(box: BoxOperator, E: float, scale: ScaleChoice | None,
                        ids: IDSTable, c_d: float = C_D) -> SubCheck:
    """log|P^< P^mid| <= n L (1 + L_corr + 300 (1/q + |r|/n) log(B+/B-))."""
    n = box.n
    sc = choose_scale(n, box.freq) if scale is None else scale
    cut = CutoffPair.for_scale(sc.q, c_d)
    sp = split_determinant(box, E, cut)
    obs = (sp.p_minus * sp.p_mid).log_magnitude
    L = thouless(ids, E)
    lc = l_corr(ids, E, cut)
    bound = n * L * (1 + lc + 300 * (1 / sc.q + abs(sc.r) / n) * cut.log_ratio)
    return SubCheck("uniform_upper", obs, bound, obs <= bound, "uniform upper bound")


# ---------------------------------------------------------------- Lagrange

def _min_separation(points) -> float:
    p = np.sort(np.asarray(points, dtype=float))
    return float(np.min(np.diff(p))) if p.size > 1 else math.inf


def lagrange_bound(points, t: int, d: float | None = None) -> float:
    """(d/2)^t t!, after checking that the points are d-separated."""
    pts = np.asarray(points, dtype=float)
    if t < 0:
        raise ValueError("degree must be >= 0")
    if pts.size < t + 1:
        raise ValueError(f"need at least {t + 1} points, got {pts.size}")
    sep = _min_separation(pts)
    if d is None:
        d = sep
    if sep < d * (1 - 1e-12):
        raise ValueError(f"points are only {sep:.3e}-separated, need {d:.3e}")
    return (d / 2) ** t * math.factorial(t)


def lagrange_minimax(points) -> float:
    """min over monic p of degree len(points)-1 of max_j |p(x_j)|.

    Lagrange interpolation gives the closed form 1 / sum_j 1/|w'(x_j)|.
    """
    x = np.asarray(points, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return float(1.0 / np.sum(1.0 / np.abs(np.prod(diff, axis=1))))


def lagrange_trials(t: int, d: float, trials: int, rng: np.random.Generator):
    """Randomised monic polynomials at t+1 d-separated points.

    Returns (smallest max-sample ratio to the bound, smallest minimax ratio).
    Half the trials place roots inside the point span (the hard case), the
    rest draw random real coefficients.
    """
    from .oracles import max_monic_at_points
    bound = (d / 2) ** t * math.factorial(t)
    worst = math.inf
    worst_mm = math.inf
    batch = 500
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        gaps = d * (1 + rng.exponential(0.5, size=(b, t)) * (rng.random((b, 1)) < 0.5))
        pts = np.concatenate([np.zeros((b, 1)), np.cumsum(gaps, axis=1)], axis=1)
        pts += rng.uniform(-1, 1, size=(b, 1))
        span_lo, span_hi = pts[:, :1], pts[:, -1:]
        for i in range(b):
            p = pts[i]
            if t == 0:
                vals = 1.0
            elif i % 2 == 0:
                roots = rng.uniform(span_lo[i, 0] - d, span_hi[i, 0] + d, size=(1, t))
                vals = float(max_monic_at_points(roots, p)[0])
            else:
                coef = np.concatenate([[1.0], rng.normal(0, 1 + abs(p).max() ** np.arange(t, 0, -1))])
                vals = float(np.max(np.abs(np.polyval(coef, p))))
            worst = min(worst, vals / bound)
            if i % 50 == 0:
                worst_mm = min(worst_mm, lagrange_minimax(p) / bound)
        done += b
    return worst, worst_mm


# ---------------------------------------------------------------- sampling lemma

class SamplingPreconditionError(ValueError):
    def __init__(self, kind: str, msg: str):
        super().__init__(msg)
        self.kind = kind


def _circle_dist(a, b):
    d = np.abs(np.mod(np.asarray(a, dtype=float) - b + 0.5, 1.0) - 0.5)
    return d


def _dist_to_arc(z, lo: float, hi: float):
    """Circle distance from z to the arc [lo, hi] (lo <= hi, length < 1)."""
    z = np.asarray(z, dtype=float)
    inside = np.mod(z - lo, 1.0) <= hi - lo
    return np.where(inside, 0.0, np.minimum(_circle_dist(z, lo), _circle_dist(z, hi)))


@dataclass
class SamplingResult:
    chosen_point: float
    bound: float
    log_bound: float
    t: int
    d: float
    log_p_minus: np.ndarray        # per sampling point
    passed: bool


def sampling_lemma_bound(interval, points, iset: IntersectionSet, gamma: float,
                         freq: FrequencyModel, potential: MonotonePotential,
                         b_minus: float, d: float | None = None,
                         hopping: float = 1.0) -> SamplingResult:
    """Pick the sampling point with the largest |P^{<B-}| and compare with
    gamma^t (d/2)^t t!, t = #intersection points inside the interval."""
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise SamplingPreconditionError("interval", "empty interval")
    if hi - lo >= 1 / (10 * gamma):
        raise SamplingPreconditionError("interval", f"|I| = {hi - lo:.3e} >= 1/(10 gamma)")
    pts = np.mod(np.asarray(points, dtype=float), 1.0)
    if np.any(_dist_to_arc(pts, lo, hi) > 0):
        raise SamplingPreconditionError("interval", "sampling point outside the interval")
    sep = float(np.min(_circle_dist(pts[:, None], pts[None, :])[~np.eye(pts.size, dtype=bool)])) \
        if pts.size > 1 else math.inf
    if d is None:
        d = sep if pts.size > 1 else 1.0
    if sep < d * (1 - 1e-12):
        raise SamplingPreconditionError("separation", f"points {sep:.3e}-separated, need {d:.3e}")
    z = iset.points
    dz = _dist_to_arc(z, lo, hi)
    inside = dz == 0
    t = int(inside.sum())
    outside = dz[~inside]
    if outside.size and outside.min() < b_minus / gamma:
        raise SamplingPreconditionError(
            "proximity", f"intersection point {outside.min():.3e} from I, need >= {b_minus / gamma:.3e}")
    if t > pts.size - 1:
        raise SamplingPreconditionError("count", f"{t} intersection points but only {pts.size} samples")
    log_bound = t * math.log(gamma * d / 2) + math.lgamma(t + 1)
    cut = CutoffPair(b_minus, 11.0)
    logs = np.empty(pts.size)
    for i, x in enumerate(pts):
        box = build_box(float(x), freq, potential, iset.n, hopping=hopping)
        logs[i] = split_determinant(box, 0.0 + iset.energy, cut).p_minus.log_magnitude
    i = int(np.argmax(logs))
    return SamplingResult(float(pts[i]), math.exp(log_bound), log_bound, t, d, logs,
                          bool(logs[i] >= log_bound - 1e-9))


# ---------------------------------------------------------------- resonances

@dataclass(frozen=True)
class ResonanceMap:
    freq: FrequencyModel
    k: int
    tau: float
    q_k: int
    q_next: int
    b_k: int
    ell_max: int
    c_d: float = C_D

    @property
    def liouville(self) -> bool:
        """q_{k+1} > q_k^{C_d}."""
        return self.q_next > self.q_k ** self.c_d

    @property
    def zones(self) -> list[tuple[int, int, int]]:
        return [(l, l * self.q_k - self.b_k, l * self.q_k + self.b_k)
                for l in range(-self.ell_max, self.ell_max + 1)]

    def zone_of(self, m: int) -> int | None:
        l = int(round(m / self.q_k))
        if abs(m - l * self.q_k) <= self.b_k and abs(l) <= self.ell_max:
            return l
        return None

    def is_resonant(self, m: int) -> bool:
        return abs(m - round(m / self.q_k) * self.q_k) <= self.b_k

    def scale_data(self, D: int | None = None) -> tuple[int, int, int, int]:
        """(k0, q_{k-k0}, s, s') with q_{k-k0} largest such that 2 q_{k-k0} <= D
        and s largest with 2 s q_{k-k0} <= D; D defaults to b_k."""
        D = self.b_k if D is None else int(D)
        qs = self.freq.denominators
        cands = [i for i in range(self.k + 1) if 2 * qs[i] <= D]
        if not cands:
            raise ValueError(f"no denominator with 2 q <= {D}")
        i = max(cands, key=lambda j: (qs[j], j))
        qp = qs[i]
        s = D // (2 * qp)
        return self.k - i, qp, s, s // 10

    def classify(self, m: int) -> str:
        if self.liouville:
            if self.is_resonant(m):
                return "resonant"
            D = abs(m - round(m / self.q_k) * self.q_k)
            _, qp, s, _ = self.scale_data(D)
            return "nonres_dio" if s <= qp ** self.c_d else "nonres_lio"
        if self.q_k / 2 + 1 < abs(m) < self.q_next - self.q_k / 2:
            return "base"
        _, qp, s, _ = self.scale_data()
        return "dio_dio" if s <= qp ** self.c_d else "lio_dio"

    def as_dict(self) -> dict:
        k0, qp, s, s1 = self.scale_data() if self.b_k >= 2 else (None, None, 0, 0)
        return {"k": self.k, "tau": self.tau, "q_k": self.q_k, "q_next": self.q_next,
                "b_k": self.b_k, "ell_max": self.ell_max, "C_d": self.c_d,
                "liouville": self.liouville, "k0": k0, "q_prime": qp, "s": s, "s_prime": s1}


def resonance_map(freq: FrequencyModel, k: int, tau: float = TAU, c_d: float = C_D) -> ResonanceMap:
    if not 0 < tau < 1 / 8:
        raise ValueError(f"tau must lie in (0, 1/8), got {tau}")
    qs = freq.denominators
    if not 0 <= k < len(qs) - 1:
        raise ValueError(f"scale index {k} out of range")
    q, qn = qs[k], qs[k + 1]
    b = math.floor(tau * q)
    if 2 * b >= q:
        raise ValueError("zones overlap: need 2 b_k < q_k")
    return ResonanceMap(freq, k, tau, q, qn, b, qn // (10 * q), c_d)


# ---------------------------------------------------------------- sampling sets

@dataclass
class SamplingSet:
    regime: str
    m: int
    J: np.ndarray
    box_length: int
    expected_separation: float
    observed_separation: float
    clusters: list                 # lists of indices into J
    cluster_arcs: list = field(default_factory=list)
    pair_distance: float | None = None
    first_half: int = 0            # J[:first_half] is the copy near the origin

    def phases(self, x: float, freq: FrequencyModel) -> np.ndarray:
        return _orbit_points(freq, self.J, x)


def _orbit_points(freq: FrequencyModel, J, x: float = 0.0) -> np.ndarray:
    M = freq.scale
    lim = freq.max_orbit_length
    J = np.asarray(J)
    if J.size and int(np.max(np.abs(J))) >= lim:
        raise PrecisionError(f"shift {int(np.max(np.abs(J)))} beyond the orbit budget {lim}")
    a = freq.value_fixed
    bits = freq.precision_bits
    vals = np.array([((int(j) * a) % M) >> (bits - 60) for j in J], dtype=np.float64) / 2.0 ** 60
    return np.mod(vals + x, 1.0)


def _fixed_separation(freq: FrequencyModel, J) -> float:
    M = freq.scale
    a = freq.value_fixed
    v = sorted((int(j) * a) % M for j in J)
    if len(v) < 2:
        return math.inf
    gaps = [b - c for c, b in zip(v, v[1:])] + [v[0] + M - v[-1]]
    return min(gaps) / M


def _lio_clusters(y: np.ndarray, half: int, qp: int):
    """Merge the q' sampling intervals of the two translated copies."""
    left, right = y[:half], y[half:]
    li = np.mod(np.rint((left - left[0]) * qp), qp).astype(int)
    ri = np.mod(np.rint((right - right[0]) * qp), qp).astype(int)
    delta = (right[0] - left[0]) % 1.0
    u = math.floor(delta * qp)
    f = delta * qp - u
    shift = u if f <= 0.5 else u + 1
    clusters = []
    arcs = []
    for i in range(qp):
        idx = list(np.flatnonzero(li == i)) + list(half + np.flatnonzero(ri == (i - shift) % qp))
        c = left[0] + i / qp
        off = np.mod(y[idx] - c + 0.5, 1.0) - 0.5
        clusters.append(idx)
        arcs.append((float((c + off.min()) % 1.0), float(off.max() - off.min())))
    return clusters, arcs


def _check_clusters(clusters, arcs, s1: int, qp: int):
    """q' clusters of 2s' points, arcs <= 13/(18q'), gaps >= 5/(18q')."""
    for c in clusters:
        if len(c) != 2 * s1:
            raise ValueError(f"cluster of size {len(c)}, expected {2 * s1}")
    for start, length in arcs:
        if length > 13 / (18 * qp) * (1 + 1e-12):
            raise ValueError(f"cluster arc {length:.3e} exceeds 13/(18q')")
    ends = sorted(arcs)
    for (a0, l0), (a1, _) in zip(ends, ends[1:] + [(ends[0][0] + 1.0, 0.0)]):
        if len(ends) > 1 and a1 - (a0 + l0) < 5 / (18 * qp) * (1 - 1e-12):
            raise ValueError(f"gap {a1 - a0 - l0:.3e} between clusters below 5/(18q')")


def build_sampling_set(m: int, regime: str, rmap: ResonanceMap, sigma: float = SIGMA) -> SamplingSet:
    freq = rmap.freq
    q, qn = rmap.q_k, rmap.q_next
    clusters, arcs, pair = [], [], None
    if regime == "base":
        if not q / 2 + 1 < m < qn - q / 2:
            raise ValueError(f"m={m} outside the base window ({q / 2 + 1}, {qn - q / 2})")
        h = q // 2
        sh = math.floor(2 * sigma * q)
        first = np.arange(-h - (q % 2), 0) - sh
        second = np.arange(-h, 1) - sh + m
        J = np.concatenate([first, second])
        n, sep, half = q, 1 / (2 * qn), first.size
    elif regime in ("dio_dio", "lio_dio"):
        _, qp, s, s1 = rmap.scale_data()
        ss = s if regime == "dio_dio" else s1
        if ss < 1:
            raise ValueError(f"regime {regime} needs s >= 1 (s={s}, s'={s1})")
        w = ss * qp
        if not w <= m <= q - w - 1:
            raise ValueError(f"m={m} outside [{w}, {q - w - 1}]")
        base = np.arange(-w, 0) - w // 2
        J = np.concatenate([base, base + m])
        n, half = 2 * w - 1, w
        sep = 1 / (2 * qn) if regime == "dio_dio" else 1 / (2 * q)
        if regime == "lio_dio":
            clusters, arcs = _lio_clusters(_orbit_points(freq, J), half, qp)
    elif regime in ("nonres_dio", "nonres_lio"):
        D = abs(m - round(m / q) * q)
        if D <= rmap.b_k or abs(m) > qn / 10:
            raise ValueError(f"m={m} is not in the non-resonant window")
        _, qp, s, s1 = rmap.scale_data(D)
        ss = s if regime == "nonres_dio" else s1
        if ss < 1:
            raise ValueError(f"regime {regime} needs s >= 1 (s={s}, s'={s1})")
        w = ss * qp
        J1 = np.arange(0, w)
        J = -(w // 2) - w + np.concatenate([J1, J1 + m])
        n, sep, half = 2 * w - 1, 1 / (3 * q), w
        if regime == "nonres_lio":
            clusters, arcs = _lio_clusters(_orbit_points(freq, J), half, qp)
    elif regime == "resonant":
        l = rmap.zone_of(m)
        if l is None or l == 0:
            raise ValueError(f"m={m} is not in a resonant zone with 0 < |l| <= {rmap.ell_max}")
        J0 = np.arange(0, q)
        J = -(3 * q // 2) + np.concatenate([J0, J0 + l * q])
        n, sep, half = 2 * q - 1, 1 / (3 * q), q
        clusters = [[i, i + q] for i in range(q)]
        pair = abs(l) * multiple_distance(freq, q)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if np.unique(J).size != J.size:
        raise ValueError("sampling set has repeated shifts")
    if regime == "resonant":
        # the pair structure is the claim; each copy is separated internally
        obs = min(_fixed_separation(freq, J[:half]), _fixed_separation(freq, J[half:]))
        y = _orbit_points(freq, J)
        inter = math.inf
        for i in range(q):
            for j in range(i + 1, q):
                inter = min(inter, float(np.min(_circle_dist(y[[i, i + q]][:, None],
                                                              y[[j, j + q]][None, :]))))
        obs = min(obs, inter)
    else:
        obs = _fixed_separation(freq, J)
    if obs < sep * (1 - 1e-12):
        raise ValueError(f"separation {obs:.3e} below the expected {sep:.3e} for {regime}")
    if arcs:
        _check_clusters(clusters, arcs, len(J) // (2 * len(arcs)), len(arcs))
    return SamplingSet(regime, int(m), J.astype(np.int64), int(n), float(sep), float(obs),
                       clusters, arcs, pair, half)


# ---------------------------------------------------------------- good intervals

def R_of_n(n: int, E: float, freq: FrequencyModel, potential: MonotonePotential,
           ids: IDSTable, c_d: float = C_D) -> float:
    sc = choose_scale(n, freq)
    q = sc.q
    lc = l_corr(ids, E, CutoffPair.for_scale(q, c_d)) if q > 10 else math.nan
    return (math.log(2) / math.sqrt(n) + potential.log_moment(E) / q + 2 * lc
            + 400 * c_d * math.log(q) / q + 400 * c_d * abs(sc.r) * math.log(q) / n)


@dataclass
class GoodInterval:
    window: tuple[int, int]
    m: int
    mu: float                       # min over the covered range
    mu_at_m: float
    sigma: float
    certificates: tuple[float, float]   # log|G(n1, m)|, log|G(m, n2)|
    L: float
    log_p_minus: float
    chain_bounds: tuple[float, float]   # bound-chain prediction for the same logs
    R: float
    shift: int
    regime: str

    @property
    def length(self) -> int:
        return self.window[1] - self.window[0] + 1

    def as_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


@dataclass
class GoodIntervalFailure:
    reason: str
    m: int
    regime: str
    rows: list                      # (shift, log|P^<|, #small factors, margin ok, mu_at_m)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["shift", "log_p_minus", "minus_factors", "margin_ok", "mu_at_m"])
        for r in self.rows:
            w.writerow([r[0], repr(float(r[1])), r[2], int(r[3]), repr(float(r[4]))])
        return buf.getvalue()


def _mu_profile(box: BoxOperator, E: float, sigma: float):
    """Per-site decay exponents of the boundary Green entries on the covered range."""
    left, right = greens_boundary_rows(box, E)
    n = box.n
    lo = math.ceil(sigma * n)
    hi = n - 1 - lo
    i = np.arange(lo, hi + 1)
    mu = np.minimum(-left[i] / i, -right[i] / (n - 1 - i))
    return i, mu, left, right


def find_good_interval(x: float, m: int, E: float, regime: str, rmap: ResonanceMap,
                       ids: IDSTable, potential: MonotonePotential,
                       sigma: float = SIGMA, c_d: float = C_D, mu_target: float | None = None,
                       hopping: float = 1.0, sset: SamplingSet | None = None):
    """Search the sampling shifts for a box [j, j+n-1] that is good around m.

    Shifts are ranked by |P^{<B-}| (the sampling-lemma selection); Green's
    entries are then evaluated directly. ``mu_target`` defaults to L(E)/2.
    """
    freq = rmap.freq
    ss = build_sampling_set(m, regime, rmap, sigma) if sset is None else sset
    n = ss.box_length
    sc = choose_scale(n, freq)
    cut = CutoffPair(sc.q ** (1 - 2 * c_d), max(float(sc.q), 10.5))
    L = thouless(ids, E)
    target = 0.5 * L if mu_target is None else mu_target
    R = R_of_n(n, E, freq, potential, ids, c_d)
    rows = []
    cands = []
    for j in ss.J:
        j = int(j)
        box = build_box(x, freq, potential, n, start=j, hopping=hopping)
        sp = split_determinant(box, E, cut)
        margin = j + sigma * n <= m <= j + n - 1 - sigma * n
        rows.append([j, sp.p_minus.log_magnitude, sp.counts[0], margin, math.nan])
        if margin:
            cands.append((sp.p_minus.log_magnitude, j, box, len(rows) - 1))
    if not cands:
        return GoodIntervalFailure("no_shift", m, regime, rows)
    cands.sort(key=lambda c: (-c[0], c[1]))
    best = None
    for lpm, j, box, ri in cands:
        if box.is_singular:
            continue
        try:
            idx, mu, left, right = _mu_profile(box, E, sigma)
        except NearSingularError:
            rows[ri][4] = 0.0
            continue
        k = m - j
        mu_m = float(min(-left[k] / k if k else math.inf,
                         -right[k] / (n - 1 - k) if n - 1 - k else math.inf))
        rows[ri][4] = mu_m
        gi = GoodInterval((j, j + n - 1), int(m), float(mu.min()), mu_m, sigma,
                          (float(left[k]), float(right[k])), float(L), float(lpm),
                          (float(-k * L + n * R - lpm), float(-(n - 1 - k) * L + n * R - lpm)),
                          float(R), j, regime)
        if mu_m >= target:
            return gi
        if best is None or mu_m > best.mu_at_m:
            best = gi
    return GoodIntervalFailure("certificate", m, regime, rows)
