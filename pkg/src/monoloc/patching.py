"""Patching good intervals into eigenfunction decay: psi-regularity, path
expansions of the Poisson formula, and decay profiles of box eigenvectors."""

from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .arithmetic import FrequencyModel
from .ldt import ResonanceMap, TAU, SIGMA
from .operators import BoxOperator, build_box, greens_boundary_rows, NearSingularError
from .potential import MonotonePotential
from .spectral import IDSTable, thouless


class InconclusiveLocalization(RuntimeError):
    """No eigenvector localized enough to analyse."""

    def __init__(self, msg, ipr=None):
        super().__init__(msg)
        self.ipr = ipr


class PathBudgetExceeded(RuntimeError):
    pass


class RegularityError(ValueError):
    def __init__(self, msg, points):
        super().__init__(msg)
        self.points = points


@dataclass(frozen=True)
class SiteArray:
    """Values on consecutive sites offset, offset+1, ...; zero outside."""
    offset: int
    values: np.ndarray

    def __getitem__(self, m: int) -> float:
        i = m - self.offset
        if 0 <= i < len(self.values):
            return float(self.values[i])
        return 0.0

    def max_abs(self, lo: int, hi: int) -> float:
        a = max(lo - self.offset, 0)
        b = min(hi - self.offset + 1, len(self.values))
        return float(np.max(np.abs(self.values[a:b]))) if b > a else 0.0


# ---------------------------------------------------------------- collections

@dataclass(frozen=True)
class GoodIntervalCollection:
    outer: tuple[int, int]
    inner: tuple[int, int]
    n1: np.ndarray      # per m in inner, left endpoint
    n2: np.ndarray
    mu: np.ndarray
    mu_floor: float
    L_floor: int
    sigma: float = SIGMA

    def __post_init__(self):
        probs = self.problems()
        if probs:
            raise ValueError("invalid collection: " + "; ".join(probs[:5]))

    def problems(self) -> list[str]:
        (A, B), (N1, N2) = self.outer, self.inner
        out = []
        if not A < N1 <= N2 < B:
            out.append("need N1- < N1 <= N2 < N2+")
        size = N2 - N1 + 1
        if not (len(self.n1) == len(self.n2) == len(self.mu) == size):
            return out + ["record arrays must cover the inner window"]
        if not self.mu_floor * self.sigma * self.L_floor > math.log(2):
            out.append("need exp(mu sigma L) > 2")
        for i in range(size):
            m = N1 + i
            a, b, mu = int(self.n1[i]), int(self.n2[i]), float(self.mu[i])
            if not (A <= a <= m <= b <= B):
                out.append(f"interval [{a},{b}] for m={m} leaves the outer window")
            elif min(m - a, b - m) < self.sigma * (b - a):
                out.append(f"margin violated at m={m}")
            if b - a + 1 < self.L_floor:
                out.append(f"interval at m={m} shorter than L")
            if mu < self.mu_floor:
                out.append(f"exponent at m={m} below mu")
        return out

    def record(self, m: int) -> tuple[int, int, float]:
        i = m - self.inner[0]
        return int(self.n1[i]), int(self.n2[i]), float(self.mu[i])

    def is_inner(self, m: int) -> bool:
        return self.inner[0] <= m <= self.inner[1]

    def steps(self, m: int):
        a, b, mu = self.record(m)
        return ((a - 1, mu * (m - a)), (b + 1, mu * (b - m)))

    @property
    def max_step_factor(self) -> float:
        """max over points and sides of exp(-mu_m |m - n_j|)."""
        m = np.arange(self.inner[0], self.inner[1] + 1)
        d = np.minimum(m - self.n1, self.n2 - m)
        return float(np.max(np.exp(-self.mu * d)))

    @property
    def a_factor(self) -> float:
        sL = self.sigma * self.L_floor
        return 16 * (1 + self.mu_floor) * math.log(sL) / (self.mu_floor * sL)


def random_collection(rng: np.random.Generator, window: int, L: int, mu: float = 1.0,
                      sigma: float = SIGMA, pad: int | None = None,
                      extra_len: int | None = None, mu_spread: float = 1.0) -> GoodIntervalCollection:
    pad = 2 * L if pad is None else pad
    extra = L if extra_len is None else extra_len
    N1, N2 = 0, window - 1
    A, B = N1 - pad, N2 + pad
    n1 = np.empty(window, dtype=np.int64)
    n2 = np.empty(window, dtype=np.int64)
    for i in range(window):
        m = N1 + i
        for _ in range(1000):
            ln = int(rng.integers(L, L + extra + 1))
            lo_a = m - (ln - 1) + math.ceil(sigma * (ln - 1))
            hi_a = m - math.ceil(sigma * (ln - 1))
            if lo_a > hi_a:
                continue
            a = int(rng.integers(lo_a, hi_a + 1))
            if A <= a and a + ln - 1 <= B:
                n1[i], n2[i] = a, a + ln - 1
                break
        else:
            raise ValueError("could not place an interval; enlarge pad")
    mus = mu + mu_spread * rng.random(window)
    return GoodIntervalCollection((A, B), (N1, N2), n1, n2, mus, mu, L, sigma)


def block_collection(window: int, L: int, mu: float, sigma: float = SIGMA,
                     pad: int | None = None) -> GoodIntervalCollection:
    """Chained blocks of length L; points too close to a block edge use the
    interval centred on them instead."""
    pad = L if pad is None else pad
    N1, N2 = 0, window - 1
    n1 = np.empty(window, dtype=np.int64)
    n2 = np.empty(window, dtype=np.int64)
    need = math.ceil(sigma * (L - 1))
    for i in range(window):
        a = (i // L) * L
        if min(i - a, a + L - 1 - i) < need:
            a = i - (L - 1) // 2
        n1[i], n2[i] = a, a + L - 1
    return GoodIntervalCollection((N1 - pad, N2 + pad), (N1, N2), n1, n2,
                                  np.full(window, float(mu)), mu, L, sigma)


# ---------------------------------------------------------------- regularity

def psi_regular(psi, m: int, interval: tuple[int, int], mu: float,
                sigma: float = SIGMA, rtol: float = 0.0) -> bool:
    """|psi(m)| <= e^{-mu|m-n1|}|psi(n1-1)| + e^{-mu|m-n2|}|psi(n2+1)|."""
    n1, n2 = interval
    if not n1 <= m <= n2 or min(m - n1, n2 - m) < sigma * (n2 - n1):
        raise ValueError(f"interval [{n1},{n2}] violates the margin around m={m}")
    lhs = abs(psi[m])
    rhs = math.exp(-mu * (m - n1)) * abs(psi[n1 - 1]) + math.exp(-mu * (n2 - m)) * abs(psi[n2 + 1])
    return lhs <= rhs * (1 + rtol)


# ---------------------------------------------------------------- paths

@dataclass(frozen=True)
class Path:
    vertices: tuple[int, ...]
    weight: float

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def span(self) -> int:
        v = self.vertices
        return sum(abs(b - a) for a, b in zip(v, v[1:]))

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def recompute(self, coll: GoodIntervalCollection) -> float:
        w = 0.0
        v = self.vertices
        for a, b in zip(v, v[1:]):
            n1, n2, mu = coll.record(a)
            if b not in (n1 - 1, n2 + 1):
                raise ValueError(f"step {a}->{b} does not follow the collection")
            w += mu * (abs(b - a) - 1)
        return w


@dataclass
class PathEnumeration:
    paths: list
    pruned: list          # (end vertex, weight) of prefixes cut by the weight bound
    nodes: int

    def pruned_log_mass(self) -> float:
        if not self.pruned:
            return -math.inf
        return float(logsumexp([-w for _, w in self.pruned]))


def enumerate_paths(coll: GoodIntervalCollection, m: int, weight_cutoff: float,
                    node_budget: int = 2_000_000) -> PathEnumeration:
    """All terminating paths from m with weight <= cutoff (explicit-stack DFS)."""
    if not coll.is_inner(m):
        raise ValueError(f"{m} is outside the inner window")
    if not math.isfinite(weight_cutoff):
        raise ValueError("cutoff must be finite")
    # nodes: (vertex, parent, weight)
    verts, parents, weights = [m], [-1], [0.0]
    stack = [0]
    paths, pruned = [], []

    def trace(i):
        out = []
        while i >= 0:
            out.append(verts[i])
            i = parents[i]
        return tuple(reversed(out))

    while stack:
        i = stack.pop()
        v, w = verts[i], weights[i]
        # right first so that the left branch is explored first (deterministic order)
        for nxt, dw in reversed(coll.steps(v)):
            w2 = w + dw
            if w2 > weight_cutoff:
                pruned.append((nxt, w2))
                continue
            verts.append(nxt)
            parents.append(i)
            weights.append(w2)
            j = len(verts) - 1
            if j > node_budget:
                raise PathBudgetExceeded(f"more than {node_budget} nodes below weight {weight_cutoff}")
            if coll.is_inner(nxt):
                stack.append(j)
            else:
                paths.append(Path(trace(j), w2))
    return PathEnumeration(paths, pruned, len(verts))


def min_weight(coll: GoodIntervalCollection, m: int, side: str) -> tuple[float, Path]:
    """Lightest terminating path to the left (< N1) or right (> N2) exit."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    N1, N2 = coll.inner
    dist = {m: 0.0}
    prev = {m: None}
    heap = [(0.0, m)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist.get(v, math.inf):
            continue
        if not coll.is_inner(v):
            if (side == "left" and v < N1) or (side == "right" and v > N2):
                path = []
                u = v
                while u is not None:
                    path.append(u)
                    u = prev[u]
                verts = tuple(reversed(path))
                return d, Path(verts, Path(verts, 0.0).recompute(coll))
            continue
        for nxt, dw in coll.steps(v):
            nd = d + dw
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                prev[nxt] = v
                heapq.heappush(heap, (nd, nxt))
    raise ValueError(f"no terminating path from {m} reaches the {side} exit")


@dataclass
class TerminatingReport:
    m: int
    lhs: float
    path_sum: float
    remainder: float
    tail_bound: float      # M 2^k e^{-mu sigma k L} at the depth reached
    n_paths: int
    cutoff: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.path_sum if self.path_sum else math.inf


def default_cutoff(coll: GoodIntervalCollection, M: float, target: float = 1e-12) -> float:
    """Weight cutoff after which the pruned mass is below target * M."""
    rho = coll.max_step_factor
    if not 2 * rho < 1:
        raise ValueError("collection does not contract (2 max step factor >= 1)")
    m = np.arange(coll.inner[0], coll.inner[1] + 1)
    w_step = float(np.min(coll.mu * np.minimum(m - coll.n1, coll.n2 - m)))
    k = math.ceil(math.log(target) / math.log(2 * rho)) + 1
    return max(k * max(w_step, 1e-12), -math.log(target)) + 1.0


def verify_terminating_bound(coll: GoodIntervalCollection, psi, m: int,
                             cutoff: float | None = None, rtol: float = 1e-10,
                             check_regular: bool = True,
                             node_budget: int = 2_000_000) -> TerminatingReport:
    """|psi(m)| <= sum over terminating paths of e^{-w(P)} |psi(m_p)| + pruned mass."""
    N1, N2 = coll.inner
    if check_regular:
        bad = [p for p in range(N1, N2 + 1)
               if not psi_regular(psi, p, coll.record(p)[:2], coll.record(p)[2], coll.sigma, rtol)]
        if bad:
            raise RegularityError(f"{len(bad)} points are not psi-regular", bad)
    A, B = coll.outer
    if hasattr(psi, "max_abs"):
        M = psi.max_abs(A, B)
    else:
        M = max(abs(psi[p]) for p in range(A, B + 1))
    cutoff = default_cutoff(coll, max(M, 1e-300)) if cutoff is None else cutoff
    en = enumerate_paths(coll, m, cutoff, node_budget)
    s = sum(math.exp(-p.weight) * abs(psi[p.end]) for p in en.paths)
    rem = 0.0
    if en.pruned:
        rho = coll.max_step_factor
        rem = M * math.exp(en.pruned_log_mass()) / (1 - 2 * rho)
    depth = max((p.length for p in en.paths), default=0)
    tail = M * 2 ** depth * math.exp(-coll.mu_floor * coll.sigma * depth * coll.L_floor)
    lhs = abs(psi[m])
    # each regularity step may carry relative slack rtol
    passed = lhs <= (s + rem) * (1 + rtol) ** (depth + 1)
    return TerminatingReport(m, lhs, s, rem, tail, len(en.paths), cutoff, passed)


@dataclass
class DominatingReport:
    side: str
    min_weight: float
    log_sum: float
    log_bound: float
    a: float
    n_paths: int
    passed: bool


def dominating_check(coll: GoodIntervalCollection, m: int, side: str,
                     extra_weight: float = 60.0, node_budget: int = 2_000_000) -> DominatingReport:
    """log sum_{P on side} e^{-w(P)} <= -(1-a) min w, computed in log space.

    Paths above min + extra_weight are bounded through the pruned prefixes
    and the contraction factor of the collection.
    """
    w0, _ = min_weight(coll, m, side)
    en = enumerate_paths(coll, m, w0 + extra_weight, node_budget)
    N1, N2 = coll.inner
    on_side = [p.weight for p in en.paths if (p.end < N1 if side == "left" else p.end > N2)]
    terms = [-w for w in on_side]
    if en.pruned:
        rho = coll.max_step_factor
        terms.append(en.pruned_log_mass() - math.log(1 - 2 * rho))
    ls = float(logsumexp(terms))
    a = coll.a_factor
    bound = -(1 - a) * w0
    return DominatingReport(side, w0, ls, bound, a, len(on_side), ls <= bound)


# ---------------------------------------------------------------- decay profiles

def stable_log_profile(diag, E: float, center: int, log_center: float,
                       hopping: float = 1.0) -> np.ndarray:
    """log|psi| on the box from inward ratio recursions.

    Right of the centre, rho_m = psi(m)/psi(m-1) satisfies
    rho_m = -t / (v_m - E + t rho_{m+1}) with rho_n = 0; the left side is
    symmetric. Both recursions run towards the centre, the stable direction
    for a decaying eigenvector, so tails are resolved far below 1e-16.
    """
    v = np.asarray(diag, dtype=float) - E
    n = v.size
    t = hopping
    out = np.empty(n)
    out[center] = log_center
    rho = 0.0
    logs = np.zeros(n)
    for j in range(n - 1, center, -1):
        den = v[j] + t * rho
        rho = -t / den if den != 0 else -t / 1e-300
        logs[j] = math.log(abs(rho)) if rho != 0 else -745.0
    out[center + 1:] = log_center + np.cumsum(logs[center + 1:])
    sig = 0.0
    logl = np.zeros(n)
    for j in range(0, center):
        den = v[j] + t * sig
        sig = -t / den if den != 0 else -t / 1e-300
        logl[j] = math.log(abs(sig)) if sig != 0 else -745.0
    # psi(j) = sig_j psi(j+1)  =>  log|psi(j)| = log|psi(c)| + sum_{i=j}^{c-1} log|sig_i|
    if center > 0:
        out[:center] = log_center + np.cumsum(logl[:center][::-1])[::-1]
    return out


def fit_slope(d, logpsi) -> tuple[float, float, float]:
    """Least-squares decay rate: logpsi ~ c - rate * d. Returns (rate, c, rms)."""
    d = np.asarray(d, dtype=float)
    y = np.asarray(logpsi, dtype=float)
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return math.nan, math.nan, math.nan
    A = np.vstack([d[ok], np.ones(ok.sum())]).T
    coef, *_ = np.linalg.lstsq(A, y[ok], rcond=None)
    res = y[ok] - A @ coef
    return float(-coef[0]), float(coef[1]), float(np.sqrt(np.mean(res ** 2)))


@dataclass
class AnnulusFit:
    k: int
    side: str
    lo: int
    hi: int
    points: int
    rate: float
    predicted: float
    q_k: int
    q_next: int
    beta_k: float
    liouville: bool

    @property
    def ratio(self) -> float:
        return self.rate / self.predicted if self.predicted else math.nan


@dataclass
class DecayProfile:
    E: float
    m: np.ndarray               # sites relative to the centre
    log_psi: np.ndarray
    center_site: int
    ipr: float
    L: float
    fits: list
    overall_rate: float
    peaks: list = field(default_factory=list)     # (l, m_l, log r_l)
    tau: float = TAU
    labels: np.ndarray | None = None

    def value(self, m: int) -> float:
        i = m - int(self.m[0])
        return float(self.log_psi[i]) if 0 <= i < self.m.size else -math.inf

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "log_abs_psi", "zone"])
        lab = self.labels if self.labels is not None else np.full(self.m.size, "")
        for mm, lp, z in zip(self.m, self.log_psi, lab):
            w.writerow([int(mm), repr(float(lp)), z])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "E": self.E, "center_site": self.center_site, "ipr": self.ipr, "L": self.L,
            "overall_rate": self.overall_rate,
            "annuli": [{"k": f.k, "side": f.side, "window": [f.lo, f.hi], "points": f.points,
                        "rate": f.rate, "predicted": f.predicted, "q_k": f.q_k,
                        "q_next": f.q_next, "beta_k": f.beta_k, "liouville": f.liouville}
                       for f in self.fits],
            "peaks": [[int(l), int(mm), float(v)] for l, mm, v in self.peaks],
            "beta_convention": "beta_k = log(q_{k+1})/q_k",
        }


def profile_from_log(log_psi, center: int, L: float = math.nan, E: float = math.nan,
                     fit_range: tuple[int, int] | None = None) -> DecayProfile:
    """Profile object around a planted or precomputed log|psi| array."""
    lp = np.asarray(log_psi, dtype=float)
    m = np.arange(lp.size) - center
    d = np.abs(m)
    lo, hi = fit_range if fit_range else (1, int(d.max()))
    sel = (d >= lo) & (d <= hi)
    rate, _, _ = fit_slope(d[sel], lp[sel])
    return DecayProfile(E, m, lp, center, math.nan, L, [], rate)


def _psi_eigenpair(box: BoxOperator, E_target: float, width: float = 1e-3):
    d = box.diagonal
    e = np.full(d.size - 1, float(box.hopping))
    if d.size <= 4000:
        w = eigh_tridiagonal(d, e, eigvals_only=True)
        k = int(np.argmin(np.abs(w - E_target)))
        lam, vec = eigh_tridiagonal(d, e, select="i", select_range=(k, k))
        return float(lam[0]), vec[:, 0]
    # large boxes: widen a value window until it catches an eigenvalue
    while True:
        w = eigh_tridiagonal(d, e, eigvals_only=True, select="v",
                             select_range=(E_target - width, E_target + width))
        if w.size:
            break
        width *= 4
    k = int(np.argmin(np.abs(w - E_target)))
    lam, vec = eigh_tridiagonal(d, e, select="v", select_range=(w[k] - 1e-12, w[k] + 1e-12))
    j = int(np.argmin(np.abs(lam - w[k])))
    return float(lam[j]), vec[:, j]


def decay_profile(freq: FrequencyModel, potential: MonotonePotential, n: int, E_target: float,
                  lyapunov, x: float = 0.0, start: int | None = None, tau: float = TAU,
                  k_max: int | None = None, ipr_min: float = 0.05, hopping: float = 1.0,
                  c_d: float = 4.0, edge: int = 10, min_points: int = 8,
                  rmap: ResonanceMap | None = None) -> DecayProfile:
    """Eigenpair of the box nearest E_target, centred at its maximum.

    ``lyapunov`` is an IDS table or a callable E -> L(E), evaluated at the
    selected eigenvalue. Annulus fits over sqrt(tau) q_k <= |m| <= sqrt(tau) q_{k+1} on each side
    (kept ``edge`` sites away from the box boundary); predictions are L for
    Diophantine transitions and L - beta_k when q_{k+1} > q_k^{C_d}.
    """
    start = -(n // 2) if start is None else start
    box = build_box(x, freq, potential, n, start=start, hopping=hopping)
    if box.is_singular:
        raise NearSingularError("box hits a singular site; shift the phase")
    E, vec = _psi_eigenpair(box, E_target)
    L = float(thouless(lyapunov, E)) if isinstance(lyapunov, IDSTable) else float(lyapunov(E))
    ipr = float(np.sum(vec ** 4))
    if ipr < ipr_min:
        raise InconclusiveLocalization(f"participation {ipr:.4f} below {ipr_min}", ipr)
    c = int(np.argmax(np.abs(vec)))
    lp = stable_log_profile(box.diagonal, E, c, math.log(abs(vec[c])), hopping)
    # normalise |psi(0)|^2 + |psi(1)|^2 = 1 at the centre
    nxt = lp[c + 1] if c + 1 < n else -math.inf
    norm = 0.5 * float(logsumexp([2 * lp[c], 2 * nxt]))
    lp = lp - norm
    m = np.arange(n) - c
    d = np.abs(m)
    qs = freq.denominators
    kk = len(qs) - 2 if k_max is None else k_max
    fits = []
    left_room = c - edge
    right_room = n - 1 - c - edge
    for k in range(0, kk + 1):
        q, qn = qs[k], qs[k + 1]
        lo = max(1, math.ceil(math.sqrt(tau) * q))
        hi = math.floor(math.sqrt(tau) * qn)
        beta = math.log(qn) / q
        liou = qn > q ** c_d
        pred = L - beta if liou else L
        for side, room, sgn in (("right", right_room, 1), ("left", left_room, -1)):
            h = min(hi, room)
            if h - lo + 1 < min_points:
                continue
            sel = (d >= lo) & (d <= h) & (np.sign(m) == sgn)
            rate, _, _ = fit_slope(d[sel], lp[sel])
            fits.append(AnnulusFit(k, side, lo, h, int(sel.sum()), rate, pred, q, qn, beta, liou))
    sel = (d >= edge) & (((m > 0) & (d <= right_room)) | ((m < 0) & (d <= left_room)))
    overall, _, _ = fit_slope(d[sel], lp[sel])
    peaks = []
    labels = np.full(n, "", dtype=object)
    if rmap is not None:
        for l, a, b in rmap.zones:
            ia, ib = max(a + c, 0), min(b + c, n - 1)
            if ia > ib:
                continue
            j = ia + int(np.argmax(lp[ia:ib + 1]))
            peaks.append((l, j - c, float(lp[j])))
            labels[ia:ib + 1] = f"R{l}"
    return DecayProfile(E, m, lp, start + c, ipr, L, fits, overall, peaks, tau, labels)


# ---------------------------------------------------------------- resonances

@dataclass
class ResonantReport:
    mu_fit: float
    mu_bound: float          # largest mu for which the between-zone inequality holds
    L: float
    beta_k: float
    peak_rows: list          # (l, log r_l, predicted, ratio)
    first_peak_ok: bool | None
    between_rate: float      # least-squares falling slope right after each zone
    conclusive: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"mu_fit": self.mu_fit, "mu_bound": self.mu_bound, "L": self.L,
                "beta_k": self.beta_k, "peaks": self.peak_rows,
                "first_peak_ok": self.first_peak_ok, "between_rate": self.between_rate,
                "conclusive": self.conclusive, "notes": self.notes}


def _between_sites(profile: DecayProfile, rmap: ResonanceMap, side: int):
    """(m, dist to R_l, dist to R_{l+1}, log r_l, log r_{l+1}) for non-resonant m."""
    peaks = {l: v for l, _, v in profile.peaks}
    q, b = rmap.q_k, rmap.b_k
    rows = []
    for l in range(0, rmap.ell_max):
        l0, l1 = side * l, side * (l + 1)
        if l0 not in peaks or l1 not in peaks:
            continue
        for mm in range(l * q + b + 1, (l + 1) * q - b):
            m = side * mm
            v = profile.value(m)
            if not math.isfinite(v):
                continue
            rows.append((m, mm - (l * q + b), (l + 1) * q - b - mm, peaks[l0], peaks[l1], v))
    return np.array(rows, dtype=float).reshape(-1, 6)


def resonant_recursion_check(profile: DecayProfile, rmap: ResonanceMap, L_E: float,
                             beta_k: float | None = None, tau: float | None = None,
                             noise_floor: float = -math.inf) -> ResonantReport:
    tau = rmap.tau if tau is None else tau
    beta = math.log(rmap.q_next) / rmap.q_k if beta_k is None else beta_k
    if not rmap.liouville:
        raise ValueError("no Liouville scale: q_{k+1} <= q_k^{C_d}")
    if not L_E * (1 - 2 * tau) - beta > 0:
        raise ValueError("tau too large: L(1 - 2 tau) - beta <= 0")
    rows = np.concatenate([_between_sites(profile, rmap, 1), _between_sites(profile, rmap, -1)])
    notes = []
    if rows.size == 0:
        return ResonantReport(math.nan, math.nan, L_E, beta, [], None, math.nan, False,
                              ["no complete between-zone segment inside the box"])
    _, d0, d1, r0, r1, v = rows.T

    def model(mu):
        return np.logaddexp(r0 - mu * d0, r1 - mu * d1)

    res = minimize_scalar(lambda mu: float(np.sum((model(mu) - v) ** 2)),
                          bounds=(1e-6, 10 * max(L_E, 1.0)), method="bounded")
    mu_fit = float(res.x)
    # largest mu keeping |psi(m)| <= model(mu): model is decreasing in mu
    lo, hi = 0.0, 10 * max(L_E, 1.0)
    if np.all(model(lo) >= v - 1e-9):
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if np.all(model(mid) >= v - 1e-9):
                lo = mid
            else:
                hi = mid
        mu_bound = lo
    else:
        mu_bound = math.nan
        notes.append("between-zone inequality fails even at mu=0")
    # falling slope right after each zone
    rates = []
    q, b = rmap.q_k, rmap.b_k
    seg = max(2, (q - 2 * b) // 3)
    for l, mm, val in profile.peaks:
        for sgn in ((1, -1) if l == 0 else ((1,) if l > 0 else (-1,))):
            ms = mm + sgn * np.arange(b + 1, b + 1 + seg)
            vals = np.array([profile.value(int(x)) for x in ms])
            if np.all(np.isfinite(vals)):
                rates.append(fit_slope(np.abs(ms - mm), vals)[0])
    between_rate = float(np.median(rates)) if rates else math.nan
    peak_rows = []
    first_ok = None
    for l, mm, val in sorted(profile.peaks):
        if l <= 0:
            continue
        pred = -((L_E - beta) * l * rmap.q_k + l * math.log(l + 1))
        peak_rows.append([int(l), float(val), float(pred), float(val / pred) if pred else math.nan])
        if l == 1:
            first_ok = bool(val <= -(L_E - beta) * rmap.q_k * (1 - 0.3))
    conclusive = any(r[1] >= noise_floor for r in peak_rows)
    if not conclusive:
        notes.append("all resonant peaks below the noise floor")
    return ResonantReport(mu_fit, mu_bound, L_E, beta, peak_rows, first_ok, between_rate,
                          conclusive, notes)


def central_eigenvalue(box: BoxOperator, E_lo: float, E_hi: float) -> tuple[float, int]:
    """Eigenvalue in [E_lo, E_hi] whose eigenvector peaks closest to the box middle.

    Returns (eigenvalue, local index of the peak).
    """
    d = box.diagonal
    e = np.full(d.size - 1, float(box.hopping))
    w, v = eigh_tridiagonal(d, e, select="v", select_range=(E_lo, E_hi))
    if w.size == 0:
        raise InconclusiveLocalization(f"no eigenvalue in [{E_lo}, {E_hi}]")
    c = np.argmax(np.abs(v), axis=0)
    i = int(np.argmin(np.abs(c - d.size // 2)))
    return float(w[i]), int(c[i])
