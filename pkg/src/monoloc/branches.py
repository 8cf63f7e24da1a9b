"""Jump points, monotone eigenvalue branches, intersection points and the
phase-variation bounds for eigenvalue counting functions."""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import FrequencyModel, _fixed_to_float, orbit_fixed
from .operators import build_box, diagonal_batch, eigenvalues, sturm_count_diag
from .potential import MonotonePotential


@dataclass(frozen=True)
class JumpPoints:
    fixed: tuple[int, ...]        # sorted fixed-point numerators
    precision_bits: int

    @property
    def n(self) -> int:
        return len(self.fixed)

    @property
    def values(self) -> np.ndarray:
        return np.array([_fixed_to_float(v, self.precision_bits) for v in self.fixed])

    def gaps(self) -> np.ndarray:
        mod = 1 << self.precision_bits
        f = list(self.fixed) + [self.fixed[0] + mod]
        return np.array([(b - a) / mod for a, b in zip(f, f[1:])])

    def shift_fixed(self, k: int) -> int:
        """beta_{n-k} with beta_n identified with beta_0 = 0."""
        return self.fixed[(self.n - k) % self.n]

    def interval_index(self, x_fixed: int) -> int:
        """j with beta_j <= x < beta_{j+1}."""
        return bisect.bisect_right(self.fixed, x_fixed) - 1


def jump_points(freq: FrequencyModel, n: int) -> JumpPoints:
    """Sorted {-j alpha}, j = 0..n-1."""
    mod = freq.scale
    pts = sorted((-v) % mod for v in orbit_fixed(0, freq, n))
    return JumpPoints(tuple(pts), freq.precision_bits)


def _eigs_at(freq, pot, n, x_fixed, hopping=1.0):
    return eigenvalues(build_box(0, freq, pot, n, hopping=hopping, x_fixed=x_fixed)).eigenvalues


def branch_value(freq, pot, jp: JumpPoints, k: int, y_fixed: int, hopping=1.0) -> float:
    """Lambda_k(y) = E_{(j(x)+k) mod n}(x) with x = {y + beta_{n-k}}."""
    n = jp.n
    x = (y_fixed + jp.shift_fixed(k)) % (1 << jp.precision_bits)
    j = jp.interval_index(x)
    return float(_eigs_at(freq, pot, n, x, hopping)[(j + k) % n])


@dataclass
class BranchTable:
    n: int
    grid: np.ndarray              # phases y in [0, 1)
    samples: np.ndarray           # shape (n, grid)
    shifts: np.ndarray            # beta_{n-k}
    gamma: float
    jumps: JumpPoints
    freq: FrequencyModel = field(repr=False)
    potential: MonotonePotential = field(repr=False)
    hopping: float = 1.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["phase", "branch", "value"])
        for k in range(self.n):
            for y, v in zip(self.grid, self.samples[k]):
                w.writerow([repr(float(y)), k, repr(float(v))])
        return buf.getvalue()


@dataclass
class BranchCheck:
    passed: bool
    worst_slope_defect: float
    witness: tuple | None
    multiset_error: float


def branch_table(freq: FrequencyModel, pot: MonotonePotential, n: int,
                 grid_size: int | None = None, hopping: float = 1.0) -> BranchTable:
    grid_size = 4 * n if grid_size is None else grid_size
    if grid_size < 4 * n:
        raise ValueError("grid_size must be at least 4n")
    jp = jump_points(freq, n)
    mod = freq.scale
    yf = [(g * mod) // grid_size for g in range(grid_size)]
    samples = np.empty((n, grid_size))
    # group by phase x so each eigen-solve is reused
    for k in range(n):
        sh = jp.shift_fixed(k)
        for g, y in enumerate(yf):
            x = (y + sh) % mod
            j = jp.interval_index(x)
            samples[k, g] = _eigs_at(freq, pot, n, x, hopping)[(j + k) % n]
    grid = np.array([_fixed_to_float(v, freq.precision_bits) for v in yf])
    shifts = np.array([_fixed_to_float(jp.shift_fixed(k), freq.precision_bits) for k in range(n)])
    return BranchTable(n, grid, samples, shifts, pot.gamma, jp, freq, pot, hopping)


def check_branch_table(table: BranchTable, rtol: float = 1e-8) -> BranchCheck:
    """Grid-level gamma-monotonicity and the spectrum-as-branches identity."""
    worst, witness = math.inf, None
    for k in range(table.n):
        v = table.samples[k]
        ok = np.isfinite(v)
        y, v = table.grid[ok], v[ok]
        if v.size < 2:
            continue
        dq = np.diff(v) / np.diff(y) - table.gamma
        i = int(np.argmin(dq))
        if dq[i] < worst:
            worst, witness = float(dq[i]), (k, float(y[i]), float(y[i + 1]))
    # multiset identity at the grid phases: {Lambda_k({x - beta_{n-k}})} = sigma(H(x))
    freq, jp = table.freq, table.jumps
    mod = freq.scale
    err = 0.0
    stride = max(1, table.grid.size // 16)
    for g in range(0, table.grid.size, stride):
        xf = _float_to_fixed(table.grid[g], freq.precision_bits)
        vals = []
        for k in range(table.n):
            y = (xf - jp.shift_fixed(k)) % mod
            vals.append(branch_value(freq, table.potential, jp, k, y, table.hopping))
        direct = _eigs_at(freq, table.potential, table.n, xf, table.hopping)
        a, b = np.sort(vals), np.sort(direct)
        fin = np.isfinite(a) & np.isfinite(b)
        if np.any(np.isfinite(a) != np.isfinite(b)):
            err = math.inf
        elif fin.any():
            err = max(err, float(np.max(np.abs(a[fin] - b[fin]))))
    tol = rtol * max(1.0, table.gamma)
    passed = worst >= -tol and err <= 1e-8 * max(1.0, float(np.nanmax(np.abs(
        table.samples[np.isfinite(table.samples)]))))
    return BranchCheck(bool(passed), worst, None if worst >= -tol else witness, err)


def _float_to_fixed(x: float, bits: int) -> int:
    from fractions import Fraction
    return math.floor(Fraction(x) * (1 << bits)) % (1 << bits)


@dataclass
class RankOneReport:
    passed: bool
    epsilon: float
    violations: list[tuple[int, int, float]]   # (jump index j, k, defect)

    @property
    def witness(self):
        return self.violations[0] if self.violations else None


def check_rank_one(freq: FrequencyModel, pot: MonotonePotential, n: int,
                   eps: float | None = None) -> RankOneReport:
    """E_k(beta_j) >= E_{k-1}(beta_j - eps) at every jump point."""
    jp = jump_points(freq, n)
    if n == 1:
        return RankOneReport(True, 0.0, [])
    gmin = float(np.min(jp.gaps()))
    eps = gmin / 8 if eps is None else eps
    mod = freq.scale
    ef = max(1, int(eps * mod))
    viol = []
    for j, b in enumerate(jp.fixed):
        at = _eigs_at(freq, pot, n, b)
        before = _eigs_at(freq, pot, n, (b - ef) % mod)
        for k in range(1, n):
            if not np.isfinite(at[k]):
                continue
            d = at[k] - before[k - 1]
            if d < -1e-10 * max(1.0, abs(at[k])):
                viol.append((j, k, float(d)))
    return RankOneReport(not viol, eps, viol)


@dataclass
class IntersectionSet:
    energy: float
    points: np.ndarray     # z_k per branch, in [0, 1]
    branches: np.ndarray   # branch index per entry
    n: int
    branch_coords: np.ndarray | None = None   # z_k in the branch variable y

    def sorted(self) -> np.ndarray:
        return np.sort(self.points)

    def count_in(self, x: float, y: float) -> int:
        z = self.points
        return int(np.count_nonzero((z > x) & (z < y)))

    def near(self, x: float, radius: float) -> np.ndarray:
        """Branches whose intersection point is within ``radius`` of x mod 1."""
        d = np.abs(self.points - x)
        d = np.minimum(d, 1 - d)
        return self.branches[d < radius]


def intersection_points(freq: FrequencyModel, pot: MonotonePotential, n: int, E: float,
                        tol: float = 1e-12, hopping: float = 1.0) -> IntersectionSet:
    """z_k(E) = inf{y in (0,1): Lambda_k(y) >= E} for all k, by simultaneous bisection.

    Uses Lambda_k(y) >= E  <=>  N_n(x, E) <= (j(x)+k) mod n with
    x = {y + beta_{n-k}}. Empty inf gives 1 (identified with 0). The
    returned points are on the circle of box phases, x = {z_k + beta_{n-k}};
    a box on sites h..h+n-1 at phase x is the base box at x + h alpha.
    """
    jp = jump_points(freq, n)
    beta = jp.values
    shifts = np.array([_fixed_to_float(jp.shift_fixed(k), freq.precision_bits) for k in range(n)])
    ks = np.arange(n)
    ph = np.array([_fixed_to_float(v, freq.precision_bits) for v in orbit_fixed(0, freq, n)])

    def pred(y):
        x = np.mod(y + shifts, 1.0)
        j = np.searchsorted(beta, x, side="right") - 1
        idx = (j + ks) % n
        xs = np.mod(x[:, None] + ph[None, :], 1.0)
        diag = np.asarray(pot.evaluate(xs.ravel())).reshape(xs.shape)
        return sturm_count_diag(diag, E, hopping) <= idx

    eps = 1e-15
    top = pred(np.full(n, 1 - eps))
    bot = pred(np.full(n, eps))
    z = np.where(~top, 1.0, 0.0)       # never reaches E -> 1; already above -> 0
    active = top & ~bot
    lo = np.full(n, eps)
    hi = np.full(n, 1 - eps)
    while np.any(active) and np.max((hi - lo)[active]) > tol:
        mid = 0.5 * (lo + hi)
        p = pred(mid)
        hi = np.where(active & p, mid, hi)
        lo = np.where(active & ~p, mid, lo)
    z = np.where(active, 0.5 * (lo + hi), z)
    return IntersectionSet(float(E), np.mod(z + shifts, 1.0), ks.copy(), n, z)


# ------------------------------------------------------------ counting bounds

def phase_grid(size: int, offset: float = 0.5) -> np.ndarray:
    return (np.arange(size) + offset) / size


def counting_table(freq, pot, n, energies, grid) -> np.ndarray:
    """N_n(x, E) for x in grid (rows) and E in energies (columns)."""
    diag = diagonal_batch(grid, freq, pot, n)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    return sturm_count_diag(diag[:, None, :], E[None, :])


def counting_variation(freq, pot, q: int, E, grid=None) -> int | np.ndarray:
    """max_x N_q(x,E) - min_x N_q(x,E) over the phase grid."""
    if q not in freq.denominators:
        raise ValueError(f"{q} is not a convergent denominator")
    grid = phase_grid(512) if grid is None else grid
    t = counting_table(freq, pot, q, E, grid)
    v = t.max(axis=0) - t.min(axis=0)
    return int(v[0]) if np.ndim(E) == 0 else v


def general_bound(s: int, r: int) -> int:
    return 64 * s + 16 * (s + abs(r))


def decompose(n: int, q: int) -> tuple[int, int]:
    """n = s q + r with s >= 1 and |r| <= q/2 when possible."""
    s = max(1, int(round(n / q)))
    return s, n - s * q


def counting_variation_general(freq, pot, n: int, q: int, E, grid=None):
    if q not in freq.denominators:
        raise ValueError(f"{q} is not a convergent denominator")
    grid = phase_grid(512) if grid is None else grid
    s, r = decompose(n, q)
    t = counting_table(freq, pot, n, E, grid)
    v = t.max(axis=0) - t.min(axis=0)
    return (int(v[0]) if np.ndim(E) == 0 else v), general_bound(s, r)


@dataclass
class IntersectionCountReport:
    count: int
    bound: float
    near_count: int
    near_bound: float
    passed: bool


def intersection_count_bound(freq, pot, n: int, q: int, E: float, x: float, y: float,
                             b_minus: float | None = None, c_d: float = 4.0,
                             iset: IntersectionSet | None = None) -> IntersectionCountReport:
    """Intersection points in (x, y) and in the B_-/gamma neighbourhood of x."""
    if not 0 <= x <= y < 1:
        raise ValueError("need 0 <= x <= y < 1")
    s, r = decompose(n, q)
    iset = intersection_points(freq, pot, n, E) if iset is None else iset
    cnt = iset.count_in(x, y) if y > x else 0
    bound = s * math.ceil(q * (y - x) + 1) + general_bound(s, r)
    bm = q ** (-2 * c_d + 1) if b_minus is None else b_minus
    near = iset.near(x, bm / pot.gamma).size
    near_bound = 2 * s * q * bm / pot.gamma + 100 * (s + abs(r)) + 20
    return IntersectionCountReport(cnt, bound, int(near), near_bound,
                                   cnt <= bound and near <= near_bound and iset.points.size <= n)


def counting_lemma_check(freq, pot, n: int, E: float, pairs, iset=None) -> list[tuple]:
    """N(y) - N(x) <= #jumps in (x, y] - #intersections in (x, y); returns violations."""
    iset = intersection_points(freq, pot, n, E) if iset is None else iset
    beta = jump_points(freq, n).values
    xs = np.array([p[0] for p in pairs]); ys = np.array([p[1] for p in pairs])
    N = counting_table(freq, pot, n, E, np.concatenate([xs, ys]))[:, 0]
    bad = []
    for i, (a, b) in enumerate(pairs):
        jumps = int(np.count_nonzero((beta > a) & (beta <= b)))
        inter = int(np.count_nonzero((iset.points > a) & (iset.points < b)))
        lhs = int(N[len(pairs) + i] - N[i])
        if lhs > jumps - inter:
            bad.append((a, b, lhs, jumps, inter))
    return bad
