"""Finite-box quasiperiodic Jacobi operators: Sturm counts, log-scaled
determinants, eigenpairs, Green's function entries and transfer matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .arithmetic import FrequencyModel, orbit_fixed, _fixed_to_float
from .potential import MonotonePotential

_TINY = 1e-300
_RESCALE_HI = 1e150
_RESCALE_LO = 1e-150


class NearSingularError(ArithmeticError):
    """E is (numerically) an eigenvalue of the box."""

    def __init__(self, msg, eigenvalue=None, gap=None):
        super().__init__(msg)
        self.eigenvalue = eigenvalue
        self.gap = gap


class SingularOrbitError(ArithmeticError):
    pass


@dataclass(frozen=True, order=False)
class SignedLogValue:
    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", -math.inf)

    @classmethod
    def one(cls) -> "SignedLogValue":
        return cls(1, 0.0)

    @classmethod
    def from_float(cls, v: float) -> "SignedLogValue":
        if v == 0:
            return cls(0, -math.inf)
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @classmethod
    def product(cls, values) -> "SignedLogValue":
        """Product of a float array in sign/log form."""
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            return cls.one()
        if np.any(v == 0):
            return cls(0, -math.inf)
        sign = -1 if np.count_nonzero(v < 0) % 2 else 1
        return cls(sign, float(np.sum(np.log(np.abs(v)))))

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        return SignedLogValue(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "SignedLogValue") -> "SignedLogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        return SignedLogValue(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude) if self.log_magnitude < 709 else self.sign * math.inf

    def _key(self):
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log_magnitude)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def isclose(self, other: "SignedLogValue", rtol: float = 1e-9) -> bool:
        if self.sign != other.sign:
            return False
        if self.sign == 0:
            return True
        return abs(self.log_magnitude - other.log_magnitude) <= rtol


@dataclass(frozen=True)
class BoxOperator:
    """H restricted to sites start..start+n-1 with Dirichlet boundary.

    ``diagonal`` holds f(x + j alpha); singular sites carry -inf and split
    the box into independent blocks.
    """

    diagonal: np.ndarray
    start: int = 0
    hopping: float = 1.0
    x: float = 0.0
    freq: FrequencyModel | None = None
    potential: MonotonePotential | None = None
    blocks: tuple = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "diagonal", d)
        sing = np.flatnonzero(np.isneginf(d))
        edges = [-1] + list(sing) + [d.size]
        blocks = tuple((a + 1, b) for a, b in zip(edges, edges[1:]) if b > a + 1)
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.diagonal.size

    @property
    def singular_sites(self) -> np.ndarray:
        return np.flatnonzero(np.isneginf(self.diagonal))

    @property
    def is_singular(self) -> bool:
        return bool(np.any(np.isneginf(self.diagonal)))

    @property
    def scale(self) -> float:
        fin = self.diagonal[np.isfinite(self.diagonal)]
        return float(np.max(np.abs(fin))) + 2 * abs(self.hopping) if fin.size else 1.0

    def dense(self) -> np.ndarray:
        if self.is_singular:
            raise SingularOrbitError("dense matrix undefined for singular boxes")
        n = self.n
        return (np.diag(self.diagonal) + self.hopping * (np.eye(n, k=1) + np.eye(n, k=-1)))

    def sub(self, lo: int, hi: int) -> "BoxOperator":
        """Sub-box on local indices lo..hi-1 (absolute sites start+lo..)."""
        return BoxOperator(self.diagonal[lo:hi], self.start + lo, self.hopping, self.x,
                           self.freq, self.potential)


def site_phases_fixed(x, freq: FrequencyModel, n: int, start: int = 0,
                      x_fixed: int | None = None) -> list[int]:
    return orbit_fixed(x, freq, n, start, x_fixed)


def build_box(x, freq: FrequencyModel, potential: MonotonePotential, n: int,
              start: int = 0, hopping: float = 1.0,
              x_fixed: int | None = None) -> BoxOperator:
    """Box on sites start..start+n-1 at phase x.

    A site is singular when the potential is unbounded below and the
    fixed-point orbit coordinate lies within 2^(-precision_bits/2) of 0.
    """
    if n < 1:
        raise ValueError("window must be non-empty")
    pts = orbit_fixed(x, freq, n, start, x_fixed)
    bits = freq.precision_bits
    ys = np.array([_fixed_to_float(v, bits) for v in pts])
    diag = np.asarray(potential.evaluate(ys), dtype=float)
    thresh = 1 << (bits // 2)
    mod = freq.scale
    near0 = np.array([v < thresh or mod - v < thresh for v in pts])
    if not potential.bounded_below:
        diag = np.where(near0, -math.inf, diag)
    else:
        diag = np.where(np.array([v == 0 for v in pts]), potential.lower_limit_at_zero, diag)
    return BoxOperator(diag, start, hopping, float(x), freq, potential)


def box_from_diagonal(diag, hopping: float = 1.0, start: int = 0) -> BoxOperator:
    return BoxOperator(np.asarray(diag, dtype=float), start, hopping)


def diagonal_batch(xs, freq: FrequencyModel, potential: MonotonePotential, n: int,
                   start: int = 0) -> np.ndarray:
    """Diagonals f(x + j alpha) for many phases at once, shape (len(xs), n).

    Uses double precision phase sums; intended for sweeps, not certified work.
    """
    steps = orbit_fixed(0, freq, n, start)
    bits = freq.precision_bits
    ph = np.array([_fixed_to_float(v, bits) for v in steps])
    y = np.mod(np.asarray(xs, dtype=float)[:, None] + ph[None, :], 1.0)
    return np.asarray(potential.evaluate(y.ravel())).reshape(y.shape)


# ---------------------------------------------------------------- counting

def sturm_count_diag(diag, E, hopping: float = 1.0):
    """#eigenvalues < E of the Jacobi matrix(es) with the given diagonal(s).

    ``diag`` has shape (..., n) and ``E`` broadcasts against diag[..., 0].
    Singular sites (-inf) give a -inf pivot: they count once and decouple
    the neighbours. A zero pivot is replaced by +tiny, which is the limit
    from E - 0 and so realises the half-open convention.
    """
    diag = np.asarray(diag, dtype=float)
    E = np.asarray(E, dtype=float)
    t2 = hopping * hopping
    shape = np.broadcast(diag[..., 0], E).shape
    count = np.zeros(shape, dtype=np.int64)
    d = np.full(shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for j in range(diag.shape[-1]):
            d = diag[..., j] - E - t2 / d
            d = np.where(d == 0, _TINY, d)
            count += d < 0
    return count


def sturm_count(box: BoxOperator, E) -> int | np.ndarray:
    out = sturm_count_diag(box.diagonal, E, box.hopping)
    return int(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- eigenvalues

@dataclass(frozen=True)
class EigenData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def eigenvalues(box: BoxOperator, want_vectors: bool = False) -> EigenData:
    """All eigenvalues, -inf entries first for singular sites.

    Finite blocks use LAPACK's tridiagonal solver; ``bisect_eigenvalue``
    offers an independent Sturm-bisection path.
    """
    n = box.n
    vals = np.full(n, -math.inf)
    vecs = np.zeros((n, n)) if want_vectors else None
    sing = box.singular_sites
    col = 0
    for s in sing:
        if want_vectors:
            vecs[s, col] = 1.0
        col += 1
    for a, b in box.blocks:
        d = box.diagonal[a:b]
        e = np.full(b - a - 1, float(box.hopping))
        if want_vectors:
            w, v = eigh_tridiagonal(d, e)
            vecs[a:b, col:col + w.size] = v
        else:
            w = eigh_tridiagonal(d, e, eigvals_only=True)
        vals[col:col + w.size] = w
        col += w.size
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    if want_vectors:
        vecs = vecs[:, order]
    return EigenData(vals, vecs)


class BisectionError(RuntimeError):
    pass


def bisect_eigenvalue(box: BoxOperator, k: int, tol: float = 1e-13,
                      max_iter: int = 200) -> float:
    """k-th smallest eigenvalue (0-based) by bisection on Sturm counts."""
    if not 0 <= k < box.n:
        raise IndexError(k)
    nsing = box.singular_sites.size
    if k < nsing:
        return -math.inf
    fin = box.diagonal[np.isfinite(box.diagonal)]
    lo = float(fin.min()) - 2 * abs(box.hopping) - 1.0
    hi = float(fin.max()) + 2 * abs(box.hopping) + 1.0
    atol = tol * max(1.0, abs(lo), abs(hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if sturm_count(box, mid) > k:
            hi = mid
        else:
            lo = mid
        if hi - lo <= atol:
            return 0.5 * (lo + hi)
    raise BisectionError(f"no convergence for k={k}: bracket [{lo}, {hi}]")


# ---------------------------------------------------------------- determinants

def _det_recurrence(diag, E, t2, keep_all=False):
    """Scaled three-term recurrence, vectorised over E.

    Returns sign and log|D_n| (and optionally all prefixes D_0..D_n).
    """
    E = np.atleast_1d(np.asarray(E, dtype=float))
    n = len(diag)
    u = np.ones_like(E)       # D_{j-1}
    v = np.zeros_like(E)      # D_{j-2}
    logscale = np.zeros_like(E)
    if keep_all:
        signs = np.empty((n + 1, E.size), dtype=np.int8)
        logs = np.empty((n + 1, E.size))
        signs[0], logs[0] = 1, 0.0
    for j in range(n):
        w = (diag[j] - E) * u - t2 * v
        v, u = u, w
        s = np.maximum(np.abs(u), np.abs(v))
        resc = (s > _RESCALE_HI) | ((s < _RESCALE_LO) & (s > 0))
        if np.any(resc):
            f = np.where(resc, s, 1.0)
            u = u / f
            v = v / f
            logscale = logscale + np.log(f)
        if keep_all:
            signs[j + 1] = np.sign(u)
            with np.errstate(divide="ignore"):
                logs[j + 1] = np.where(u == 0, -np.inf, np.log(np.abs(u)) + logscale)
    sign = np.sign(u).astype(int)
    with np.errstate(divide="ignore"):
        logm = np.where(u == 0, -np.inf, np.log(np.abs(u)) + logscale)
    if keep_all:
        return signs, logs
    return sign, logm


def determinant_arrays(box: BoxOperator, E):
    """Vectorised det(H - E) as (sign, log|det|) arrays over E.

    Singular boxes: product of the finite block determinants (the singular
    rows and columns are dropped).
    """
    E = np.atleast_1d(np.asarray(E, dtype=float))
    sign = np.ones(E.shape, dtype=int)
    logm = np.zeros(E.shape)
    t2 = box.hopping ** 2
    for a, b in box.blocks:
        s, l = _det_recurrence(box.diagonal[a:b], E, t2)
        sign = sign * s
        logm = logm + l
    return sign, logm


def determinant(box: BoxOperator, E: float) -> SignedLogValue:
    s, l = determinant_arrays(box, E)
    return SignedLogValue(int(s[0]), float(l[0]))


def prefix_determinants(diag, E: float, hopping: float = 1.0):
    """Signs and logs of det of the leading j x j blocks, j = 0..n."""
    s, l = _det_recurrence(np.asarray(diag, float), E, hopping ** 2, keep_all=True)
    return s[:, 0].astype(int), l[:, 0]


def suffix_determinants(diag, E: float, hopping: float = 1.0):
    """Signs and logs of det of the trailing blocks: index j covers sites j..n-1."""
    s, l = prefix_determinants(np.asarray(diag, float)[::-1], E, hopping)
    return s[::-1], l[::-1]


def _check_not_eigenvalue(box: BoxOperator, E: float, rel: float = 1e-12):
    delta = rel * max(1.0, abs(E), box.scale)
    lo, hi = sturm_count(box, E - delta), sturm_count(box, E + delta)
    if lo != hi:
        lam = bisect_eigenvalue(box, lo)
        raise NearSingularError(
            f"E={E!r} is within {abs(lam - E):.3e} of the eigenvalue {lam!r}",
            eigenvalue=lam, gap=abs(lam - E))


def greens_entry(box: BoxOperator, E: float, i: int, j: int,
                 check: bool = True) -> SignedLogValue:
    """(H - E)^{-1}(i, j) by Cramer's rule (local indices).

    G(i, j) = (-t)^{|j-i|} P[0..min-1] P[max+1..n-1] / P[0..n-1].
    """
    if check:
        _check_not_eigenvalue(box, E)
    if i > j:
        i, j = j, i
    # locate the block
    for a, b in box.blocks:
        if a <= i < b:
            break
    else:
        return SignedLogValue(0, -math.inf)
    if not j < b:
        return SignedLogValue(0, -math.inf)
    d = box.diagonal[a:b]
    t2 = box.hopping ** 2
    ii, jj = i - a, j - a
    sp, lp = _det_recurrence(d[:ii], E, t2)
    ss, ls = _det_recurrence(d[jj + 1:], E, t2)
    sn, ln = _det_recurrence(d, E, t2)
    if sn[0] == 0:
        raise NearSingularError(f"E={E!r} is an eigenvalue", eigenvalue=E, gap=0.0)
    t = -box.hopping
    steps = jj - ii
    sign_t = 1 if (t > 0 or steps % 2 == 0) else -1
    if t == 0 and steps > 0:
        return SignedLogValue(0, -math.inf)
    log_t = steps * math.log(abs(t)) if steps else 0.0
    return SignedLogValue(int(sp[0] * ss[0] * sn[0] * sign_t),
                          float(lp[0] + ls[0] - ln[0] + log_t))


def greens_boundary_rows(box: BoxOperator, E: float, check: bool = True):
    """log|G(0, m)| and log|G(m, n-1)| for every m, in O(n) (no singular sites)."""
    if box.is_singular:
        raise SingularOrbitError("boundary rows need a non-singular box")
    if check:
        _check_not_eigenvalue(box, E)
    d = box.diagonal
    n = d.size
    _, pre = prefix_determinants(d, E, box.hopping)
    _, suf = suffix_determinants(d, E, box.hopping)
    ln = pre[n]
    lt = math.log(abs(box.hopping)) if box.hopping != 0 else -math.inf
    m = np.arange(n)
    suf_next = np.append(suf, 0.0)  # P of empty block is 1
    left = suf_next[m + 1] - ln + m * lt          # G(0, m)
    right = pre[m] - ln + (n - 1 - m) * lt        # G(m, n-1)
    return left, right


# ---------------------------------------------------------------- transfer matrices

def transfer_lognorm(x, freq: FrequencyModel, potential: MonotonePotential, E, n: int,
                     start: int = 0, diag=None):
    """(1/n) log ||A_{n-1} ... A_0|| with A_j = [[E - v_j, -1], [1, 0]].

    Vectorised over E; renormalised every step.
    """
    if diag is None:
        diag = build_box(x, freq, potential, n, start).diagonal
    diag = np.asarray(diag, dtype=float)
    if not np.all(np.isfinite(diag)):
        raise SingularOrbitError("singular site on the orbit segment")
    E = np.atleast_1d(np.asarray(E, dtype=float))
    a = np.ones_like(E); b = np.zeros_like(E)
    c = np.zeros_like(E); d = np.ones_like(E)
    acc = np.zeros_like(E)
    for j in range(diag.size):
        w = E - diag[j]
        a, b, c, d = w * a - c, w * b - d, a, b
        s = np.maximum.reduce([np.abs(a), np.abs(b), np.abs(c), np.abs(d)])
        a, b, c, d = a / s, b / s, c / s, d / s
        acc += np.log(s)
    M = np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)
    norms = np.linalg.norm(M, ord=2, axis=(-2, -1))
    out = (acc + np.log(norms)) / diag.size
    return float(out[0]) if out.size == 1 else out
