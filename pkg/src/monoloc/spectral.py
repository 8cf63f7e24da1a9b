"""Integrated density of states, the Thouless formula and its truncated
(cutoff) version."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import FrequencyModel, ScaleChoice, choose_scale
from .operators import build_box, sturm_count_diag
from .potential import MonotonePotential

GOLDEN_PHASE = (math.sqrt(5) - 1) / 2


class WindowRequired(ValueError):
    """Unbounded potentials need a user-supplied energy window."""


@dataclass(frozen=True)
class CutoffPair:
    B_minus: float
    B_plus: float

    def __post_init__(self):
        if not (0 < self.B_minus < 1 < 10 < self.B_plus):
            raise ValueError(f"need 0 < B_- < 1 < 10 < B_+, got {self.B_minus}, {self.B_plus}")

    @property
    def B_plus_prime(self) -> float:
        return self.B_plus + 4

    @property
    def log_ratio(self) -> float:
        return math.log(self.B_plus / self.B_minus)

    @classmethod
    def for_scale(cls, q: int, c_d: float = 4.0) -> "CutoffPair":
        """B_- = q^(1 - 2 C_d), B_+ = q."""
        return cls(float(q) ** (1 - 2 * c_d), float(q))


@dataclass
class IDSTable:
    energy_grid: np.ndarray
    values: np.ndarray
    scale: ScaleChoice | None
    error_bound: float
    gamma: float = math.nan
    phase: float = GOLDEN_PHASE
    coarse_flags: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        e = np.asarray(self.energy_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.shape != v.shape or e.ndim != 1 or e.size < 1:
            raise ValueError("energy_grid and values must be matching 1-d arrays")
        if np.any(np.diff(e) < 0):
            raise ValueError("energy grid must be sorted")
        if np.any(np.diff(v) < -1e-15) or v[0] < -1e-15 or v[-1] > 1 + 1e-15:
            raise ValueError("IDS values must be non-decreasing within [0, 1]")
        self.energy_grid, self.values = e, v

    def __call__(self, E):
        """Piecewise-linear interpolant (right-continuous at point masses)."""
        E = np.asarray(E, dtype=float)
        e, v = self.energy_grid, self.values
        i = np.searchsorted(e, E, side="right")
        out = np.empty(E.shape)
        below = i == 0
        above = i >= e.size
        mid = ~below & ~above
        out[below] = 0.0
        out[above] = 1.0
        ii = i[mid]
        lo, hi = e[ii - 1], e[ii]
        w = np.where(hi > lo, (E[mid] - lo) / np.where(hi > lo, hi - lo, 1.0), 1.0)
        out[mid] = v[ii - 1] + w * (v[ii] - v[ii - 1])
        return float(out) if out.ndim == 0 else out

    @property
    def spacing(self) -> float:
        d = np.diff(self.energy_grid)
        d = d[d > 0]
        return float(d.max()) if d.size else 0.0

    def masses(self):
        """Decomposition into linear segments and point masses.

        Returns (a, b, w) segments with mass w spread uniformly on [a, b]
        and (e, w) point masses: leftover mass below/above the grid is
        placed at the grid ends, zero-width segments are atoms.
        """
        e, v = self.energy_grid, self.values
        dv = np.diff(v)
        de = np.diff(e)
        seg = (de > 0) & (dv > 0)
        atom = (de == 0) & (dv > 0)
        segs = (e[:-1][seg], e[1:][seg], dv[seg])
        pe = list(e[:-1][atom])
        pw = list(dv[atom])
        if v[0] > 0:
            pe.append(e[0]); pw.append(v[0])
        if v[-1] < 1:
            pe.append(e[-1]); pw.append(1 - v[-1])
        return segs, (np.array(pe), np.array(pw))

    def lipschitz_defect(self) -> float:
        """max observed slope minus 1/gamma (only meaningful for fine grids)."""
        de = np.diff(self.energy_grid)
        ok = de > 0
        if not ok.any() or not np.isfinite(self.gamma):
            return -math.inf
        slope = np.diff(self.values)[ok] / de[ok]
        return float(slope.max() - 1 / self.gamma)

    def to_csv(self, lyap: np.ndarray | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["E", "N"] + (["L"] if lyap is not None else []))
        for i, (E, N) in enumerate(zip(self.energy_grid, self.values)):
            w.writerow([repr(float(E)), repr(float(N))] + ([repr(float(lyap[i]))] if lyap is not None else []))
        return buf.getvalue()

    def metadata(self) -> dict:
        sc = self.scale
        return {"points": int(self.energy_grid.size), "phase": self.phase,
                "error_bound": self.error_bound,
                "scale": None if sc is None else {"n": sc.n, "q": sc.q, "s": sc.s, "r": sc.r}}


def default_energy_window(pot: MonotonePotential) -> tuple[float, float]:
    lo, hi = pot.lower_limit_at_zero, pot.sup_value
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise WindowRequired("potential is unbounded; an energy window is required")
    return lo - 3.0, hi + 3.0


def ids_build(freq: FrequencyModel, pot: MonotonePotential, n: int, energy_grid=None,
              phase: float = GOLDEN_PHASE, hopping: float = 1.0,
              grid_points: int = 1024) -> IDSTable:
    """N_n(x0, E)/n on an energy grid at a single phase x0."""
    if energy_grid is None:
        lo, hi = default_energy_window(pot)
        energy_grid = np.linspace(lo, hi, grid_points)
    E = np.sort(np.asarray(energy_grid, dtype=float))
    sc = choose_scale(n, freq)
    err = 4 * abs(sc.r) / (sc.s * sc.q) + 40 / sc.q
    box = build_box(phase, freq, pot, n, hopping=hopping)
    counts = sturm_count_diag(box.diagonal, E, hopping)
    vals = counts / n
    h = np.diff(E)
    flags = np.zeros(0, dtype=int)
    if np.isfinite(pot.gamma) and hopping != 0:
        flags = np.flatnonzero(np.diff(vals) > h / pot.gamma + err)
    return IDSTable(E, vals, sc, err, pot.gamma, phase, flags)


def synthetic_ids(kind: str, **kw) -> IDSTable:
    """Closed-form tables: 'atom' (unit mass at e0) or 'uniform' on [a, b]."""
    if kind == "atom":
        e0 = kw.get("at", 0.0)
        return IDSTable(np.array([e0, e0]), np.array([0.0, 1.0]), None, 0.0)
    if kind == "uniform":
        a, b = kw.get("a", 0.0), kw.get("b", 1.0)
        pts = kw.get("points", 2)
        e = np.linspace(a, b, pts)
        return IDSTable(e, (e - a) / (b - a), None, 0.0, gamma=b - a)
    raise ValueError(kind)


# ------------------------------------------------------------ log potentials

def _F(u):
    """Antiderivative of log|u|: u log|u| - u, with F(0) = 0."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u == 0, 0.0, u * np.log(np.abs(u)) - u)


def _log_segment(lo, hi):
    """int_lo^hi log|u| du (lo <= hi)."""
    return _F(hi) - _F(lo)


def _clipped(lo, hi, a, b):
    """int over [lo, hi] ∩ [a, b] of log|u|."""
    l2 = np.maximum(lo, a)
    h2 = np.minimum(hi, b)
    return np.where(h2 > l2, _log_segment(l2, np.maximum(h2, l2)), 0.0)


def _log_integral(table: IDSTable, E, cut: CutoffPair | None = None):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    (a, b, w), (pe, pw) = table.masses()
    out = np.zeros(E.shape)
    # segments: int_a^b log|E - t| dt = int_{E-b}^{E-a} log|u| du
    lo = E[:, None] - b[None, :]
    hi = E[:, None] - a[None, :]
    dens = (w / (b - a))[None, :]
    if cut is None:
        out += np.sum(dens * _log_segment(lo, hi), axis=1)
    else:
        Bm, Bp = cut.B_minus, cut.B_plus
        val = _clipped(lo, hi, Bm, Bp) + _clipped(lo, hi, -Bp, -Bm)
        out += np.sum(dens * val, axis=1)
    if pe.size:
        with np.errstate(divide="ignore"):
            d = np.abs(E[:, None] - pe[None, :])
            lg = np.log(d)
            if cut is not None:
                lg = np.where((d >= cut.B_minus) & (d <= cut.B_plus), lg, 0.0)
        out += np.sum(pw[None, :] * lg, axis=1)
    return out


def thouless(table: IDSTable, E):
    """L(E) = int log|E - E'| dN(E') with closed-form segment integrals."""
    out = _log_integral(table, E)
    return float(out[0]) if np.ndim(E) == 0 else out


def truncated_thouless(table: IDSTable, E, cut: CutoffPair):
    out = _log_integral(table, E, cut)
    return float(out[0]) if np.ndim(E) == 0 else out


def l_corr(table: IDSTable, E, cut: CutoffPair):
    out = np.abs(_log_integral(table, E) - _log_integral(table, E, cut))
    return float(out[0]) if np.ndim(E) == 0 else out


def quadrature_error(table: IDSTable) -> float:
    """Interpolation error bound for the Thouless integral.

    Replacing the measure on a cell of width h by its linear average moves
    mass by at most h; against log|u| with density <= 1/gamma this costs at
    most (h/gamma)(1 + log(span/h)) on each side of E.
    """
    h = table.spacing
    if h == 0 or not np.isfinite(table.gamma):
        return 0.0
    span = table.energy_grid[-1] - table.energy_grid[0]
    return (h / (2 * table.gamma)) * (2 + 2 * math.log(max(span / h, 1.0)))


@dataclass
class LyapunovTable:
    energy_grid: np.ndarray
    values: np.ndarray
    quadrature_error: float

    def to_json(self) -> str:
        return json.dumps({"E": self.energy_grid.tolist(), "L": self.values.tolist(),
                           "quadrature_error": self.quadrature_error})


def lyapunov_table(table: IDSTable, energies=None) -> LyapunovTable:
    E = table.energy_grid if energies is None else np.asarray(energies, dtype=float)
    return LyapunovTable(E, thouless(table, E), quadrature_error(table))


def lyapunov_floor(gamma: float) -> float:
    return max(0.0, math.log(gamma / (2 * math.e)))


@dataclass
class FloorReport:
    floor: float
    min_value: float
    argmin: float
    margin: float
    passed: bool


def lyapunov_floor_check(lt: LyapunovTable, gamma: float, tol: float = 0.02) -> FloorReport:
    fl = lyapunov_floor(gamma)
    i = int(np.argmin(lt.values))
    m = float(lt.values[i])
    return FloorReport(fl, m, float(lt.energy_grid[i]), m - fl, m - fl >= -tol)


@dataclass
class InverseReport:
    max_deviation: float
    bound: float
    passed: bool
    witness: float


def ids_inverse(table: IDSTable, levels):
    """A monotone inverse: smallest E on the interpolant with N(E) >= level."""
    lv = np.asarray(levels, dtype=float)
    e, v = table.energy_grid, table.values
    i = np.clip(np.searchsorted(v, lv, side="left"), 1, e.size - 1)
    v0, v1 = v[i - 1], v[i]
    w = np.where(v1 > v0, (lv - v0) / np.where(v1 > v0, v1 - v0, 1.0), 1.0)
    return e[i - 1] + np.clip(w, 0, 1) * (e[i] - e[i - 1])


def ids_inverse_check(table: IDSTable, pot: MonotonePotential, points: int = 2000,
                      slack: float = 0.1, margin: float = 0.01) -> InverseReport:
    """max |N^{-1}(x) - f(x)| over an x-grid kept away from the endpoints."""
    x = np.linspace(margin, 1 - margin, points)
    dev = np.abs(ids_inverse(table, x) - pot.evaluate(x))
    i = int(np.argmax(dev))
    return InverseReport(float(dev[i]), 2 + slack, float(dev[i]) <= 2 + slack, float(x[i]))
