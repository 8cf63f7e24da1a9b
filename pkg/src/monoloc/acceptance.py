"""The acceptance suite: ten criteria, each a list of anchored checks.

Used by ``monoloc verify`` and by the test-suite. Every check records the
observed value, the bound it is held against and an anchor string naming
the statement it exercises.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .arithmetic import frequency, golden, liouville_spike, silver
from .branches import counting_variation, counting_variation_general, intersection_points
from .ldt import (SIGMA, _orbit_points, find_good_interval, lagrange_trials, ldt_verify,
                  resonance_map, sampling_lemma_bound, SamplingPreconditionError,
                  GoodInterval, uniform_upper_check)
from .operators import (build_box, box_from_diagonal, determinant, eigenvalues,
                        greens_boundary_rows, greens_entry, sturm_count, transfer_lognorm)
from .patching import (GoodIntervalCollection, InconclusiveLocalization, SiteArray,
                       block_collection, central_eigenvalue, decay_profile, dominating_check,
                       enumerate_paths, min_weight, random_collection, resonant_recursion_check,
                       stable_log_profile, verify_terminating_bound)
from .potential import make_custom, make_log_singular, make_sawtooth, validate
from .spectral import (ids_build, lyapunov_floor_check, lyapunov_table, synthetic_ids,
                       thouless)

# default tolerances; ``overrides`` in run_suite replaces any of them
TOLERANCES = {
    "counting_constant": 16,
    "thouless_transfer_rel": 0.05,
    "synthetic_abs": 1e-6,
    "floor_tol": 0.02,
    "decay_dio_rel": 0.15,
    "dip_rel": 0.30,
    "between_rel": 0.20,
    "oracle_eig": 1e-10,
    "oracle_det": 1e-10,
    "oracle_green": 1e-8,
}

BUDGETS = {1: 120, 2: 180, 3: 180, 4: 60, 5: 120, 6: 60, 7: 60, 8: 120, 9: 600, 10: 60}

NAMES = {
    1: "counting-function constant",
    2: "general counting bound",
    3: "determinant split and large deviations",
    4: "oracle equivalence",
    5: "Thouless cross-check",
    6: "Lyapunov floor",
    7: "Lagrange and sampling lower bounds",
    8: "path lemmas",
    9: "localization decay",
    10: "negative controls",
}


@dataclass
class Check:
    name: str
    observed: float
    bound: float
    passed: bool
    anchor: str

    def as_dict(self) -> dict:
        def num(v):
            if isinstance(v, (bool, np.bool_)):
                return bool(v)
            v = float(v)
            return v if math.isfinite(v) else repr(v)
        return {"name": self.name, "observed": num(self.observed), "bound": num(self.bound),
                "passed": bool(self.passed), "anchor": self.anchor}


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: list
    seconds: float = 0.0
    budget: float = math.inf
    notes: list = field(default_factory=list)

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.budget

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks) and self.within_budget

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        # wall time is kept out so that reports are reproducible byte for byte
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "within_budget": self.within_budget, "budget_seconds": self.budget,
                "checks": [c.as_dict() for c in self.checks], "notes": list(self.notes)}

    def line(self) -> str:
        bad = self.failures()
        tail = "" if not bad else f" ({len(bad)} failing, first: {bad[0].name})"
        if not self.within_budget:
            tail += f" (over budget: {self.seconds:.1f}s > {self.budget}s)"
        return (f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'} "
                f"{self.name}: {len(self.checks)} checks, {self.seconds:.1f}s{tail}")


def _tol(overrides, key):
    return (overrides or {}).get(key, TOLERANCES[key])


# ---------------------------------------------------------------- 1, 2

def _counting_matrix():
    pots = {"sawtooth5": make_sawtooth(5), "sawtooth20": make_sawtooth(20),
            "log_singular5_1": make_log_singular(5, 1)}
    # silver has no denominators in the golden list; its own ones in the same range are used
    freqs = {"golden": (golden(), (13, 21, 34, 55, 89)),
             "silver": (silver(), (12, 29, 70, 169))}
    for pname, pot in pots.items():
        lo = -5.0 if pot.kind == "log_singular" else 0.0
        energies = np.linspace(lo + 0.1 * (pot.gamma - lo), pot.gamma - 0.1 * (pot.gamma - lo), 5)
        for fname, (freq, qs) in freqs.items():
            yield pname, pot, fname, freq, qs, energies


def criterion_1(seed=0, overrides=None) -> CriterionResult:
    const = _tol(overrides, "counting_constant")
    checks = []
    for pname, pot, fname, freq, qs, energies in _counting_matrix():
        for q in qs:
            v = counting_variation(freq, pot, q, energies)
            checks.append(Check(f"{pname}/{fname}/q={q}", int(np.max(v)), const,
                                int(np.max(v)) <= const, "counting constant: variation <= 16"))
    return CriterionResult(1, NAMES[1], checks)


def criterion_2(seed=0, overrides=None) -> CriterionResult:
    checks = []
    for pname, pot, fname, freq, qs, energies in _counting_matrix():
        for q in qs:
            for n in (2 * q, 2 * q + 1, 3 * q - 2):
                v, bound = counting_variation_general(freq, pot, n, q, energies)
                checks.append(Check(f"{pname}/{fname}/q={q}/n={n}", int(np.max(v)), bound,
                                    int(np.max(v)) <= bound, "counting bound 64s+16(s+|r|)"))
    return CriterionResult(2, NAMES[2], checks)


# ---------------------------------------------------------------- 3

def criterion_3(seed=0, overrides=None) -> CriterionResult:
    g = golden()
    pot = make_sawtooth(20)
    ids = ids_build(g, pot, 4181)
    checks = []
    for n in (55, 89, 144):
        for E in (-5.0, 0.5, 3.3, 12.0, 19.5):
            box = build_box(0.1, g, pot, n)
            rep = ldt_verify(box, E, None, ids)
            checks.append(Check(f"n={n}/E={E}/identity", rep.identity_gap, 1e-9,
                                rep.identity_gap <= 1e-9, "product identity P^< P^mid P^> = det"))
            for c in rep.checks:
                checks.append(Check(f"n={n}/E={E}/{c.name}", c.observed, c.bound, c.passed,
                                    c.anchor))
            u = uniform_upper_check(box, E, None, ids)
            checks.append(Check(f"n={n}/E={E}/{u.name}", u.observed, u.bound, u.passed, u.anchor))
    return CriterionResult(3, NAMES[3], checks)


# ---------------------------------------------------------------- 4

def criterion_4(seed=0, overrides=None) -> CriterionResult:
    rng = np.random.default_rng(seed)
    t_eig, t_det, t_green = (_tol(overrides, k) for k in ("oracle_eig", "oracle_det", "oracle_green"))
    freqs = [golden(), silver()]
    pots = [make_sawtooth(5), make_sawtooth(20), make_log_singular(5, 1)]
    worst = {"count": 0, "eig": 0.0, "det": 0.0, "det_sign": 0, "green": 0.0}
    boxes = 0
    while boxes < 200:
        freq = freqs[int(rng.integers(2))]
        pot = pots[int(rng.integers(3))]
        n = int(rng.integers(2, 41))
        box = build_box(float(rng.random()), freq, pot, n)
        d = box.diagonal
        ref = oracles.dense_eigenvalues(d)
        fin = ref[np.isfinite(ref)]
        scale = box.scale
        # energies kept away from eigenvalues so that counts are well posed
        Es = []
        while len(Es) < 3:
            E = float(rng.uniform(np.min(fin) - 1, np.max(fin) + 1)) if fin.size else 0.0
            if not fin.size or np.min(np.abs(fin - E)) > 1e-6 * scale:
                Es.append(E)
        for E in Es:
            worst["count"] = max(worst["count"], abs(int(sturm_count(box, E)) - oracles.dense_count(d, E)))
        ev = eigenvalues(box).eigenvalues
        ok_inf = np.array_equal(np.isneginf(ev), np.isneginf(ref))
        diff = np.max(np.abs(ev[np.isfinite(ev)] - fin)) / scale if fin.size else 0.0
        worst["eig"] = max(worst["eig"], diff if ok_inf else math.inf)
        if not box.is_singular:
            for E in Es:
                s, ld = oracles.dense_logdet(d, E)
                mine = determinant(box, E)
                worst["det_sign"] += int(mine.sign != int(s))
                worst["det"] = max(worst["det"], abs(mine.log_magnitude - ld) / max(1.0, abs(ld)))
                i, j = sorted(int(v) for v in rng.integers(0, n, size=2))
                g = greens_entry(box, E, i, j)
                gd = oracles.dense_green(d, E, i, j)
                val = g.sign * math.exp(g.log_magnitude) if g.sign else 0.0
                worst["green"] = max(worst["green"], abs(val - gd) / max(abs(gd), 1e-300))
        boxes += 1
    checks = [
        Check("sturm_count vs dense", worst["count"], 0, worst["count"] == 0, "counting oracle"),
        Check("eigenvalues vs dense (relative to scale)", worst["eig"], t_eig,
              worst["eig"] <= t_eig, "eigenvalue oracle"),
        Check("log|det| vs slogdet (relative)", worst["det"], t_det, worst["det"] <= t_det,
              "determinant oracle"),
        Check("det sign mismatches", worst["det_sign"], 0, worst["det_sign"] == 0,
              "determinant oracle"),
        Check("Green entries vs dense solve (relative)", worst["green"], t_green,
              worst["green"] <= t_green, "Green's function oracle"),
    ]
    return CriterionResult(4, NAMES[4], checks, notes=[f"{boxes} random boxes"])


# ---------------------------------------------------------------- 5, 6

def criterion_5(seed=0, overrides=None) -> CriterionResult:
    rel = _tol(overrides, "thouless_transfer_rel")
    sabs = _tol(overrides, "synthetic_abs")
    g = golden()
    pot = make_sawtooth(20)
    ids = ids_build(g, pot, 4181)
    E = np.linspace(-2.0, 22.0, 12)
    Lt = thouless(ids, E)
    Lm = transfer_lognorm(0.1, g, pot, E, 2000)
    checks = []
    for e, a, b in zip(E, Lt, Lm):
        r = abs(a - b) / abs(a)
        checks.append(Check(f"E={e:.3f}", r, rel, r <= rel, "Thouless formula as definition"))
    # closed forms: a unit atom gives log|E - e0|; uniform on [a, b] gives
    # ((E-a) log|E-a| - (E-b) log|E-b|)/(b-a) - 1
    atom = synthetic_ids("atom", at=0.5)
    uni = synthetic_ids("uniform", a=-1.0, b=2.0)
    Es = np.array([-3.0, -1.5, 0.0, 0.25, 1.0, 1.9, 4.0])
    exact_atom = np.log(np.abs(Es - 0.5))
    with np.errstate(divide="ignore", invalid="ignore"):
        def xlog(u):
            return np.where(u == 0, 0.0, u * np.log(np.abs(u)))
        exact_uni = (xlog(Es + 1.0) - xlog(Es - 2.0)) / 3.0 - 1.0
    da = float(np.max(np.abs(thouless(atom, Es) - exact_atom)))
    du = float(np.max(np.abs(thouless(uni, Es) - exact_uni)))
    checks.append(Check("synthetic atom", da, sabs, da <= sabs, "closed-form Thouless"))
    checks.append(Check("synthetic uniform", du, sabs, du <= sabs, "closed-form Thouless"))
    return CriterionResult(5, NAMES[5], checks)


def criterion_6(seed=0, overrides=None) -> CriterionResult:
    tol = _tol(overrides, "floor_tol")
    checks = []
    for gam in (10.0, 20.0, 40.0):
        pot = make_sawtooth(gam)
        ids = ids_build(golden(), pot, 4181)
        rep = lyapunov_floor_check(lyapunov_table(ids), gam, tol)
        checks.append(Check(f"gamma={gam:g} min L - floor", rep.margin, -tol, rep.passed,
                            "Lyapunov floor log(gamma/2e)"))
    return CriterionResult(6, NAMES[6], checks)


# ---------------------------------------------------------------- 7

def criterion_7(seed=0, overrides=None) -> CriterionResult:
    rng = np.random.default_rng(seed + 7)
    checks = []
    for t in range(0, 7):
        worst, worst_mm = lagrange_trials(t, 1.0 / (t + 2), 10_000, rng)
        # equally spaced points attain the bound, so compare up to rounding
        checks.append(Check(f"Lagrange degree {t}: min max|p| / bound", worst, 1.0,
                            worst >= 1.0 - 1e-12, "polynomial lemma (d/2)^t t!"))
        checks.append(Check(f"Lagrange degree {t}: minimax / bound", worst_mm, 1.0,
                            worst_mm >= 1.0 - 1e-12, "polynomial lemma (d/2)^t t!"))
    g = golden()
    pot = make_sawtooth(20)
    valid, passed, nontrivial, rejected = 0, 0, 0, {}
    worst_margin = math.inf
    for trial in range(400):
        n = int(rng.choice([5, 8, 13]))
        E = float(rng.uniform(1.0, 19.0))
        iset = intersection_points(g, pot, n, E)
        width = (0.3 + 0.6 * rng.random()) / (10 * pot.gamma)
        if trial % 2 and iset.points.size:
            # place an intersection point inside the interval
            z = float(rng.choice(iset.points))
            lo = (z - width * float(rng.uniform(0.05, 0.95))) % 1.0
        else:
            lo = float(rng.random())
        K = 7
        pts = lo + (np.arange(K) + 0.5) * width / K
        b_minus = float(rng.choice([0.5, 0.1]))
        try:
            res = sampling_lemma_bound((lo, lo + width), pts, iset, pot.gamma, g, pot, b_minus)
        except SamplingPreconditionError as exc:
            rejected[exc.kind] = rejected.get(exc.kind, 0) + 1
            continue
        valid += 1
        passed += res.passed
        nontrivial += res.t > 0
        worst_margin = min(worst_margin, float(np.max(res.log_p_minus)) - res.log_bound)
    checks.append(Check("sampling lemma: failing trials", valid - passed, 0, valid == passed,
                        "sampling points: gamma^t (d/2)^t t! lower bound"))
    checks.append(Check("sampling lemma: admissible trials", valid, 100, valid >= 100,
                        "sampling points: enough admissible configurations"))
    checks.append(Check("sampling lemma: trials with t >= 1", nontrivial, 20, nontrivial >= 20,
                        "sampling points: intersection points inside the interval"))
    notes = [f"worst log-margin {worst_margin:.3f}", f"rejected: {dict(sorted(rejected.items()))}"]
    return CriterionResult(7, NAMES[7], checks, notes=notes)


# ---------------------------------------------------------------- 8

def _as_oracle(coll: GoodIntervalCollection):
    N1, N2 = coll.inner
    iv = {N1 + i: (int(coll.n1[i]), int(coll.n2[i])) for i in range(N2 - N1 + 1)}
    mus = {N1 + i: float(coll.mu[i]) for i in range(N2 - N1 + 1)}
    return iv, mus


def saturated_psi(coll: GoodIntervalCollection, left: float = 1.0, right: float = 1.0) -> SiteArray:
    """psi with equality in every regularity inequality, by one linear solve.

    Values outside the inner window are set to ``left``/``right``.
    """
    (A, B), (N1, N2) = coll.outer, coll.inner
    size = B - A + 1
    M = np.eye(size)
    rhs = np.zeros(size)
    for i in range(size):
        m = A + i
        if coll.is_inner(m):
            a, b, mu = coll.record(m)
            M[i, a - 1 - A] -= math.exp(-mu * (m - a))
            M[i, b + 1 - A] -= math.exp(-mu * (b - m))
        else:
            rhs[i] = left if m < N1 else right
    return SiteArray(A, np.linalg.solve(M, rhs))


def eigenvector_collection(n: int = 400, window: tuple[int, int] = (40, 100), length: int = 24,
                           x: float = 0.1, E_target: float = 3.3):
    """Collection certified by Poisson's formula on a genuine box eigenvector.

    Returns (collection, |psi| as SiteArray, eigenvalue). Sites are counted
    from the localization centre; exponents come from boundary Green entries.
    """
    g = golden()
    pot = make_sawtooth(20)
    box = build_box(x, g, pot, n, start=-(n // 2))
    E, c = central_eigenvalue(box, E_target - 0.5, E_target + 0.5)
    lp = stable_log_profile(box.diagonal, E, c, 0.0)
    psi = SiteArray(-c, np.exp(lp - lp.max()))
    N1, N2 = window
    sigma = SIGMA
    need = math.ceil(sigma * (length - 1))
    n1 = np.empty(N2 - N1 + 1, dtype=np.int64)
    n2 = np.empty_like(n1)
    mus = np.empty(N2 - N1 + 1)
    for i, m in enumerate(range(N1, N2 + 1)):
        best = None
        for a in range(m - (length - 1) + need, m - need + 1):
            lo = a + c
            sub = box.sub(lo, lo + length)
            left, right = greens_boundary_rows(sub, E)
            k = m - a
            mu = min(-left[k] / k, -right[k] / (length - 1 - k))
            if best is None or mu > best[0]:
                best = (mu, a)
        mus[i], n1[i] = best
        n2[i] = n1[i] + length - 1
    A, B = int(n1.min()) - 1, int(n2.max()) + 1
    coll = GoodIntervalCollection((A, B), (N1, N2), n1, n2, mus, float(mus.min()), length, sigma)
    return coll, psi, E


def criterion_8(seed=0, overrides=None) -> CriterionResult:
    rng = np.random.default_rng(seed + 8)
    checks = []
    mismatches = 0
    total_paths = 0
    for trial in range(100):
        window = int(rng.integers(10, 81))
        L = int(rng.integers(6, 11))
        coll = random_collection(rng, window, L, mu=1.0, mu_spread=1.0)
        m = int(rng.integers(0, window))
        w0 = min(min_weight(coll, m, "left")[0], min_weight(coll, m, "right")[0])
        cutoff = w0 + float(rng.uniform(4.0, 16.0))
        en = enumerate_paths(coll, m, cutoff)
        iv, mus = _as_oracle(coll)
        ref = oracles.paths_recursive(iv, coll.inner, m, mus, cutoff)
        mine = sorted((p.vertices, round(p.weight, 9)) for p in en.paths)
        theirs = sorted((tuple(v), round(w, 9)) for v, w in ref)
        mismatches += mine != theirs
        total_paths += len(mine)
    checks.append(Check("enumeration vs recursive oracle (mismatching collections)", mismatches, 0,
                        mismatches == 0, "terminating paths: enumeration"))

    # saturated collection: the path sum must reproduce psi(m)
    coll = block_collection(60, 12, 3.0)
    psi = saturated_psi(coll, 1.0, 0.5)
    worst = 0.0
    for m in (0, 17, 30, 45, 59):
        rep = verify_terminating_bound(coll, psi, m, rtol=1e-12)
        worst = max(worst, abs(rep.lhs - rep.path_sum) / rep.lhs - rep.remainder / rep.lhs)
        checks.append(Check(f"saturated block m={m}", rep.lhs, rep.path_sum + rep.remainder,
                            rep.passed, "terminating paths: expansion bound"))
    checks.append(Check("saturated block: |psi - path sum| beyond pruned mass", worst, 1e-9,
                        worst <= 1e-9, "terminating paths: expansion is an identity at equality"))

    # genuine eigenvectors
    for E_target, x in ((3.3, 0.1), (12.0, 0.37), (-0.5, 0.71)):
        coll, psi, E = eigenvector_collection(E_target=E_target, x=x)
        for m in (coll.inner[0], (coll.inner[0] + coll.inner[1]) // 2, coll.inner[1]):
            rep = verify_terminating_bound(coll, psi, m, rtol=1e-9)
            checks.append(Check(f"eigenvector E={E:.4f} m={m}", rep.lhs,
                                rep.path_sum + rep.remainder, rep.passed,
                                "terminating paths: bound on genuine eigenvectors"))

    # large-L synthetic collections
    for L in (2000, 8000, 32000):
        coll = random_collection(rng, 5 * L, L, mu=1.0, mu_spread=0.5, extra_len=L // 2)
        for m, side in ((L, "left"), (4 * L, "right"), (5 * L // 2, "left")):
            rep = dominating_check(coll, m, side)
            checks.append(Check(f"L={L} m={m} {side} (a={rep.a:.3f})", rep.log_sum, rep.log_bound,
                                rep.passed, "dominating path: exponent (1-a)"))
    return CriterionResult(8, NAMES[8], checks, notes=[f"{total_paths} oracle-compared paths"])


# ---------------------------------------------------------------- 9

LIOUVILLE_PREFIX = [0] + [1] * 6     # q_k = 13
LIOUVILLE_ENERGY = 3.3


def liouville_setup(ids_n: int = 100_000):
    """Engineered frequency with beta_k ~ L/2 at q_k = 13 and its box data."""
    pot = make_sawtooth(20)
    L0 = thouless(ids_build(golden(), pot, 4181), LIOUVILLE_ENERGY)
    f = liouville_spike(LIOUVILLE_PREFIX, 0.5 * L0, tail=30, precision_bits=512)
    k = len(LIOUVILLE_PREFIX) - 1
    # the huge q_{k+1} = 24058 is below 13^4, so C_d = 3 is needed to flag the scale
    rm = resonance_map(f, k, 0.05, c_d=3.0)
    ids = ids_build(f, pot, ids_n)
    return f, pot, rm, ids


def criterion_9(seed=0, overrides=None) -> CriterionResult:
    rel = _tol(overrides, "decay_dio_rel")
    dip_rel = _tol(overrides, "dip_rel")
    brel = _tol(overrides, "between_rel")
    g = golden()
    pot = make_sawtooth(20)
    ids = ids_build(g, pot, 4181)
    checks = []
    for E in (-0.5, 3.3, 12.0):
        p = decay_profile(g, pot, 987, E, ids, x=0.1)
        r = abs(p.overall_rate - p.L) / p.L
        checks.append(Check(f"golden n=987 E={p.E:.4f}: |slope-L|/L", r, rel, r <= rel,
                            "Diophantine decay rate L(E)"))
    f, pot, rm, ids2 = liouville_setup()
    n = rm.q_next // 2 + 50
    box = build_box(0.1, f, pot, n, start=-(n // 2))
    Et, _ = central_eigenvalue(box, LIOUVILLE_ENERGY - 0.05, LIOUVILLE_ENERGY + 0.05)
    p = decay_profile(f, pot, n, Et, ids2, x=0.1, rmap=rm, c_d=3.0)
    beta = math.log(rm.q_next) / rm.q_k
    fits = [ft for ft in p.fits if ft.k == rm.k]
    rate = float(np.mean([ft.rate for ft in fits]))
    dip = p.L - rate
    checks.append(Check(f"Liouville q_k={rm.q_k}: |dip-beta|/beta (dip={dip:.4f}, beta={beta:.4f})",
                        abs(dip - beta) / beta, dip_rel, abs(dip - beta) / beta <= dip_rel,
                        "Liouville annulus rate L - beta_k"))
    rr = resonant_recursion_check(p, rm, p.L)
    r = abs(rr.between_rate - p.L) / p.L
    checks.append(Check(f"Liouville between-resonance slope {rr.between_rate:.4f} vs L={p.L:.4f}",
                        r, brel, r <= brel, "Lyapunov decay between resonances"))
    notes = [f"Liouville E={Et:.6f} L={p.L:.4f} annulus rates "
             + ", ".join(f"{ft.side}={ft.rate:.4f}" for ft in fits),
             f"peak log r_1..r_4: " + ", ".join(f"{row[1]:.2f}" for row in rr.peak_rows[:4])]
    return CriterionResult(9, NAMES[9], checks, notes=notes)


# ---------------------------------------------------------------- 10

def criterion_10(seed=0, overrides=None) -> CriterionResult:
    checks = []
    bad = make_custom(lambda y: 20 * y + 3 * np.sin(8 * np.pi * y), 20.0, name="wiggly")
    rep = validate(bad, seed=seed)
    checks.append(Check("non-monotone potential rejected", rep.worst_defect, 0.0, not rep.passed,
                        "validation rejects non-monotone f"))
    # localization centre moved to a base-regime site m0
    g = golden()
    pot = make_sawtooth(20)
    ids = ids_build(g, pot, 4181)
    rm = resonance_map(g, g.index_of(55), 0.1)
    n = 400
    m0 = 40
    for x, E_target in ((0.1, 3.3), (0.37, 12.0)):
        box = build_box(x, g, pot, n, start=-(n // 2))
        E, c = central_eigenvalue(box, E_target - 0.5, E_target + 0.5)
        site = c - n // 2
        x_c = float(_orbit_points(g, [site - m0], x)[0])
        res = find_good_interval(x_c, m0, E, "base", rm, ids, pot)
        got = isinstance(res, GoodInterval)
        checks.append(Check(f"no good interval at the centre (E={E:.4f})",
                            res.mu_at_m if got else 0.0, 0.5 * thouless(ids, E), not got,
                            "the localization centre is not regular"))
        far = find_good_interval(float(_orbit_points(g, [site + 120 - m0], x)[0]), m0, E,
                                 "base", rm, ids, pot)
        checks.append(Check(f"good interval 120 sites away (E={E:.4f})",
                            getattr(far, "mu_at_m", 0.0), 0.5 * thouless(ids, E),
                            isinstance(far, GoodInterval), "control: regular far from the centre"))
    weak = make_sawtooth(0.5)
    ids_w = ids_build(g, weak, 4181)
    outcome = 0.0
    try:
        decay_profile(g, weak, 987, 0.3, ids_w, x=0.1)
        inconclusive = False
    except InconclusiveLocalization as exc:
        inconclusive, outcome = True, exc.ipr
    checks.append(Check("gamma=0.5 run is inconclusive (IPR)", outcome, 0.05, inconclusive,
                        "below the positivity regime no certificate"))
    return CriterionResult(10, NAMES[10], checks)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_criterion(i: int, seed: int = 0, overrides=None) -> CriterionResult:
    t = time.perf_counter()
    res = CRITERIA[i](seed=seed, overrides=overrides)
    res.seconds = time.perf_counter() - t
    res.budget = BUDGETS[i]
    return res


def run_suite(which=None, seed: int = 0, overrides=None, log=None) -> list[CriterionResult]:
    out = []
    for i in sorted(which or CRITERIA):
        r = run_criterion(i, seed, overrides)
        if log is not None:
            log(r.line())
        out.append(r)
    return out
