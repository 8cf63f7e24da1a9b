"""Command line front end: ``monoloc <cf|ids|ldt|localize|verify> --config c.json``.

Exit codes: 0 pass, 1 check failure, 2 config error, 3 precision or
resource error, 4 inconclusive localization.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .arithmetic import (PrecisionError, beta_estimate, discrepancy, frequency, golden,
                         liouville_spike, orbit, silver, three_distance_check)
from .operators import build_box, transfer_lognorm
from .potential import from_descriptor
from .spectral import (WindowRequired, default_energy_window, ids_build, ids_inverse_check,
                       lyapunov_floor, lyapunov_floor_check, lyapunov_table, synthetic_ids,
                       thouless)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "frequency": {
            "type": "object",
            "oneOf": [
                {"properties": {"coefficients": {"type": "array", "minItems": 2,
                                                 "items": {"type": "integer", "minimum": 0}}},
                 "required": ["coefficients"]},
                {"properties": {"kind": {"enum": ["golden", "silver"]},
                                "depth": {"type": "integer", "minimum": 4}},
                 "required": ["kind"]},
                {"properties": {"kind": {"const": "liouville"},
                                "prefix": {"type": "array", "minItems": 2,
                                           "items": {"type": "integer", "minimum": 0}},
                                "beta_target": {"type": "number", "exclusiveMinimum": 0},
                                "tail": {"type": "integer", "minimum": 2}},
                 "required": ["kind", "prefix", "beta_target"]},
            ],
            "properties": {"precision_bits": {"type": "integer", "minimum": 64, "maximum": 65536}},
        },
        "potential": {
            "type": "object",
            "properties": {"kind": {"enum": ["sawtooth", "log_singular", "step_linear"]},
                           "lambda": {"type": "number", "exclusiveMinimum": 0},
                           "mu": {"type": "number", "exclusiveMinimum": 0},
                           "offset": {"type": "number"},
                           "steps": {"type": "integer", "minimum": 0},
                           "height": {"type": "number", "minimum": 0}},
            "required": ["kind", "lambda"],
        },
        "scales": {
            "type": "object",
            "properties": {"n": {"type": "array", "items": {"type": "integer", "minimum": 2}},
                           "k": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
            "additionalProperties": False,
        },
        "energies": {
            "type": "object",
            "properties": {"values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                           "window": {"type": "array", "items": {"type": "number"},
                                      "minItems": 2, "maxItems": 2},
                           "points": {"type": "integer", "minimum": 2, "maximum": 100000}},
            "additionalProperties": False,
        },
        "cutoffs": {
            "type": "object",
            "properties": {"C_d": {"type": "number", "minimum": 1, "maximum": 16},
                           "tau": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.125},
                           "sigma": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.25}},
            "additionalProperties": False,
        },
        "ids": {
            "type": "object",
            "properties": {"n": {"type": "integer", "minimum": 10},
                           "grid_points": {"type": "integer", "minimum": 16, "maximum": 100000},
                           "transfer_n": {"type": "integer", "minimum": 10},
                           "synthetic_selftest": {"type": "boolean"}},
            "additionalProperties": False,
        },
        "localize": {
            "type": "object",
            "properties": {"n": {"type": "integer", "minimum": 16},
                           "x": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                           "k": {"type": "integer", "minimum": 0},
                           "ipr_min": {"type": "number", "minimum": 0, "maximum": 1},
                           "coverage": {"type": "object",
                                        "properties": {"k": {"type": "integer", "minimum": 1},
                                                       "m": {"type": "array",
                                                             "items": {"type": "integer"}}},
                                        "required": ["k", "m"], "additionalProperties": False}},
            "additionalProperties": False,
        },
        "verify": {
            "type": "object",
            "properties": {"criteria": {"type": "array", "minItems": 1,
                                        "items": {"type": "integer", "minimum": 1, "maximum": 10}},
                           "tolerances": {"type": "object",
                                          "additionalProperties": {"type": "number"}}},
            "additionalProperties": False,
        },
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
}


class ConfigError(ValueError):
    def __init__(self, pointer: str, msg: str):
        super().__init__(f"{pointer or '/'}: {msg}")
        self.pointer = pointer


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate_config(cfg) -> dict:
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(cfg), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        e = jsonschema.exceptions.best_match(errors)
        # oneOf failures: report the deepest branch error that names a location
        while e.context:
            e = jsonschema.exceptions.best_match(e.context)
        raise ConfigError(_pointer(e.absolute_path), e.message)
    tol = cfg.get("verify", {}).get("tolerances", {})
    from .acceptance import TOLERANCES
    for key in tol:
        if key not in TOLERANCES:
            raise ConfigError(f"/verify/tolerances/{key}", "unknown tolerance name")
    return cfg


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("", f"config file {path} not found")
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}")
    return validate_config(cfg)


def build_frequency(cfg: dict, precision_bits: int | None = None):
    d = cfg.get("frequency", {"kind": "golden"})
    bits = precision_bits or d.get("precision_bits")
    kind = d.get("kind")
    if "coefficients" in d:
        coeffs = d["coefficients"]
        if any(a < 1 for a in coeffs[1:]):
            i = next(i for i, a in enumerate(coeffs[1:], 1) if a < 1)
            raise ConfigError(f"/frequency/coefficients/{i}", "partial quotients must be >= 1")
        return frequency(coeffs, bits or 256)
    if kind == "golden":
        return golden(d.get("depth", 60), bits or 256)
    if kind == "silver":
        return silver(d.get("depth", 40), bits or 256)
    if kind == "liouville":
        if any(a < 1 for a in d["prefix"][1:]):
            raise ConfigError("/frequency/prefix", "partial quotients must be >= 1")
        return liouville_spike(d["prefix"], d["beta_target"], d.get("tail", 30), bits or 512)
    raise ConfigError("/frequency", "unrecognised frequency descriptor")


def build_potential(cfg: dict):
    d = cfg.get("potential", {"kind": "sawtooth", "lambda": 20.0})
    if d["kind"] == "log_singular" and "mu" not in d:
        raise ConfigError("/potential", "'mu' is a required property")
    return from_descriptor(d)


def energy_grid(cfg: dict, pot, required: bool = True):
    d = cfg.get("energies", {})
    if "values" in d:
        return np.array(sorted(d["values"]), dtype=float)
    if "window" in d:
        lo, hi = d["window"]
        if not hi > lo:
            raise ConfigError("/energies/window", "window must be increasing")
        return np.linspace(lo, hi, d.get("points", 12))
    lo, hi = default_energy_window(pot)
    return np.linspace(lo, hi, d.get("points", 12))


def threads() -> int:
    try:
        return max(1, int(os.environ.get("MONOLOC_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Map in a thread pool capped by MONOLOC_THREADS; results keep input order."""
    items = list(items)
    nt = min(threads(), len(items) or 1)
    if nt == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=nt) as ex:
        return list(ex.map(fn, items))


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def check(name, observed, bound, passed, anchor, **extra) -> dict:
    out = {"name": name, "observed": _num(observed), "bound": _num(bound),
           "slack": _num(bound - observed) if bound is not None else None,
           "passed": bool(passed), "anchor": anchor}
    out.update(extra)
    return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


class Run:
    """Collects checks and tables, then writes report.json and CSV files."""

    def __init__(self, command: str, cfg: dict, seed: int):
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.checks: list = []
        self.sections: dict = {}
        self.tables: dict = {}
        self.inconclusive = False

    def add(self, *checks):
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def report(self) -> dict:
        canon = json.dumps(self.cfg, sort_keys=True, separators=(",", ":"))
        return {
            "command": self.command,
            "provenance": {"config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
                           "code_version": __version__, "seed": self.seed},
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "checks": self.checks,
            **self.sections,
        }

    def write(self, out_dir: str | None, stream=sys.stdout):
        text = json.dumps(self.report(), sort_keys=True, indent=2) + "\n"
        if out_dir:
            p = Path(out_dir)
            p.mkdir(parents=True, exist_ok=True)
            (p / f"{self.command}_report.json").write_text(text)
            for name, body in sorted(self.tables.items()):
                (p / name).write_text(body)
        bad = [c for c in self.checks if not c["passed"]]
        stream.write(f"{self.command}: {len(self.checks)} checks, {len(bad)} failing"
                     f"{', inconclusive' if self.inconclusive else ''}\n")
        for c in bad[:20]:
            stream.write(f"  FAIL {c['name']}: observed {c['observed']} vs bound {c['bound']}"
                         f" [{c['anchor']}]\n")
        return text


# ---------------------------------------------------------------- commands

def cmd_cf(cfg, args) -> Run:
    run = Run("cf", cfg, args.seed)
    f = build_frequency(cfg, args.precision_bits)
    cf = f.cf
    run.sections["convergents"] = [[int(p), int(q)] for p, q in zip(cf.numerators, cf.denominators)]
    betas = beta_estimate(cf)
    run.sections["beta"] = [[k, _num(r), _num(b)] for k, r, b in betas]
    run.sections["beta_convention"] = "beta_k = log(q_{k+1})/q_k"
    run.tables["beta.csv"] = _csv(["k", "q_k", "q_k1", "ratio", "running_max"],
                                  [(k, cf.denominators[k], cf.denominators[k + 1], r, b)
                                   for k, r, b in betas])
    ks = cfg.get("scales", {}).get("k")
    limit = 100_000
    if ks is None:
        ks = [k for k in range(1, len(cf) - 1) if cf.denominators[k] <= 2000]
    rows = []
    for k in ks:
        if not 1 <= k < len(cf) - 1:
            raise ConfigError("/scales/k", f"scale index {k} outside 1..{len(cf) - 2}")
        if cf.denominators[k] > limit:
            raise PrecisionError(f"q_{k} = {cf.denominators[k]} too large for the gap check")
        r = three_distance_check(f, k)
        run.add(check(f"three-distance k={k} q={r.q}", len(r.failures), 0, r.passed,
                      "three-distance gaps and sandwich bounds", degenerate=r.degenerate))
        rows.append((k, r.q, r.expected_small, r.expected_large, int(r.degenerate), int(r.passed)))
    run.tables["three_distance.csv"] = _csv(["k", "q", "small_gap", "large_gap", "degenerate",
                                             "passed"], rows)
    drows = []
    for k in ks:
        q = cf.denominators[k]
        d = discrepancy(orbit(0, f, q)).value
        # q points of an orbit of length q_k have discrepancy at most 2/q_k
        run.add(check(f"discrepancy n=q_{k}={q}", d, 2.0 / q, d <= 2.0 / q,
                      "discrepancy of q_k orbit points"))
        drows.append((k, q, d, 2.0 / q))
    run.tables["discrepancy.csv"] = _csv(["k", "n", "discrepancy", "bound"], drows)
    return run


def _ids_n(cfg, f) -> int:
    n = cfg.get("ids", {}).get("n")
    if n is not None:
        return n
    qs = [q for q in f.denominators if q <= 5000]
    return qs[-1] if qs else 1000


def cmd_ids(cfg, args) -> Run:
    run = Run("ids", cfg, args.seed)
    f = build_frequency(cfg, args.precision_bits)
    pot = build_potential(cfg)
    icfg = cfg.get("ids", {})
    if icfg.get("synthetic_selftest"):
        atom = synthetic_ids("atom", at=0.5)
        uni = synthetic_ids("uniform", a=-1.0, b=2.0)
        Es = np.array([-3.0, 0.0, 1.0, 4.0])
        ea = float(np.max(np.abs(thouless(atom, Es) - np.log(np.abs(Es - 0.5)))))
        xl = lambda u: np.where(u == 0, 0.0, u * np.log(np.abs(np.where(u == 0, 1.0, u))))
        eu = float(np.max(np.abs(thouless(uni, Es) - ((xl(Es + 1) - xl(Es - 2)) / 3 - 1))))
        run.add(check("synthetic atom", ea, 1e-6, ea <= 1e-6, "closed-form Thouless"),
                check("synthetic uniform", eu, 1e-6, eu <= 1e-6, "closed-form Thouless"))
    ew = cfg.get("energies", {}).get("window")
    lo, hi = ew if ew else default_energy_window(pot)
    grid = np.linspace(lo, hi, icfg.get("grid_points", 1024))
    n = _ids_n(cfg, f)
    ids = ids_build(f, pot, n, grid)
    lt = lyapunov_table(ids)
    run.tables["ids.csv"] = ids.to_csv(lt.values)
    run.sections["ids"] = ids.metadata()
    fl = lyapunov_floor_check(lt, pot.gamma)
    run.add(check("Lyapunov floor (min L - floor)", fl.margin, -0.02, fl.passed,
                  "Lyapunov floor log(gamma/2e)", floor=fl.floor, argmin=fl.argmin))
    if pot.bounded_below:
        inv = ids_inverse_check(ids, pot)
        run.add(check("IDS inverse vs potential", inv.max_deviation, inv.bound, inv.passed,
                      "inverse of the IDS tracks f"))
    tn = icfg.get("transfer_n", 2000)
    Es = energy_grid(cfg, pot) if "energies" in cfg else np.linspace(lo, hi, 14)[1:-1]
    Lt = np.atleast_1d(thouless(ids, Es))
    Lm = np.atleast_1d(transfer_lognorm(0.1, f, pot, Es, tn))
    rows = []
    for e, a, b in zip(Es, Lt, Lm):
        r = abs(a - b) / abs(a) if a else math.inf
        run.add(check(f"Thouless vs transfer E={e:.4f}", r, 0.05, r <= 0.05,
                      "Thouless formula as definition"))
        rows.append((e, a, b, r))
    run.tables["transfer.csv"] = _csv(["E", "L_thouless", "L_transfer", "rel_gap"], rows)
    run.sections["floor"] = _num(lyapunov_floor(pot.gamma))
    return run


def cmd_ldt(cfg, args) -> Run:
    from .arithmetic import choose_scale
    from .ldt import ldt_verify, uniform_upper_check
    run = Run("ldt", cfg, args.seed)
    f = build_frequency(cfg, args.precision_bits)
    pot = build_potential(cfg)
    c_d = cfg.get("cutoffs", {}).get("C_d", 4.0)
    sc = cfg.get("scales", {})
    ns = list(sc.get("n", []))
    for k in sc.get("k", []):
        if k >= len(f.denominators):
            raise ConfigError("/scales/k", f"scale index {k} beyond the coefficient window")
        ns.append(f.denominators[k])
    ns = sorted(set(ns)) or [34, 55, 89]
    for n in ns:
        if n > f.max_orbit_length:
            raise PrecisionError(f"n={n} exceeds the certified orbit length {f.max_orbit_length}")
    Es = energy_grid(cfg, pot) if "energies" in cfg else np.linspace(
        *default_energy_window(pot), 7)[1:-1]
    ids = ids_build(f, pot, _ids_n(cfg, f))

    def one(job):
        n, E = job
        box = build_box(0.1, f, pot, n)
        return n, E, ldt_verify(box, E, None, ids, c_d), uniform_upper_check(box, E, None, ids, c_d)

    rows, trend = [], {}
    shortcut = False
    for n, E, rep, up in pmap(one, [(n, float(E)) for n in ns for E in Es]):
        run.add(check(f"n={n} E={E:.4f} identity", rep.identity_gap, 1e-9,
                      rep.identity_gap <= 1e-9, "product identity P^< P^mid P^> = det"))
        for c in rep.checks + [up]:
            run.add(check(f"n={n} E={E:.4f} {c.name}", c.observed, c.bound, c.passed, c.anchor))
            rows.append((n, E, c.name, c.observed, c.bound, c.bound - c.observed, int(c.passed)))
        mid = rep.checks[0]
        trend.setdefault(n, []).append(mid.observed / mid.bound if mid.bound else math.inf)
        shortcut |= bool(rep.extras.get("bounded_shortcut"))
    run.tables["ldt.csv"] = _csv(["n", "E", "check", "observed", "bound", "slack", "passed"], rows)
    run.sections["slack_trend"] = [[n, choose_scale(n, f).q, _num(max(v))] for n, v in sorted(trend.items())]
    run.sections["bounded_shortcut"] = shortcut
    if shortcut:
        run.sections["notes"] = ["bounded potential: B+ exceeds every |f - E| + 2, so P^> "
                                 "has no factors (p_plus = 1)"]
    return run


def cmd_localize(cfg, args) -> Run:
    from .ldt import GoodInterval, find_good_interval, resonance_map, _orbit_points
    from .patching import InconclusiveLocalization, decay_profile, resonant_recursion_check
    run = Run("localize", cfg, args.seed)
    f = build_frequency(cfg, args.precision_bits)
    pot = build_potential(cfg)
    lc = cfg.get("localize", {})
    cut = cfg.get("cutoffs", {})
    tau, c_d, sigma = cut.get("tau", 0.05), cut.get("C_d", 4.0), cut.get("sigma", 0.2)
    n = lc.get("n", 987)
    x = lc.get("x", 0.1)
    if n // 2 + 1 > f.max_orbit_length:
        raise PrecisionError(f"box n={n} exceeds the certified orbit length")
    Es = energy_grid(cfg, pot) if "energies" in cfg else np.array([3.3])
    idn = cfg.get("ids", {}).get("n")
    if idn is None:
        idn = max(4181, min(20 * n, 200_000))
    ids = ids_build(f, pot, idn)
    rmap = None
    if "k" in lc:
        rmap = resonance_map(f, lc["k"], tau, c_d)
        run.sections["resonance_map"] = {k: _num(v) if isinstance(v, float) else v
                                         for k, v in rmap.as_dict().items()}
    inconclusive = 0
    profiles = []
    for E in Es:
        try:
            p = decay_profile(f, pot, n, float(E), ids, x=x, tau=tau, c_d=c_d,
                              ipr_min=lc.get("ipr_min", 0.05), rmap=rmap)
        except InconclusiveLocalization as exc:
            inconclusive += 1
            profiles.append({"E_target": float(E), "inconclusive": True, "ipr": _num(exc.ipr)})
            continue
        tag = f"E{p.E:.6f}"
        run.tables[f"profile_{tag}.csv"] = p.to_csv()
        r = abs(p.overall_rate - p.L) / p.L
        run.add(check(f"E={p.E:.6f} slope vs L", r, 0.15, r <= 0.15, "Diophantine decay rate L(E)"))
        fits = [[ft.k, ft.side, ft.lo, ft.hi, _num(ft.rate), _num(ft.predicted), ft.liouville]
                for ft in p.fits]
        entry = {"E": _num(p.E), "L": _num(p.L), "ipr": _num(p.ipr), "rate": _num(p.overall_rate),
                 "center_site": int(p.center_site), "annulus_fits": fits}
        if rmap is not None and rmap.liouville:
            beta = math.log(rmap.q_next) / rmap.q_k
            kf = [ft.rate for ft in p.fits if ft.k == rmap.k]
            if kf:
                dip = p.L - float(np.mean(kf))
                run.add(check(f"E={p.E:.6f} annulus dip vs beta_k", abs(dip - beta) / beta, 0.3,
                              abs(dip - beta) / beta <= 0.3, "Liouville annulus rate L - beta_k",
                              dip=_num(dip), beta_k=_num(beta)))
            rr = resonant_recursion_check(p, rmap, p.L)
            br = abs(rr.between_rate - p.L) / p.L
            run.add(check(f"E={p.E:.6f} between-resonance slope", br, 0.2, br <= 0.2,
                          "Lyapunov decay between resonances"))
            entry["resonances"] = {k: (_num(v) if isinstance(v, float) else v)
                                   for k, v in rr.as_dict().items()}
        profiles.append(entry)
    run.sections["profiles"] = profiles
    cov = lc.get("coverage")
    if cov:
        rm = resonance_map(f, cov["k"], tau, c_d)
        rows = []
        for m in cov["m"]:
            try:
                regime = rm.classify(m)
                res = find_good_interval(x, m, float(Es[0]), regime, rm, ids, pot, sigma, c_d)
            except ValueError as exc:
                rows.append((m, "n/a", 0, "", "", str(exc)))
                continue
            if isinstance(res, GoodInterval):
                rows.append((m, regime, 1, res.window[0], res.window[1], repr(res.mu_at_m)))
            else:
                rows.append((m, regime, 0, "", "", res.reason))
        run.tables["coverage.csv"] = _csv(["m", "regime", "certified", "n1", "n2", "mu_or_reason"], rows)
        run.sections["coverage"] = {"certified": sum(r[2] for r in rows), "points": len(rows)}
    if inconclusive and inconclusive == len(Es):
        run.inconclusive = True
    return run


def cmd_verify(cfg, args) -> Run:
    from .acceptance import run_suite
    run = Run("verify", cfg, args.seed)
    vc = cfg.get("verify", {})
    res = run_suite(vc.get("criteria"), seed=args.seed, overrides=vc.get("tolerances"),
                    log=lambda line: print(line, flush=True))
    run.sections["criteria"] = [r.as_dict() for r in res]
    for r in res:
        run.add(check(f"criterion {r.number}: {r.name}", len(r.failures()), 0, r.passed,
                      f"acceptance criterion {r.number}"))
    run.tables["timings.csv"] = _csv(["criterion", "seconds", "budget"],
                                     [(r.number, r.seconds, r.budget) for r in res])
    return run


COMMANDS = {"cf": cmd_cf, "ids": cmd_ids, "ldt": cmd_ldt, "localize": cmd_localize,
            "verify": cmd_verify}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monoloc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--precision-bits", type=int, default=None)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else validate_config({})
        if args.precision_bits is not None and args.precision_bits < 64:
            raise ConfigError("/frequency/precision_bits", "must be >= 64")
        args.seed = cfg.get("seed", 0) if args.seed is None else args.seed
        run = COMMANDS[args.command](cfg, args)
    except (ConfigError, WindowRequired) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PrecisionError, MemoryError) as exc:
        print(f"precision/resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    run.write(args.out or cfg.get("output_dir"))
    if run.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if run.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
