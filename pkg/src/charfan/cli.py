"""Command line front end: ``charfan {pencil,richness,riccati,claws,geoflow,all}``.

Every run reads one TOML config, writes a schema-versioned JSON report (plus
CSV tables and SVG plots on request) and exits with 0 on success, 2 when an
analysis verdict disagrees with the config's expectation, 1 on config errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, svg
from .config import (build_cubic_state, build_diagonal, build_system, candidate_texts,
                     catalog_files, library_golden, load_config, parse_in, require)
from .conservation import (ConservationCandidate, invertible_rotations, multiplier_at,
                           verify_conservation_form, verify_diagonal_from_claws)
from .errors import CharfanError, ConfigError, DegeneratePencilError
from .fields import SimpleWaveSpec, build_simple_wave
from .geoflow import (PhaseState, drift_study, fan_match, fibre_critical_points, fibre_values,
                      integrate_geodesic, invariant_jacobian, system22_residual,
                      transport_residual, verify_P_vs_Fphi, CubicIntegralState)
from .pencil import (DEFAULT_TOL, characteristic_fan, classify_state, hyperbolicity_scan,
                     is_nonzero_pencil, pencil_at)
from .riccati import cross_check_w, measured_w, predict_blowup
from .richness import G_spread, check_richness, residual_Phi, residual_R

SCHEMA_VERSION = 1
FORMATS = ("csv", "json", "svg")


class Run:
    """Output sink for one config: report sections plus file artifacts."""

    def __init__(self, cfg: dict, out: Path, formats, seed: int, tol: float | None):
        self.cfg = cfg
        self.out = out
        self.formats = set(formats)
        self.seed = seed
        self.tol = tol
        self.results: dict = {}
        self.verdicts: dict = {}
        self.checks: dict = {}
        self.artifacts: list = []

    def tol_or(self, default: float) -> float:
        return default if self.tol is None else self.tol

    def check(self, name: str, ok: bool) -> None:
        self.checks[name] = bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def path(self, filename: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        self.artifacts.append(filename)
        return self.out / filename

    def write_csv(self, filename: str, header, rows) -> None:
        if "csv" not in self.formats:
            return
        with open(self.path(filename), "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            for row in rows:
                wr.writerow([_cell(v) for v in row])

    def want_svg(self) -> bool:
        return "svg" in self.formats


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _fl(seq) -> list:
    return [float(v) for v in seq]


# -- pencil ------------------------------------------------------------------

def cmd_pencil(run: Run) -> None:
    cfg = run.cfg
    sys_ = build_system(require(cfg, "system", "system"))
    sec = cfg.get("pencil", {})
    tol = run.tol_or(sec.get("tol", DEFAULT_TOL))
    state = tuple(float(v) for v in require(sec, "state", "pencil"))
    P = pencil_at(sys_, state)
    res = {"state": list(state), "coefficients": list(P.coeffs), "interpolation_condition": P.condition}
    closed = None
    geo = cfg["system"].get("geodesic")
    if geo is not None:
        a, b = float(geo["a"]), float(geo["b"])
        u, v, L = state
        closed = [v + 3 * b * L, -u - 9 * a * L, v - 9 * b * L, -u + 3 * a * L]
        res["closed_form"] = closed
        res["closed_form_deviation"] = max(abs(p - q) for p, q in zip(P.coeffs, closed))
    if is_nonzero_pencil(P, tol):
        fan = characteristic_fan(P, tol)
        res["fan"] = {"angles": fan.angles, "strict": fan.strict, "min_gap": fan.min_gap,
                      "residuals": fan.residuals}
        cls = "strict" if fan.strict else "non-strict"
        run.write_csv("fan.csv", ["angle", "residual"], zip(fan.angles, fan.residuals))
    else:
        fan = None
        res["fan"] = None
        cls = "pencil-degenerate"
    res["classification"] = cls
    if "scan" in sec:
        sc = sec["scan"]
        rep = hyperbolicity_scan(sys_, require(sc, "lower", "pencil.scan"),
                                 require(sc, "upper", "pencil.scan"), int(sc.get("resolution", 5)), tol)
        degenerate = [list(p) for p, lab in rep.nodes if lab == "pencil-degenerate"]
        res["scan"] = {"counts": rep.counts, "degenerate_nodes": degenerate,
                       "flags_degeneracy": bool(degenerate)}
        run.write_csv("scan.csv", list(sys_.variables) + ["class"], [list(p) + [lab] for p, lab in rep.nodes])
    run.results["pencil"] = res
    run.verdicts["classification"] = cls
    run.check("classification", cls == sec.get("expect", "strict"))
    if "expect_fan" in sec and fan is not None:
        exp = sorted(float(a) for a in sec["expect_fan"])
        dev = max(abs(p - q) for p, q in zip(fan.angles, exp)) if len(exp) == len(fan.angles) else math.inf
        res["expected_fan_deviation"] = dev
        run.check("fan", dev <= 1e-10)
    if "expect_degenerate_scan" in sec:
        run.check("scan_degeneracy", res.get("scan", {}).get("flags_degeneracy") == sec["expect_degenerate_scan"])
    if run.want_svg():
        phi = np.linspace(0.0, math.pi, 361)
        markers = [(a, 0.0, f"{a:.4f}") for a in (fan.angles if fan else [])]
        svg.line_plot(run.path("pencil.svg"), [("P(cos phi, sin phi)", phi, P.on_circle(phi))],
                      title=f"pencil at {state}", xlabel="phi", ylabel="P", markers=markers)


# -- richness ------------------------------------------------------------------

def cmd_richness(run: Run) -> None:
    cfg = run.cfg
    diag = build_diagonal(require(cfg, "diagonal", "diagonal"))
    sec = cfg.get("richness", {})
    tol = run.tol_or(sec.get("tol", 1e-8))
    points = diag.sample(int(sec.get("samples", 100)), run.seed)
    rep = check_richness(diag, points, tol)
    res = {"system": diag.label, "n": diag.n, "report": rep.to_dict()}
    golden = sec.get("golden")
    if golden is None and "library" in cfg["diagonal"]:
        g = library_golden(cfg["diagonal"]["library"])
        golden = None if g is None else {"triple": list(g[0]), "point": list(g[1])}
    if golden is not None and diag.n >= 3:
        i, j, k = (int(t) for t in golden["triple"])
        pt = tuple(float(v) for v in golden["point"])
        res["golden"] = {"triple": [i, j, k], "point": list(pt),
                         "residual_R": residual_R(diag, i, j, k, pt),
                         "residual_Phi": residual_Phi(diag, i, j, k, pt)}
    if diag.n >= 3 and diag.lower is not None:
        lo, hi = np.array(diag.lower), np.array(diag.upper)
        base = tuple(_fl(lo + 0.25 * (hi - lo)))
        target = tuple(_fl(lo + 0.75 * (hi - lo)))
        pot = []
        for j in range(diag.n):
            vals, spread = G_spread(diag, j, base, target)
            pot.append({"j": j, "values": vals, "spread": spread})
        res["potential"] = {"base": list(base), "target": list(target), "by_family": pot,
                            "max_spread": max(p["spread"] for p in pot),
                            "closed": max(p["spread"] for p in pot) <= 1e-8}
    run.results["richness"] = res
    run.verdicts["Phi"] = rep.verdict_Phi
    run.verdicts["R"] = rep.verdict_R
    if "expect" in sec:
        run.check("verdict", rep.verdict_Phi == sec["expect"])
    run.check("R_equals_Phi", rep.verdict_R == rep.verdict_Phi or rep.verdict_R == "undetermined")
    run.write_csv("residuals.csv", ["i", "j", "k"] + [f"r{m + 1}" for m in range(diag.n)] + ["res_R", "res_Phi"],
                  ([*e.triple, *e.point, "" if e.residual_R is None else e.residual_R, e.residual_Phi]
                   for e in rep.entries))
    if run.want_svg() and rep.entries:
        vals = [abs(e.residual_Phi) + 1e-300 for e in rep.entries]
        svg.line_plot(run.path("residuals.svg"),
                      [("log10 |res_Phi|", list(range(len(vals))), np.log10(vals))],
                      title=f"(Phi) residuals: {diag.label}", xlabel="evaluation", ylabel="log10")


# -- riccati ---------------------------------------------------------------------

def cmd_riccati(run: Run) -> None:
    cfg = run.cfg
    diag = build_diagonal(require(cfg, "diagonal", "diagonal"))
    wv = require(cfg, "wave", "wave")
    tr = cfg.get("trace", {})
    spec = SimpleWaveSpec(diag, int(require(wv, "active", "wave")),
                          tuple(_fl(require(wv, "state", "wave"))), tuple(_fl(require(wv, "origin", "wave"))),
                          tuple(_fl(require(wv, "direction", "wave"))),
                          parse_in(require(wv, "profile", "wave"), ("xi",), "wave"),
                          tuple(_fl(require(wv, "xi_range", "wave"))))
    field_ = build_simple_wave(spec, tuple(_fl(require(wv, "bounds", "wave"))), allow_crossing=True)
    xi0 = float(tr.get("xi0", 0.0))
    start = field_.line_data(xi0)["q"]
    W0 = tr.get("W0")
    result = predict_blowup(field_, diag, spec.active, start, W0=None if W0 is None else float(W0),
                            step=tr.get("step"), max_length=float(require(tr, "max_length", "trace")),
                            hint=xi0)
    s_c = field_.crossing_length(xi0)
    res = {"start": list(start), "xi0": xi0, "step": result.curve.step, "samples": len(result.curve.s),
           "terminated": result.curve.terminated, "w0": result.w0, "W0": result.trace.W0,
           "s_star": result.s_star, "crossing_length": s_c, "verdict": result.verdict,
           "catastrophe": None if field_.catastrophe is None else list(field_.catastrophe)}
    if result.s_star is not None and s_c is not None:
        res["s_star_relative_error"] = abs(result.s_star - s_c) / s_c
    wm = measured_w(field_, diag, spec.active, result.curve)
    if W0 is None:
        dev, wmax = cross_check_w(field_, diag, spec.active, result.curve, result.trace)
        res["cross_check"] = {"deviation": dev, "max_abs_w": wmax}
        run.check("cross_check", dev <= 1e-4 * max(wmax, 1e-12))
    else:
        res["cross_check"] = None  # W0 supplied by hand; the field's own w no longer applies
    if result.s_star is None and W0 is None:
        aw = np.abs(wm)
        res["w_monotone_decay"] = bool(np.all(np.diff(aw) <= 1e-12 * aw[0]))
        run.check("decay", res["w_monotone_decay"])
    run.results["riccati"] = res
    run.verdicts["blowup"] = result.verdict
    if "expect" in tr:
        run.check("verdict", result.verdict == tr["expect"])
    if "csv" in run.formats:
        result.trace.to_csv(run.path("trace.csv"), result.curve)
    if run.want_svg():
        s = result.trace.s
        W = np.where(np.abs(result.trace.W) < 1e6, result.trace.W, np.nan)
        vl = [(result.s_star, "s*")] if result.s_star is not None else []
        svg.line_plot(run.path("riccati.svg"), [("W (Riccati)", s, W), ("w measured", s, wm)],
                      title="transversal derivative along the characteristic", xlabel="s",
                      ylabel="W, w", vlines=vl)


# -- claws -----------------------------------------------------------------------

def _strict_states(sys_, lower, upper, count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(50 * count):
        if len(out) == count:
            break
        p = tuple(_fl(rng.uniform(lower, upper)))
        if classify_state(sys_, p) == "strict":
            out.append(p)
    return out


def cmd_claws(run: Run) -> None:
    cfg = run.cfg
    sec = cfg.get("claws", {})
    tol = run.tol_or(sec.get("tol", 1e-10))
    count = int(sec.get("samples", 20))
    g, h = candidate_texts(require(cfg, "candidate", "candidate"))
    res = {}
    if "diagonal" in cfg:
        diag = build_diagonal(cfg["diagonal"])
        cand = ConservationCandidate(tuple(parse_in(t, diag.names, "candidate") for t in g),
                                     tuple(parse_in(t, diag.names, "candidate") for t in h))
        rep = verify_diagonal_from_claws(diag, cand, diag.sample(count, run.seed), tol)
        sys_ = None
    else:
        sys_ = build_system(require(cfg, "system", "system"))
        cand = ConservationCandidate(tuple(parse_in(t, sys_.variables, "candidate") for t in g),
                                     tuple(parse_in(t, sys_.variables, "candidate") for t in h))
        pts = _strict_states(sys_, require(sec, "lower", "claws"), require(sec, "upper", "claws"),
                             count, run.seed)
        rep = verify_conservation_form(sys_, cand, pts, tol)
        spreads = []
        for p in pts:
            A, B = sys_.matrices(p)
            r = [multiplier_at(sys_, cand, p, t, tol).residual for t in invertible_rotations(A, B)]
            spreads.append(max(r) - min(r))
        res["rotation_residual_spread"] = max(spreads, default=0.0)
    res["report"] = rep.to_dict()
    run.results["claws"] = res
    run.verdicts["conservation"] = rep.verdict
    run.check("verdict", rep.verdict == sec.get("expect", "pass"))
    if "expect_identity" in sec:
        run.check("identity", rep.max_deviation_from_identity() <= float(sec["expect_identity"]))
    run.write_csv("multipliers.csv", ["point", "theta", "residual", "det_C", "max_abs_C_minus_I", "ok"],
                  ([" ".join(repr(v) for v in s.point), s.theta, s.residual, s.det_C,
                    float(np.max(np.abs(s.C - np.eye(len(s.point))))), s.ok] for s in rep.samples))


# -- geoflow ---------------------------------------------------------------------

def cmd_geoflow(run: Run) -> None:
    cfg = run.cfg
    sec = require(cfg, "geoflow", "geoflow")
    state = build_cubic_state(sec)
    res = {"periodicity_defect": state.periodicity_defect()}
    run.check("periodic", res["periodicity_defect"] <= 1e-9)

    flow = sec.get("flow")
    if flow is not None:
        start = PhaseState(*_fl(require(flow, "start", "geoflow.flow")))
        T, dt = float(require(flow, "T", "geoflow.flow")), float(require(flow, "dt", "geoflow.flow"))
        every = max(1, int(round(float(flow.get("record_every", 0.01)) / dt)))
        traj = integrate_geodesic(state.metric, start, T, dt, state, every=every)
        drifts = {q: traj.drift(q) for q in ("H", "p1", "p2", "F")}
        res["flow"] = {"T": T, "dt": dt, "drift": drifts}
        for q, lim in flow.get("drift_tol", {}).items():
            run.check(f"drift_{q}", drifts[q] <= float(lim))
        if "halving_dts" in flow:
            study = drift_study(state.metric, start, T, _fl(flow["halving_dts"]), state, ("H", "F"))
            res["flow"]["halving"] = study
            lo, hi = flow.get("halving_ratio", [12.0, 20.0])
            run.check("halving", all(lo <= r <= hi for q in ("H", "F") for r in study["ratio"][q]))
        run.write_csv("trajectory.csv", ["t", "x", "y", "p1", "p2", "H", "F"],
                      zip(traj.t, traj.x % 1.0, traj.y % 1.0, traj.p1, traj.p2, traj.H, traj.F))
        if run.want_svg():
            svg.line_plot(run.path("trajectory.svg"), [("geodesic", traj.x % 1.0, traj.y % 1.0)],
                          title="geodesic on the unit-square chart", xlabel="x mod 1", ylabel="y mod 1")

    fib = sec.get("fibre")
    if fib is not None:
        x, y = _fl(require(fib, "point", "geoflow.fibre"))
        pts = fibre_critical_points(state, x, y)
        phi = 2 * math.pi * np.arange(360) / 360
        F, Fp, _ = fibre_values(state, x, y, phi)
        c, r = verify_P_vs_Fphi(state, x, y)
        fr = {"point": [x, y], "critical": [{"phi": p.phi, "F": p.value, "degenerate": p.degenerate} for p in pts],
              "count": len(pts), "P_over_Fphi": c, "P_vs_Fphi_residual": r,
              "P_vs_Fphi_relative": r / float(np.max(np.abs(Fp)))}
        if len(pts) == 6:
            fr["fan_match"] = fan_match(state, x, y)
            fr["invariant_jacobian_det"] = invariant_jacobian(state.a, state.b, state.U(x, y))[1]
            run.check("fan_match", fr["fan_match"] <= 1e-8)
        res["fibre"] = fr
        run.check("P_vs_Fphi", fr["P_vs_Fphi_relative"] <= 1e-8)
        run.write_csv("fibre.csv", ["phi", "F", "F_phi"], zip(phi, F, Fp))
        if run.want_svg():
            svg.line_plot(run.path("fibre.svg"), [("F", phi, F), ("F_phi", phi, Fp)],
                          title=f"fibre over ({x}, {y})", xlabel="phi", ylabel="F",
                          markers=[(p.phi, p.value, "") for p in pts])

    tp = sec.get("transport")
    if tp is not None:
        m = int(tp.get("grid", 7))
        xs = np.linspace(0.0, 1.0, m)
        phis = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
        t_res = max(abs(transport_residual(state, x, y, p)) for x in xs for y in xs for p in phis)
        s_res = max(float(np.max(np.abs(system22_residual(state, x, y)))) for x in xs for y in xs)
        res["transport"] = {"max_transport_residual": t_res, "max_system_residual": s_res}
        if "expect_exact" in tp:
            exact = t_res <= 1e-10 and s_res <= 1e-10
            run.check("transport", exact == bool(tp["expect_exact"]))

    rnd = sec.get("random_states")
    if rnd is not None:
        rng = np.random.default_rng(run.seed)
        ab = [tuple(_fl(p)) for p in rnd.get("ab", [[0, 1], [1, 0], [1, 1]])]
        want = int(rnd.get("samples", 20))
        rel, fm, dets = [], [], []
        for _ in range(50 * want):
            if len(rel) == want:
                break
            a, b = ab[int(rng.integers(len(ab)))]
            u, v = _fl(rng.uniform(-2.0, 2.0, 2))
            L = float(rng.uniform(0.5, 2.0))
            st = CubicIntegralState.from_strings(a, b, repr(u), repr(v), repr(L))
            if classify_state(st.system, (u, v, L)) != "strict":
                continue
            c, r = verify_P_vs_Fphi(st, 0.0, 0.0)
            Fp = fibre_values(st, 0.0, 0.0, 2 * math.pi * np.arange(360) / 360)[1]
            rel.append(r / float(np.max(np.abs(Fp))))
            fm.append(fan_match(st, 0.0, 0.0))
            dets.append(abs(invariant_jacobian(a, b, (u, v, L))[1]))
        res["random_states"] = {"count": len(rel), "max_P_vs_Fphi_relative": max(rel, default=None),
                                "max_fan_match": max(fm, default=None),
                                "min_abs_invariant_jacobian": min(dets, default=None),
                                "irregular": sum(d < 1e-6 for d in dets)}
        run.check("random_P_vs_Fphi", bool(rel) and max(rel) <= 1e-8)
        run.check("random_fan_match", bool(fm) and max(fm) <= 1e-8)
    run.results["geoflow"] = res
    run.verdicts["geoflow"] = "pass" if run.passed else "fail"


COMMANDS = {"pencil": cmd_pencil, "richness": cmd_richness, "riccati": cmd_riccati,
            "claws": cmd_claws, "geoflow": cmd_geoflow}


def run_config(cfg: dict, out: Path, formats, seed: int, tol) -> dict:
    run = Run(cfg, out, formats, seed, tol)
    t0 = time.perf_counter()
    try:
        COMMANDS[cfg["command"]](run)
    except DegeneratePencilError as exc:
        run.results["error"] = str(exc)
        run.check("no_degeneracy", False)
    elapsed = time.perf_counter() - t0
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": "charfan",
        "tool_version": __version__,
        "command": cfg["command"],
        "name": cfg["name"],
        "seed": seed,
        "tol_override": tol,
        "config": cfg,
        "results": run.results,
        "verdicts": run.verdicts,
        "checks": run.checks,
        "passed": run.passed,
        "artifacts": sorted(set(run.artifacts) | ({"report.json"} if "json" in run.formats else set())),
        "timing": {"seconds": elapsed},
    }
    report = _clean(report)
    if "json" in run.formats:
        write_report(report, run.path("report.json"))
    return report


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def strip_timing(report):
    if isinstance(report, dict):
        return {k: strip_timing(v) for k, v in report.items() if k != "timing"}
    if isinstance(report, list):
        return [strip_timing(v) for v in report]
    return report


def slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._=-]+", "-", name).strip("-")


def _summary_line(rep: dict) -> str:
    verdicts = ", ".join(f"{k}={v}" for k, v in sorted(rep["verdicts"].items()))
    status = "ok" if rep["passed"] else "FAILED " + ",".join(k for k, v in rep["checks"].items() if not v)
    return f"{rep['command']:9s} {rep['name']}: {verdicts} [{status}]"


def parse_formats(text: str) -> list:
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fmts if f not in FORMATS]
    if bad:
        raise ConfigError(f"unknown format(s) {bad}; choose from {', '.join(FORMATS)}")
    return fmts


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="charfan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"charfan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["all"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="TOML config (default: the bundled catalog entries for this command)")
        p.add_argument("--out", type=Path, default=Path("charfan-out"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", default="csv,json,svg")
        p.add_argument("--tol", type=float, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        formats = parse_formats(args.format)
        if args.config is not None:
            configs = [load_config(args.config)]
            if args.command != "all" and configs[0]["command"] != args.command:
                raise ConfigError(f"{args.config}: config is for '{configs[0]['command']}', "
                                  f"not '{args.command}'")
        else:
            files = catalog_files(None if args.command == "all" else args.command)
            configs = [load_config(f) for f in files]
        reports = []
        for cfg in configs:
            sub = args.out if len(configs) == 1 and args.command != "all" else args.out / slug(cfg["name"])
            reports.append(run_config(cfg, sub, formats, args.seed, args.tol))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CharfanError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 2
    for rep in reports:
        print(_summary_line(rep))
    ok = all(r["passed"] for r in reports)
    if args.command == "all" and "json" in formats:
        args.out.mkdir(parents=True, exist_ok=True)
        summary = {"schema_version": SCHEMA_VERSION, "tool": "charfan", "tool_version": __version__,
                   "seed": args.seed, "passed": ok,
                   "runs": [{"name": r["name"], "command": r["command"], "passed": r["passed"],
                             "verdicts": r["verdicts"]} for r in reports],
                   "timing": {"seconds": time.perf_counter() - t0}}
        write_report(_clean(summary), args.out / "all.json")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
