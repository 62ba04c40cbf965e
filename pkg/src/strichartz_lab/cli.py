"""``strz`` command-line entry point.

Every subcommand writes ``<out>/<command>.json`` (plus CSV tables where the
result is tabular) and exits with 0 when all checks pass, 1 when a check
fails, 2 on usage or configuration errors and 3 on I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bilinear import decay_sweep
from .config import ExperimentConfig, worker_count
from .decay import (WeightParams, constraint_weight_check, direct_weighted_tail_norm, fit_gaussian_decay,
                    frequency_split, g_function_analysis, spectral_norm, split_norm_bounds, tail_norm_sweep)
from .euler_lagrange import DivergenceError, SolverConfig, el_residual, power_iterate
from .fields import INIT_KINDS, random_initial_field, random_wavepacket_field
from .functional import (DUAL_CONSTANT, dual_symmetry_check, gaussian_ratio_closed_form,
                         quadrilinear_circle_reduction, quadrilinear_time_domain, strichartz_ratio)
from .gaussian_character import (functional_equation_residual, quadratic_log_fit, random_rectangles,
                                 second_difference_test)
from .grid import ContractError, Grid2D, Space, TimeQuadrature, forward_transform, gaussian_field, l2_norm
from .io import StrzError, read_strz, write_csv, write_json, write_strz

log = logging.getLogger("strichartz_lab")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _report(command, cfg, raw_config, results, passed, artifacts=(), wall=0.0):
    return {
        "command": command,
        "config": raw_config if raw_config is not None else cfg.as_dict(),
        "resolved_config": cfg.as_dict(),
        "library_version": __version__,
        "results": results,
        "passed": bool(passed),
        "artifacts": [str(a) for a in artifacts],
        "wall_time": wall,
    }


def _unit_gaussian(grid):
    g = gaussian_field(grid, -0.5)
    return g * (1.0 / l2_norm(g))


# commands: each returns (results, passed, artifacts)

def cmd_extremize(cfg: ExperimentConfig, out: Path):
    sv = cfg["solver"]
    if sv["init"] not in INIT_KINDS:
        raise UsageError(f"--init must be one of {INIT_KINDS}")
    if sv["init"] != "perturbed_gaussian" and sv["seed"] is None:
        raise UsageError("random initialisation needs --seed")
    grid, tq = cfg.grid(), cfg.quadrature()
    f0 = random_initial_field(grid, sv["init"], sv["seed"])
    scfg = SolverConfig(max_iter=sv["max_iter"], tol=sv["tol"], omega_tol=sv["omega_tol"],
                        renormalize_scale=sv["renormalize_scale"])
    try:
        rep = power_iterate(f0, tq, scfg)
    except DivergenceError as exc:
        return {"error": str(exc), "phi_trace": exc.phi_trace}, False, []
    field_path = write_strz(out / "field.strz", rep.field)
    trace_path = write_csv(out / "phi_trace.csv", ["iteration", "phi", "residual"],
                           [(i, p, r) for i, (p, r) in enumerate(zip(rep.phi_trace, rep.residual_trace))])
    res = rep.as_dict()
    res["gaussian_phi"] = gaussian_ratio_closed_form(1.0)
    res["phi_relative_error"] = abs(rep.phi / res["gaussian_phi"] - 1.0)
    return res, rep.converged, [field_path, trace_path]


def _load(path):
    try:
        return read_strz(path)
    except FileNotFoundError as exc:
        raise StrzError(f"cannot read {path}: {exc}") from exc


def cmd_verify(cfg: ExperimentConfig, out: Path, field_path):
    f = _load(field_path)
    if f.space == Space.FREQUENCY:
        from .grid import inverse_transform
        f = inverse_transform(f)
    f = f * (1.0 / l2_norm(f))
    tq = cfg.quadrature()
    checks = {}
    res = el_residual(f, tq)
    checks["el_residual"] = {"value": res, "passed": res <= 1e-6}
    phi = strichartz_ratio(f, tq).phi
    checks["ratio"] = {"phi": phi, "gaussian_phi": gaussian_ratio_closed_form(1.0),
                       "passed": abs(phi / gaussian_ratio_closed_form(1.0) - 1.0) <= 1e-2}
    try:
        fit = fit_gaussian_decay(forward_transform(f))
        checks["decay_fit"] = {**fit.as_dict(), "passed": fit.mu_fit > 0 and fit.r_squared >= 0.99}
    except ContractError as exc:
        checks["decay_fit"] = {"error": str(exc), "passed": False}
    quads = random_rectangles(10_000, 1.0, 1.0, seed=0, task="verify")
    fe = functional_equation_residual(f, quads)
    fe.pop("residuals")
    checks["functional_equation"] = {**fe, "passed": bool(fe["evaluated"] > 0 and fe["max"] <= 1e-3)}
    try:
        q = quadratic_log_fit(f)
        checks["quadratic_fit"] = {**q.as_dict(), "passed": bool(q.A.real < 0 and q.anisotropy <= 1e-3
                                                                and q.cross <= 1e-3 and q.residual_rms <= 1e-4)}
    except ContractError as exc:
        checks["quadratic_fit"] = {"error": str(exc), "passed": False}
    d = dual_symmetry_check(f, tq)
    checks["dual_symmetry"] = {**d, "expected": DUAL_CONSTANT,
                               "passed": abs(d["ratio"] / DUAL_CONSTANT - 1.0) <= 1e-6}
    return checks, all(c["passed"] for c in checks.values()), []


def _map(fn, items):
    w = worker_count()
    if w == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(w) as ex:
        return list(ex.map(fn, items))


def cmd_bilinear_sweep(cfg: ExperimentConfig, out: Path):
    sw = cfg["sweep"]
    grid = Grid2D(int(sw["n_points"]), float(sw["half_width"]))
    res = decay_sweep(grid, float(sw["s"]), sw["N_list"], sw["seeds"], route="cells", subcells=int(sw["subcells"]))
    csv_path = write_csv(out / "bilinear_sweep.csv", ["N", "ratio", "seed"], res.table())
    return res.as_dict(), res.in_window(), [csv_path]


def _q_case(args):
    grid, tq, seed, i = args
    fs = [random_wavepacket_field(grid, seed, 4 * i + j) for j in range(4)]
    a = quadrilinear_time_domain(*fs, tq).value
    b = quadrilinear_circle_reduction(*[forward_transform(f) for f in fs]).value
    qq = quadrilinear_time_domain(fs[0], fs[0], fs[0], fs[0], tq).value
    return {"index": i, "time_domain": a, "circle_reduction": b, "relative_difference": abs(a - b) / abs(a),
            "self_value": qq, "self_imag_ratio": abs(qq.imag) / abs(qq)}


def cmd_q_consistency(cfg: ExperimentConfig, out: Path, count=20, seed=0, n=16, half_width=5.01):
    grid = Grid2D(n, half_width)
    tq = cfg.quadrature()
    rows = _map(_q_case, [(grid, tq, seed, i) for i in range(count)])
    worst = max(r["relative_difference"] for r in rows)
    worst_imag = max(r["self_imag_ratio"] for r in rows)
    ok = worst <= 1e-3 and worst_imag <= 1e-8 and all(r["self_value"].real >= 0 for r in rows)
    csv_path = write_csv(out / "q_consistency.csv", ["index", "relative_difference", "self_imag_ratio"],
                         [(r["index"], r["relative_difference"], r["self_imag_ratio"]) for r in rows])
    return {"rows": rows, "max_relative_difference": worst, "max_self_imag_ratio": worst_imag}, ok, [csv_path]


WEIGHT_SETTINGS = ((0.0, 0.0), (0.01, 0.1), (1.0, 0.0), (0.1, 1.0), (5.0, 0.01))


def cmd_bootstrap_audit(cfg: ExperimentConfig, out: Path, field_path=None, seed=0):
    an = cfg["analysis"]
    f = _unit_gaussian(cfg.grid()) if field_path is None else _load(field_path)
    if f.space == Space.FREQUENCY:
        from .grid import inverse_transform
        f = inverse_transform(f)
    f = f * (1.0 / l2_norm(f))
    fh = forward_transform(f)
    res = {"bounds": [], "weights": []}
    ok = True
    for s in an["s_list"]:
        b = split_norm_bounds(f, float(s), float(s) ** -4)
        res["bounds"].append(b)
        ok &= b["all_hold"]
        sp = frequency_split(fh, float(s))
        parts = sum(v**2 for v in sp.norms().values())
        total = spectral_norm(fh.samples, fh.grid) ** 2
        res.setdefault("pythagoras", []).append({"s": s, "relative_error": abs(parts - total) / total})
        ok &= abs(parts - total) <= 1e-14 * total
    s = float(an["s"])
    mu = float(an["mu"]) if an["mu"] is not None else s**-4
    rows = tail_norm_sweep(fh, s, mu, an["eps_list"])
    vals = [v for _, v in rows]
    order = np.argsort([-e for e, _ in rows])
    ordered = [vals[i] for i in order]
    monotone = all(b >= a for a, b in zip(ordered, ordered[1:]))
    last = abs(ordered[-1] - ordered[-2]) / ordered[-1] if ordered[-1] > 0 else 0.0
    res["tail_sweep"] = {"s": s, "mu": mu, "rows": rows, "monotone": monotone, "last_decade_change": last,
                         "direct_limit": direct_weighted_tail_norm(fh, s, mu)}
    ok &= monotone and last <= 1e-3
    write_csv(out / "tail_sweep.csv", ["eps", "H"], rows)
    for i, (m, e) in enumerate(WEIGHT_SETTINGS):
        w = constraint_weight_check(WeightParams(m, e), 100_000, seed, task=f"weights:{i}")
        res["weights"].append(w)
        ok &= w["max_weight"] <= 1 + 1e-12
    return res, ok, [out / "tail_sweep.csv"]


def cmd_g_analysis(omega: float, C: float):
    g = g_function_analysis(omega, C)
    return g.as_dict(), bool(0 < g.x0 < g.x_crit < g.x1), []


def cmd_rect_test(cfg: ExperimentConfig, out: Path, field_path, n_quadruples=10_000, seed=0, tol=1e-3):
    f = _load(field_path)
    quads = random_rectangles(n_quadruples, 1.0, 1.0, seed=seed, task="rect-test")
    fe = functional_equation_residual(f, quads)
    sd = second_difference_test(f, quads)
    csv_path = write_csv(out / "rect_residuals.csv", ["index", "residual"], list(enumerate(fe.pop("residuals"))))
    return {"functional_equation": fe, "second_difference": sd, "tolerance": tol}, \
        bool(fe["evaluated"] > 0 and fe["max"] <= tol), [csv_path]


def cmd_oracle_gaussian(cfg: ExperimentConfig, out: Path):
    phi = gaussian_ratio_closed_form(1.0)
    grid, tq = cfg.grid(), cfg.quadrature()
    num = strichartz_ratio(gaussian_field(grid, -0.5), tq).phi
    rel = abs(num / phi - 1.0)
    return {"phi": phi, "sharp_constant_estimate": phi**0.25, "numerical_phi": num,
            "relative_difference": rel}, rel <= 1e-4, []


# argument parsing

def _parser():
    p = argparse.ArgumentParser(prog="strz", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file mirroring the experiment configuration")
    p.add_argument("--out", help="output directory (default: io.out_path of the config)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def grid_args(sp):
        sp.add_argument("--n", type=int, dest="n_points")
        sp.add_argument("--half-width", type=float)
        sp.add_argument("--t-nodes", type=int)
        sp.add_argument("--time-scale", type=float)

    e = sub.add_parser("extremize", help="power iteration from a seeded start")
    grid_args(e)
    e.add_argument("--init", choices=INIT_KINDS)
    e.add_argument("--seed", type=int)
    e.add_argument("--tol", type=float)
    e.add_argument("--max-iter", type=int)
    e.add_argument("--no-renormalize", action="store_true")

    v = sub.add_parser("verify", help="run all checks on a stored field")
    v.add_argument("field")
    v.add_argument("--t-nodes", type=int)
    v.add_argument("--time-scale", type=float)

    b = sub.add_parser("bilinear-sweep", help="bilinear decay versus frequency separation")
    b.add_argument("--s", type=float)
    b.add_argument("--N", type=float, nargs="+")
    b.add_argument("--seeds", type=int, nargs="+")
    b.add_argument("--n", type=int, dest="n_points")
    b.add_argument("--half-width", type=float)
    b.add_argument("--subcells", type=int)

    q = sub.add_parser("q-consistency", help="time-domain versus circle-reduction Q")
    q.add_argument("--count", type=int, default=20)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--n", type=int, default=16)
    q.add_argument("--half-width", type=float, default=5.01)

    a = sub.add_parser("bootstrap-audit", help="weights, cutoffs and tail norms")
    a.add_argument("--field")
    a.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("g-analysis", help="maximum and half-level roots of G")
    g.add_argument("omega", type=float)
    g.add_argument("C", type=float)

    r = sub.add_parser("rect-test", help="rectangle functional-equation residuals")
    r.add_argument("field")
    r.add_argument("--count", type=int, default=10_000)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--tol", type=float, default=1e-3)

    o = sub.add_parser("oracle-gaussian", help="closed-form Gaussian ratio and its numerical check")
    grid_args(o)
    return p


def _overrides(ns) -> dict:
    o: dict = {}

    def put(sec, key, val):
        if val is not None:
            o.setdefault(sec, {})[key] = val

    g = getattr(ns, "n_points", None)
    if ns.command in ("extremize", "oracle-gaussian"):
        put("grid", "n_points", g)
        put("grid", "half_width", ns.half_width)
    if ns.command in ("extremize", "oracle-gaussian", "verify"):
        put("time_quadrature", "n_nodes", ns.t_nodes)
        put("time_quadrature", "scale", ns.time_scale)
    if ns.command == "extremize":
        put("solver", "init", ns.init)
        put("solver", "seed", ns.seed)
        put("solver", "tol", ns.tol)
        put("solver", "max_iter", ns.max_iter)
        if ns.no_renormalize:
            put("solver", "renormalize_scale", False)
    if ns.command == "bilinear-sweep":
        put("sweep", "s", ns.s)
        put("sweep", "N_list", ns.N)
        put("sweep", "seeds", ns.seeds)
        put("sweep", "n_points", g)
        put("sweep", "half_width", ns.half_width)
        put("sweep", "subcells", ns.subcells)
    return o


def run(argv=None) -> tuple[int, dict | None]:
    try:
        ns = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        raw = json.loads(Path(ns.config).read_text()) if ns.config else None
    except (OSError, json.JSONDecodeError) as exc:
        print(f"strz: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    try:
        cfg = ExperimentConfig(raw).updated(_overrides(ns))
        out = Path(ns.out or cfg["io"]["out_path"])
        out.mkdir(parents=True, exist_ok=True)
        c = ns.command
        if c == "extremize":
            results, passed, arts = cmd_extremize(cfg, out)
        elif c == "verify":
            results, passed, arts = cmd_verify(cfg, out, ns.field)
        elif c == "bilinear-sweep":
            results, passed, arts = cmd_bilinear_sweep(cfg, out)
        elif c == "q-consistency":
            results, passed, arts = cmd_q_consistency(cfg, out, ns.count, ns.seed, ns.n, ns.half_width)
        elif c == "bootstrap-audit":
            results, passed, arts = cmd_bootstrap_audit(cfg, out, ns.field, ns.seed)
        elif c == "g-analysis":
            results, passed, arts = cmd_g_analysis(ns.omega, ns.C)
        elif c == "rect-test":
            results, passed, arts = cmd_rect_test(cfg, out, ns.field, ns.count, ns.seed, ns.tol)
        else:
            results, passed, arts = cmd_oracle_gaussian(cfg, out)
    except (UsageError, ContractError, ValueError) as exc:
        print(f"strz: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except (StrzError, OSError) as exc:
        print(f"strz: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO, None
    report = _report(c, cfg, raw, results, passed, arts, time.perf_counter() - t0)
    path = write_json(out / f"{c.replace('-', '_')}.json", report)
    print(json.dumps({"command": c, "passed": report["passed"], "report": str(path)}))
    return (EXIT_PASS if passed else EXIT_FAIL), report


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
