"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` or as a script.
"""
import sys
import time

import numpy as np
import pytest

from conftest import record
from strichartz_lab import cli
from strichartz_lab.config import ExperimentConfig
from strichartz_lab.decay import (WeightParams, constraint_weight_check, fit_gaussian_decay, frequency_split,
                                  g_function, g_function_analysis, spectral_norm, split_norm_bounds, tail_norm_sweep)
from strichartz_lab.euler_lagrange import el_residual
from strichartz_lab.fields import random_initial_field, random_wavepacket_field
from strichartz_lab.functional import (DUAL_CONSTANT, dual_symmetry_check, gaussian_ratio_closed_form,
                                       strichartz_ratio)
from strichartz_lab.gaussian_character import functional_equation_residual, quadratic_log_fit, random_rectangles
from strichartz_lab.grid import ComplexField2D, Grid2D, Space, TimeQuadrature, forward_transform, l2_norm, propagate
from strichartz_lab.io import read_strz
from strichartz_lab.symmetry import modulate, rescale, translate

GAUSSIAN_PHI = gaussian_ratio_closed_form(1.0)


@pytest.fixture(scope="module")
def extremize_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("extremize")
    t0 = time.perf_counter()
    code, report = cli.run(["--out", str(out), "extremize", "--n", "64", "--half-width", "10", "--t-nodes", "129",
                            "--init", "random", "--seed", "42", "--tol", "1e-7"])
    wall = time.perf_counter() - t0
    field = read_strz(out / "field.strz") if code == 0 else None
    return code, report, wall, field


@pytest.fixture(scope="module")
def extremizer(extremize_run):
    f = extremize_run[3]
    if f is None:
        pytest.fail("extremize run produced no field")
    return f * (1.0 / l2_norm(f))


def test_criterion_01_extremizer_recovery(extremize_run):
    code, report, wall, _ = extremize_run
    res = report["results"] if report else {}
    rel = res.get("phi_relative_error", np.inf)
    ok = (code == 0 and res["iterations"] <= 300 and res["residual"] <= 1e-6 and rel <= 1e-2 and wall <= 120)
    record("CRITERION 1 extremizer recovery", ok,
           f"iterations={res.get('iterations')} residual={res.get('residual', np.nan):.2e} "
           f"phi_rel_err={rel:.2e} wall={wall:.1f}s")
    assert ok


def test_criterion_02_gaussian_characterization(extremizer):
    fit = quadratic_log_fit(extremizer)
    quads = random_rectangles(10_000, 1.0, 1.0, seed=0, task="acceptance")
    fe = functional_equation_residual(extremizer, quads)
    ok = (fit.A.real < 0 and fit.anisotropy <= 1e-3 and fit.cross <= 1e-3 and fit.residual_rms <= 1e-4
          and fe["evaluated"] > 0 and fe["max"] <= 1e-3)
    record("CRITERION 2 Gaussian characterization", ok,
           f"A={fit.A:.6g} anisotropy={fit.anisotropy:.2e} cross={fit.cross:.2e} "
           f"residual_rms={fit.residual_rms:.2e} fe_max={fe['max']:.2e} ({fe['evaluated']} rectangles)")
    assert ok


def test_criterion_03_decay(extremizer):
    fh = forward_transform(extremizer)
    fit = fit_gaussian_decay(fh)
    s = 2.0
    rows = tail_norm_sweep(fh, s, s**-4, [1.0, 1e-1, 1e-2, 1e-3])
    vals = [v for _, v in rows]
    monotone = all(b >= a for a, b in zip(vals, vals[1:]))
    last = abs(vals[-1] - vals[-2]) / vals[-1]
    ok = fit.mu_fit > 0 and fit.r_squared >= 0.99 and monotone and last <= 1e-3
    record("CRITERION 3 decay", ok,
           f"mu_fit={fit.mu_fit:.5f} r2={fit.r_squared:.7f} sweep={[f'{v:.3e}' for v in vals]} "
           f"monotone={monotone} last_decade_change={last:.3e} (needs <= 1e-3)")
    assert ok


def test_criterion_04_q_consistency(tmp_path):
    cfg = ExperimentConfig()
    t0 = time.perf_counter()
    res, ok, _ = cli.cmd_q_consistency(cfg, tmp_path, count=20, seed=0, n=16)
    wall = time.perf_counter() - t0
    ok = ok and wall <= 300
    record("CRITERION 4 Q-route consistency", ok,
           f"max_rel_diff={res['max_relative_difference']:.2e} max_self_imag={res['max_self_imag_ratio']:.2e} "
           f"wall={wall:.1f}s")
    assert ok


def test_criterion_05_bilinear_decay(tmp_path):
    cfg = ExperimentConfig()
    res, ok, _ = cli.cmd_bilinear_sweep(cfg, tmp_path)
    ratios = ", ".join(f"N={r['N']:g}:{r['ratio']:.4f}" for r in res["rows"])
    record("CRITERION 5 bilinear decay", ok, f"slope={res['slope']:.4f} window=[-0.75,-0.45] {ratios}")
    assert ok


def test_criterion_06_weight_bound():
    settings = cli.WEIGHT_SETTINGS
    maxima = [constraint_weight_check(WeightParams(m, e), 100_000, 0, task=f"weights:{i}")["max_weight"]
              for i, (m, e) in enumerate(settings)]
    ok = len(settings) == 5 and all(w <= 1 + 1e-12 for w in maxima) and maxima[0] == 1.0
    record("CRITERION 6 weight bound", ok,
           " ".join(f"(mu={m:g},eps={e:g}):{w:.6f}" for (m, e), w in zip(settings, maxima)))
    assert ok


def test_criterion_07_bootstrap_ingredients(extremizer):
    fh = forward_transform(extremizer)
    details, ok = [], True
    for s in (2.0, 3.0, 5.0):
        b = split_norm_bounds(extremizer, s, s**-4)
        slack = min(b[k]["slack"] for k in ("h_lt", "h_ll", "h_mid"))
        sp = frequency_split(fh, s)
        parts = sum(v**2 for v in sp.norms().values())
        total = spectral_norm(fh.samples, fh.grid) ** 2
        err = abs(parts - total) / total
        ok &= b["all_hold"] and slack >= 0 and err <= 1e-14
        details.append(f"s={s:g}: min_slack={slack:.3e} pythagoras={err:.1e}")
    record("CRITERION 7 bootstrap ingredients", ok, "; ".join(details))
    assert ok


def test_criterion_08_g_analysis():
    res, _, _ = cli.cmd_g_analysis(2.0, 1.0)
    ok = abs(res["x_crit"] - 1 / 3) <= 1e-12 and abs(res["M"] - 5 / 27) <= 1e-12
    rng = np.random.default_rng(8)
    worst = 0.0
    for omega, C in zip(rng.uniform(0.1, 10, 100), rng.uniform(0.1, 10, 100)):
        g = g_function_analysis(omega, C)
        ok &= g.x0 < g.x_crit < g.x1
        worst = max(worst, abs(g_function(g.x0, omega, C) - g.M / 2), abs(g_function(g.x1, omega, C) - g.M / 2))
    ok &= worst <= 1e-12
    record("CRITERION 8 G-analysis", ok,
           f"x_crit={res['x_crit']!r} M={res['M']!r} worst_level_error={worst:.1e} over 100 pairs")
    assert ok


def test_criterion_09_symmetry_suite():
    grid = Grid2D(64, 10.0)
    tq = TimeQuadrature.tangent_legendre(129, 0.5)
    f = random_wavepacket_field(grid, 21)
    unit = max(abs(l2_norm(propagate(f, t)) / l2_norm(f) - 1) for t in (0.1, 1.0, 7.5))
    phi = strichartz_ratio(f, tq).phi
    ops = [translate(f, (0.8, -1.1)), modulate(f, (1.0, -0.5)), rescale(f, 1.3), rescale(f, 0.8)]
    inv = max(abs(strichartz_ratio(g, tq).phi / phi - 1) for g in ops)
    ratios = [dual_symmetry_check(random_wavepacket_field(grid, 100 + k), tq)["ratio"] for k in range(10)]
    spread = np.ptp(ratios) / DUAL_CONSTANT
    ok = unit <= 1e-12 and inv <= 1e-8 and spread <= 1e-6
    record("CRITERION 9 symmetry suite", ok,
           f"unitarity={unit:.1e} invariance={inv:.1e} dual_ratio={np.mean(ratios):.10f} spread={spread:.1e}")
    assert ok


def test_criterion_10_negative_controls():
    grid = Grid2D(64, 10.0)
    tq = TimeQuadrature.tangent_legendre(129, 0.5)
    bump = ComplexField2D(grid, Space.PHYSICAL, np.exp(-grid.radius_squared() ** 2))
    fe = functional_equation_residual(bump, random_rectangles(10_000, 1.0, 1.0, seed=0, task="acceptance"))
    gap = GAUSSIAN_PHI - strichartz_ratio(bump, tq).phi
    noise = random_initial_field(grid, "random", 7)
    res = el_residual(noise, tq)
    ok = fe["rms"] >= 1e-2 and gap >= 1e-3 and res >= 0.1
    record("CRITERION 10 negative controls", ok,
           f"bump fe_rms={fe['rms']:.3f} phi_gap={gap:.4f} random el_residual={res:.3f}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
