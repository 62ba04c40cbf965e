import numpy as np
import pytest

from strichartz_lab.fields import random_initial_field, random_wavepacket_field
from strichartz_lab.functional import (C_Q, DUAL_CONSTANT, Route, _dual_field, dual_symmetry_check,
                                       gaussian_ratio_closed_form, l4_spacetime_norm, quadrilinear_circle_reduction,
                                       quadrilinear_time_domain, strichartz_ratio)
from strichartz_lab.grid import (ComplexField2D, ContractError, Grid2D, Space, TimeQuadrature, forward_transform,
                                 gaussian_field, l2_norm)
from strichartz_lab.symmetry import translate

G16 = Grid2D(16, 5.01)


def test_closed_form_is_scale_free():
    assert gaussian_ratio_closed_form(1.0) == gaussian_ratio_closed_form(2.5) == 0.25
    with pytest.raises(ContractError):
        gaussian_ratio_closed_form(0.0)


def test_ratio_of_gaussian_matches_closed_form():
    g = Grid2D(128, 12.0)
    tq = TimeQuadrature.tangent_legendre(257, 0.25)
    rep = strichartz_ratio(gaussian_field(g, -1.0), tq)
    assert abs(rep.phi / gaussian_ratio_closed_form(1.0) - 1) <= 1e-4
    assert rep.sharp_constant_estimate == pytest.approx(rep.phi**0.25, rel=1e-15)
    d = rep.as_dict()
    assert set(d) == {"phi", "sharp_constant_estimate", "grid", "quadrature", "route"}


def test_l4_norm_of_gaussian(grid64, tq129):
    f = gaussian_field(grid64, -0.5)
    expected = (0.25 * l2_norm(f) ** 4) ** 0.25
    assert abs(l4_spacetime_norm(f, tq129) / expected - 1) <= 1e-4
    assert l4_spacetime_norm(f * 0.0, tq129) == 0.0


def test_ratio_scale_and_translation(grid64, tq129):
    f = random_wavepacket_field(grid64, 9)
    p = strichartz_ratio(f, tq129).phi
    assert strichartz_ratio(f * 3.7, tq129).phi == pytest.approx(p, rel=1e-12)
    assert strichartz_ratio(translate(f, (0.7, -0.4)), tq129).phi == pytest.approx(p, rel=1e-8)
    with pytest.raises(ContractError):
        strichartz_ratio(f * 0.0, tq129)


def test_quadrilinear_symmetries(grid64, tq129):
    fs = [random_wavepacket_field(grid64, 4, i) for i in range(4)]
    q = quadrilinear_time_domain(*fs, tq129).value
    assert quadrilinear_time_domain(fs[1], fs[0], fs[2], fs[3], tq129).value == pytest.approx(q, rel=1e-12)
    assert quadrilinear_time_domain(fs[0], fs[1], fs[3], fs[2], tq129).value == pytest.approx(q, rel=1e-12)
    # Q(g, f, f, f) and Q(f, f, g, f) are complex conjugates
    a = quadrilinear_time_domain(fs[0], fs[1], fs[1], fs[1], tq129).value
    b = quadrilinear_time_domain(fs[1], fs[1], fs[0], fs[1], tq129).value
    assert a == pytest.approx(np.conj(b), rel=1e-12)
    zero = fs[0] * 0.0
    assert quadrilinear_time_domain(zero, fs[1], fs[2], fs[3], tq129).value == 0


def test_self_value_real_and_consistent(grid64, tq129):
    f = random_wavepacket_field(grid64, 3)
    q = quadrilinear_time_domain(f, f, f, f, tq129)
    assert q.route == Route.TIME_DOMAIN
    assert q.value.imag == 0 and q.value.real > 0
    q4 = quadrilinear_time_domain(f, f * 1.0, f * 1.0, f * 1.0, tq129).value
    assert abs(q4.imag) <= 1e-8 * abs(q4)
    assert abs(q.value.real / (C_Q * l4_spacetime_norm(f, tq129) ** 4) - 1) <= 1e-10


def test_grid_mismatch_rejected(grid64, tq129):
    f = gaussian_field(grid64, -0.5)
    h = gaussian_field(Grid2D(64, 9.0), -0.5)
    with pytest.raises(ContractError):
        quadrilinear_time_domain(f, f, f, h, tq129)


def test_circle_reduction_matches_time_domain_on_gaussians(tq129):
    fs = [gaussian_field(G16, -0.5 + 0.1j * k, (0.2 * k, -0.1j * k)) for k in range(4)]
    a = quadrilinear_time_domain(*fs, tq129).value
    b = quadrilinear_circle_reduction(*[forward_transform(f) for f in fs])
    assert b.route == Route.CIRCLE_REDUCTION
    assert abs(a - b.value) <= 1e-3 * abs(a)


def test_circle_reduction_guards_and_zero():
    h = forward_transform(gaussian_field(G16, -0.5))
    assert quadrilinear_circle_reduction(h, h, h * 0.0, h).value == 0
    big = forward_transform(gaussian_field(Grid2D(64, 10.0), -0.5))
    with pytest.raises(ContractError):
        quadrilinear_circle_reduction(big, big, big, big)
    with pytest.raises(ContractError):
        quadrilinear_circle_reduction(gaussian_field(G16, -0.5), h, h, h)


def test_degenerate_circle_is_a_point():
    # xi1 = xi2 = p: the circle collapses to p and the angular integral is 2 pi / 4 f3(p) f4(p)
    from strichartz_lab import kernels
    from strichartz_lab.functional import _trig_source
    f = random_wavepacket_field(G16, 1)
    src = _trig_source(forward_transform(f))
    p = np.array([[0.3, -0.2]])
    val = kernels.circle_sum(p, p, np.array([1.0 + 0j]), np.zeros(1), np.full(1, 2 * np.pi), np.array([16]),
                             src, src, False, 0.0, 0.0)
    from strichartz_lab.kernels._fallback import _evaluate
    g3 = _evaluate(*src, p)[0]
    assert val == pytest.approx(2 * np.pi / 4 * g3 * g3, rel=1e-12)


def test_dual_symmetry_gaussian_closed_form(grid64, tq129):
    # f = exp(-a|x|^2): f^vee = exp(-|y|^2/4a) / (4 pi a), ||f^vee|| = ||f|| / (2 pi)
    a = 0.5
    f = gaussian_field(grid64, -a)
    fv = _dual_field(f)
    y2 = fv.grid.radius_squared()
    assert np.abs(fv.samples - np.exp(-y2 / (4 * a)) / (4 * np.pi * a)).max() <= 1e-12
    d = dual_symmetry_check(f, tq129)
    lhs = 0.25**0.25 * np.sqrt(np.pi / (2 * a))
    assert d["lhs"] == pytest.approx(lhs, rel=1e-6)
    assert d["rhs"] == pytest.approx(lhs / (2 * np.pi), rel=1e-6)


def test_dual_symmetry_ratio_is_universal(grid64, tq129):
    ratios = [dual_symmetry_check(random_wavepacket_field(grid64, 100 + k), tq129)["ratio"] for k in range(4)]
    assert np.ptp(ratios) <= 1e-6 * DUAL_CONSTANT
    f = random_wavepacket_field(grid64, 7)
    assert dual_symmetry_check(f * 2.5, tq129)["ratio"] == pytest.approx(dual_symmetry_check(f, tq129)["ratio"],
                                                                          rel=1e-12)


def test_non_gaussian_bump_is_strictly_worse(grid64, tq129):
    f = ComplexField2D(grid64, Space.PHYSICAL, np.exp(-grid64.radius_squared() ** 2))
    assert strichartz_ratio(f, tq129).phi < gaussian_ratio_closed_form(1.0) - 1e-3


def test_gaussian_maximal_on_stress_corpus(grid64, tq129):
    top = strichartz_ratio(gaussian_field(grid64, -0.5), tq129).phi
    x1, x2 = grid64.mesh()
    r2 = grid64.radius_squared()
    corpus = [random_wavepacket_field(grid64, 500 + k, n_packets=1 + k % 4, spread=0.5) for k in range(25)]
    corpus += [random_initial_field(grid64, kind, 600 + k) for k in range(25)
               for kind in (("random", "random_real")[k % 2],)]
    bumps = [np.exp(-r2**2), np.exp(-np.sqrt(r2 + 1)), 1 / (1 + r2) ** 3, np.exp(-x1**2 - 3 * x2**2),
             x1 * np.exp(-r2), (x1 + 1j * x2) * np.exp(-r2 / 2), np.exp(-r2) * np.cos(3 * x1),
             np.exp(-np.abs(x1) - np.abs(x2)), np.where(r2 < 4, 1.0, 0.0) * np.exp(-r2 / 4),
             np.exp(-(r2 - 4) ** 2)]
    corpus += [ComplexField2D(grid64, Space.PHYSICAL, b) for b in bumps]
    assert len(corpus) == 60
    for f in corpus:
        assert strichartz_ratio(f, tq129).phi <= top * (1 + 1e-9)
