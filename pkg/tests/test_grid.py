import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strichartz_lab.fields import random_wavepacket_field
from strichartz_lab.grid import (ComplexField2D, ContractError, Grid2D, Space, TimeQuadrature, forward_transform,
                                 gaussian_field, inner, inverse_transform, l2_norm, propagate)


def _random(grid, seed):
    r = np.random.default_rng(seed)
    n = grid.n_points
    return ComplexField2D(grid, Space.PHYSICAL, r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)))


def test_grid_invariants():
    for n, L in [(8, 1.0), (64, 10.0), (256, 8.0), (30, 3.3)]:
        g = Grid2D(n, L)
        assert abs(g.dx * g.dxi * n / (2 * np.pi) - 1) <= 1e-14
        assert g.xi[0] == pytest.approx(-g.xi_max)
        assert np.allclose(np.diff(g.xi), g.dxi)
        assert g.xi[-1] < g.xi_max


@pytest.mark.parametrize("n,L", [(7, 1.0), (6, 1.0), (64, 0.0), (64, -1.0)])
def test_grid_rejects(n, L):
    with pytest.raises(ContractError):
        Grid2D(n, L)


def test_field_rejects_nonfinite(grid64):
    a = np.zeros((64, 64), complex)
    a[3, 3] = np.nan
    with pytest.raises(ContractError):
        ComplexField2D(grid64, Space.PHYSICAL, a)
    with pytest.raises(ContractError):
        ComplexField2D(grid64, Space.PHYSICAL, np.zeros((64, 63)))


def test_delta_transforms_to_constant(grid64):
    a = np.zeros((64, 64), complex)
    a[32, 32] = 1.0 / grid64.dx**2  # x = 0
    fh = forward_transform(ComplexField2D(grid64, Space.PHYSICAL, a))
    assert np.allclose(fh.samples, 1.0, atol=1e-12)


def test_gaussian_transform_pair(grid64):
    f = gaussian_field(grid64, -1.0)
    fh = forward_transform(f)
    exact = np.pi * np.exp(-grid64.radius_squared(Space.FREQUENCY) / 4)
    assert np.abs(fh.samples - exact).max() <= 1e-10
    back = inverse_transform(ComplexField2D(grid64, Space.FREQUENCY, exact))
    assert np.abs(back.samples - f.samples).max() <= 1e-10


def test_round_trip_and_plancherel(grid64):
    for seed in range(5):
        f = _random(grid64, seed)
        fh = forward_transform(f)
        back = inverse_transform(fh)
        assert np.linalg.norm(back.samples - f.samples) <= 1e-12 * np.linalg.norm(f.samples)
        assert abs(l2_norm(fh) ** 2 / ((2 * np.pi) ** 2 * l2_norm(f) ** 2) - 1) <= 1e-10


def test_wrong_space_rejected(grid64, unit_gaussian):
    with pytest.raises(ContractError):
        inverse_transform(unit_gaussian)
    with pytest.raises(ContractError):
        forward_transform(forward_transform(unit_gaussian))
    with pytest.raises(ContractError):
        propagate(forward_transform(unit_gaussian), 1.0)


def test_propagate_identity_and_nan(grid64, unit_gaussian):
    assert np.array_equal(propagate(unit_gaussian, 0.0).samples, unit_gaussian.samples)
    with pytest.raises(ContractError):
        propagate(unit_gaussian, float("nan"))


def test_propagate_matches_closed_form():
    # fhat = pi exp(-|xi|^2/4); inverting exp(-(1/4 - it)|xi|^2) gives
    # u(t, x) = exp(-|x|^2 / (1 - 4it)) / (1 - 4it)
    g = Grid2D(128, 12.0)
    t = 0.5
    u = propagate(gaussian_field(g, -1.0), t).samples
    z = 1 - 4j * t
    exact = np.exp(-g.radius_squared() / z) / z
    assert np.abs(u - exact).max() <= 1e-8


def test_band_limited_unitarity_long_time(grid64):
    f = random_wavepacket_field(grid64, 5)
    assert abs(l2_norm(propagate(f, 3.0)) / l2_norm(f) - 1) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31), t=st.floats(-5, 5))
def test_unitarity_property(seed, t):
    g = Grid2D(32, 6.0)
    f = _random(g, seed)
    assert abs(l2_norm(propagate(f, t)) - l2_norm(f)) <= 1e-12 * l2_norm(f)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), s=st.floats(-3, 3), t=st.floats(-3, 3))
def test_group_law(seed, s, t):
    g = Grid2D(32, 6.0)
    f = _random(g, seed)
    a = propagate(propagate(f, s), t).samples
    b = propagate(f, s + t).samples
    assert np.linalg.norm(a - b) <= 1e-11 * np.linalg.norm(b)


def test_gaussian_field_examples(grid64):
    f = gaussian_field(grid64, -1.0)
    assert f.samples[32, 32] == 1.0
    g = Grid2D(64, 8.0)  # x = 1 is a grid point here
    h = gaussian_field(g, -1.0, (2.0, 0.0), -1.0)
    i = np.unravel_index(np.abs(h.samples).argmax(), h.samples.shape)
    assert (g.x[i[0]], g.x[i[1]]) == (1.0, 0.0)
    assert abs(h.samples[i] - 1.0) <= 1e-15
    c = gaussian_field(grid64, -1 + 0.5j)
    assert np.allclose(np.abs(c.samples), np.exp(-grid64.radius_squared()), rtol=1e-14, atol=0)
    with pytest.raises(ContractError):
        gaussian_field(grid64, 0.5)
    with pytest.raises(ContractError):
        gaussian_field(grid64, 0.0 + 1j)


def test_l2_norm_examples(grid64):
    assert l2_norm(ComplexField2D(grid64, Space.PHYSICAL, np.zeros((64, 64)))) == 0.0
    assert abs(l2_norm(gaussian_field(grid64, -1.0)) - np.sqrt(np.pi / 2)) <= 1e-10


def test_inner_is_conjugate_linear_in_first_slot(grid64):
    f = random_wavepacket_field(grid64, 1)
    g = random_wavepacket_field(grid64, 2)
    assert inner(g * 2j, f) == pytest.approx(-2j * inner(g, f), rel=1e-14)
    assert inner(g, f * 2j) == pytest.approx(2j * inner(g, f), rel=1e-14)


def test_time_quadrature_invariants():
    for tq in (TimeQuadrature.tangent_legendre(129, 0.5), TimeQuadrature.tangent_legendre(9, 2.0),
               TimeQuadrature.uniform_truncated(129, 10.0), TimeQuadrature.uniform_truncated(10, 1.0)):
        t, w = tq.nodes, tq.weights
        assert len(t) == len(w) >= 9
        assert np.all(np.diff(t) > 0) and np.all(w > 0)
        assert np.abs(t + t[::-1]).max() <= 1e-14
    # integrates the algebraic tail 1/(1 + t^2) over R
    tq = TimeQuadrature.tangent_legendre(129, 1.0)
    assert np.dot(tq.weights, 1 / (1 + tq.nodes**2)) == pytest.approx(np.pi, rel=1e-12)


def test_time_quadrature_rejects():
    with pytest.raises(ContractError):
        TimeQuadrature.tangent_legendre(5)
    with pytest.raises(ContractError):
        TimeQuadrature(np.linspace(-1, 1, 9), -np.ones(9), "UniformTruncated")
