import numpy as np
import pytest

from strichartz_lab.euler_lagrange import (DivergenceError, SolverConfig, apply_el_operator, el_residual, omega_of,
                                           power_iterate)
from strichartz_lab.fields import random_initial_field, random_wavepacket_field
from strichartz_lab.functional import C_Q, gaussian_ratio_closed_form, quadrilinear_time_domain, strichartz_ratio
from strichartz_lab.grid import (ComplexField2D, ContractError, Grid2D, TimeQuadrature, gaussian_field, inner,
                                 l2_norm)


def test_adjoint_identity(grid64, tq129):
    worst = 0.0
    for k in range(20):
        g = random_wavepacket_field(grid64, 1000 + k)
        f = random_wavepacket_field(grid64, 2000 + k)
        lhs = inner(g, apply_el_operator(f, tq129))
        rhs = quadrilinear_time_domain(g, f, f, f, tq129).value
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    assert worst <= 1e-10


def test_gaussian_is_an_eigenvector(unit_gaussian, tq129):
    t = apply_el_operator(unit_gaussian, tq129)
    cos = abs(inner(unit_gaussian, t)) / (l2_norm(unit_gaussian) * l2_norm(t))
    assert cos >= 1 - 1e-6


def test_trilinear_homogeneity(grid64, tq129):
    f = random_wavepacket_field(grid64, 3)
    lam = 2j
    a = apply_el_operator(f * lam, tq129).samples
    b = abs(lam) ** 2 * lam * apply_el_operator(f, tq129).samples
    assert np.linalg.norm(a - b) <= 1e-12 * np.linalg.norm(b)


def test_omega(unit_gaussian, grid64, tq129):
    assert omega_of(unit_gaussian, tq129) == pytest.approx(C_Q * gaussian_ratio_closed_form(1.0), rel=1e-6)
    f = random_wavepacket_field(grid64, 8)
    w = omega_of(f, tq129)
    assert w > 0
    assert omega_of(f * 2.0, tq129) == pytest.approx(4 * w, rel=1e-12)
    assert w == pytest.approx(C_Q * strichartz_ratio(f, tq129).phi * l2_norm(f) ** 2, rel=1e-12)
    noise = random_wavepacket_field(grid64, 9)
    bumped = f + noise * (1e-6 * l2_norm(f) / l2_norm(noise))
    assert abs(omega_of(bumped, tq129) / w - 1) <= 1e-4


def test_residual_of_gaussian_and_random():
    g = Grid2D(128, 12.0)
    tq = TimeQuadrature.tangent_legendre(129, 0.5)
    assert el_residual(gaussian_field(g, -1.0), tq) <= 1e-5
    r = random_initial_field(Grid2D(64, 10.0), "random", 3)
    assert el_residual(r, tq) >= 0.1


def test_zero_field_rejected(grid64, tq129):
    z = ComplexField2D(grid64, 0, np.zeros((64, 64)))
    for fn in (apply_el_operator, omega_of, el_residual):
        with pytest.raises(ContractError):
            fn(z, tq129)


def test_power_iterate_from_gaussian(unit_gaussian, tq129):
    rep = power_iterate(unit_gaussian, tq129, SolverConfig(tol=1e-6))
    assert rep.converged and rep.iterations <= 5 and rep.residual <= 1e-6


def test_power_iterate_monotone_from_perturbed_gaussian(grid64, tq129):
    f0 = random_initial_field(grid64, "perturbed_gaussian")
    rep = power_iterate(f0, tq129)
    steps = np.diff(rep.phi_trace)
    assert np.all(steps >= -1e-9 * rep.phi)
    assert rep.converged
    assert abs(l2_norm(rep.field) - 1) <= 1e-13
    assert rep.omega == pytest.approx(C_Q * strichartz_ratio(rep.field, tq129).phi, rel=1e-8)


def test_converged_report(converged, tq129):
    assert converged.converged
    assert converged.residual <= SolverConfig().tol
    assert el_residual(converged.field, tq129) <= 1e-6
    assert converged.sharp_constant_estimate == pytest.approx(converged.phi**0.25)
    d = converged.as_dict()
    assert len(d["phi_trace"]) == converged.iterations + 1


def test_divergence_guard(grid64, tq129):
    # a negative drop threshold counts every step as a decrease
    cfg = SolverConfig(divergence_drop=-1.0, max_iter=50)
    with pytest.raises(DivergenceError) as exc:
        power_iterate(random_initial_field(grid64, "random", 1), tq129, cfg)
    assert len(exc.value.phi_trace) == 4
