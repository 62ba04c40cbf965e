"""Seeded test and initial fields."""
from __future__ import annotations

import numpy as np

from .grid import ComplexField2D, ContractError, Grid2D, Space, gaussian_field, inverse_transform
from .rng import stream

__all__ = ["random_initial_field", "random_wavepacket_field", "INIT_KINDS"]

INIT_KINDS = ("random", "random_real", "perturbed_gaussian")


def random_initial_field(grid: Grid2D, kind: str = "random", seed: int | None = None,
                         perturbation: float = 0.3) -> ComplexField2D:
    """Starting point for :func:`~strichartz_lab.euler_lagrange.power_iterate`.

    ``random`` / ``random_real``: white noise low-passed to ``|xi| <= xi_max/3``
    and windowed by ``exp(-|x|^2 / (2 (L/4)^2))``, so the start is localised
    in both spaces.  ``perturbed_gaussian``: ``exp(-|x|^2/2)`` plus
    ``perturbation`` times an odd bump ``x1 exp(-|x - (0.5, 0)|^2)``.
    """
    if kind not in INIT_KINDS:
        raise ContractError(f"unknown init kind {kind!r}; expected one of {INIT_KINDS}")
    if kind == "perturbed_gaussian":
        base = gaussian_field(grid, -0.5).samples
        x1, x2 = grid.mesh()
        bump = x1 * np.exp(-((x1 - 0.5) ** 2 + x2**2))
        return ComplexField2D(grid, Space.PHYSICAL, base + perturbation * bump)
    if seed is None:
        raise ContractError("random initial fields need a seed")
    rng = stream(seed, "init:" + kind)
    n = grid.n_points
    noise = rng.standard_normal((n, n))
    if kind == "random":
        noise = noise + 1j * rng.standard_normal((n, n))
    spec = ComplexField2D(grid, Space.FREQUENCY, np.fft.fftshift(np.fft.fft2(noise)))
    mask = grid.radius_squared(Space.FREQUENCY) <= (grid.xi_max / 3.0) ** 2
    smooth = inverse_transform(spec.with_samples(spec.samples * mask)).samples
    if kind == "random_real":
        smooth = smooth.real
    window = np.exp(-grid.radius_squared() / (2.0 * (grid.half_width / 4.0) ** 2))
    return ComplexField2D(grid, Space.PHYSICAL, smooth * window)


def random_wavepacket_field(grid: Grid2D, seed: int, task=0, n_packets: int = 3, spread: float = 0.3,
                            width: float = 0.5, chirp: float = 0.1) -> ComplexField2D:
    """Random superposition of Gaussian wave packets, localised in ``x`` and ``xi``.

    Packet ``k`` is ``c_k exp(-(width + i chirp_k)|x - a_k|^2 + i b_k.x)`` with
    centres ``a_k`` and momenta ``b_k`` drawn from ``N(0, spread^2)``.
    """
    rng = stream(seed, task)
    x1, x2 = grid.mesh()
    out = np.zeros((grid.n_points,) * 2, dtype=np.complex128)
    for _ in range(n_packets):
        a = rng.normal(scale=spread, size=2)
        b = rng.normal(scale=spread, size=2)
        c = complex(rng.normal(), rng.normal())
        A = -width + 1j * chirp * rng.normal()
        r2 = (x1 - a[0]) ** 2 + (x2 - a[1]) ** 2
        out += c * np.exp(A * r2 + 1j * (b[0] * x1 + b[1] * x2))
    return ComplexField2D(grid, Space.PHYSICAL, out)
