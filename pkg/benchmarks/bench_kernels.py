"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--pairs 4000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from strichartz_lab.fields import random_wavepacket_field
from strichartz_lab.functional import _support_radius, _trig_source, angular_nodes, circle_pairs
from strichartz_lab.grid import Grid2D, forward_transform
from strichartz_lab import bilinear, kernels
from strichartz_lab.kernels import _fallback

try:
    from strichartz_lab.kernels import _ckernels
except ImportError:
    _ckernels = None


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=4000, help="outer (xi1, xi2) pairs for the circle sum")
    ap.add_argument("--samples", type=int, default=100_000, help="points for the constraint weights")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = Grid2D(16, 5.01)
    fh = [forward_transform(random_wavepacket_field(g, 1, i)) for i in range(4)]
    xi1, xi2, coef = circle_pairs(fh[0], fh[1])
    sel = np.random.default_rng(0).choice(coef.size, size=min(args.pairs, coef.size), replace=False)
    xi1, xi2, coef = xi1[sel], xi2[sel], coef[sel]
    r = 0.5 * np.hypot(*(xi1 - xi2).T)
    m = angular_nodes(r, max(_support_radius(fh[2]), _support_radius(fh[3])))
    lo, hi = np.zeros_like(r), np.full_like(r, 2 * np.pi)
    src3, src4 = _trig_source(fh[2]), _trig_source(fh[3])
    circle = lambda mod: lambda: mod.circle_sum(xi1, xi2, coef, lo, hi, m, src3, src4, False, 0.0, 0.0)

    rng = np.random.default_rng(1)
    e1 = rng.normal(scale=5, size=(args.samples, 2))
    e2 = rng.normal(scale=5, size=(args.samples, 2))
    th = rng.uniform(0, 2 * np.pi, args.samples)
    weights = lambda mod: lambda: mod.constraint_weights(e1, e2, th, 0.05, 0.1)

    pair = bilinear.separated_pair(Grid2D(256, 3 * np.pi), 1.0, 16, 0)

    def cells(mod):
        def run():
            saved = kernels.circle_sum
            kernels.circle_sum = mod.circle_sum
            try:
                return bilinear.bilinear_ratio(pair.h_low, pair.h_high, route="cells", subcells=2)
            finally:
                kernels.circle_sum = saved
        return run

    print(f"circle_sum: {coef.size} pairs, {int(m.sum())} angular nodes; constraint_weights: {args.samples} points")
    print(f"{'kernel':<20}{'backend':<10}{'seconds':>10}{'speedup':>10}")
    for name, make in (("circle_sum", circle), ("constraint_weights", weights),
                       ("bilinear cells N=16", cells)):
        t_py, v_py = _best(make(_fallback), args.repeat)
        print(f"{name:<20}{'python':<10}{t_py:>10.4f}{'1.0':>10}")
        if _ckernels is None:
            print(f"{name:<20}{'compiled':<10}{'n/a':>10}")
            continue
        t_c, v_c = _best(make(_ckernels), args.repeat)
        diff = np.max(np.abs(np.asarray(v_c) - np.asarray(v_py)) / np.max(np.abs(v_py)))
        print(f"{name:<20}{'compiled':<10}{t_c:>10.4f}{t_py / t_c:>10.1f}   max rel diff {diff:.1e}")


if __name__ == "__main__":
    main()
