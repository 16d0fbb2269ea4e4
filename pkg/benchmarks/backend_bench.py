#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

Times the three hot kernels in isolation and a full solve routed through
each backend. Run after an editable install:

    python3 benchmarks/backend_bench.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import mta.bandwidth as bw_mod
import mta.solver as solver_mod
from mta.backend import available_backends
from mta.scenes import SceneConfig, generate_scene


def timeit(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--views", type=int, default=64)
    parser.add_argument("--dim", type=int, default=512)
    parser.add_argument("--classes", type=int, default=100)
    args = parser.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("note: compiled extension unavailable, timing the numpy backend only")

    scene = generate_scene(
        SceneConfig(seed=0, dim=args.dim, n_classes=args.classes, n_views=args.views)
    )
    f = scene.views.views
    rng = np.random.default_rng(0)
    mode = f[0] + 0.01 * rng.standard_normal(args.dim)
    inv_h = 1.0 / rng.uniform(0.2, 2.0, size=args.views)
    y = rng.dirichlet(np.ones(args.views))
    w = rng.uniform(size=(args.views, args.views))
    w = (w + w.T) / 2

    rows = []
    for name, impl in sorted(backends.items()):
        kern = impl.gaussian_weights(f, mode, inv_h)
        rows.append(
            (
                name,
                timeit(lambda: impl.gaussian_weights(f, mode, inv_h), args.repeats),
                timeit(lambda: impl.y_step(kern, w, y, 4.0, 0.2), args.repeats),
                timeit(lambda: impl.m_step(f, y, mode, inv_h), args.repeats),
            )
        )

    print(f"kernel timings (N={args.views}, d={args.dim}), seconds per call:")
    print(f"{'backend':<8} {'gaussian_weights':>18} {'y_step':>12} {'m_step':>12}")
    for name, tg, ty, tm in rows:
        print(f"{name:<8} {tg:>18.3e} {ty:>12.3e} {tm:>12.3e}")

    print(f"\nfull solve (N={args.views}, d={args.dim}, K={args.classes}):")
    for name, impl in sorted(backends.items()):
        solver_mod.backend = impl
        bw_mod.backend = impl
        t = timeit(lambda: solver_mod.mta_solve(scene.views, scene.classes), max(5, args.repeats // 20))
        print(f"{name:<8} {t * 1e3:>10.2f} ms")


if __name__ == "__main__":
    main()
