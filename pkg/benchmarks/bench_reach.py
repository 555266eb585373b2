#!/usr/bin/env python3
"""Benchmark the grid reach kernels: numba JIT vs the pure-numpy fallback.

Runs the same reach computations on both backends, checks that the resulting
occupancy grids are identical, and reports wall times and speedup.

    python3 benchmarks/bench_reach.py [--repeats N] [--scale S]

--scale multiplies the default grid resolution (2.0 = coarser/faster,
0.5 = finer/slower).
"""
import argparse
import time

import numpy as np

from se2control._accel import HAS_NUMBA
from se2control.flow import equilibrium
from se2control.reachability import default_grid_config, reach_backward, reach_forward
from se2control.system import ReducedSpec


def scenarios(scale: float):
    open_rs = ReducedSpec(1.0, 2.0, (1.0, 0.0), (-1.0, 1.0))
    open_cfg = default_grid_config(open_rs)
    open_cfg.resolution *= scale
    tz_rs = ReducedSpec(0.0, 1.0, (1.0, 0.0), (-2.0, 2.0))
    tz_cfg = default_grid_config(
        tz_rs, resolution=0.02 * scale, bounds=(-2.0, 2.0, -2.0, 2.0)
    )
    return [
        ("backward, expanding case", reach_backward, open_rs,
         equilibrium(open_rs, 0.5), open_cfg),
        ("forward, rotation-only case", reach_forward, tz_rs,
         np.zeros(2), tz_cfg),
    ]


def bench(fn, rs, x0, cfg, backend: str, repeats: int):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(rs, x0, cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()

    if not HAS_NUMBA:
        print("numba is not importable; only the numpy fallback is available.")

    rows = []
    for name, fn, rs, x0, cfg in scenarios(args.scale):
        if HAS_NUMBA:
            # Throwaway call so JIT compilation is not billed to the timing.
            fn(rs, x0, cfg, backend="numba")
            t_nb, r_nb = bench(fn, rs, x0, cfg, "numba", args.repeats)
        t_np, r_np = bench(fn, rs, x0, cfg, "numpy", args.repeats)
        if HAS_NUMBA:
            if not np.array_equal(r_nb.occupied, r_np.occupied):
                raise SystemExit(f"backend mismatch in scenario: {name}")
            rows.append((name, r_np.cell_count, t_nb, t_np, t_np / t_nb))
        else:
            rows.append((name, r_np.cell_count, None, t_np, None))

    hdr = f"{'scenario':<30} {'cells':>8} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}"
    print(hdr)
    print("-" * len(hdr))
    for name, cells, t_nb, t_np, speedup in rows:
        nb = f"{t_nb:10.3f}" if t_nb is not None else f"{'n/a':>10}"
        sp = f"{speedup:8.1f}" if speedup is not None else f"{'n/a':>8}"
        print(f"{name:<30} {cells:>8} {nb} {t_np:10.3f} {sp}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
