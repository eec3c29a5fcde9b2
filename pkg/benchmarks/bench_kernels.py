"""Time the hot kernels under both backends and check they agree.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from vilentropy import _accel, kernels


def _cases():
    rng = np.random.default_rng(0)
    disk = rng.normal(size=(6000, 2))
    disk /= np.maximum(1.0, np.linalg.norm(disk, axis=1))[:, None]
    cube = rng.uniform(-1, 1, size=(4000, 4))
    w2, w4 = np.ones(2), np.ones(4)
    return {
        "ball_count d=4 R^2=400": lambda: kernels.ball_count_int(4, 400),
        "orthant_counts d=2 L=2000": lambda: int(kernels.orthant_counts(2, 2000)[-1]),
        "orthant_counts d=4 L=120": lambda: int(kernels.orthant_counts(4, 120)[-1]),
        "fps disk 6000 pts, 256 picks": lambda: kernels.farthest_point_order(disk, w2, 2.0, max_picks=256)[2],
        "greedy_cover disk eps=0.1": lambda: kernels.greedy_cover(disk, w2, 2.0, 0.1),
        "greedy_cover cube4 sup eps=0.5": lambda: kernels.greedy_cover(cube, w4, np.inf, 0.5),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    cases = _cases()
    results: dict[str, dict[str, tuple[float, object]]] = {}
    for name in backends:
        _accel.set_backend(name)
        for label, fn in cases.items():
            value = fn()  # warm-up, includes jit compilation
            best = min(_timed(fn) for _ in range(args.repeat))
            results.setdefault(label, {})[name] = (best, value)
    width = max(map(len, cases))
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "   speedup  agree")
    for label, row in results.items():
        times = [row[b][0] for b in backends]
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        agree = len({repr(row[b][1]) for b in backends}) == 1
        print(f"{label:<{width}}  " + "  ".join(f"{t * 1e3:>8.1f}ms" for t in times) + f"  {speed:>7.1f}x  {agree}")


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
