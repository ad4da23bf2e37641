"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--steps 4096] [--points 100000] [--repeat 5]

Prints one row per kernel: best-of-repeat wall time for each backend, the
speed-up, and the largest difference between the two outputs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from fraclangevin import _kernels_py
from fraclangevin.oracle import TimeGrid

try:
    from fraclangevin import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def cases(steps: int, points: int):
    rng = np.random.default_rng(0)
    x = 10.0 ** rng.uniform(-3, 5, points)
    t = TimeGrid.graded(1.0, steps, 3.0).nodes
    y = np.sin(3 * t) + t**1.5
    scalars = [np.array([v]) for v in x[:2000]]
    return {
        f"ml_array ({points} points)": lambda k: k.ml_array(0.6, 1.4, x)[0],
        "ml_array (2000 scalar calls)": lambda k: np.array([k.ml_array(0.6, 1.4, v)[0][0] for v in scalars]),
        f"caputo_l1 (M={steps})": lambda k: k.caputo_l1(t, y, 0.5),
        f"l1_relaxation_solve (M={steps})": lambda k: k.l1_relaxation_solve(t, 1.0 + y, 0.5, 10.0, 1.0),
        f"frac_integral_pl (M={steps})": lambda k: k.frac_integral_pl(t, y, 0.5),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=4096)
    parser.add_argument("--points", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _compiled is None:
        print("compiled extension not available; build it with: python3 setup.py build_ext --inplace")
        return 1

    print(f"{'kernel':36s} {'python [s]':>11s} {'compiled [s]':>13s} {'speed-up':>9s} {'max |diff|':>11s}")
    for name, call in cases(args.steps, args.points).items():
        t_py = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(_compiled), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(call(_kernels_py) - call(_compiled))))
        print(f"{name:36s} {t_py:11.4f} {t_c:13.4f} {t_py / t_c:9.1f} {diff:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
