"""Time the compiled and numpy stepping kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--steps 2000] [--repeat 3] [--sizes 100 400 1600]
"""

import argparse
import timeit

import numpy as np

from plapsim import harness, kernels
from plapsim.model import Interval, RadialBall
from plapsim.solver import Grid, SolverConfig, _Stepper

WORKLOADS = {
    "heat interval": (harness.GLOBAL_TUPLE.replace(alpha=1e-300, beta=0.0, gamma=0.0, nu=0.0),
                      lambda n: Grid.build(Interval(0.0, 1.0), n)),
    "global interval": (harness.GLOBAL_TUPLE, lambda n: Grid.build(Interval(0.0, 1.0), n)),
    "blow-up ball N=3": (harness.BLOWUP_TUPLE.replace(p=2.5, r=1.5, q=1.25),
                         lambda n: Grid.build(RadialBall(10.0, 3), n)),
}


def time_advance(backend, P, grid, steps, repeat):
    cfg = SolverConfig(n=grid.n)
    st = _Stepper(grid, P, cfg, backend)
    u0 = harness.bump(grid, 0.1, 0.5)
    series = np.empty((steps, 5))

    def once():
        u = u0.copy()
        st.advance(u, 0.0, np.inf, steps, series, 0)

    once()  # warm-up
    return min(timeit.repeat(once, number=1, repeat=repeat)) / steps


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 400, 1600])
    args = ap.parse_args(argv)

    avail = kernels.available()
    names = [b for b in ("cython", "python") if b in avail]
    print(f"default backend: {kernels.BACKEND}; steps per timing: {args.steps}")
    head = f"{'workload':<18}{'n':>6}" + "".join(f"{b + ' us/step':>18}" for b in names)
    print(head + (f"{'speed-up':>10}" if len(names) == 2 else ""))
    for label, (P, make) in WORKLOADS.items():
        for n in args.sizes:
            grid = make(n)
            per = [time_advance(avail[b], P, grid, args.steps, args.repeat) for b in names]
            line = f"{label:<18}{n:>6}" + "".join(f"{t * 1e6:>18.2f}" for t in per)
            if len(per) == 2:
                line += f"{per[1] / per[0]:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
