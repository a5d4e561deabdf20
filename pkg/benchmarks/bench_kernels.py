"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are timed in one process (the numpy reference functions are
always importable; the jitted ones exist whenever numba does), and each
pairing is checked for bit-identical results before timing.  With
ADAPTNET_BACKEND=numpy only the fallback column is reported.
"""

import argparse
import time

import numpy as np

from adaptnet import kernels


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def walk(rng, n):
    steps = rng.normal(scale=3.0, size=(n, 2))
    return np.cumsum(steps, axis=0)


def frechet_nb(axy, bxy):
    return kernels.frechet_xy_nb(
        np.ascontiguousarray(axy[:, 0]),
        np.ascontiguousarray(axy[:, 1]),
        np.ascontiguousarray(bxy[:, 0]),
        np.ascontiguousarray(bxy[:, 1]),
    )


def bench_frechet(repeat):
    rng = np.random.default_rng(42)
    print("discrete Frechet distance (seconds per call, best of %d)" % repeat)
    print("%8s %12s %12s %8s" % ("points", "numpy", "numba", "speedup"))
    for n in (32, 64, 128, 256, 512):
        a, b = walk(rng, n), walk(rng, n)
        t_py = best_of(kernels.frechet_distance_py, (a, b), repeat)
        if kernels.USE_NUMBA:
            assert frechet_nb(a, b) == kernels.frechet_distance_py(a, b)
            t_nb = best_of(frechet_nb, (a, b), repeat)
            print("%8d %12.6f %12.6f %7.1fx" % (n, t_py, t_nb, t_py / t_nb))
        else:
            print("%8d %12.6f %12s %8s" % (n, t_py, "-", "-"))


def queue_inputs(rng, horizon, lam=0.5, mu=1.0):
    n = int(lam * horizon * 1.3) + 64
    arrivals = np.cumsum(rng.exponential(1.0 / lam, size=n))
    services = rng.exponential(1.0 / mu, size=n)
    priority = rng.random(n)
    return arrivals, services, priority, horizon


def bench_queue(repeat):
    rng = np.random.default_rng(43)
    print()
    print("AoI status-update queue (seconds per run, best of %d)" % repeat)
    print("%8s %10s %12s %12s %8s" % ("horizon", "disc", "numpy", "numba", "speedup"))
    for horizon in (1e4, 1e5, 1e6):
        args_base = queue_inputs(rng, horizon)
        for disc in (kernels.FCFS, kernels.LCFS_S, kernels.PRIORITY):
            args = args_base + (disc,)
            t_py = best_of(kernels.aoi_queue_sim_py, args, repeat)
            name = {0: "FCFS", 1: "LCFS_S", 3: "PRIORITY"}[disc]
            if kernels.USE_NUMBA:
                assert kernels.aoi_queue_sim_nb(*args) == kernels.aoi_queue_sim_py(*args)
                t_nb = best_of(kernels.aoi_queue_sim_nb, args, repeat)
                print(
                    "%8.0e %10s %12.6f %12.6f %7.1fx"
                    % (horizon, name, t_py, t_nb, t_py / t_nb)
                )
            else:
                print("%8.0e %10s %12.6f %12s %8s" % (horizon, name, t_py, "-", "-"))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timings per case")
    args = parser.parse_args()
    print("active backend: %s (numba available: %s)" % (kernels.BACKEND, kernels.USE_NUMBA))
    if kernels.USE_NUMBA:
        # trigger JIT compilation outside the timed region
        rng = np.random.default_rng(0)
        frechet_nb(walk(rng, 8), walk(rng, 8))
        kernels.aoi_queue_sim_nb(*(queue_inputs(rng, 100.0) + (kernels.FCFS,)))
    bench_frechet(args.repeat)
    bench_queue(args.repeat)


if __name__ == "__main__":
    main()
