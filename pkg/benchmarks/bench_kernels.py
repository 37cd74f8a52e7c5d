"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]

JIT compilation is excluded (each kernel is warmed up once per backend).
"""
import argparse
import time
import timeit

import numpy as np

from rfexposure.kernels import get_backend
from rfexposure.propagation import Environment, default_models
from rfexposure.scenario import load_config, run_sweep


def cases(n, rng):
    d2d = rng.uniform(10.0, 5000.0, n)
    d3d = np.hypot(d2d, 8.5)
    los = rng.uniform(60.0, 120.0, n)
    nlos = los + rng.uniform(0.0, 30.0, n)
    p = rng.uniform(0.0, 1.0, n)
    ues = np.column_stack([rng.uniform(-600, 600, (n, 2)), np.full(n, 1.5)])
    sites = np.column_stack([rng.uniform(-500, 500, (19, 2)), np.full(19, 10.0)])
    uma = default_models()[Environment("FiveG", "UMa", 28.0)]
    return {
        "UMa expected path loss": lambda k: uma.expected(d2d, d3d, 28.0, 10.0, 1.5, backend=k),
        "linear LOS/NLOS mix": lambda k: k.mix_linear(los, nlos, p),
        "linear-domain mean": lambda k: k.mean_linear_db(los),
        "nearest site (19 sites)": lambda k: k.nearest_site(ues, sites),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="array length per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {name: get_backend(name) for name in ("numpy", "numba")}
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for label, fn in cases(args.n, rng).items():
        best = {}
        for name, kern in backends.items():
            fn(kern)
            best[name] = min(timeit.repeat(lambda: fn(kern), number=1, repeat=args.repeat))
        print(f"{label:28s} {best['numpy'] * 1e3:10.2f} {best['numba'] * 1e3:10.2f} "
              f"{best['numpy'] / best['numba']:8.2f}")

    cfg = load_config("5g_uma_16x16")
    for name, kern in backends.items():
        run_sweep(cfg, kern)
        t0 = time.perf_counter()
        run_sweep(cfg, kern)
        print(f"full 1001-point sweep, {name}: {(time.perf_counter() - t0) * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
