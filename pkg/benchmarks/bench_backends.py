"""Time map construction and the relevance pass for both kernel backends.

    python benchmarks/bench_backends.py --d 1000 2000 4000 --n 300 --b 20
"""

import argparse
import time

import numpy as np

from land import _backend
from land.kernelmap import KernelConfig, build_output_map
from land.scoring import EngineConfig, FeatureMaps, relevance_pass


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, nargs="+", default=[1000, 2000, 4000])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--b", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _backend.load("python")}
    try:
        backends["compiled"] = _backend.load("compiled")
    except ImportError:
        print("compiled extension not available; timing the fallback only")

    cfg = KernelConfig(basis_count=args.b)
    eng = EngineConfig(args.workers)
    print(f"{'backend':>9} {'d':>6} {'build [s]':>10} {'score [s]':>10}")
    for d in args.d:
        X = np.random.default_rng(d).standard_normal((d, args.n))
        G = build_output_map(X[0], cfg)
        for name, be in backends.items():
            build = best_of(lambda: FeatureMaps.build(X, cfg, eng, be), args.repeats)
            maps = FeatureMaps.build(X, cfg, eng, be)
            score = best_of(lambda: relevance_pass(maps, G, eng, be), args.repeats)
            print(f"{name:>9} {d:>6} {build:>10.4f} {score:>10.4f}")


if __name__ == "__main__":
    main()
