"""Compare the numba and numpy path kernels on one corpus function.

Usage::

    python3 benchmarks/bench_kernels.py [--paths 4096] [--steps 256] [--function 3] [--repeat 3]

The numba timing excludes the first (compiling) call. Both backends must
agree to 1e-12 relative; the script exits 1 otherwise.
"""

import argparse
import sys
import time

import numpy as np

from becknerlab import _accel
from becknerlab.functionals import load_corpus
from becknerlab.kernels import KernelOutputs, run_block
from becknerlab.stochastic import McConfig, _kernel_inputs, default_plan

FIELDS = ("plain", "cumulative", "nested", "snap_m", "snap_theta", "snap_a", "snap_cum", "snap_w")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=4096)
    ap.add_argument("--steps", type=int, default=256)
    ap.add_argument("--function", type=int, default=3, help="corpus index")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    f = load_corpus()[0][args.function]
    cfg = McConfig(path_count=args.paths, time_steps=args.steps, seed=1, dimension=f.dimension)
    inp = _kernel_inputs(f, cfg, default_plan(cfg))

    def run(backend):
        out = KernelOutputs(args.paths, inp)
        run_block(0, args.paths, inp, out, backend)
        return out

    backends = ["numpy"] + (["numba"] if _accel.NUMBA_AVAILABLE else [])
    results = {}
    if "numba" in backends:
        t0 = time.perf_counter()
        run_block(0, 8, inp, KernelOutputs(8, inp), "numba")
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.2f} s")
    for b in backends:
        results[b] = best_of(lambda: run(b), args.repeat)

    work = args.paths * args.steps
    print(f"function {args.function} (d={f.dimension}), {args.paths} paths x {args.steps} steps")
    for b, (t, _) in results.items():
        print(f"  {b:6s} {t:8.3f} s  {work / t / 1e6:8.2f} M path-steps/s")
    if len(results) < 2:
        print("  numba not installed; nothing to compare")
        return 0
    print(f"  speedup numba/numpy: {results['numpy'][0] / results['numba'][0]:.1f}x")

    worst = 0.0
    a, b = results["numpy"][1], results["numba"][1]
    for name in FIELDS:
        x, y = getattr(a, name), getattr(b, name)
        worst = max(worst, float(np.max(np.abs(x - y) / np.maximum(1.0, np.abs(y)), initial=0.0)))
    print(f"  max relative difference: {worst:.2e}")
    return 0 if worst <= 1e-12 else 1


if __name__ == "__main__":
    sys.exit(main())
