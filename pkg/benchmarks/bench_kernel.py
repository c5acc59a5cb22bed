"""Compare the compiled and pure-Python sequential-measurement kernels.

    python3 benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from ejmshare import kernel
from ejmshare.scenario import ScenarioConfig, run
from ejmshare.sweep import evaluate_point


def bench(fn, repeat: int) -> float:
    fn()  # warm caches
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)

    cfg = ScenarioConfig(theta=0.3, pointer="optimal", G1=0.6, G2=0.7)
    backends = [b for b in kernel.BACKENDS if b != "compiled" or kernel.HAVE_COMPILED]
    if not kernel.HAVE_COMPILED:
        print("compiled kernel not built; timing the python backend only")

    ref = run(cfg, backend="python").probs
    rows = []
    for b in backends:
        diff = np.max(np.abs(run(cfg, backend=b).probs - ref))
        t_tensor = bench(lambda: run(cfg, check=False, backend=b), args.repeat)
        t_point = bench(lambda: evaluate_point(cfg, 0.6, backend=b), max(args.repeat // 4, 1))
        rows.append((b, t_tensor, t_point, diff))

    print(f"{'backend':<10}{'tensor [ms]':>14}{'sweep point [ms]':>19}{'max |diff|':>13}")
    for b, t1, t2, d in rows:
        print(f"{b:<10}{t1 * 1e3:>14.3f}{t2 * 1e3:>19.3f}{d:>13.1e}")
    if len(rows) == 2:
        print(f"speedup (tensor): {rows[1][1] / rows[0][1]:.1f}x")


if __name__ == "__main__":
    main()
