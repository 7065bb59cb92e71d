"""Compare the compiled and pure-Python kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times the canonical-labeling kernel on random colored graphs, the cycle-edge
kernel on random plain graphs, and two end-to-end workloads (FC5
enumeration on six vertices, the triangle oracle at n = 8) in a fresh
interpreter per backend.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit

from flagcert import _pykernels

try:
    from flagcert import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def random_colored(rng: random.Random, n: int, p: float):
    red, blue = [0] * n, [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            r = rng.random()
            if r < p / 2:
                red[i] |= 1 << j
                red[j] |= 1 << i
            elif r < p:
                blue[i] |= 1 << j
                blue[j] |= 1 << i
    return red, blue


def bench_canon(mod, graphs, repeat: int) -> float:
    def run():
        for n, red, blue in graphs:
            mod.canon(n, red, blue, 0)

    return min(timeit.repeat(run, number=1, repeat=repeat)) / len(graphs)


def bench_cycles(mod, graphs, length: int, repeat: int) -> float:
    def run():
        for n, adj in graphs:
            mod.cycle_edges(n, adj, length)

    return min(timeit.repeat(run, number=1, repeat=repeat)) / len(graphs)


END_TO_END = {
    "enumerate n=6 FC5": "from flagcert.enumeration import enumerate_colored_graphs as e; e(6, 'FC5')",
    "oracle n=8 L=3": "from flagcert.extremal import brute_force_min as b; b(8, 3)",
}


def bench_process(code: str, pure: bool) -> float:
    env = dict(os.environ)
    env.pop("FLAGCERT_CACHE_DIR", None)
    env["FLAGCERT_PURE_PYTHON"] = "1" if pure else "0"
    prog = f"import time; t = time.perf_counter(); {code}; print(time.perf_counter() - t)"
    out = subprocess.run([sys.executable, "-c", prog], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _ckernels is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

    rng = random.Random(args.seed)
    rows = []
    for n in (6, 10, 16):
        graphs = [(n, *random_colored(rng, n, 0.6)) for _ in range(300)]
        py = bench_canon(_pykernels, graphs, args.repeat)
        cy = bench_canon(_ckernels, graphs, args.repeat)
        rows.append((f"canon n={n}", py, cy))
    for n, length in ((16, 5), (24, 7)):
        graphs = []
        for _ in range(50):
            red, blue = random_colored(rng, n, 0.3)
            graphs.append((n, [r | b for r, b in zip(red, blue)]))
        py = bench_cycles(_pykernels, graphs, length, args.repeat)
        cy = bench_cycles(_ckernels, graphs, length, args.repeat)
        rows.append((f"cycle_edges n={n} L={length}", py, cy))
    for name, code in END_TO_END.items():
        rows.append((name, bench_process(code, True), bench_process(code, False)))

    print(f"{'workload':<26}{'python (s)':>14}{'cython (s)':>14}{'speedup':>10}")
    for name, py, cy in rows:
        print(f"{name:<26}{py:>14.3g}{cy:>14.3g}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
