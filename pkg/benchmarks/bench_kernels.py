"""Compiled vs pure-Python kernels, plus a tree build that leans on them.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends get identical inputs; results must agree before timings count.
"""
import argparse
import os
import random
import subprocess
import sys
import time
import timeit

from tropivor import _pykernels as py

try:
    from tropivor import _ckernels as cy
except ImportError:  # extension not built
    cy = None

INF = py.INF


def random_matrix(rng, n, span=50):
    m = [INF] * (n * n)
    for i in range(n):
        m[i * n + i] = 0
        for j in range(n):
            if i != j and rng.random() < 0.8:
                m[i * n + j] = rng.randint(0, span)
    return m


def cases(seed=0, count=200):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice((3, 4, 5))
        m = random_matrix(rng, n)
        if py.close(m, n):
            b = [0] + [rng.randint(-30, 30) for _ in range(n - 1)]
            out.append((m, n, b))
    return out


def bench(mod, data, repeat):
    def run():
        for m, n, b in data:
            c = list(m)
            mod.close(c, n)
            mod.full_dimensional(c, n)
            mod.cone_index(c, n, b)
            mod.split(c, n, b)
            mod.trop_dist(b, [0] * n)
    return min(timeit.repeat(run, number=1, repeat=repeat))


def agree(data):
    for m, n, b in data:
        c1, c2 = list(m), list(m)
        assert py.close(c1, n) == cy.close(c2, n) and c1 == c2
        assert py.full_dimensional(c1, n) == cy.full_dimensional(c2, n)
        assert py.cone_index(c1, n, b) == cy.cone_index(c2, n, b)
        assert py.split(c1, n, b) == cy.split(c2, n, b)


def tree_time(pure: bool) -> float:
    code = (
        "import time;from tropivor import oracle, voronoi;"
        "S=oracle.random_site_set(2,50,seed=50);t=time.perf_counter();"
        "voronoi.build_tree(S,1);print(time.perf_counter()-t)"
    )
    env = dict(os.environ, TROPIVOR_PURE="1" if pure else "0")
    return float(subprocess.check_output([sys.executable, "-c", code], env=env))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    data = cases()
    tp = bench(py, data, args.repeat)
    print(f"kernels, {len(data)} cases   python  {tp * 1e3:8.2f} ms")
    if cy is None:
        print("compiled extension not built; nothing to compare")
        return
    agree(data)
    tc = bench(cy, data, args.repeat)
    print(f"kernels, {len(data)} cases   cython  {tc * 1e3:8.2f} ms   speedup {tp / tc:5.1f}x")
    t0 = time.perf_counter()
    a, b = tree_time(True), tree_time(False)
    print(f"tree build, n=50 d=2     python  {a:8.3f} s   cython {b:8.3f} s   speedup {a / b:5.1f}x")
    print(f"(wall {time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
