"""Compiled versus pure-Python selection kernels.

Usage: ``python3 benchmarks/bench_bip.py [--repeat N] [--seed S]``
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from dsfreal.bip import _kernels_py

try:
    from dsfreal.bip import _kernels as _compiled
except ImportError:
    _compiled = None


def _table(rng, l, p, density=0.35):
    t = (rng.random((l, p)) < density).astype(int)
    for i in range(l):
        if not t[i].any():
            t[i, rng.integers(p)] = 1
    return [[int(v) for v in row] for row in t]


def _graph(rng, n, density=0.5):
    up = np.triu(rng.random((n, n)) < density, 1)
    adj = up | up.T
    return [sum(1 << int(j) for j in np.flatnonzero(adj[i])) for i in range(n)]


def cases(seed: int):
    rng = np.random.default_rng(seed)
    out = []
    for l in (12, 16, 20):
        costs = _table(rng, l, 4)
        cap = [int(c) for c in rng.integers(1, 4, 4)]
        out.append((f"exhaustive l={l}", "exhaustive", (costs, [1] * l, cap)))
    for l in (20, 30, 40):
        costs = _table(rng, l, 5)
        cap = [int(c) for c in rng.integers(1, 4, 5)]
        out.append((f"branch_bound l={l}", "branch_bound", (costs, [1] * l, cap)))
    for n in (20, 35, 50):
        out.append((f"max_clique n={n}", "max_clique", (_graph(rng, n),)))
    return out


def _time(fn, args, repeat):
    fn(*args)  # warm up
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"{'case':<22}{'python [s]':>12}{'compiled [s]':>14}{'speed-up':>10}")
    for name, method, fargs in cases(args.seed):
        t_py = _time(getattr(_kernels_py, method), fargs, args.repeat)
        if _compiled is None:
            print(f"{name:<22}{t_py:>12.4f}{'n/a':>14}{'':>10}")
            continue
        res_py = getattr(_kernels_py, method)(*fargs)
        res_c = getattr(_compiled, method)(*fargs)
        if res_py != res_c:
            raise SystemExit(f"{name}: backends disagree ({res_py} vs {res_c})")
        t_c = _time(getattr(_compiled, method), fargs, args.repeat)
        print(f"{name:<22}{t_py:>12.4f}{t_c:>14.5f}{t_py / max(t_c, 1e-9):>9.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
