"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 60] [--p 5000] [--repeat 5]

Reports the best-of-``repeat`` wall time for one greedy scoring pass, one
CART split search, and a full 20-estimator RandomSCM fit under each backend.
"""
import argparse
import importlib
import os
import subprocess
import sys
import timeit

import numpy as np

from scmforest import _fallback
from scmforest.rules import RuleSpace

FIT_SNIPPET = """
import timeit
from scmforest.ensemble import RandomScmParams, fit_ensemble
from scmforest.synth import make_planted
d, _ = make_planted(n={n}, p={p}, seed=0)
params = RandomScmParams(n_estimators=20, master_seed=1)
print(min(timeit.repeat(lambda: fit_ensemble(d, params), number=1, repeat={repeat})))
"""


def time_call(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--p", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    try:
        compiled = importlib.import_module("scmforest._kernels")
    except ImportError:
        sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    rng = np.random.default_rng(0)
    X = rng.lognormal(10, 1, size=(args.n, args.p))
    y = rng.integers(0, 2, size=args.n)
    space = RuleSpace(X)
    neg = (y == 0).astype(np.uint8)
    pos = (y == 1).astype(np.uint8)
    values = np.ascontiguousarray(space._sorted)
    labels = np.ascontiguousarray(y[space.order].astype(np.uint8))

    rows = []
    for name, kern in (("cython", compiled), ("python", _fallback)):
        t_rule = time_call(lambda: kern.best_rule(space.order, space.slot_feature, space.slot_pos, neg, pos, 1.0),
                           args.repeat)
        t_split = time_call(lambda: kern.best_split(values, labels, 1), args.repeat)
        env = dict(os.environ, SCMFOREST_PURE_PYTHON="1" if name == "python" else "0")
        code = FIT_SNIPPET.format(n=args.n, p=args.p, repeat=min(args.repeat, 3))
        t_fit = float(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                     text=True, check=True).stdout)
        rows.append((name, t_rule, t_split, t_fit))

    print(f"n={args.n} p={args.p} rules={space.n_rules}")
    print(f"{'backend':<8} {'best_rule':>12} {'best_split':>12} {'fit(20 est)':>12}")
    for name, a, b, c in rows:
        print(f"{name:<8} {a * 1e3:10.2f}ms {b * 1e3:10.2f}ms {c:11.2f}s")
    (_, a0, b0, c0), (_, a1, b1, c1) = rows
    print(f"{'speedup':<8} {a1 / a0:11.1f}x {b1 / b0:11.1f}x {c1 / c0:11.1f}x")


if __name__ == "__main__":
    main()
