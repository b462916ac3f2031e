"""Compare the compiled kernels with the pure-Python fallback.

Run: python3 benchmarks/bench_kernels.py [--repeat N] [--max-t T]

Part one times ``rref_inplace`` and ``reduce_rows`` directly on random
matrices. Part two resolves the sphere at p=5 in two subprocesses, one with
``ADAMSEXT_PURE=1``, and checks that both give byte-identical charts.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from adamsext import _fallback, kernels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_rref(impl, shape, p, seed, repeat):
    base = np.random.default_rng(seed).integers(0, p, size=shape).astype(np.int64)
    return best_of(lambda: impl.rref_inplace(np.ascontiguousarray(base.copy()), p), repeat)


def bench_reduce(impl, shape, p, seed, repeat):
    rng = np.random.default_rng(seed)
    basis = np.ascontiguousarray(rng.integers(0, p, size=shape).astype(np.int64))
    piv = _fallback.rref_inplace(basis, p)
    basis = np.ascontiguousarray(basis[: len(piv)])
    vecs = rng.integers(0, p, size=(shape[0], shape[1])).astype(np.int64)
    return best_of(lambda: impl.reduce_rows(basis, piv, vecs.copy(), p), repeat)


RESOLVE = """
import json, sys, time
from adamsext import BACKEND
from adamsext.amodules import sphere_module
from adamsext.milnor import AlgebraContext
from adamsext.resolution import ext_chart, minimal_resolve
start = time.perf_counter()
r = minimal_resolve(sphere_module(AlgebraContext(5)), {max_s}, {max_t})
elapsed = time.perf_counter() - start
print(json.dumps({{"backend": BACKEND, "seconds": elapsed, "chart": ext_chart(r).dumps()}}))
"""


def bench_resolve(pure, max_s, max_t):
    env = dict(os.environ)
    env.pop("ADAMSEXT_PURE", None)
    if pure:
        env["ADAMSEXT_PURE"] = "1"
    out = subprocess.run([sys.executable, "-c", RESOLVE.format(max_s=max_s, max_t=max_t)], env=env,
                         capture_output=True, text=True, check=True).stdout
    return json.loads(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-s", type=int, default=4)
    ap.add_argument("--max-t", type=int, default=250)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled extension not built; only the fallback is available", file=sys.stderr)
        return 1
    compiled = kernels._impl
    print(f"{'kernel':<28}{'compiled (ms)':>15}{'fallback (ms)':>15}{'speedup':>10}")
    for shape in [(40, 60), (120, 200), (300, 400)]:
        for name, fn in (("rref", bench_rref), ("reduce_rows", bench_reduce)):
            c = fn(compiled, shape, 5, 0, args.repeat)
            f = fn(_fallback, shape, 5, 0, args.repeat)
            print(f"{name + ' ' + 'x'.join(map(str, shape)):<28}{c * 1e3:>15.2f}{f * 1e3:>15.2f}{f / c:>9.1f}x")
    fast = bench_resolve(False, args.max_s, args.max_t)
    slow = bench_resolve(True, args.max_s, args.max_t)
    same = fast["chart"] == slow["chart"]
    print(f"{'resolve s<=%d t<=%d' % (args.max_s, args.max_t):<28}{fast['seconds'] * 1e3:>15.0f}"
          f"{slow['seconds'] * 1e3:>15.0f}{slow['seconds'] / fast['seconds']:>9.1f}x")
    print(f"backends: {fast['backend']} vs {slow['backend']}; charts identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
