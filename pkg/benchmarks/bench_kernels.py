"""Compare the compiled and pure-Python search kernels on the same workloads.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Each workload runs once per backend with the kernel functions swapped in
:mod:`patterncsp.kernels`; results are checked to be identical before the
timings are printed.
"""

from __future__ import annotations

import argparse
import contextlib
import itertools
import time

from patterncsp import _pykernels, kernels
from patterncsp.catalog import CATALOG_NAMES, catalog_instance, random_instance
from patterncsp.csp import count_solutions
from patterncsp.figures import BAD_PATTERNS, BTP, EMC
from patterncsp.occurrence import in_class, occurs_in_instance

try:
    from patterncsp import _ckernels
except ImportError:
    _ckernels = None


@contextlib.contextmanager
def backend(module):
    saved = kernels.count_solutions, kernels.find_homomorphisms
    kernels.count_solutions = module.count_solutions
    kernels.find_homomorphisms = module.find_homomorphisms
    try:
        yield
    finally:
        kernels.count_solutions, kernels.find_homomorphisms = saved


def counting(seed: int):
    instances = [random_instance(11, 4, 0.7, seed + k, constrained=0.4) for k in range(4)]
    return lambda: [count_solutions(inst) for inst in instances]


def occurrence(seed: int):
    instances = [random_instance(7, 5, 0.6, seed + k) for k in range(40)]

    def run():
        out = []
        for inst, p in itertools.product(instances, (EMC, BTP)):
            out.append(occurs_in_instance(p, inst, inst.variables, inst.universe).occurs)
        return out

    return run


def order_search(seed: int):
    # Catalogue order-pair search over the refuting patterns, as in classification.
    def run():
        return [in_class(BAD_PATTERNS[label], catalog_instance(name)) for label in "abcdjn" for name in CATALOG_NAMES[:5]]

    return run


WORKLOADS = {"count_solutions": counting, "occurs_in_instance": occurrence, "in_class": order_search}


def timed(fn, repeat: int) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; only the Python backend is available")
    print(f"{'workload':<20} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, make in WORKLOADS.items():
        fn = make(args.seed)
        with backend(_pykernels):
            py_time, py_result = timed(fn, args.repeat)
        if _ckernels is None:
            print(f"{name:<20} {py_time:>10.3f} {'-':>10} {'-':>8}")
            continue
        with backend(_ckernels):
            c_time, c_result = timed(fn, args.repeat)
        if c_result != py_result:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<20} {py_time:>10.3f} {c_time:>10.3f} {py_time / c_time:>7.1f}x")


if __name__ == "__main__":
    main()
