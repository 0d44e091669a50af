#!/usr/bin/env python3
"""Benchmark the compiled term kernel against the pure-Python twin.

Times the raw kernel operations in-process on both backends, then times a
realistic end-to-end workload (building and verifying a shift -3 contact
model) in subprocesses with DARBOUX_FORGE_KERNEL forcing each backend.

Usage: python benchmarks/bench_kernel.py [--terms N] [--repeat R]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

from darbouxforge import _kernel_py

try:
    from darbouxforge import _speedups
except ImportError:
    _speedups = None


def random_terms(rng, n_gens, parities, count):
    out = {}
    while len(out) < count:
        pairs = sorted(rng.sample(range(n_gens), rng.randint(1, min(4, n_gens))))
        mono = []
        for i in pairs:
            mono.extend([i, 1 if parities[i] else rng.randint(1, 3)])
        out[tuple(mono)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))
    return out


def time_mul(impl, ta, tb, parities, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        impl.mul_terms(ta, tb, parities)
        best = min(best, time.perf_counter() - t0)
    return best


WORKLOAD = """
import time
from darbouxforge.darboux import (ContactDarbouxSpec, build_contact_darboux,
                                  verify_contact_identities)
spec = ContactDarbouxSpec.create(
    -3, (2, 2),
    lambda a, n: a.gen('x1')**3 * a.gen('y1_kp1')
    + a.gen('x2')**4 * a.gen('y2_kp1')
    + (a.gen('x1') * a.gen('x2'))**3 * a.gen('y1_kp1'),
)
t0 = time.perf_counter()
for _ in range(5):
    data = build_contact_darboux(spec)
    assert verify_contact_identities(data).passed
print(time.perf_counter() - t0)
"""


def run_workload(backend: str) -> float:
    env = dict(os.environ, DARBOUX_FORGE_KERNEL=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD],
                         capture_output=True, text=True, env=env, check=True)
    return float(out.stdout.strip())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--terms", type=int, default=250,
                        help="terms per factor in the raw multiply")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(0)
    n_gens = 12
    parities = tuple(rng.randint(0, 1) for _ in range(n_gens))
    ta = random_terms(rng, n_gens, parities, args.terms)
    tb = random_terms(rng, n_gens, parities, args.terms)

    py_time = time_mul(_kernel_py, ta, tb, parities, args.repeat)
    print(f"raw mul_terms ({args.terms} x {args.terms} terms):")
    print(f"  pure python : {py_time * 1e3:9.2f} ms")
    if _speedups is not None:
        cy_time = time_mul(_speedups, ta, tb, parities, args.repeat)
        agree = _speedups.mul_terms(ta, tb, parities) == \
            _kernel_py.mul_terms(ta, tb, parities)
        print(f"  compiled    : {cy_time * 1e3:9.2f} ms"
              f"   (x{py_time / cy_time:.2f}, results {'agree' if agree else 'DIFFER'})")
    else:
        print("  compiled    : not built")

    print("end-to-end contact build+verify (5 rounds):")
    py_e2e = run_workload("py")
    print(f"  pure python : {py_e2e * 1e3:9.2f} ms")
    if _speedups is not None:
        cy_e2e = run_workload("cy")
        print(f"  compiled    : {cy_e2e * 1e3:9.2f} ms   (x{py_e2e / cy_e2e:.2f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
