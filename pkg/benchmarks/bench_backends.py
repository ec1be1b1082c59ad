"""Timing comparison of the compiled kernels against the NumPy fallback.

Measures the two primitive kernels (Kronecker chains and Hermitian
eigensolves) plus a composite workload shaped like a see-saw measurement
half-step: build all 2**n witnesses from random message operators and fully
diagonalize each. Run as::

    python benchmarks/bench_backends.py [--repeats 7]
"""

import argparse
import time
import timeit

import numpy as np

from ghz_selftest.backends import python as python_backend

try:
    from ghz_selftest.backends import _core as compiled_backend
except ImportError:
    compiled_backend = None


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return m + m.conj().T


def bench(fn, repeats):
    # best of `repeats`, each timed over enough loops to be measurable
    loops = max(1, int(0.005 / max(timeit.timeit(fn, number=1), 1e-7)))
    best = min(timeit.timeit(fn, number=loops) / loops for _ in range(repeats))
    return best


def witness_workload(backend, n, ops, signs):
    """Assemble all witnesses from precomputed terms and diagonalize each."""
    terms = [backend.kron_chain([ops[0, 0] + ops[0, 1]] + [ops[j, 0] for j in range(1, n)])]
    eye = np.eye(2, dtype=complex)
    for j in range(2, n + 1):
        factors = [ops[0, 0] - ops[0, 1]] + [eye] * (n - 1)
        factors[j - 1] = ops[j - 1, 1]
        terms.append(backend.kron_chain(factors))
    for m in range(2**n):
        w = (n - 1) * signs[m][0] * terms[0]
        for j in range(1, n):
            w = w + signs[m][j] * terms[j]
        backend.eigh(w)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    backends = [("python", python_backend)]
    if compiled_backend is not None:
        backends.append(("compiled", compiled_backend))
    else:
        print("compiled backend unavailable; timing the fallback only")

    rng = np.random.default_rng(0)
    rows = []

    chain = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(5)]
    for name, impl in backends:
        rows.append((f"kron_chain 5x(2x2)", name, bench(lambda: impl.kron_chain(chain), args.repeats)))

    for d in (4, 8, 16, 64):
        m = random_hermitian(rng, d)
        for name, impl in backends:
            rows.append((f"eigh {d}x{d}", name, bench(lambda: impl.eigh(m), args.repeats)))
            rows.append((f"eigvalsh {d}x{d}", name, bench(lambda: impl.eigvalsh(m), args.repeats)))

    for n in (2, 3):
        ops = np.zeros((n, 2, 2, 2), dtype=complex)
        for j in range(n):
            for x in range(2):
                ops[j, x] = random_hermitian(rng, 2)
        signs = [
            [(-1) ** ((m >> j) & 1) for j in range(n)] for m in range(2**n)
        ]
        for name, impl in backends:
            rows.append(
                (
                    f"witness half-step n={n}",
                    name,
                    bench(lambda: witness_workload(impl, n, ops, signs), args.repeats),
                )
            )

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'backend':<8}  {'time':>12}")
    by_work = {}
    for work, name, t in rows:
        by_work.setdefault(work, {})[name] = t
        print(f"{work:<{width}}  {name:<8}  {t * 1e6:>9.2f} us")
    if compiled_backend is not None:
        print()
        for work, times in by_work.items():
            if "compiled" in times and "python" in times:
                print(f"{work:<{width}}  speedup x{times['python'] / times['compiled']:.2f}")


if __name__ == "__main__":
    main()
