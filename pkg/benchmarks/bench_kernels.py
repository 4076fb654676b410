"""Compare the compiled and numpy kernel backends on protocol-sized registers.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from qvote import kernels
from qvote.qstate import MeasurementBasis
from qvote.states import bell_basis, ghz_basis

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _cases(rng):
    for n in (2, 3, 4, 6):
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi /= np.linalg.norm(psi)
        yield f"1q gate, n={n}", "apply_gate", (psi, n, H, [n - 1])
        if n >= 2:
            yield f"bell proj, n={n}", "project_all", (psi, n, bell_basis().matrix, [0, n - 1])
        if n >= 3:
            yield f"ghz proj, n={n}", "project_all", (psi, n, ghz_basis().matrix, [0, 1, 2])
    yield "1q proj, n=1", "project_all", (np.array([1, 0], dtype=complex), 1, MeasurementBasis.diagonal().matrix, [0])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20000)
    args = parser.parse_args()
    backends = [b for b in ("python", "cython") if b in kernels.BACKENDS]
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'case':<18}" + "".join(f"{b + ' us':>14}" for b in backends) + f"{'speedup':>10}")
    rng = np.random.default_rng(0)
    for name, fn, call in _cases(rng):
        times = []
        for b in backends:
            f = getattr(kernels, fn)
            t = timeit.timeit(lambda: f(*call, backend=b), number=args.repeat)
            times.append(1e6 * t / args.repeat)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{name:<18}" + "".join(f"{t:>14.2f}" for t in times) + speed)


if __name__ == "__main__":
    main()
