"""Compare the compiled and numpy exponential-sum kernels.

Usage: ``python benchmarks/bench_kernels.py [--repeat 5]``
"""

import argparse
import timeit

import numpy as np

from opint import kernels
from opint.fourier import filon_transform

SIZES = [(64, 200), (256, 2000), (1024, 8000)]


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<8} {'panels':>7} {'points':>7} " + " ".join(f"{b:>10}" for b in backends) + "  speedup")
    for panels, points in SIZES:
        coeffs = rng.standard_normal((panels, 5)) + 1j * rng.standard_normal((panels, 5))
        x = np.linspace(-200, 200, points)
        samples = np.sin(np.linspace(0, np.pi, 4 * panels + 1))
        for name, call in (("exp_sums", lambda b: kernels.exp_sums(0.0, 0.1, coeffs, x, backend=b)),
                           ("filon", lambda b: filon_transform(samples, np.pi, x, backend=b))):
            times = {b: bench(lambda: call(b), args.repeat) for b in backends}
            ref = call("numpy")
            for b in backends:
                err = np.abs(call(b) - ref).max()
                if err > 1e-9 * max(1.0, np.abs(ref).max()):
                    raise SystemExit(f"{b} disagrees with numpy by {err:.3g}")
            speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
            cells = " ".join(f"{1e3 * times[b]:>8.2f}ms" for b in backends)
            print(f"{name:<8} {panels:>7} {points:>7} {cells}  {speed:6.1f}x")


if __name__ == "__main__":
    main()
