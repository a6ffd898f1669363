"""Benchmark the numba convolution kernels against the numpy fallback.

Times the raw coefficient convolutions and a full right-hand-side
evaluation at several truncations.  Run directly:

    python benchmarks/bench_backends.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from thinfilm import ModelSpec, SpectralField
from thinfilm import kernels
from thinfilm.models import rhs


def _timeit(fn, repeats):
    fn()  # warm-up (also triggers jit compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _random_coeffs(rng, n_max):
    pos = rng.normal(size=n_max) + 1j * rng.normal(size=n_max)
    c = np.zeros(2 * n_max + 1, np.complex128)
    c[n_max] = 1.0
    c[n_max + 1:] = 0.05 * pos
    c[:n_max] = np.conj(c[n_max + 1:][::-1])
    return c


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    if kernels.conv_full_numba is None:
        print("numba backend unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'case':<28}{'numpy (us)':>12}{'numba (us)':>12}{'speedup':>9}")
    for n_max in (16, 32, 64, 128):
        a = _random_coeffs(rng, n_max)
        b = _random_coeffs(rng, n_max)
        for name, np_fn, nb_fn in (
            ("conv_full", kernels.conv_full_numpy, kernels.conv_full_numba),
            ("conv_center",
             lambda x=a, y=b: kernels.conv_center_numpy(x, y, n_max),
             lambda x=a, y=b: kernels.conv_center_numba(x, y, n_max)),
        ):
            if name == "conv_full":
                t_np = _timeit(lambda: np_fn(a, b), args.repeats)
                t_nb = _timeit(lambda: nb_fn(a, b), args.repeats)
            else:
                t_np = _timeit(np_fn, args.repeats)
                t_nb = _timeit(nb_fn, args.repeats)
            print(f"{name + f' N={n_max}':<28}{t_np * 1e6:>12.1f}"
                  f"{t_nb * 1e6:>12.1f}{t_np / t_nb:>9.2f}x")

    model = ModelSpec.canonical(1.0)
    for n_max in (32, 64, 128):
        h = SpectralField(_random_coeffs(rng, n_max))
        t = _timeit(lambda: rhs(model, h), args.repeats)
        print(f"{'rhs (active backend) N=' + str(n_max):<28}"
              f"{'':>12}{t * 1e6:>12.1f}")
    print(f"active backend: {kernels.BACKEND}  "
          "(set TFILM_BACKEND=numpy|numba|auto to switch)")


if __name__ == "__main__":
    main()
