"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is checked for agreement between the two backends before it is
timed; the first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from relaysec import _kernels
from relaysec.pencil import gram_invariants


def cases(rng):
    h = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    hh, zz, _, gram = gram_invariants(h, z)
    a = np.linspace(0.0, 10.0, 200_000)
    vectors = rng.standard_normal((100_000, 5)) + 1j * rng.standard_normal((100_000, 5))
    x = rng.random(5000)
    y = 1.0 - x + 0.05 * rng.random(5000)
    return {
        "pencil_excess (2e5 pairs)": ("pencil_excess", (hh, zz, gram, a, a[::-1].copy(), 1.0, 5)),
        "quotient_max (1e5 x 5)": ("quotient_max", (vectors, h, z, 1.0, 10.0, 1.0)),
        "pareto_mask (202 pts)": ("pareto_mask", (x[:202], y[:202])),
        "pareto_mask (5000 pts)": ("pareto_mask", (x, y)),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    impls = {"numpy": _kernels.numpy_impl, "numba": _kernels.numba_impl}
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for label, (name, fargs) in cases(np.random.default_rng(args.seed)).items():
        outs = {k: getattr(impl, name)(*fargs) for k, impl in impls.items()}  # also compiles
        if not np.allclose(np.asarray(outs["numpy"]), np.asarray(outs["numba"]), rtol=1e-12):
            raise SystemExit(f"{label}: backends disagree")
        best = {}
        for k, impl in impls.items():
            fn = getattr(impl, name)
            t = timeit.repeat(lambda: fn(*fargs), number=1, repeat=args.repeat)
            best[k] = min(t) * 1e3
        print(f"{label:<28}{best['numpy']:>12.3f}{best['numba']:>12.3f}"
              f"{best['numpy'] / best['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
