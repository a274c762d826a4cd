"""Compare the compiled and pure numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats N] [--size N]

Prints the best wall time per kernel and backend and the speed-up of the
compiled core. Both backends are checked to agree before timing.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from radperturb._kernels import available_backends


def _levels(rng, size, ng):
    x, y, z = np.indices((size, size, size)) - (size - 1) / 2
    roi = x * x + y * y + z * z <= (0.45 * size) ** 2
    levels = rng.integers(1, ng + 1, size=roi.shape).astype(np.int32)
    return np.where(roi, levels, 0).astype(np.int32)


def _cases(rng, size):
    levels = _levels(rng, size, 32)
    image = rng.random((size, size, size))
    n_centres = max(1, (size // 6) ** 3)
    step = size / round(n_centres ** (1 / 3))
    g = (np.arange(round(n_centres ** (1 / 3))) + 0.5) * step
    gx, gy, gz = np.meshgrid(g, g, g, indexing="ij")
    centres = np.column_stack([np.full(gx.size, 0.5), gx.ravel(), gy.ravel(), gz.ravel()])
    values = rng.normal(size=100)
    coords = rng.random((100, 3)) * 20

    def slic(k):
        labels = np.zeros(image.shape, dtype=np.int64)
        dist = np.full(image.shape, np.inf)
        k.slic_assign(image, centres, math.ceil(step), 0.01, labels, dist)
        return labels

    return {
        "glcm_matrices": lambda k: k.glcm_matrices(levels, 32),
        "glrlm_matrices": lambda k: k.glrlm_matrices(levels, 32),
        "neighbourhood_stats": lambda k: k.neighbourhood_stats(levels),
        "zone_labels": lambda k: k.zone_labels(levels)[0],
        "slic_assign": slic,
        "moran_geary": lambda k: np.array(k.moran_geary(values, coords)),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--size", type=int, default=32, help="edge length of the test grid")
    args = parser.parse_args(argv)

    backends = available_backends()
    cases = _cases(np.random.default_rng(0), args.size)
    names = list(backends)
    print(f"grid {args.size}^3, best of {args.repeats}")
    print(f"{'kernel':<22}" + "".join(f"{n:>12}" for n in names) + ("     speed-up" if len(names) == 2 else ""))
    for case, fn in cases.items():
        results = {n: fn(b) for n, b in backends.items()}
        if len(names) == 2 and not _same(results[names[0]], results[names[1]]):
            raise SystemExit(f"backends disagree on {case}")
        best = {}
        for n, b in backends.items():
            times = []
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                fn(b)
                times.append(time.perf_counter() - t0)
            best[n] = min(times)
        line = f"{case:<22}" + "".join(f"{best[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"{best[names[1]] / best[names[0]]:>12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
