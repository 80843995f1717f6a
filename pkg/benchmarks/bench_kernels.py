#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Sizes mirror a realistic batch: a 288-atom supercell has 864 modes, the
spectral density sits on a few thousand energy samples, the generating
function on tens of thousands of time samples, and the output lineshape on
thousands of energies. Run after building the extension:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from hbndb import _kernels_py

try:
    from hbndb import _kernels_cy
except ImportError:
    _kernels_cy = None


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def bench(name, py_fn, cy_fn, args):
    t_py, ref = timed(py_fn, *args)
    if cy_fn is None:
        print(f"{name:24s} numpy {t_py * 1e3:9.2f} ms   compiled: unavailable")
        return
    t_cy, out = timed(cy_fn, *args)
    err = np.max(np.abs(np.asarray(out) - np.asarray(ref)))
    scale = np.max(np.abs(ref)) or 1.0
    print(f"{name:24s} numpy {t_py * 1e3:9.2f} ms   compiled "
          f"{t_cy * 1e3:9.2f} ms   speedup {t_py / t_cy:6.1f}x   "
          f"max rel diff {err / scale:.2e}")


def main():
    rng = np.random.default_rng(2024)

    n_modes, n_grid = 864, 4000
    weights = rng.uniform(0.0, 0.05, n_modes)
    centers = rng.uniform(0.0, 0.2, n_modes)
    grid = np.linspace(0.0, 0.25, n_grid)

    n_time = 25_001
    times = 0.2 * np.arange(n_time)
    density = _kernels_py.gaussian_mix(weights, centers, 6e-3, grid)

    g_t = np.exp(0.8 * (np.exp(-1j * 0.25 * times)
                        * np.exp(-0.5 * (2.5e-3 * times) ** 2) - 1.0))
    energies = np.linspace(0.5, 3.1, 5000)

    print(f"modes={n_modes} density_grid={n_grid} time_samples={n_time} "
          f"output_energies={energies.size}\n")
    bench("gaussian_mix",
          _kernels_py.gaussian_mix,
          getattr(_kernels_cy, "gaussian_mix", None),
          (weights, centers, 6e-3, grid))
    bench("fourier_time_series",
          _kernels_py.fourier_time_series,
          getattr(_kernels_cy, "fourier_time_series", None),
          (grid, density, times))
    bench("halfline_spectrum",
          _kernels_py.halfline_spectrum,
          getattr(_kernels_cy, "halfline_spectrum", None),
          (g_t - g_t[-1].real, 0.2, float(g_t[-1].real), 1e-3, 3.0, energies))


if __name__ == "__main__":
    main()
