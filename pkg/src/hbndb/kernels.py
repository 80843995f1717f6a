"""Kernel dispatch: compiled extension if importable, NumPy otherwise.

The Cython module ``hbndb._kernels_cy`` is built by setup.py when a C
compiler is available. Setting HBNDB_PURE_PYTHON=1 forces the NumPy
implementations regardless (used by the benchmark and for debugging).
"""

import os

from . import _kernels_py

if os.environ.get("HBNDB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    USING_COMPILED = False
else:
    try:
        from . import _kernels_cy as _impl
        USING_COMPILED = True
    except ImportError:
        _impl = _kernels_py
        USING_COMPILED = False


def gaussian_mix(weights, centers, sigma, grid):
    return _impl.gaussian_mix(weights, centers, sigma, grid)


def fourier_time_series(grid_ev, density, times_fs):
    return _impl.fourier_time_series(grid_ev, density, times_fs)


def halfline_spectrum(g_reduced, dt_fs, g_inf, gamma_ev, e_zpl_ev, energies_ev):
    return _impl.halfline_spectrum(g_reduced, dt_fs, g_inf, gamma_ev,
                                   e_zpl_ev, energies_ev)


gaussian_mix.__doc__ = _kernels_py.gaussian_mix.__doc__
fourier_time_series.__doc__ = _kernels_py.fourier_time_series.__doc__
halfline_spectrum.__doc__ = _kernels_py.halfline_spectrum.__doc__
