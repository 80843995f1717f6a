# cython: language_level=3
"""Compiled hot kernels: Gaussian mixtures and oscillatory quadrature.

Same contracts as hbndb._kernels_py. Phase factors along uniform grids are
advanced by complex recurrence (one multiply per sample) instead of calling
exp() per element; the drift of the recurrence is O(n*eps), far below the
quadrature tolerances used anywhere in the package.
"""

import numpy as np

from libc.math cimport exp, sqrt, M_PI, fabs

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double creal(double complex)

DEF HBAR_EV_FS = 0.6582119569509067


def gaussian_mix(weights, centers, double sigma, grid):
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(grid, dtype=np.float64)
    out_arr = np.zeros(x.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, i, n_modes = w.shape[0], n_grid = x.shape[0]
    cdef double inv2s2 = 0.5 / (sigma * sigma)
    cdef double cutoff = 8.5 * sigma
    cdef double norm = 1.0 / (sigma * sqrt(2.0 * M_PI))
    cdef double wk, ck, dx
    with nogil:
        for k in range(n_modes):
            wk = w[k] * norm
            if wk == 0.0:
                continue
            ck = c[k]
            for i in range(n_grid):
                dx = x[i] - ck
                if fabs(dx) > cutoff:
                    continue
                out[i] += wk * exp(-dx * dx * inv2s2)
    return out_arr


def fourier_time_series(grid_ev, density, times_fs):
    cdef const double[::1] e = np.ascontiguousarray(grid_ev, dtype=np.float64)
    cdef const double[::1] rho = np.ascontiguousarray(density, dtype=np.float64)
    cdef const double[::1] t = np.ascontiguousarray(times_fs, dtype=np.float64)
    cdef Py_ssize_t n_e = e.shape[0], n_t = t.shape[0]
    out_arr = np.zeros(n_t, dtype=np.complex128)
    cdef double complex[::1] out = out_arr

    # trapezoid weights on the (possibly non-uniform) energy grid
    w_arr = np.zeros(n_e, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, j
    for i in range(n_e - 1):
        w[i] += 0.5 * (e[i + 1] - e[i])
        w[i + 1] += 0.5 * (e[i + 1] - e[i])

    cdef bint uniform_t = True
    cdef double dt = 0.0
    if n_t > 1:
        dt = t[1] - t[0]
        for j in range(1, n_t):
            if fabs((t[j] - t[j - 1]) - dt) > 1e-12 * (1.0 + fabs(dt)):
                uniform_t = False
                break

    cdef double complex amp, z, step
    cdef double phase_coef = -1.0 / HBAR_EV_FS
    with nogil:
        for i in range(n_e):
            amp = w[i] * rho[i]
            if amp == 0.0:
                continue
            if uniform_t:
                z = cexp(1j * phase_coef * e[i] * t[0])
                step = cexp(1j * phase_coef * e[i] * dt)
                for j in range(n_t):
                    out[j] = out[j] + amp * z
                    z = z * step
            else:
                for j in range(n_t):
                    out[j] = out[j] + amp * cexp(1j * phase_coef * e[i] * t[j])
    return out_arr


def halfline_spectrum(g_reduced, double dt_fs, double g_inf, double gamma_ev,
                      double e_zpl_ev, energies_ev):
    cdef const double complex[::1] g = np.ascontiguousarray(g_reduced, dtype=np.complex128)
    cdef const double[::1] ev = np.ascontiguousarray(energies_ev, dtype=np.float64)
    cdef Py_ssize_t n_t = g.shape[0], n_e = ev.shape[0]
    out_arr = np.empty(n_e, dtype=np.float64)
    cdef double[::1] out = out_arr

    # fold trapezoid weights and the exponential damping into the samples
    damped_arr = np.empty(n_t, dtype=np.complex128)
    cdef double complex[::1] damped = damped_arr
    cdef double gamma_fs = gamma_ev / HBAR_EV_FS
    cdef Py_ssize_t i, j
    for j in range(n_t):
        damped[j] = g[j] * dt_fs * exp(-gamma_fs * dt_fs * j)
    damped[0] = damped[0] * 0.5
    damped[n_t - 1] = damped[n_t - 1] * 0.5

    cdef double omega, acc
    cdef double complex z, step, total
    cdef double inv_pi_hbar = 1.0 / (M_PI * HBAR_EV_FS)
    with nogil:
        for i in range(n_e):
            omega = (e_zpl_ev - ev[i]) / HBAR_EV_FS
            step = cexp(1j * omega * dt_fs)
            z = 1.0 + 0.0j
            total = 0.0 + 0.0j
            for j in range(n_t):
                total = total + damped[j] * z
                z = z * step
            acc = creal(total) + g_inf * gamma_fs / (gamma_fs * gamma_fs + omega * omega)
            out[i] = acc * inv_pi_hbar
    return out_arr
