"""NumPy reference implementations of the hot kernels.

These are the import-time fallback when the compiled extension is absent
(or disabled via HBNDB_PURE_PYTHON=1). Semantics are identical to
``_kernels_cy``; the compiled version only changes speed. Work is chunked
so peak memory stays bounded on pipeline-sized inputs.
"""

import numpy as np

from .constants import HBAR_EV_FS

_CHUNK_ELEMENTS = 4_000_000


def gaussian_mix(weights, centers, sigma, grid):
    """Sum of unit-area Gaussians: sum_k w_k N(grid; c_k, sigma)."""
    weights = np.asarray(weights, dtype=float)
    centers = np.asarray(centers, dtype=float)
    grid = np.asarray(grid, dtype=float)
    out = np.zeros_like(grid)
    norm = 1.0 / (sigma * np.sqrt(2.0 * np.pi))
    step = max(1, _CHUNK_ELEMENTS // max(grid.size, 1))
    for start in range(0, centers.size, step):
        c = centers[start:start + step, None]
        w = weights[start:start + step, None]
        out += np.sum(w * np.exp(-0.5 * ((grid[None, :] - c) / sigma) ** 2), axis=0)
    return norm * out


def fourier_time_series(grid_ev, density, times_fs):
    """S(t) = integral of density(E) exp(-i E t / hbar) dE (trapezoid rule)."""
    grid_ev = np.asarray(grid_ev, dtype=float)
    density = np.asarray(density, dtype=float)
    times_fs = np.asarray(times_fs, dtype=float)
    weights = _trapezoid_weights(grid_ev) * density
    out = np.zeros(times_fs.size, dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // max(times_fs.size, 1))
    for start in range(0, grid_ev.size, step):
        e = grid_ev[start:start + step, None]
        w = weights[start:start + step, None]
        out += np.sum(w * np.exp((-1j / HBAR_EV_FS) * e * times_fs[None, :]), axis=0)
    return out


def halfline_spectrum(g_reduced, dt_fs, g_inf, gamma_ev, e_zpl_ev, energies_ev):
    """Optical spectral function on an arbitrary energy grid.

    Evaluates A(E) = (1/pi hbar) Re[ integral_0^inf (G(t) - G_inf)
    e^{(i Omega - gamma/hbar) t} dt + G_inf / (gamma/hbar - i Omega) ]
    with Omega = (E_zpl - E)/hbar, G - G_inf sampled on the uniform grid
    t_j = j dt, and the constant long-time part integrated analytically.
    """
    g_reduced = np.asarray(g_reduced, dtype=complex)
    energies_ev = np.asarray(energies_ev, dtype=float)
    n_t = g_reduced.size
    t = dt_fs * np.arange(n_t)
    gamma_fs = gamma_ev / HBAR_EV_FS
    omega = (e_zpl_ev - energies_ev) / HBAR_EV_FS

    trapz = np.full(n_t, dt_fs)
    trapz[0] = trapz[-1] = 0.5 * dt_fs
    damped = g_reduced * trapz * np.exp(-gamma_fs * t)

    out = np.empty(energies_ev.size)
    step = max(1, _CHUNK_ELEMENTS // max(n_t, 1))
    for start in range(0, energies_ev.size, step):
        om = omega[start:start + step, None]
        numeric = np.sum(damped[None, :] * np.exp(1j * om * t[None, :]), axis=1).real
        out[start:start + step] = numeric
    out += g_inf * gamma_fs / (gamma_fs**2 + omega**2)
    out /= np.pi * HBAR_EV_FS
    return out


def _trapezoid_weights(grid):
    w = np.zeros_like(grid)
    d = np.diff(grid)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w
