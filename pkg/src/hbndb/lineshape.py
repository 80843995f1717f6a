"""PL and absorption lineshapes via the time-domain generating function.

The chain is: phonon spectral density S(hbar*omega) -> time-dependent
spectral function S(t) -> generating function G(t) = exp(S(t) - S(0)) ->
optical spectral function A(E) by Fourier transform with Lorentzian
damping -> lineshapes L(E) = C E^3 A(E) (emission) and the mirror-image
absorption construction.

Numerical scheme
----------------
A(E) = (1/2 pi hbar) Int G(t) exp(i (E_zpl - E) t / hbar - gamma|t|/hbar) dt.
G(-t) = conj(G(t)), so the two-sided integral equals twice the real part of
the half-line integral and A is real by construction. G(t) tends to the
constant G_inf = exp(-S(0)) once the phonon content dephases; the integral
is split into a numerically integrated part (G - G_inf), which decays within
the time span, and the analytic tail G_inf / (gamma/hbar - i Omega), which
carries the zero-phonon Lorentzian exactly. Sidebands therefore sit at
E_zpl - n*hbar*omega_k with the correct Poisson weights and the ZPL keeps
unit-area Lorentzian shape at any damping.
"""

from dataclasses import dataclass

import numpy as np

from .constants import HBAR_EV_FS
from .errors import ConvergenceError, CoverageError, ValidationError
from .kernels import fourier_time_series, halfline_spectrum
from .spectra import Spectrum

# Maximum damped residual of (G - G_inf) allowed at the end of the time span.
TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class LineshapeParams:
    """Broadening, ZPL position, time grid and normalization for lineshapes.

    ``gamma_ev`` is the Lorentzian broadening entering the exp(-gamma|t|)
    damping; the stored database blobs use gamma = 1 in the unit of
    their energy grid, so that is the default here (grids are in eV).
    ``normalization`` is either the string "max-to-one" or a positive scale
    factor applied verbatim.
    """

    zpl_energy_ev: float
    gamma_ev: float = 1.0
    time_step_fs: float = 0.2
    time_span_fs: float = 2000.0
    normalization: object = "max-to-one"

    def __post_init__(self):
        if self.gamma_ev <= 0:
            raise ValidationError("gamma must be positive", field="gamma_ev")
        if self.time_step_fs <= 0:
            raise ValidationError("time_step must be positive", field="time_step_fs")
        if self.time_span_fs < 100 * self.time_step_fs:
            raise ValidationError("time_span must cover at least 100 steps",
                                  field="time_span_fs")
        if self.zpl_energy_ev <= 0:
            raise ValidationError("ZPL energy must be positive", field="zpl_energy_ev")
        if self.normalization != "max-to-one":
            c = float(self.normalization)
            if c <= 0:
                raise ValidationError("normalization constant must be positive",
                                      field="normalization")

    def times(self):
        """Uniform time grid [0, time_span] in fs."""
        n = int(round(self.time_span_fs / self.time_step_fs)) + 1
        return self.time_step_fs * np.arange(n)


def time_spectral_function(density, times_fs):
    """Fourier transform of the spectral density: S(t), complex.

    S(t) = Int_0^inf S(hbar w) exp(-i w t) d(hbar w), evaluated by trapezoid
    quadrature on the density grid. S(0) equals the grid integral of the
    density, i.e. the total Huang-Rhys factor when the grid covers all modes.
    """
    if density.kind != "spectral_density":
        raise ValidationError(f"expected spectral_density, got {density.kind}",
                              field="density")
    values = density.values.real
    peak = float(np.max(values)) if values.size else 0.0
    # a unit-area Gaussian truncated at 5 sigma ends at 3.7e-6 of its peak
    # while carrying < 3e-7 of its mass beyond, so 1e-5 is a safe decay bound
    if peak > 0 and values[-1] > 1e-5 * peak:
        raise CoverageError(
            "spectral density does not decay at the end of its grid; extend the "
            "grid so no mode weight is truncated"
        )
    return fourier_time_series(density.grid, values, np.asarray(times_fs, dtype=float))


def generating_function(s_t):
    """G(t) = exp(S(t) - S(0)); the input must start at t = 0 so G(0) = 1."""
    s_t = np.asarray(s_t, dtype=complex)
    if s_t.size == 0:
        raise ValidationError("empty time series", field="s_t")
    return np.exp(s_t - s_t[0])


def optical_spectral_function(g_t, params, output_grid_ev=None, total_hr=None,
                              max_phonon_ev=None):
    """Optical spectral function A(E) on an energy grid (kind-tagged Spectrum).

    Parameters
    ----------
    g_t : complex array
        Generating function on the uniform time grid ``params.times()``.
    params : LineshapeParams
    output_grid_ev : array, optional
        Strictly increasing photon energies; defaults to
        ``default_emission_grid`` (requires ``total_hr`` and
        ``max_phonon_ev``).
    total_hr, max_phonon_ev : float, optional
        Used only to build the default grid.

    Raises
    ------
    ConvergenceError
        If (G - G_inf) has not decayed below TAIL_TOLERANCE (after damping)
        by the end of the time span, which would leak spectral weight.
    """
    g_t = np.asarray(g_t, dtype=complex)
    times = params.times()
    if g_t.shape != times.shape:
        raise ValidationError(
            f"generating function has {g_t.size} samples, time grid has {times.size}",
            field="g_t",
        )
    if output_grid_ev is None:
        if total_hr is None or max_phonon_ev is None:
            raise ValidationError(
                "either output_grid_ev or (total_hr, max_phonon_ev) is required")
        output_grid_ev = default_emission_grid(params, total_hr, max_phonon_ev)
    output_grid_ev = np.asarray(output_grid_ev, dtype=float)

    # Dephased long-time limit exp(-S(0)); estimated from the tail so the
    # operation needs nothing beyond G itself.
    tail_n = max(1, g_t.size // 20)
    g_inf = float(np.mean(g_t[-tail_n:]).real)

    gamma_fs = params.gamma_ev / HBAR_EV_FS
    damped_residual = np.abs(g_t - g_inf) * np.exp(-gamma_fs * times)
    ref = float(np.max(damped_residual))
    if ref > 0:
        tail = float(np.max(damped_residual[-tail_n:]))
        if tail > TAIL_TOLERANCE * max(ref, 1.0):
            raise ConvergenceError(
                f"damped generating function still at {tail:.2e} of its maximum at "
                f"t = {params.time_span_fs} fs; increase time_span, gamma, or the "
                "density smearing"
            )

    values = halfline_spectrum(g_t - g_inf, params.time_step_fs, g_inf,
                               params.gamma_ev, params.zpl_energy_ev,
                               output_grid_ev)
    return Spectrum(
        output_grid_ev, values, kind="optical_spectral_function", units="1/eV",
        metadata={"zpl_energy_ev": params.zpl_energy_ev,
                  "gamma_ev": params.gamma_ev,
                  "time_step_fs": params.time_step_fs,
                  "time_span_fs": params.time_span_fs},
    )


def default_emission_grid(params, total_hr, max_phonon_ev, step_ev=None):
    """Energy grid covering the emission sidebands and the ZPL.

    Spans [E_zpl - max_phonon*(S + 5 sqrt(S) + 5), E_zpl + 5 gamma], clipped
    to positive photon energies; the default step resolves the Lorentzian
    width (gamma/5) and is capped at 1 meV so sidebands stay resolved even
    for large gamma.
    """
    s = max(float(total_hr), 0.0)
    low = params.zpl_energy_ev - max_phonon_ev * (s + 5.0 * np.sqrt(s) + 5.0)
    high = params.zpl_energy_ev + 5.0 * params.gamma_ev
    if step_ev is None:
        step_ev = min(params.gamma_ev / 5.0, 1e-3)
    low = max(low, step_ev)
    n = int(np.ceil((high - low) / step_ev)) + 1
    return np.linspace(low, high, n)


def pl_lineshape(a_spectrum, params):
    """Photoluminescence lineshape L(E) = C E^3 A(E).

    With ``normalization="max-to-one"`` the curve is scaled to unit maximum
    (the stored database convention, since the physical prefactor is usually
    fitted to experiment); a numeric normalization is applied as given.
    """
    if a_spectrum.kind != "optical_spectral_function":
        raise ValidationError(
            f"expected optical_spectral_function, got {a_spectrum.kind}",
            field="a_spectrum")
    values = a_spectrum.grid**3 * a_spectrum.values.real
    values, norm = _apply_normalization(values, params.normalization)
    meta = dict(a_spectrum.metadata)
    meta.update({"normalization": norm, "weight": "E^3"})
    return Spectrum(a_spectrum.grid, values, kind="pl_lineshape",
                    units="intensity", metadata=meta)


def absorption_lineshape(density, params, output_grid_ev=None):
    """Mirror-image absorption lineshape.

    No first-principles absorption formula is used: the emission spectral
    function is reflected about the ZPL so sidebands appear above it, then
    weighted by E (one power, against E^3 for emission). The metadata flags
    the construction as an approximation.
    """
    times = params.times()
    s_t = time_spectral_function(density, times)
    g_t = generating_function(s_t)
    # reflect about the ZPL: evaluating the emission function on the mirrored
    # grid and reversing gives the absorption samples exactly
    if output_grid_ev is not None:
        output_grid_ev = np.asarray(output_grid_ev, dtype=float)
        em_grid = np.sort(2.0 * params.zpl_energy_ev - output_grid_ev)
    else:
        em_grid = default_emission_grid(params, float(s_t[0].real),
                                        float(density.grid[-1]))
    a_em = optical_spectral_function(g_t, params, output_grid_ev=em_grid)
    mirrored_grid = (2.0 * params.zpl_energy_ev - a_em.grid)[::-1]
    mirrored_vals = a_em.values.real[::-1]
    values = mirrored_grid * mirrored_vals
    values, norm = _apply_normalization(values, params.normalization)
    return Spectrum(
        mirrored_grid, values, kind="absorption_lineshape", units="intensity",
        metadata={"zpl_energy_ev": params.zpl_energy_ev,
                  "gamma_ev": params.gamma_ev,
                  "normalization": norm, "weight": "E^1",
                  "approximation": "mirror-image"},
    )


def emission_spectrum(density, params, output_grid_ev=None):
    """Density -> A(E) in one call (time grid taken from params)."""
    times = params.times()
    s_t = time_spectral_function(density, times)
    g_t = generating_function(s_t)
    return optical_spectral_function(
        g_t, params, output_grid_ev=output_grid_ev,
        total_hr=float(s_t[0].real), max_phonon_ev=float(density.grid[-1]),
    )


def _apply_normalization(values, normalization):
    if normalization == "max-to-one":
        peak = float(np.max(values))
        if peak <= 0:
            raise ValidationError("cannot max-normalize a non-positive lineshape",
                                  field="normalization")
        return values / peak, "max-to-one"
    c = float(normalization)
    return c * values, c
