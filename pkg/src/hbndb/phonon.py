"""Electron-phonon coupling from relaxed geometries and phonon modes.

Given the ground- and excited-state equilibrium structures of a defect and a
set of phonon modes, this module computes the mass-weighted displacement
between the two geometries, its projection onto each phonon mode (the
per-mode configuration coordinate q_k), the partial and total Huang-Rhys
factors, the Gaussian-broadened phonon spectral density, and the
Debye-Waller factor exp(-S).

Conventions
-----------
* Positions and lattice vectors in Angstrom, masses in amu, phonon energies
  as hbar*omega in meV.
* Displacements between the two geometries are reduced by the minimum-image
  convention so that inputs wrapped into different periodic images still map
  onto each other.
* q_k carries units of amu^(1/2) Angstrom; s_k and S are dimensionless.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import HR_COUPLING_PER_MEV_AMU_A2
from .errors import (
    AmbiguousMappingError,
    CoverageError,
    StructureMismatchError,
    ValidationError,
)
from .spectra import Spectrum

# Modes softer than this carry no relaxation information (acoustic
# Gamma-point modes); they are excluded from Huang-Rhys sums.
DEFAULT_FREQUENCY_FLOOR_MEV = 0.5


@dataclass(frozen=True)
class GeometryPair:
    """Matched ground- and excited-state structures of one defect.

    Attributes
    ----------
    species : list of str
        Element symbol per atom; the ordering is shared by both structures.
    masses : ndarray, shape (N,)
        Atomic masses in amu.
    ground_positions, excited_positions : ndarray, shape (N, 3)
        Cartesian equilibrium positions in Angstrom.
    lattice : ndarray, shape (3, 3)
        Cell matrix, rows are lattice vectors in Angstrom.
    """

    species: tuple
    masses: np.ndarray
    ground_positions: np.ndarray
    excited_positions: np.ndarray
    lattice: np.ndarray

    def __post_init__(self):
        species = tuple(self.species)
        object.__setattr__(self, "species", species)
        for name in ("masses", "ground_positions", "excited_positions", "lattice"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        n = len(species)
        if n == 0:
            raise ValidationError("empty structure", field="species")
        if self.masses.shape != (n,):
            raise ValidationError("masses must have one entry per atom", field="masses")
        if np.any(self.masses <= 0):
            raise ValidationError("all masses must be positive", field="masses")
        for name in ("ground_positions", "excited_positions"):
            if getattr(self, name).shape != (n, 3):
                raise StructureMismatchError(
                    f"{name} must have shape ({n}, 3), got {getattr(self, name).shape}"
                )
        if self.lattice.shape != (3, 3):
            raise ValidationError("lattice must be 3x3", field="lattice")
        if np.linalg.det(self.lattice) <= 0:
            raise ValidationError("lattice determinant must be positive", field="lattice")
        if not np.all(np.isfinite(self.ground_positions)) or not np.all(
            np.isfinite(self.excited_positions)
        ):
            raise ValidationError("non-finite coordinates", field="positions")

    @property
    def atom_count(self):
        return len(self.species)

    def displacements(self):
        """Minimum-image Cartesian displacements R_e - R_g, shape (N, 3).

        Raises
        ------
        AmbiguousMappingError
            If any wrapped displacement component exceeds half the shortest
            lattice vector, i.e. the image assignment is not unique.
        """
        inv = np.linalg.inv(self.lattice)
        frac = (self.excited_positions - self.ground_positions) @ inv
        frac -= np.round(frac)
        cart = frac @ self.lattice
        half_min = 0.5 * np.min(np.linalg.norm(self.lattice, axis=1))
        worst = np.max(np.abs(cart))
        if worst > half_min:
            raise AmbiguousMappingError(
                f"displacement component {worst:.3f} A exceeds half the shortest "
                f"lattice vector ({half_min:.3f} A); geometries do not correspond"
            )
        return cart


@dataclass(frozen=True)
class PhononModeSet:
    """Phonon energies and normalized eigenvectors of one structure.

    Attributes
    ----------
    energies_mev : ndarray, shape (M,)
        Phonon energies hbar*omega_k in meV, all non-negative.
    eigenvectors : ndarray, shape (M, N, 3)
        Dimensionless mode eigenvectors, each of unit Euclidean norm over
        all 3N components.
    source : str
        Which structure the modes belong to ("ground" or "excited"); kept as
        provenance because either choice is accepted.
    """

    energies_mev: np.ndarray
    eigenvectors: np.ndarray
    source: str = "ground"

    def __post_init__(self):
        energies = np.asarray(self.energies_mev, dtype=float)
        vecs = np.asarray(self.eigenvectors, dtype=float)
        object.__setattr__(self, "energies_mev", energies)
        object.__setattr__(self, "eigenvectors", vecs)
        if energies.ndim != 1 or energies.size == 0:
            raise ValidationError("energies_mev must be a non-empty 1-D array",
                                  field="energies_mev")
        if np.any(energies < 0):
            raise ValidationError(
                "negative (imaginary) phonon frequencies must be rejected at ingestion",
                field="energies_mev",
            )
        if vecs.ndim != 3 or vecs.shape[0] != energies.size or vecs.shape[2] != 3:
            raise ValidationError(
                f"eigenvectors must have shape (M, N, 3) matching {energies.size} modes",
                field="eigenvectors",
            )
        if vecs.shape[0] > 3 * vecs.shape[1]:
            raise ValidationError("more modes than degrees of freedom",
                                  field="eigenvectors")
        norms = np.linalg.norm(vecs.reshape(vecs.shape[0], -1), axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-4):
            k = int(np.argmax(np.abs(norms - 1.0)))
            raise ValidationError(
                f"eigenvector of mode {k} has norm {norms[k]:.6f}, expected 1",
                field="eigenvectors",
            )
        if self.source not in ("ground", "excited"):
            raise ValidationError("source must be 'ground' or 'excited'", field="source")

    @property
    def mode_count(self):
        return self.energies_mev.size

    @property
    def atom_count(self):
        return self.eigenvectors.shape[1]


@dataclass(frozen=True)
class HrDecomposition:
    """Per-mode and total electron-phonon coupling of one transition.

    ``total_q`` is the direct mass-weighted displacement norm, which stays
    meaningful for truncated mode sets; ``mode_sum_q`` is sqrt(sum q_k^2) and
    equals total_q only when the mode basis is complete.
    """

    partial_hr: np.ndarray
    mode_q: np.ndarray
    energies_mev: np.ndarray
    total_hr: float
    total_q: float
    frequency_floor_mev: float = DEFAULT_FREQUENCY_FLOOR_MEV
    phonon_source: str = "ground"
    excluded_modes: tuple = field(default=())

    @property
    def dw_factor(self):
        return dw_factor(self.total_hr)

    @property
    def mode_sum_q(self):
        return float(np.sqrt(np.sum(self.mode_q**2)))


def configuration_coordinates(geom, modes):
    """Project the geometry change onto each phonon mode.

    Returns
    -------
    q_k : ndarray, shape (M,)
        Per-mode configuration coordinates
        q_k = sum_{a,i} sqrt(m_a) (R_e - R_g)_{a,i} dr_{k,a,i}
        in amu^(1/2) Angstrom.
    total_q : float
        Mass-weighted displacement norm sqrt(sum m_a |R_e - R_g|_a^2),
        independent of the mode basis.
    """
    if modes.atom_count != geom.atom_count:
        raise StructureMismatchError(
            f"modes describe {modes.atom_count} atoms, geometry has {geom.atom_count}"
        )
    disp = geom.displacements()
    weighted = np.sqrt(geom.masses)[:, None] * disp
    q_k = modes.eigenvectors.reshape(modes.mode_count, -1) @ weighted.ravel()
    total_q = float(np.linalg.norm(weighted))
    return q_k, total_q


def partial_hr(hbar_omega_mev, q_k):
    """Partial Huang-Rhys factor s_k = omega_k q_k^2 / (2 hbar).

    Accepts scalars or arrays; inputs are phonon energy in meV and the
    configuration coordinate in amu^(1/2) Angstrom. The unit conversion
    constant is documented in :mod:`hbndb.constants`.
    """
    energy = np.asarray(hbar_omega_mev, dtype=float)
    if np.any(energy < 0):
        raise ValidationError("phonon energy must be non-negative",
                              field="hbar_omega_mev")
    q = np.asarray(q_k, dtype=float)
    s = HR_COUPLING_PER_MEV_AMU_A2 * energy * q**2
    if s.ndim == 0:
        return float(s)
    return s


def dw_factor(total_hr):
    """Debye-Waller factor exp(-S): the fraction of emission in the ZPL."""
    if total_hr < 0:
        raise ValidationError("total Huang-Rhys factor must be non-negative",
                              field="total_hr")
    return float(np.exp(-total_hr))


def hr_decomposition(geom, modes, frequency_floor_mev=DEFAULT_FREQUENCY_FLOOR_MEV):
    """Full coupling analysis of a geometry pair against a mode set.

    Modes below ``frequency_floor_mev`` get s_k = 0 and are listed in
    ``excluded_modes``; their q_k are still reported.
    """
    q_k, total_q = configuration_coordinates(geom, modes)
    s_k = partial_hr(modes.energies_mev, q_k)
    excluded = np.flatnonzero(modes.energies_mev < frequency_floor_mev)
    if excluded.size:
        s_k = s_k.copy()
        s_k[excluded] = 0.0
    return HrDecomposition(
        partial_hr=s_k,
        mode_q=q_k,
        energies_mev=modes.energies_mev,
        total_hr=float(np.sum(s_k)),
        total_q=total_q,
        frequency_floor_mev=frequency_floor_mev,
        phonon_source=modes.source,
        excluded_modes=tuple(int(k) for k in excluded),
    )


def spectral_density(decomp, smearing_sigma_mev=6.0, grid_ev=None,
                     points_per_sigma=8.0):
    """Gaussian-broadened phonon spectral density S(hbar*omega).

    Each Dirac delta (weight s_k at hbar*omega_k) is replaced by a
    unit-area Gaussian of width ``smearing_sigma_mev``. The returned spectrum
    is sampled on ``grid_ev`` (eV) or, if omitted, on a uniform grid covering
    [0, max(hbar*omega_k) + 5 sigma].

    Raises
    ------
    CoverageError
        If the supplied grid truncates more than 0.1% of the total weight.
    """
    if smearing_sigma_mev <= 0:
        raise ValidationError("smearing sigma must be positive", field="smearing_sigma")
    sigma_ev = smearing_sigma_mev * 1e-3
    centers_ev = decomp.energies_mev * 1e-3
    weights = np.asarray(decomp.partial_hr, dtype=float)

    if grid_ev is None:
        top = float(np.max(centers_ev)) + 5.0 * sigma_ev
        step = sigma_ev / points_per_sigma
        grid_ev = np.linspace(0.0, top, int(np.ceil(top / step)) + 1)
    else:
        grid_ev = np.asarray(grid_ev, dtype=float)
        active = weights > 0
        if np.any(centers_ev[active] + 5.0 * sigma_ev > grid_ev[-1] + 1e-12) or np.any(
            centers_ev[active] - 5.0 * sigma_ev < grid_ev[0] - 5.0 * sigma_ev
        ):
            raise CoverageError(
                "spectral density grid truncates more than 0.1% of the mode weight; "
                f"need coverage up to {np.max(centers_ev) + 5 * sigma_ev:.4f} eV"
            )

    from .kernels import gaussian_mix

    values = gaussian_mix(weights, centers_ev, sigma_ev, grid_ev)
    spec = Spectrum(grid_ev, values, kind="spectral_density", units="1/eV",
                    metadata={"smearing_sigma_mev": smearing_sigma_mev,
                              "phonon_source": decomp.phonon_source})
    total = float(np.sum(weights))
    if total > 0:
        integral = spec.integral()
        if abs(integral - total) > 1e-3 * total:
            raise CoverageError(
                f"spectral density integrates to {integral:.6g}, expected {total:.6g}; "
                "grid too narrow or too coarse"
            )
    return spec
