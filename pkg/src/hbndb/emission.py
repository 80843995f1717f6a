"""Transition dipoles, polarization geometry, and radiative kinetics.

Dipole moments come from momentum matrix elements between Kohn-Sham states;
polarization angles are mapped onto the hexagonal crystal axes (rotate by
90 degrees, fold modulo 60); rates follow the spontaneous-emission formula
with a user-adjustable refractive index (default 1.85, bulk hBN in the
visible).
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import (
    E_BOHR_DEBYE,
    HARTREE_EV,
    RADIATIVE_RATE_COEF,
)
from .errors import (
    DegenerateTransitionError,
    UndefinedAngleError,
    UndefinedVisibilityError,
    ValidationError,
)

DEFAULT_REFRACTIVE_INDEX = 1.85
DEGENERACY_THRESHOLD_EV = 1e-6


@dataclass(frozen=True)
class MomentumMatrixElement:
    """<f|p|i> between two Kohn-Sham states, in atomic units of momentum.

    ``kind`` distinguishes the excitation dipole (ground-state geometry) from
    the emission dipole (excited-state geometry).
    """

    p: tuple          # complex (p_x, p_y, p_z)
    e_initial_ev: float
    e_final_ev: float
    kind: str = "emission"

    def __post_init__(self):
        p = tuple(complex(c) for c in self.p)
        if len(p) != 3 or not all(math.isfinite(abs(c)) for c in p):
            raise ValidationError("p must be a finite complex triple", field="p")
        object.__setattr__(self, "p", p)
        if self.kind not in ("excitation", "emission"):
            raise ValidationError("kind must be 'excitation' or 'emission'",
                                  field="kind")


@dataclass(frozen=True)
class DipoleMoment:
    """Transition dipole in Debye.

    ``components`` are the absolute Cartesian components (the stored form);
    ``inplane`` keeps the signed/complex-phase-resolved x and y components,
    which the angle map needs and the absolute form destroys.
    """

    components: tuple     # (|mu_x|, |mu_y|, |mu_z|)
    inplane: tuple        # signed (mu_x, mu_y)
    kind: str = "emission"

    @property
    def magnitude(self):
        return float(np.linalg.norm(self.components))

    @property
    def magnitude_sq(self):
        return float(np.dot(self.components, self.components))


@dataclass(frozen=True)
class PolarizationSummary:
    angle_deg: float          # in [0, 60)
    visibility: float         # in [0, 1]
    kind: str = "emission"


@dataclass(frozen=True)
class RadiativeResult:
    """Radiative rate and lifetime at a given refractive index.

    ``rate_per_s`` is 0 and ``lifetime_ns`` is inf for a vanishing dipole
    (an infinitely slow transition is a result, not an error).
    """

    rate_per_s: float
    lifetime_ns: float
    refractive_index: float
    zpl_energy_ev: float
    dipole_sq_debye2: float


def transition_dipole(elem):
    """Dipole moment mu = i hbar <f|p|i> / ((E_f - E_i) m), in Debye.

    The phase of the complex momentum triple is resolved by rotating the
    largest in-plane component onto the positive real axis before the signed
    in-plane components are read off; the overall sign this leaves undecided
    shifts the polarization angle by 180 degrees, which the modulo-60 map
    cancels.
    """
    delta_ev = elem.e_final_ev - elem.e_initial_ev
    if abs(delta_ev) < DEGENERACY_THRESHOLD_EV:
        raise DegenerateTransitionError(
            f"|E_f - E_i| = {abs(delta_ev):.2e} eV is below "
            f"{DEGENERACY_THRESHOLD_EV} eV; transition dipole is ill-defined"
        )
    # In Hartree atomic units (hbar = m = e = 1) the position matrix element
    # is p / dE; e*a0 converts to Debye.
    p = np.array(elem.p, dtype=complex)
    mu = p / (delta_ev / HARTREE_EV) * E_BOHR_DEBYE

    inplane = mu[:2]
    scale = np.abs(inplane)
    if scale.max() > 0:
        phase = inplane[int(np.argmax(scale))]
        phase /= abs(phase)
        signed = (inplane / phase).real
    else:
        signed = np.zeros(2)
    return DipoleMoment(
        components=tuple(float(abs(c)) for c in mu),
        inplane=(float(signed[0]), float(signed[1])),
        kind=elem.kind,
    )


def polarization_angle(mu):
    """Angle against the crystal axes: (atan2(mu_y, mu_x) + 90) mod 60, deg.

    Uses the signed in-plane components, not the stored absolute values.
    """
    x, y = mu.inplane
    if x == 0.0 and y == 0.0:
        raise UndefinedAngleError(
            "dipole has no in-plane component; polarization angle undefined")
    return (math.degrees(math.atan2(y, x)) + 90.0) % 60.0


def inplane_visibility(mu):
    """In-plane power fraction (mu_x^2 + mu_y^2) / |mu|^2, in [0, 1]."""
    cx, cy, cz = mu.components
    total = cx * cx + cy * cy + cz * cz
    if total == 0.0:
        raise UndefinedVisibilityError("zero dipole; visibility undefined")
    return (cx * cx + cy * cy) / total


def polarization_summary(mu):
    return PolarizationSummary(
        angle_deg=polarization_angle(mu),
        visibility=inplane_visibility(mu),
        kind=mu.kind,
    )


def misalignment(excitation_angle_deg, emission_angle_deg):
    """Minimal distance between two modulo-60 angles, in [0, 30] degrees."""
    d = abs(excitation_angle_deg - emission_angle_deg) % 60.0
    return min(d, 60.0 - d)


def radiative_rate(zpl_energy_ev, dipole_sq_debye2,
                   refractive_index=DEFAULT_REFRACTIVE_INDEX):
    """Spontaneous-emission rate and lifetime.

    Gamma = n_D e^2 E0^3 mu^2 / (3 pi eps0 hbar^4 c^3), with E0 the ZPL
    energy and mu^2 the squared dipole magnitude in Debye^2 (the elementary
    charge is part of the Debye conversion). Lifetime is 1/Gamma in ns.
    """
    if zpl_energy_ev <= 0:
        raise ValidationError("ZPL energy must be positive", field="zpl_energy_ev")
    if dipole_sq_debye2 < 0:
        raise ValidationError("squared dipole must be non-negative",
                              field="dipole_sq_debye2")
    if refractive_index < 1:
        raise ValidationError("refractive index must be >= 1",
                              field="refractive_index")
    rate = (RADIATIVE_RATE_COEF * refractive_index * zpl_energy_ev**3
            * dipole_sq_debye2)
    lifetime_ns = math.inf if rate == 0.0 else 1e9 / rate
    return RadiativeResult(
        rate_per_s=rate,
        lifetime_ns=lifetime_ns,
        refractive_index=refractive_index,
        zpl_energy_ev=zpl_energy_ev,
        dipole_sq_debye2=dipole_sq_debye2,
    )


def rescale_lifetime(base, new_refractive_index):
    """Re-evaluate a RadiativeResult at a different refractive index.

    The rate is linear in n_D, so tau' = tau * (n_old / n_new); everything
    else is preserved. Backs the interactive refractive-index feature.
    """
    if new_refractive_index < 1:
        raise ValidationError("refractive index must be >= 1",
                              field="refractive_index")
    ratio = new_refractive_index / base.refractive_index
    return replace(
        base,
        rate_per_s=base.rate_per_s * ratio,
        lifetime_ns=base.lifetime_ns / ratio,
        refractive_index=new_refractive_index,
    )
