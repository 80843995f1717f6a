"""Physical constants and unit conversions.

Fundamental constants are CODATA-2018 values; ``e``, ``h`` and ``c`` are
exact by SI definition. The internal unit system is (eV, Angstrom, amu, fs);
every conversion used elsewhere in the package is derived from the literals
below, so there is a single authoritative value for each constant.
"""

import math

# SI defining constants (exact)
ELEMENTARY_CHARGE_C = 1.602176634e-19
PLANCK_J_S = 6.62607015e-34
SPEED_OF_LIGHT_M_S = 299792458.0

# hbar = h / 2 pi (exact consequence of the above)
HBAR_J_S = PLANCK_J_S / (2.0 * math.pi)            # 1.0545718176461565e-34
HBAR_EV_FS = HBAR_J_S / ELEMENTARY_CHARGE_C * 1e15  # 0.6582119569509067

# CODATA-2018 measured constants
ATOMIC_MASS_KG = 1.66053906660e-27
VACUUM_PERMITTIVITY_F_M = 8.8541878128e-12
ELECTRON_MASS_KG = 9.1093837015e-31
BOHR_RADIUS_ANGSTROM = 0.529177210903
HARTREE_EV = 27.211386245988

# 1 Debye = 1e-21 / c  C m (exact)
DEBYE_C_M = 1e-21 / SPEED_OF_LIGHT_M_S             # 3.33564095198152e-30

# Atomic unit of momentum, hbar / a0, in kg m/s
MOMENTUM_AU_KG_M_S = HBAR_J_S / (BOHR_RADIUS_ANGSTROM * 1e-10)

# e * a0 expressed in Debye: converts a position matrix element in Bohr
# (times the elementary charge) to a dipole moment in Debye.
E_BOHR_DEBYE = (
    ELEMENTARY_CHARGE_C * BOHR_RADIUS_ANGSTROM * 1e-10 / DEBYE_C_M
)  # 2.5417464731818

# hc in eV nm, pinned to ten digits for ZPL energy/wavelength conversions.
HC_EV_NM = 1239.841984

# Kinetic energy unit conversion: 1 amu Angstrom^2 / fs^2 in eV.
AMU_A2_FS2_EV = ATOMIC_MASS_KG * 1e-20 / 1e-30 / ELEMENTARY_CHARGE_C  # 103.64269652

# Electron-phonon coupling conversion. A mode of phonon energy hbar*omega
# (meV) displaced by q (amu^1/2 Angstrom) carries
#
#     s = omega q^2 / (2 hbar) = HR_COUPLING * (hbar omega / meV) * (q^2 / amu A^2)
#
# HR_COUPLING = (1e-3 e) (amu 1e-20) / (2 hbar^2) = 0.11961266685 per meV amu A^2.
HR_COUPLING_PER_MEV_AMU_A2 = (
    (1e-3 * ELEMENTARY_CHARGE_C) * (ATOMIC_MASS_KG * 1e-20) / (2.0 * HBAR_J_S**2)
)

# Radiative rate prefactor: Gamma = RADIATIVE_RATE_COEF * n_D * (E0/eV)^3 * (mu/D)^2
# in 1/s, from Gamma = n_D E0^3 mu^2 / (3 pi eps0 hbar^4 c^3) with E0 in J and
# mu in C m. Numerically 1.6455199e5 s^-1 per eV^3 D^2.
RADIATIVE_RATE_COEF = (
    ELEMENTARY_CHARGE_C**3
    * DEBYE_C_M**2
    / (3.0 * math.pi * VACUUM_PERMITTIVITY_F_M * HBAR_J_S**4 * SPEED_OF_LIGHT_M_S**3)
)
