"""hbndb: photophysics post-processing and database service for hBN defects.

The package turns relaxed first-principles outputs (geometry pairs, phonon
modes, momentum matrix elements, total energies) into emission observables
(configuration coordinates, Huang-Rhys and Debye-Waller factors, PL and
absorption lineshapes, transition dipoles, polarization angles, radiative
lifetimes, formation-energy diagrams), stores them in the published
single-table SQLite schema, and serves them over a filtered HTTP API.
"""

__version__ = "0.1.0"

from .analysis import (
    CorrelationMatrix,
    classify_vacancy,
    correlation_matrix,
    histogram,
    spearman,
)
from .emission import (
    DipoleMoment,
    MomentumMatrixElement,
    PolarizationSummary,
    RadiativeResult,
    inplane_visibility,
    misalignment,
    polarization_angle,
    radiative_rate,
    rescale_lifetime,
    transition_dipole,
)
from .errors import HbnDbError
from .lineshape import (
    LineshapeParams,
    absorption_lineshape,
    emission_spectrum,
    generating_function,
    optical_spectral_function,
    pl_lineshape,
    time_spectral_function,
)
from .phonon import (
    GeometryPair,
    HrDecomposition,
    PhononModeSet,
    configuration_coordinates,
    dw_factor,
    hr_decomposition,
    partial_hr,
    spectral_density,
)
from .pipeline import ComputeReport, PipelineConfig, build_store, compute_defect
from .spectra import Spectrum
from .store import DefectRecord, DefectStore
from .thermo import (
    ChargeStateProfile,
    FormationInputs,
    SpinCandidateSet,
    formation_energy,
    spin_ground_state,
    stable_charge_state,
    zpl,
)
