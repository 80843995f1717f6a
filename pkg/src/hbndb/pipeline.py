"""Batch computation: input manifest -> validated defect records.

A manifest is a directory with one subdirectory per defect:

    <defect>/defect.txt        required; keyed metadata and total energies
    <defect>/ground.poscar     optional geometry pair (.poscar or .cif)
    <defect>/excited.poscar
    <defect>/modes.dat         optional phonon modes (needs the geometries)
    <defect>/dipoles.dat       optional momentum matrix elements
    <defect>/charges.txt       optional charge-state scan for the profile
    <defect>/band_ground.raw   optional opaque blobs, stored verbatim
    <defect>/band_excited.raw
    <defect>/raman.raw

Every defect is processed independently; failures are collected per defect
and reported without aborting the batch, and identical inputs plus identical
configuration produce identical records.
"""

import json
import os
from dataclasses import dataclass, field, replace

from . import analysis, emission, lineshape, parsers, phonon, thermo
from .errors import HbnDbError, ParseError, ValidationError
from .spectra import to_two_column_text
from .store import DefectRecord, DefectStore


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for the compute pipeline; defaults match the stored database."""

    smearing_sigma_mev: float = 6.0
    gamma_ev: float = 1.0
    time_step_fs: float = 0.2
    time_span_fs: float = 2000.0
    refractive_index: float = emission.DEFAULT_REFRACTIVE_INDEX
    frequency_floor_mev: float = phonon.DEFAULT_FREQUENCY_FLOOR_MEV
    fermi_window_ev: tuple = (0.0, thermo.HBN_BAND_GAP_EV)

    def __post_init__(self):
        if self.smearing_sigma_mev <= 0:
            raise ValidationError("smearing sigma must be positive",
                                  field="smearing_sigma_mev")
        if self.refractive_index < 1:
            raise ValidationError("refractive index must be >= 1",
                                  field="refractive_index")
        # delegate the remaining range checks to the lineshape params
        lineshape.LineshapeParams(
            zpl_energy_ev=1.0, gamma_ev=self.gamma_ev,
            time_step_fs=self.time_step_fs, time_span_fs=self.time_span_fs)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "fermi_window_ev" in data:
            data["fermi_window_ev"] = tuple(data["fermi_window_ev"])
        return cls(**data)

    def override(self, **kwargs):
        provided = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **provided) if provided else self


@dataclass
class ComputeReport:
    records: list = field(default_factory=list)
    profiles: dict = field(default_factory=dict)   # defect dir -> profile dict
    failures: list = field(default_factory=list)   # (defect dir, message)

    def summary(self):
        return (f"{len(self.records)} records computed, "
                f"{len(self.failures)} failures")


REQUIRED_META_KEYS = ("host", "defect", "charge_state", "spin_multiplicity",
                      "optical_spin_transition")


def compute_manifest(manifest_dir, config=None):
    """Process every defect subdirectory; batch-continue on failures."""
    config = config or PipelineConfig()
    report = ComputeReport()
    if not os.path.isdir(manifest_dir):
        raise ValidationError(f"manifest directory not found: {manifest_dir}")
    for name in sorted(os.listdir(manifest_dir)):
        defect_dir = os.path.join(manifest_dir, name)
        if not os.path.isdir(defect_dir):
            continue
        try:
            record, profile = compute_defect(defect_dir, config)
            report.records.append(record)
            if profile is not None:
                report.profiles[name] = profile
        except HbnDbError as exc:
            report.failures.append((name, str(exc)))
    return report


def compute_defect(defect_dir, config=None):
    """One defect directory -> (DefectRecord, charge profile dict or None)."""
    config = config or PipelineConfig()
    meta_path = os.path.join(defect_dir, "defect.txt")
    if not os.path.isfile(meta_path):
        raise ParseError("defect.txt not found", source=defect_dir)
    meta = parsers.parse_keyed_text(_read(meta_path), source=meta_path)
    for key in REQUIRED_META_KEYS:
        if key not in meta:
            raise ParseError(f"defect.txt lacks required key {key!r}",
                             source=meta_path)

    values = {
        "host": meta["host"],
        "defect": meta["defect"],
        "defect_name": meta.get("defect_name", meta["defect"]),
        "charge_state": int(meta["charge_state"]),
        "spin_multiplicity": meta["spin_multiplicity"],
        "optical_spin_transition": meta["optical_spin_transition"],
    }
    # the formula must parse under the vacancy grammar used by the analyses
    analysis.classify_vacancy(values["defect"])

    zpl_ev = None
    if "e_ground_total_ev" in meta and "e_excited_total_ev" in meta:
        e_ground = float(meta["e_ground_total_ev"])
        e_excited = float(meta["e_excited_total_ev"])
        zpl_ev, zpl_nm = thermo.zpl(e_excited, e_ground)
        values.update(E_ground=e_ground, E_excited=e_excited,
                      ZPL=zpl_ev, ZPL_nm=zpl_nm)

    geom = _load_geometry_pair(defect_dir)
    if geom is not None:
        values["structure_ground"] = parsers.geometry_to_cif(
            geom.species, geom.ground_positions, geom.lattice,
            title=f"{values['defect']}_ground".replace(" ", "_")).encode()
        values["structure_excited"] = parsers.geometry_to_cif(
            geom.species, geom.excited_positions, geom.lattice,
            title=f"{values['defect']}_excited".replace(" ", "_")).encode()

    modes_path = os.path.join(defect_dir, "modes.dat")
    if os.path.isfile(modes_path):
        if geom is None:
            raise ParseError("modes.dat present but geometry pair missing",
                             source=defect_dir)
        modes = parsers.parse_phonon_modes(
            _read(modes_path), geom.atom_count, source=modes_path,
            source_state=meta.get("phonon_state", "ground"))
        decomp = phonon.hr_decomposition(
            geom, modes, frequency_floor_mev=config.frequency_floor_mev)
        values.update(Q=decomp.total_q, HR=decomp.total_hr,
                      DW=decomp.dw_factor)
        if zpl_ev is not None:
            density = phonon.spectral_density(
                decomp, smearing_sigma_mev=config.smearing_sigma_mev)
            params = lineshape.LineshapeParams(
                zpl_energy_ev=zpl_ev, gamma_ev=config.gamma_ev,
                time_step_fs=config.time_step_fs,
                time_span_fs=config.time_span_fs)
            a_spec = lineshape.emission_spectrum(density, params)
            pl = lineshape.pl_lineshape(a_spec, params)
            pl.metadata["phonon_source"] = decomp.phonon_source
            values["PL"] = to_two_column_text(pl).encode()

    dipoles_path = os.path.join(defect_dir, "dipoles.dat")
    if os.path.isfile(dipoles_path):
        elements = parsers.parse_matrix_elements(_read(dipoles_path),
                                                 source=dipoles_path)
        for kind, elem in elements.items():
            mu = emission.transition_dipole(elem)
            prefix = "abs" if kind == "excitation" else "ems"
            values[f"{prefix}_dipole_x"] = mu.components[0]
            values[f"{prefix}_dipole_y"] = mu.components[1]
            values[f"{prefix}_dipole_z"] = mu.components[2]
            values[f"{prefix}_tdm"] = mu.magnitude
            values[f"{prefix}_visibility"] = emission.inplane_visibility(mu)
            try:
                values[f"{prefix}_angle"] = emission.polarization_angle(mu)
            except emission.UndefinedAngleError:
                pass
            if zpl_ev is not None:
                rad = emission.radiative_rate(
                    zpl_ev, mu.magnitude_sq,
                    refractive_index=config.refractive_index)
                key = "abs_lifetime" if kind == "excitation" else "lifetime"
                values[key] = rad.lifetime_ns
        if "abs_angle" in values and "ems_angle" in values:
            values["misalignment"] = emission.misalignment(
                values["abs_angle"], values["ems_angle"])

    for blob_key, filename in (("band_ground", "band_ground.raw"),
                               ("band_excited", "band_excited.raw"),
                               ("raman", "raman.raw")):
        blob_path = os.path.join(defect_dir, filename)
        if os.path.isfile(blob_path):
            with open(blob_path, "rb") as fh:
                values[blob_key] = fh.read()

    profile = None
    charges_path = os.path.join(defect_dir, "charges.txt")
    if os.path.isfile(charges_path):
        profile = _charge_profile(charges_path, config).to_dict()

    return DefectRecord(**values), profile


def build_store(manifest_dir, config=None):
    """compute_manifest + ingest; returns (DefectStore, ComputeReport)."""
    report = compute_manifest(manifest_dir, config)
    db = DefectStore()
    for record in report.records:
        db.ingest(record)
    return db, report


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_geometry_pair(defect_dir):
    for ext in ("poscar", "cif"):
        ground = os.path.join(defect_dir, f"ground.{ext}")
        excited = os.path.join(defect_dir, f"excited.{ext}")
        if os.path.isfile(ground) and os.path.isfile(excited):
            return parsers.geometry_pair_from_texts(
                _read(ground), _read(excited),
                ground_source=ground, excited_source=excited)
    return None


def _charge_profile(charges_path, config):
    """charges.txt -> ChargeStateProfile.

    Keys: e_total_host_ev, eps_vbm_ev, stoichiometry (species:count pairs),
    mu_<species> chemical potentials, e_total_<q> per charge and optional
    e_corr_<q> corrections, e.g. e_total_-1, e_corr_+1.
    """
    data = parsers.parse_keyed_text(_read(charges_path), source=charges_path)
    for key in ("e_total_host_ev", "eps_vbm_ev", "stoichiometry"):
        if key not in data:
            raise ParseError(f"charges.txt lacks {key!r}", source=charges_path)
    stoich = {}
    for pair in data["stoichiometry"].split():
        species, _, count = pair.partition(":")
        if not count:
            raise ParseError(f"bad stoichiometry entry {pair!r} "
                             "(expected species:count)", source=charges_path)
        stoich[species] = int(count)
    potentials = {k[3:]: float(v) for k, v in data.items() if k.startswith("mu_")}
    inputs = []
    for key, value in data.items():
        if not key.startswith("e_total_") or key == "e_total_host_ev":
            continue
        q = int(key[len("e_total_"):])
        inputs.append(thermo.FormationInputs(
            e_total_defect_ev=float(value),
            e_total_host_ev=float(data["e_total_host_ev"]),
            stoichiometry=stoich,
            chemical_potentials_ev=potentials,
            charge=q,
            eps_vbm_ev=float(data["eps_vbm_ev"]),
            e_corr_ev=float(data.get(f"e_corr_{q:+d}",
                                     data.get(f"e_corr_{q}", 0.0))),
        ))
    if not inputs:
        raise ParseError("charges.txt has no e_total_<q> entries",
                         source=charges_path)
    return thermo.stable_charge_state(inputs, fermi_window_ev=config.fermi_window_ev)
