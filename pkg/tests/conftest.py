import math

import numpy as np
import pytest

from hbndb.store import DefectRecord


def make_record(**overrides):
    """A fully valid synthetic record; overrides replace any field."""
    hr = overrides.pop("HR", 1.2)
    zpl = overrides.pop("ZPL", 2.5)
    dw = math.exp(-hr) if hr is not None else None
    zpl_nm = 1239.841984 / zpl if zpl is not None else None
    base = dict(
        host="bulk",
        defect="C_B V_N",
        defect_name="carbon boron-site with nitrogen vacancy",
        charge_state=0,
        spin_multiplicity="doublet",
        optical_spin_transition="up",
        abs_dipole_x=1.0, abs_dipole_y=0.5, abs_dipole_z=0.1,
        abs_visibility=0.96, abs_tdm=1.12, abs_lifetime=22.0, abs_angle=12.0,
        ems_dipole_x=0.9, ems_dipole_y=0.6, ems_dipole_z=0.2,
        ems_visibility=0.93, ems_tdm=1.1,
        ZPL=zpl, ZPL_nm=zpl_nm,
        lifetime=18.5, ems_angle=14.0, misalignment=2.0,
        Q=0.66, HR=hr, DW=dw,
        E_ground=-2880.0,
        E_excited=-2880.0 + zpl if zpl is not None else None,
        structure_ground=b"cif ground", structure_excited=b"cif excited",
        band_ground=b"\x00\x01raw", band_excited=b"\x02\x03raw",
        PL=b"# pl blob\n1.0 0.5\n", raman=b"raman blob",
    )
    base.update(overrides)
    return DefectRecord(**base)


def random_record(rng, index):
    """Randomized but invariant-respecting record with a random identity."""
    hosts = ("monolayer", "bulk")
    spins = ("singlet", "doublet", "triplet")
    trans = ("up", "down")
    defects = ("O_N", "C_B", "Ga_B", "C_B V_N", "O_N V_B", "C_B C_N",
               "Al_B V_N", "V_B V_N")
    zpl = float(rng.uniform(0.3, 5.9))
    hr = float(rng.uniform(0.05, 6.0))
    maybe = lambda v: None if rng.random() < 0.15 else v
    return make_record(
        host=hosts[rng.integers(0, 2)],
        defect=defects[rng.integers(0, len(defects))],
        defect_name=f"synthetic defect {index}",
        charge_state=int(rng.integers(-2, 3)),
        spin_multiplicity=spins[rng.integers(0, 3)],
        optical_spin_transition=trans[rng.integers(0, 2)],
        ZPL=zpl, HR=hr,
        lifetime=maybe(float(rng.uniform(0.5, 1e5))),
        abs_tdm=maybe(float(rng.uniform(0.01, 12.0))),
        ems_tdm=maybe(float(rng.uniform(0.01, 12.0))),
        Q=float(rng.uniform(0.05, 2.5)),
        misalignment=maybe(float(rng.uniform(0.0, 30.0))),
    )


def fill_store(store, n=40, seed=7):
    # identity space is 2*8*5*3*2 = 480 tuples; n must stay well below that
    assert n <= 300, "identity space too small for that many records"
    rng = np.random.default_rng(seed)
    made = 0
    index = 0
    from hbndb.errors import ConflictError
    while made < n:
        try:
            store.ingest(random_record(rng, index))
            made += 1
        except ConflictError:
            pass
        index += 1
        assert index < 100 * n, "too many identity collisions"
    return store


POSCAR_GROUND = """synthetic four-atom cell
1.0
  8.0 0.0 0.0
  0.0 9.0 0.0
  0.0 0.0 10.0
B N
2 2
Cartesian
  0.00 0.00 0.00
  4.00 4.50 5.00
  2.00 2.25 2.50
  6.00 6.75 7.50
"""


def _shift_poscar(displacements):
    lines = POSCAR_GROUND.splitlines()
    base = np.array([[float(x) for x in line.split()] for line in lines[8:12]])
    shifted = base + np.asarray(displacements)
    body = "\n".join("  " + " ".join(f"{x:.6f}" for x in row) for row in shifted)
    return "\n".join(lines[:8]) + "\n" + body + "\n"


def make_modes_text(rng, atom_count=4, energies_mev=None):
    """Complete orthonormal mode basis as the parser's table format."""
    n = 3 * atom_count
    if energies_mev is None:
        energies_mev = np.linspace(12.0, 180.0, n)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    lines = []
    for k in range(n):
        comps = " ".join(f"{c: .12e}" for c in q[k])
        lines.append(f"{k + 1} {energies_mev[k]:.4f} {comps}")
    return "\n".join(lines) + "\n"


DIPOLES_TEXT = """# momentum matrix elements, atomic units
kind = excitation
p_x = 0.20 0.00
p_y = 0.05 0.00
p_z = 0.01 0.00
e_initial_ev = -1.10
e_final_ev = 1.30

kind = emission
p_x = 0.18 0.02
p_y = 0.06 -0.01
p_z = 0.02 0.00
e_initial_ev = 1.25
e_final_ev = -1.05
"""

CHARGES_TEXT = """e_total_host_ev = -2880.0
eps_vbm_ev = 1.5
stoichiometry = O:1 N:-1
mu_O = -4.0
mu_N = -8.0
e_total_0 = -2875.3
e_total_+1 = -2877.8
e_corr_+1 = 0.10
e_total_-1 = -2871.9
e_corr_-1 = 0.12
"""


@pytest.fixture
def sample_manifest(tmp_path):
    """Two complete defects plus one broken one (for batch-continue)."""
    rng = np.random.default_rng(11)
    manifest = tmp_path / "manifest"

    one = manifest / "O_N"
    one.mkdir(parents=True)
    (one / "defect.txt").write_text(
        "host = bulk\n"
        "defect = O_N\n"
        "defect_name = oxygen on nitrogen site\n"
        "charge_state = 0\n"
        "spin_multiplicity = doublet\n"
        "optical_spin_transition = up\n"
        "e_ground_total_ev = -2880.00\n"
        "e_excited_total_ev = -2877.60\n"
    )
    (one / "ground.poscar").write_text(POSCAR_GROUND)
    disp = rng.uniform(-0.04, 0.04, size=(4, 3))
    (one / "excited.poscar").write_text(_shift_poscar(disp))
    (one / "modes.dat").write_text(make_modes_text(rng))
    (one / "dipoles.dat").write_text(DIPOLES_TEXT)
    (one / "charges.txt").write_text(CHARGES_TEXT)
    (one / "raman.raw").write_bytes(b"\x01\x02\x03raman")

    two = manifest / "C_B_V_N"
    two.mkdir()
    (two / "defect.txt").write_text(
        "host = monolayer\n"
        "defect = C_B V_N\n"
        "charge_state = -1\n"
        "spin_multiplicity = singlet\n"
        "optical_spin_transition = down\n"
        "e_ground_total_ev = -1500.00\n"
        "e_excited_total_ev = -1498.05\n"
    )
    (two / "ground.poscar").write_text(POSCAR_GROUND)
    disp = rng.uniform(-0.03, 0.03, size=(4, 3))
    (two / "excited.poscar").write_text(_shift_poscar(disp))
    (two / "modes.dat").write_text(make_modes_text(rng))
    (two / "dipoles.dat").write_text(DIPOLES_TEXT)

    broken = manifest / "broken"
    broken.mkdir()
    (broken / "defect.txt").write_text("host = bulk\n")  # missing keys

    return manifest
