"""Defect thermodynamics: formation energies, stable charge states, ZPL.

Formation energy of defect X in charge state q at Fermi level eps_F:

    E_f = E_tot[X^q] - E_tot[host] - sum_i n_i mu_i + q (eps_vbm + eps_F)
          + E_corr(q)

so each charge state is an affine function of eps_F with slope exactly q.
The most stable charge state at a given Fermi level is the lower envelope of
those lines over the band gap; charge-transition levels are the Fermi
energies where the envelope switches lines. The finite-size electrostatic
correction E_corr is a supplied number (computed externally), not
re-derived here.
"""

from dataclasses import dataclass

from .constants import HC_EV_NM
from .errors import ValidationError

HBN_BAND_GAP_EV = 6.09
NEAR_DEGENERATE_EV = 1e-3

SPIN_MULTIPLICITIES = ("singlet", "doublet", "triplet")


@dataclass(frozen=True)
class FormationInputs:
    """Everything the formation-energy line of one charge state needs."""

    e_total_defect_ev: float
    e_total_host_ev: float
    stoichiometry: dict            # species -> atoms added (+) / removed (-)
    chemical_potentials_ev: dict   # species -> mu_i
    charge: int
    eps_vbm_ev: float
    e_corr_ev: float = 0.0

    def __post_init__(self):
        if not -2 <= self.charge <= 2:
            raise ValidationError("charge must be within [-2, 2]", field="charge")
        if self.charge == 0 and self.e_corr_ev != 0.0:
            raise ValidationError("E_corr must vanish for the neutral state",
                                  field="e_corr_ev")
        missing = [s for s in self.stoichiometry
                   if s not in self.chemical_potentials_ev]
        if missing:
            raise ValidationError(
                f"missing chemical potential for species: {', '.join(sorted(missing))}",
                field="chemical_potentials_ev",
            )

    @property
    def intercept_ev(self):
        """Fermi-independent part: E_f(eps_F) = intercept + q * eps_F."""
        exchange = sum(n * self.chemical_potentials_ev[s]
                       for s, n in self.stoichiometry.items())
        return (self.e_total_defect_ev - self.e_total_host_ev - exchange
                + self.charge * self.eps_vbm_ev + self.e_corr_ev)


@dataclass(frozen=True)
class ChargeStateProfile:
    """Lower envelope of formation-energy lines over the Fermi window."""

    lines: dict                    # charge -> intercept a_q (slope is q)
    fermi_window_ev: tuple
    stable_segments: tuple         # ((lo, hi, charge), ...)
    transition_levels: tuple       # ((fermi_ev, q_from, q_to), ...)

    def formation_energy(self, charge, eps_fermi_ev):
        return self.lines[charge] + charge * eps_fermi_ev

    def stable_charge(self, eps_fermi_ev):
        lo, hi = self.fermi_window_ev
        if not lo <= eps_fermi_ev <= hi:
            raise ValidationError("Fermi level outside the window",
                                  field="eps_fermi_ev")
        for seg_lo, seg_hi, q in self.stable_segments:
            if seg_lo - 1e-12 <= eps_fermi_ev <= seg_hi + 1e-12:
                return q
        return self.stable_segments[-1][2]

    def to_dict(self):
        """JSON-ready representation (consumed by the UI and CLI exports)."""
        return {
            "fermi_window_ev": list(self.fermi_window_ev),
            "lines": [{"charge": q, "intercept_ev": a}
                      for q, a in sorted(self.lines.items())],
            "stable_segments": [
                {"from_ev": lo, "to_ev": hi, "charge": q}
                for lo, hi, q in self.stable_segments
            ],
            "transition_levels": [
                {"fermi_ev": x, "from_charge": qa, "to_charge": qb}
                for x, qa, qb in self.transition_levels
            ],
        }


def formation_energy(inputs, eps_fermi_ev):
    """Formation energy at one Fermi level (eV, measured from the VBM)."""
    return inputs.intercept_ev + inputs.charge * eps_fermi_ev


def stable_charge_state(per_charge_inputs, fermi_window_ev=(0.0, HBN_BAND_GAP_EV)):
    """Lower envelope over charge states with analytic transition levels.

    Ties on the envelope are broken toward smaller |q|, then toward the more
    negative charge. The resulting charge sequence is non-increasing in the
    Fermi level because slopes are the charges themselves.
    """
    if not per_charge_inputs:
        raise ValidationError("at least one charge state is required",
                              field="per_charge_inputs")
    lines = {}
    for inp in per_charge_inputs:
        if inp.charge in lines:
            raise ValidationError(f"duplicate charge state {inp.charge}",
                                  field="per_charge_inputs")
        lines[inp.charge] = inp.intercept_ev

    lo, hi = fermi_window_ev
    if hi <= lo:
        raise ValidationError("empty Fermi window", field="fermi_window_ev")

    def winner(x):
        best = None
        for q, a in lines.items():
            e = a + q * x
            key = (e, abs(q), q)
            if best is None or key < (best[1], abs(best[0]), best[0]):
                best = (q, e)
        return best[0]

    segments = []
    transitions = []
    x = lo
    q = winner(lo)
    while True:
        # earliest intersection to the right where a lower-slope line takes over
        next_x = hi
        next_q = None
        for q2, a2 in lines.items():
            if q2 >= q:
                continue
            cross = (a2 - lines[q]) / (q - q2)
            if x - 1e-12 < cross < next_x - 1e-12:
                next_x = cross
                next_q = q2
            elif next_q is not None and abs(cross - next_x) <= 1e-12:
                # simultaneous crossing: tie-break toward smaller |q|
                if (abs(q2), q2) < (abs(next_q), next_q):
                    next_q = q2
        segments.append((x, next_x, q))
        if next_q is None:
            break
        transitions.append((next_x, q, next_q))
        x, q = next_x, next_q

    return ChargeStateProfile(
        lines=lines,
        fermi_window_ev=(lo, hi),
        stable_segments=tuple(segments),
        transition_levels=tuple(transitions),
    )


@dataclass(frozen=True)
class SpinCandidateSet:
    """Total energies of the candidate spin states of one defect."""

    energies_ev: dict              # multiplicity label -> E_total
    electron_parity: object = None  # "even" | "odd" | None

    def __post_init__(self):
        if not self.energies_ev:
            raise ValidationError("no spin candidates", field="energies_ev")
        unknown = [m for m in self.energies_ev if m not in SPIN_MULTIPLICITIES]
        if unknown:
            raise ValidationError(f"unknown multiplicity: {', '.join(unknown)}",
                                  field="energies_ev")
        if self.electron_parity is not None:
            allowed = {"even": ("singlet", "triplet"), "odd": ("doublet",)}
            if self.electron_parity not in allowed:
                raise ValidationError("parity must be 'even' or 'odd'",
                                      field="electron_parity")
            bad = [m for m in self.energies_ev
                   if m not in allowed[self.electron_parity]]
            if bad:
                raise ValidationError(
                    f"multiplicities {bad} inconsistent with "
                    f"{self.electron_parity} electron count",
                    field="energies_ev",
                )


def spin_ground_state(candidates):
    """Lowest-energy multiplicity; (label, near_degenerate) tuple.

    Candidates within 1 meV of the minimum set the near-degenerate flag and
    the lower multiplicity wins.
    """
    order = {m: i for i, m in enumerate(SPIN_MULTIPLICITIES)}
    items = sorted(candidates.energies_ev.items(),
                   key=lambda kv: (kv[1], order[kv[0]]))
    label, e_min = items[0]
    near = any(e - e_min < NEAR_DEGENERATE_EV for m, e in items[1:])
    return label, near


def zpl(e_excited_total_ev, e_ground_total_ev):
    """Zero-phonon line from relaxed total energies: (eV, nm).

    ZPL = E_excited - E_ground; the wavelength uses hc = 1239.841984 eV nm.
    """
    diff = e_excited_total_ev - e_ground_total_ev
    if diff <= 0:
        raise ValidationError(
            "excited-state total energy must exceed the ground-state energy",
            field="e_excited_total_ev",
        )
    return diff, HC_EV_NM / diff


def zpl_nm_from_ev(zpl_ev):
    if zpl_ev <= 0:
        raise ValidationError("ZPL energy must be positive", field="zpl_ev")
    return HC_EV_NM / zpl_ev
