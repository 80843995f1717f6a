"""Strict parsers for the line-oriented input formats.

Geometries arrive as POSCAR-style blocks or minimal CIF files, phonon modes
as a whitespace table (mode index, hbar*omega in meV, then 3N eigenvector
components), scalar metadata and matrix elements as keyed text. All parsers
fail loudly with file/line/column context; nothing is silently coerced.
"""

import re

import numpy as np

from .emission import MomentumMatrixElement
from .errors import ParseError, StructureMismatchError, ValidationError
from .masses import mass_of
from .phonon import GeometryPair, PhononModeSet


def _tokenize(text):
    """[(line_no, [(column, token), ...]), ...] for non-empty lines."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group(0))
                  for m in re.finditer(r"\S+", body)]
        rows.append((line_no, tokens))
    return rows


def _float(token, source, line, column):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", source=source,
                         line=line, column=column) from None


def _int(token, source, line, column):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", source=source,
                         line=line, column=column) from None


# ---------------------------------------------------------------- POSCAR ---

def parse_poscar(text, source="<poscar>"):
    """POSCAR-style Cartesian/Direct block -> (species, positions, lattice).

    Layout: comment, scale, three lattice vectors, species symbols, counts,
    optional 'Selective dynamics', then 'Cartesian' or 'Direct' and one
    coordinate triple per atom. Positions are returned Cartesian, Angstrom.
    """
    lines = text.splitlines()

    def need(i, what):
        if i >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}",
                             source=source, line=len(lines) + 1)
        return lines[i]

    scale_tok = need(1, "scale factor").split()
    if not scale_tok:
        raise ParseError("missing scale factor", source=source, line=2)
    scale = _float(scale_tok[0], source, 2, 1)
    if scale <= 0:
        raise ParseError("scale factor must be positive", source=source, line=2)

    lattice = np.zeros((3, 3))
    for i in range(3):
        toks = need(2 + i, "lattice vector").split()
        if len(toks) < 3:
            raise ParseError("lattice vector needs three components",
                             source=source, line=3 + i)
        lattice[i] = [_float(t, source, 3 + i, 1) for t in toks[:3]]
    lattice *= scale

    symbols = need(5, "species symbols").split()
    if not symbols or any(_looks_numeric(s) for s in symbols):
        raise ParseError("species symbol line is required (VASP 5 format)",
                         source=source, line=6)
    count_toks = need(6, "species counts").split()
    if len(count_toks) != len(symbols):
        raise ParseError(
            f"{len(symbols)} species but {len(count_toks)} counts",
            source=source, line=7)
    counts = [_int(t, source, 7, 1) for t in count_toks]

    i = 7
    mode_line = need(i, "coordinate mode").strip()
    if mode_line and mode_line[0] in "sS":
        i += 1
        mode_line = need(i, "coordinate mode").strip()
    if not mode_line:
        raise ParseError("missing coordinate mode", source=source, line=i + 1)
    mode = mode_line[0]
    if mode in "cCkK":
        cartesian = True
    elif mode in "dD":
        cartesian = False
    else:
        raise ParseError(f"unknown coordinate mode {mode_line!r}",
                         source=source, line=i + 1)

    species = []
    for sym, cnt in zip(symbols, counts):
        species.extend([sym] * cnt)
    n = len(species)
    positions = np.zeros((n, 3))
    for a in range(n):
        line_no = i + 2 + a
        toks = need(i + 1 + a, f"coordinates of atom {a + 1}").split()
        if len(toks) < 3:
            raise ParseError("coordinate triple expected", source=source,
                             line=line_no)
        positions[a] = [_float(t, source, line_no, 1) for t in toks[:3]]
    if cartesian:
        positions *= scale
    else:
        positions = positions @ lattice
    return species, positions, lattice


def _looks_numeric(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


# ------------------------------------------------------------------- CIF ---

_CIF_CELL_KEYS = ("_cell_length_a", "_cell_length_b", "_cell_length_c",
                  "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma")


def parse_cif(text, source="<cif>"):
    """Minimal CIF reader: cell parameters plus an atom_site loop.

    Supports fractional (``_atom_site_fract_*``) or Cartesian
    (``_atom_site_Cartn_*``) coordinates and takes the element from
    ``_atom_site_type_symbol`` (falling back to the label). Values may carry
    standard uncertainties in parentheses, which are stripped.
    """
    cell = {}
    loop_fields = []
    loop_rows = []
    in_loop_header = False
    in_atom_loop = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lowered = line.lower()
        if lowered.startswith("loop_"):
            in_loop_header = True
            in_atom_loop = False
            loop_fields = []
            continue
        if line.startswith("_"):
            key = line.split()[0].lower()
            if in_loop_header:
                loop_fields.append(key)
                continue
            if key in _CIF_CELL_KEYS:
                toks = line.split()
                if len(toks) < 2:
                    raise ParseError(f"{key} has no value", source=source,
                                     line=line_no)
                cell[key] = _cif_number(toks[1], source, line_no)
            continue
        if in_loop_header:
            in_loop_header = False
            in_atom_loop = any(f.startswith("_atom_site_") for f in loop_fields)
        if in_atom_loop:
            toks = line.split()
            if len(toks) != len(loop_fields):
                raise ParseError(
                    f"atom_site row has {len(toks)} fields, loop declares "
                    f"{len(loop_fields)}", source=source, line=line_no)
            loop_rows.append((line_no, dict(zip(loop_fields, toks))))

    missing = [k for k in _CIF_CELL_KEYS if k not in cell]
    if missing:
        raise ParseError(f"missing cell parameters: {', '.join(missing)}",
                         source=source, line=1)
    if not loop_rows:
        raise ParseError("no atom_site loop found", source=source, line=1)

    lattice = _cell_to_lattice(*(cell[k] for k in _CIF_CELL_KEYS))
    species = []
    positions = np.zeros((len(loop_rows), 3))
    for i, (line_no, row) in enumerate(loop_rows):
        sym = row.get("_atom_site_type_symbol") or row.get("_atom_site_label")
        if sym is None:
            raise ParseError("atom_site row lacks a type symbol or label",
                             source=source, line=line_no)
        species.append(re.match(r"[A-Za-z]{1,2}", sym).group(0).capitalize())
        if "_atom_site_fract_x" in row:
            frac = [_cif_number(row[f"_atom_site_fract_{ax}"], source, line_no)
                    for ax in "xyz"]
            positions[i] = np.asarray(frac) @ lattice
        elif "_atom_site_cartn_x" in row:
            positions[i] = [_cif_number(row[f"_atom_site_cartn_{ax}"], source,
                                        line_no) for ax in "xyz"]
        else:
            raise ParseError("atom_site loop has neither fractional nor "
                             "Cartesian coordinates", source=source, line=line_no)
    return species, positions, lattice


def _cif_number(token, source, line_no):
    return _float(re.sub(r"\(\d+\)$", "", token), source, line_no, 1)


def _cell_to_lattice(a, b, c, alpha, beta, gamma):
    al, be, ga = np.radians([alpha, beta, gamma])
    v1 = [a, 0.0, 0.0]
    v2 = [b * np.cos(ga), b * np.sin(ga), 0.0]
    cx = c * np.cos(be)
    cy = c * (np.cos(al) - np.cos(be) * np.cos(ga)) / np.sin(ga)
    cz = np.sqrt(max(c**2 - cx**2 - cy**2, 0.0))
    return np.array([v1, v2, [cx, cy, cz]])


def geometry_to_cif(species, positions, lattice, title="structure"):
    """Deterministic P1 CIF text for a Cartesian structure."""
    lattice = np.asarray(lattice, dtype=float)
    positions = np.asarray(positions, dtype=float)
    a, b, c = np.linalg.norm(lattice, axis=1)

    def angle(u, v):
        cosv = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
        return np.degrees(np.arccos(np.clip(cosv, -1.0, 1.0)))

    alpha = angle(lattice[1], lattice[2])
    beta = angle(lattice[0], lattice[2])
    gamma = angle(lattice[0], lattice[1])
    frac = positions @ np.linalg.inv(lattice)
    lines = [
        f"data_{title}",
        "_symmetry_space_group_name_H-M   'P 1'",
        f"_cell_length_a   {a:.10f}",
        f"_cell_length_b   {b:.10f}",
        f"_cell_length_c   {c:.10f}",
        f"_cell_angle_alpha   {alpha:.10f}",
        f"_cell_angle_beta   {beta:.10f}",
        f"_cell_angle_gamma   {gamma:.10f}",
        "loop_",
        "_atom_site_label",
        "_atom_site_type_symbol",
        "_atom_site_fract_x",
        "_atom_site_fract_y",
        "_atom_site_fract_z",
    ]
    for i, (sym, f) in enumerate(zip(species, frac), start=1):
        lines.append(f"{sym}{i} {sym} {f[0]:.10f} {f[1]:.10f} {f[2]:.10f}")
    return "\n".join(lines) + "\n"


def parse_geometry(text, source="<geometry>"):
    """Dispatch on content: CIF if a data_/_cell header is present."""
    head = text.lstrip()
    if head.lower().startswith("data_") or "_cell_length_a" in text:
        return parse_cif(text, source=source)
    return parse_poscar(text, source=source)


def geometry_pair_from_texts(ground_text, excited_text, masses_amu=None,
                             ground_source="<ground>", excited_source="<excited>"):
    """Build a GeometryPair from two structure files, with mass lookup."""
    g_species, g_pos, g_lat = parse_geometry(ground_text, source=ground_source)
    e_species, e_pos, e_lat = parse_geometry(excited_text, source=excited_source)
    if g_species != e_species:
        raise StructureMismatchError(
            f"species/ordering differ between {ground_source} and {excited_source}")
    if not np.allclose(g_lat, e_lat, atol=1e-6):
        raise StructureMismatchError(
            f"lattices differ between {ground_source} and {excited_source}")
    if masses_amu is None:
        masses_amu = [mass_of(s) for s in g_species]
    return GeometryPair(
        species=tuple(g_species),
        masses=np.asarray(masses_amu, dtype=float),
        ground_positions=g_pos,
        excited_positions=e_pos,
        lattice=g_lat,
    )


# ---------------------------------------------------------- phonon modes ---

def parse_phonon_modes(text, atom_count, source="<modes>", source_state="ground"):
    """Whitespace table -> PhononModeSet.

    One mode per line: mode index, hbar*omega in meV, then 3N eigenvector
    components (atom-major, x y z per atom). Negative frequencies (imaginary
    modes) are rejected here, at ingestion.
    """
    expected = 3 * atom_count
    energies = []
    vectors = []
    last_index = 0
    for line_no, tokens in _tokenize(text):
        if not tokens:
            continue
        if len(tokens) != 2 + expected:
            raise ParseError(
                f"mode line needs 2 + {expected} columns, got {len(tokens)}",
                source=source, line=line_no, column=tokens[0][0])
        idx = _int(tokens[0][1], source, line_no, tokens[0][0])
        if idx != last_index + 1:
            raise ParseError(
                f"mode index {idx} out of order (expected {last_index + 1})",
                source=source, line=line_no, column=tokens[0][0])
        last_index = idx
        energy = _float(tokens[1][1], source, line_no, tokens[1][0])
        if energy < 0:
            raise ParseError(
                f"imaginary mode (negative energy {energy} meV) rejected",
                source=source, line=line_no, column=tokens[1][0])
        comps = [_float(tok, source, line_no, col) for col, tok in tokens[2:]]
        energies.append(energy)
        vectors.append(np.asarray(comps).reshape(atom_count, 3))
    if not energies:
        raise ParseError("no phonon modes found", source=source, line=1)
    try:
        return PhononModeSet(
            energies_mev=np.asarray(energies),
            eigenvectors=np.asarray(vectors),
            source=source_state,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from exc


# ------------------------------------------------------------- keyed text ---

def parse_keyed_text(text, source="<keyed>"):
    """'key = value' lines -> dict; '#' comments; duplicate keys rejected."""
    result = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError("expected 'key = value'", source=source,
                             line=line_no, column=1)
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ParseError("empty key", source=source, line=line_no, column=1)
        if key in result:
            raise ParseError(f"duplicate key {key!r}", source=source,
                             line=line_no, column=1)
        result[key] = value
    return result


def parse_matrix_elements(text, source="<dipoles>"):
    """Keyed matrix-element file -> {kind: MomentumMatrixElement}.

    Blocks are separated by blank lines; each needs kind, p_x/p_y/p_z (two
    floats each: real and imaginary part, atomic units), e_initial_ev and
    e_final_ev.
    """
    blocks = []
    current = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((line_no, body))
    if current:
        blocks.append(current)

    elements = {}
    for block in blocks:
        data = {}
        first_line = block[0][0]
        for line_no, body in block:
            if "=" not in body:
                raise ParseError("expected 'key = value'", source=source,
                                 line=line_no, column=1)
            key, _, value = body.partition("=")
            data[key.strip()] = (line_no, value.strip())
        for key in ("kind", "p_x", "p_y", "p_z", "e_initial_ev", "e_final_ev"):
            if key not in data:
                raise ParseError(f"matrix-element block lacks {key!r}",
                                 source=source, line=first_line)
        kind = data["kind"][1]
        p = []
        for key in ("p_x", "p_y", "p_z"):
            line_no, value = data[key]
            parts = value.split()
            if len(parts) != 2:
                raise ParseError(f"{key} needs 'real imag'", source=source,
                                 line=line_no, column=1)
            p.append(complex(_float(parts[0], source, line_no, 1),
                             _float(parts[1], source, line_no, 1)))
        if kind in elements:
            raise ParseError(f"duplicate matrix-element kind {kind!r}",
                             source=source, line=first_line)
        try:
            elements[kind] = MomentumMatrixElement(
                p=tuple(p),
                e_initial_ev=_float(data["e_initial_ev"][1], source,
                                    data["e_initial_ev"][0], 1),
                e_final_ev=_float(data["e_final_ev"][1], source,
                                  data["e_final_ev"][0], 1),
                kind=kind,
            )
        except ValidationError as exc:
            raise ParseError(str(exc), source=source, line=first_line) from exc
    return elements
