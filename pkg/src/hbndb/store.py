"""The ``updated_data`` table: records, validation, SQLite export, queries.

Column set and order follow the published schema exactly: six identity
columns that every query returns, 22 numeric property columns, and six
opaque blobs. The rightmost-column retrieval keys (``abs_dipole_x`` ...
``raman``, plus the pseudo-key ``all``) are the column names themselves.

The store is an in-memory collection with single-writer semantics: ingest
everything, then export a snapshot; queries over a snapshot are pure reads.
Result ordering is deterministic (identity-tuple lexicographic) regardless
of ingestion order.
"""

import math
import sqlite3
from dataclasses import dataclass, fields as dataclass_fields

from .constants import HC_EV_NM
from .errors import (
    AmbiguousRangeError,
    ConflictError,
    UnknownOptionError,
    ValidationError,
)

DEFAULT_DB_FILENAME = "hbn_defects_database.db"
# The upstream repository also refers to the same file as
# hbn_defects_structure.db; the name is configurable wherever it is written.
DB_FILENAME_ALIAS = "hbn_defects_structure.db"

TABLE_NAME = "updated_data"

HOSTS = ("monolayer", "bulk")
SPIN_MULTIPLICITIES = ("singlet", "doublet", "triplet")
OPTICAL_SPIN_TRANSITIONS = ("up", "down")

IDENTITY_COLUMNS = (
    ("host", "TEXT"),
    ("defect", "TEXT"),
    ("defect_name", "TEXT"),
    ("charge_state", "INTEGER"),
    ("spin_multiplicity", "TEXT"),
    ("optical_spin_transition", "TEXT"),
)

NUMERIC_COLUMNS = (
    ("abs_dipole_x", "REAL"),
    ("abs_dipole_y", "REAL"),
    ("abs_dipole_z", "REAL"),
    ("abs_visibility", "REAL"),
    ("abs_tdm", "REAL"),
    ("abs_lifetime", "REAL"),
    ("abs_angle", "REAL"),
    ("ems_dipole_x", "REAL"),
    ("ems_dipole_y", "REAL"),
    ("ems_dipole_z", "REAL"),
    ("ems_visibility", "REAL"),
    ("ems_tdm", "REAL"),
    ("ZPL", "REAL"),
    ("ZPL_nm", "REAL"),
    ("lifetime", "REAL"),
    ("ems_angle", "REAL"),
    ("misalignment", "REAL"),
    ("Q", "REAL"),
    ("HR", "REAL"),
    ("DW", "REAL"),
    ("E_ground", "REAL"),
    ("E_excited", "REAL"),
)

BLOB_COLUMNS = (
    ("structure_ground", "BLOB"),
    ("structure_excited", "BLOB"),
    ("band_ground", "BLOB"),
    ("band_excited", "BLOB"),
    ("PL", "BLOB"),
    ("raman", "BLOB"),
)

ALL_COLUMNS = IDENTITY_COLUMNS + NUMERIC_COLUMNS + BLOB_COLUMNS
COLUMN_NAMES = tuple(name for name, _ in ALL_COLUMNS)
IDENTITY_NAMES = tuple(name for name, _ in IDENTITY_COLUMNS)
NUMERIC_OPTION_KEYS = tuple(name for name, _ in NUMERIC_COLUMNS)
BLOB_OPTION_KEYS = tuple(name for name, _ in BLOB_COLUMNS)
OPTION_KEYS = NUMERIC_OPTION_KEYS + BLOB_OPTION_KEYS


def _finite_or_none(name, value):
    if value is None:
        return None
    v = float(value)
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite", field=name)
    return v


@dataclass
class DefectRecord:
    """One row of ``updated_data``. Field names are the column names."""

    host: str
    defect: str
    defect_name: str
    charge_state: int
    spin_multiplicity: str
    optical_spin_transition: str
    abs_dipole_x: float = None
    abs_dipole_y: float = None
    abs_dipole_z: float = None
    abs_visibility: float = None
    abs_tdm: float = None
    abs_lifetime: float = None
    abs_angle: float = None
    ems_dipole_x: float = None
    ems_dipole_y: float = None
    ems_dipole_z: float = None
    ems_visibility: float = None
    ems_tdm: float = None
    ZPL: float = None
    ZPL_nm: float = None
    lifetime: float = None
    ems_angle: float = None
    misalignment: float = None
    Q: float = None
    HR: float = None
    DW: float = None
    E_ground: float = None
    E_excited: float = None
    structure_ground: bytes = None
    structure_excited: bytes = None
    band_ground: bytes = None
    band_excited: bytes = None
    PL: bytes = None
    raman: bytes = None

    def __post_init__(self):
        if self.host not in HOSTS:
            raise ValidationError(f"host must be one of {HOSTS}", field="host")
        if not self.defect:
            raise ValidationError("defect formula must be non-empty", field="defect")
        if not self.defect_name:
            raise ValidationError("defect_name must be non-empty",
                                  field="defect_name")
        self.charge_state = int(self.charge_state)
        if not -2 <= self.charge_state <= 2:
            raise ValidationError("charge_state must be within [-2, 2]",
                                  field="charge_state")
        if self.spin_multiplicity not in SPIN_MULTIPLICITIES:
            raise ValidationError(
                f"spin_multiplicity must be one of {SPIN_MULTIPLICITIES}",
                field="spin_multiplicity")
        if self.optical_spin_transition not in OPTICAL_SPIN_TRANSITIONS:
            raise ValidationError(
                f"optical_spin_transition must be one of {OPTICAL_SPIN_TRANSITIONS}",
                field="optical_spin_transition")
        for name in NUMERIC_OPTION_KEYS:
            setattr(self, name, _finite_or_none(name, getattr(self, name)))
        for name in BLOB_OPTION_KEYS:
            blob = getattr(self, name)
            if blob is not None and not isinstance(blob, bytes):
                raise ValidationError(f"{name} must be bytes", field=name)
        if self.HR is not None and self.DW is not None:
            if abs(self.DW - math.exp(-self.HR)) > 1e-6:
                raise ValidationError(
                    f"DW = {self.DW} is not exp(-HR) for HR = {self.HR}",
                    field="DW")
        if self.ZPL is not None and self.ZPL_nm is not None:
            if abs(self.ZPL * self.ZPL_nm - HC_EV_NM) > 0.01:
                raise ValidationError(
                    f"ZPL ({self.ZPL} eV) and ZPL_nm ({self.ZPL_nm} nm) are "
                    f"inconsistent with hc = {HC_EV_NM} eV nm",
                    field="ZPL_nm")

    @property
    def identity(self):
        return (self.host, self.defect, self.charge_state,
                self.spin_multiplicity, self.optical_spin_transition)

    def as_row(self):
        return tuple(getattr(self, name) for name in COLUMN_NAMES)

    @classmethod
    def from_row(cls, row):
        return cls(**dict(zip(COLUMN_NAMES, row)))


# dataclass field order must mirror the schema; guard against drift
assert tuple(f.name for f in dataclass_fields(DefectRecord)) == COLUMN_NAMES


@dataclass(frozen=True)
class QueryResult:
    columns: tuple
    rows: tuple

    def to_dicts(self):
        return [dict(zip(self.columns, row)) for row in self.rows]

    def __len__(self):
        return len(self.rows)


def resolve_options(option):
    """Option keys -> output column names (always prefixed by the identity).

    ``None`` or an empty list selects the identity columns only; the
    pseudo-key ``all`` selects every column and cannot be combined.
    """
    if not option:
        return list(IDENTITY_NAMES)
    option = list(option)
    if "all" in option:
        if len(option) != 1:
            raise ValidationError("'all' cannot be combined with other options",
                                  field="option")
        return list(COLUMN_NAMES)
    for key in option:
        if key not in OPTION_KEYS:
            raise UnknownOptionError(key)
    selected = [name for name in COLUMN_NAMES[len(IDENTITY_NAMES):]
                if name in option]
    return list(IDENTITY_NAMES) + selected


def _validate_members(name, values, allowed):
    for v in values:
        if v not in allowed:
            raise ValidationError(f"invalid {name} value: {v!r}", field=name)


class DefectStore:
    """In-memory record collection with deterministic export and queries."""

    def __init__(self):
        self._records = {}
        self._next_id = 1

    def __len__(self):
        return len(self._records)

    def ingest(self, record):
        """Add a validated record; returns an ingestion id.

        Rejects a second record with the same (host, defect, charge_state,
        spin_multiplicity, optical_spin_transition) identity.
        """
        if not isinstance(record, DefectRecord):
            raise ValidationError("expected a DefectRecord")
        key = record.identity
        if key in self._records:
            raise ConflictError(f"record already stored for identity {key}")
        self._records[key] = record
        rid = self._next_id
        self._next_id += 1
        return rid

    def records(self):
        """All records, identity-tuple sorted."""
        return [self._records[k] for k in sorted(self._records)]

    def query(self, option=None, host=None, spin_multiplicity=None,
              charge_state=None, optical_spin_transition=None, value_range=None):
        """Filtered retrieval mirroring the published get_database semantics.

        Every result starts with the six identity columns; ``option`` adds
        property columns (or ``all``). Omitted filters select everything.
        ``value_range=(lo, hi)`` keeps rows whose single selected numeric
        option lies in [lo, hi]; selecting zero or several numeric options
        together with a range is ambiguous and rejected.
        """
        columns = resolve_options(option)
        if host:
            _validate_members("host", host, HOSTS)
        if spin_multiplicity:
            _validate_members("spin_multiplicity", spin_multiplicity,
                              SPIN_MULTIPLICITIES)
        if optical_spin_transition:
            _validate_members("optical_spin_transition", optical_spin_transition,
                              OPTICAL_SPIN_TRANSITIONS)
        if charge_state:
            for q in charge_state:
                if not isinstance(q, int) or not -2 <= q <= 2:
                    raise ValidationError(f"invalid charge_state value: {q!r}",
                                          field="charge_state")

        range_column = None
        if value_range is not None:
            lo, hi = value_range
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise ValidationError("value_range must satisfy lo <= hi",
                                      field="value_range")
            numeric_selected = [c for c in columns if c in NUMERIC_OPTION_KEYS]
            if len(numeric_selected) != 1:
                raise AmbiguousRangeError(
                    f"value_range needs exactly one numeric option, "
                    f"{len(numeric_selected)} selected")
            range_column = numeric_selected[0]
            value_range = (lo, hi)

        rows = []
        for record in self.records():
            if host and record.host not in host:
                continue
            if spin_multiplicity and record.spin_multiplicity not in spin_multiplicity:
                continue
            if charge_state and record.charge_state not in charge_state:
                continue
            if (optical_spin_transition
                    and record.optical_spin_transition not in optical_spin_transition):
                continue
            if range_column is not None:
                v = getattr(record, range_column)
                if v is None or not value_range[0] <= v <= value_range[1]:
                    continue
            rows.append(tuple(getattr(record, c) for c in columns))
        return QueryResult(columns=tuple(columns), rows=tuple(rows))

    def export_sqlite(self, path):
        """Write the snapshot as a single-table SQLite file.

        The output depends only on the record content: rows are written in
        identity order on a fresh file, so identical stores produce
        byte-identical files.
        """
        path = str(path)
        with open(path, "wb"):
            pass  # truncate: the export is a full snapshot, not an append
        columns_sql = ", ".join(f'"{name}" {sqltype}' for name, sqltype in ALL_COLUMNS)
        placeholders = ", ".join("?" for _ in ALL_COLUMNS)
        conn = sqlite3.connect(path)
        try:
            conn.execute(f'CREATE TABLE "{TABLE_NAME}" ({columns_sql})')
            conn.executemany(
                f'INSERT INTO "{TABLE_NAME}" VALUES ({placeholders})',
                [r.as_row() for r in self.records()],
            )
            conn.commit()
        finally:
            conn.close()
        return path

    @classmethod
    def from_sqlite(cls, path):
        """Load a previously exported database file."""
        conn = sqlite3.connect(str(path))
        try:
            names = [row[1] for row in
                     conn.execute(f'PRAGMA table_info("{TABLE_NAME}")')]
            if tuple(names) != COLUMN_NAMES:
                raise ValidationError(
                    f"unexpected column set in {path}: {names}", field="schema")
            store = cls()
            for row in conn.execute(
                    f'SELECT * FROM "{TABLE_NAME}" ORDER BY rowid'):
                store.ingest(DefectRecord.from_row(row))
        finally:
            conn.close()
        return store
