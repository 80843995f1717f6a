import math
import sqlite3

import numpy as np
import pytest

from conftest import fill_store, make_record
from hbndb.errors import (
    AmbiguousRangeError,
    ConflictError,
    UnknownOptionError,
    ValidationError,
)
from hbndb.store import (
    ALL_COLUMNS,
    COLUMN_NAMES,
    DefectStore,
    IDENTITY_NAMES,
    NUMERIC_OPTION_KEYS,
    resolve_options,
)

# the published table: six identity columns, then properties, then blobs
EXPECTED_SCHEMA = (
    "host", "defect", "defect_name", "charge_state", "spin_multiplicity",
    "optical_spin_transition",
    "abs_dipole_x", "abs_dipole_y", "abs_dipole_z", "abs_visibility",
    "abs_tdm", "abs_lifetime", "abs_angle",
    "ems_dipole_x", "ems_dipole_y", "ems_dipole_z", "ems_visibility",
    "ems_tdm", "ZPL", "ZPL_nm", "lifetime", "ems_angle", "misalignment",
    "Q", "HR", "DW", "E_ground", "E_excited",
    "structure_ground", "structure_excited", "band_ground", "band_excited",
    "PL", "raman",
)


class TestSchema:
    def test_column_set_matches_published_table(self):
        assert COLUMN_NAMES == EXPECTED_SCHEMA

    def test_identity_columns_first(self):
        assert COLUMN_NAMES[:6] == IDENTITY_NAMES


class TestRecordValidation:
    def test_valid_record_accepted(self):
        record = make_record()
        assert record.identity == ("bulk", "C_B V_N", 0, "doublet", "up")

    def test_dw_hr_consistency_enforced(self):
        with pytest.raises(ValidationError) as err:
            make_record(HR=1.0, DW=0.5)
        assert err.value.field == "DW"

    def test_zpl_nm_consistency_enforced(self):
        with pytest.raises(ValidationError) as err:
            make_record(ZPL=2.0, ZPL_nm=800.0)
        assert err.value.field == "ZPL_nm"

    def test_charge_state_range(self):
        with pytest.raises(ValidationError):
            make_record(charge_state=3)

    def test_enumerations(self):
        with pytest.raises(ValidationError):
            make_record(host="slab")
        with pytest.raises(ValidationError):
            make_record(spin_multiplicity="quartet")
        with pytest.raises(ValidationError):
            make_record(optical_spin_transition="sideways")

    def test_published_outlier_misalignment_stored_verbatim(self):
        # 51 degrees exceeds the mod-60 distance bound but is stored as-is
        record = make_record(defect="O_N V_B", charge_state=-1,
                             misalignment=51.0)
        assert record.misalignment == 51.0

    def test_missing_numerics_allowed(self):
        record = make_record(lifetime=None, abs_tdm=None, HR=None, DW=None)
        assert record.lifetime is None


class TestIngest:
    def test_ingest_returns_id_and_counts(self):
        store = DefectStore()
        rid = store.ingest(make_record())
        assert rid == 1
        assert len(store) == 1

    def test_duplicate_identity_rejected(self):
        store = DefectStore()
        store.ingest(make_record())
        with pytest.raises(ConflictError):
            store.ingest(make_record(lifetime=99.0))

    def test_different_charge_not_a_duplicate(self):
        store = DefectStore()
        store.ingest(make_record(charge_state=0))
        store.ingest(make_record(charge_state=1))
        assert len(store) == 2


class TestQuery:
    def test_identity_only_by_default(self):
        store = fill_store(DefectStore(), n=10)
        result = store.query()
        assert result.columns == IDENTITY_NAMES
        assert len(result) == 10

    def test_option_all_returns_every_column(self):
        store = fill_store(DefectStore(), n=5)
        result = store.query(option=["all"])
        assert result.columns == COLUMN_NAMES
        assert len(result) == 5

    def test_all_cannot_be_combined(self):
        with pytest.raises(ValidationError):
            resolve_options(["all", "ZPL"])

    def test_unknown_option_rejected(self):
        store = fill_store(DefectStore(), n=3)
        with pytest.raises(UnknownOptionError) as err:
            store.query(option=["zpl_energy"])
        assert "zpl_energy" in str(err.value)

    def test_zpl_range_example(self):
        store = fill_store(DefectStore(), n=60)
        result = store.query(option=["ZPL"], value_range=(2.0, 4.0))
        assert result.columns == IDENTITY_NAMES + ("ZPL",)
        assert len(result) > 0
        for row in result.rows:
            assert 2.0 <= row[-1] <= 4.0

    def test_value_range_needs_exactly_one_numeric(self):
        store = fill_store(DefectStore(), n=5)
        with pytest.raises(AmbiguousRangeError):
            store.query(option=["ZPL", "HR"], value_range=(0, 1))
        with pytest.raises(AmbiguousRangeError):
            store.query(value_range=(0, 1))
        with pytest.raises(AmbiguousRangeError):
            store.query(option=["PL"], value_range=(0, 1))
        with pytest.raises(AmbiguousRangeError):
            store.query(option=["all"], value_range=(0, 1))

    def test_results_independent_of_ingestion_order(self):
        rng = np.random.default_rng(3)
        records = [make_record(defect=d, charge_state=q)
                   for d in ("O_N", "C_B", "Ga_B")
                   for q in (-1, 0, 1)]
        forward = DefectStore()
        for r in records:
            forward.ingest(r)
        backward = DefectStore()
        for r in reversed(records):
            backward.ingest(r)
        shuffled = DefectStore()
        for i in rng.permutation(len(records)):
            shuffled.ingest(records[i])
        q1 = forward.query(option=["all"])
        assert q1 == backward.query(option=["all"])
        assert q1 == shuffled.query(option=["all"])

    def test_brute_force_filter_oracle(self):
        store = fill_store(DefectStore(), n=80, seed=21)
        records = store.records()
        rng = np.random.default_rng(5)
        hosts = ("monolayer", "bulk")
        spins = ("singlet", "doublet", "triplet")
        trans = ("up", "down")
        for _ in range(300):
            filters = {}
            if rng.random() < 0.6:
                filters["host"] = list(rng.choice(hosts,
                                                  rng.integers(1, 3),
                                                  replace=False))
            if rng.random() < 0.6:
                filters["spin_multiplicity"] = list(
                    rng.choice(spins, rng.integers(1, 4), replace=False))
            if rng.random() < 0.6:
                filters["charge_state"] = [int(q) for q in rng.choice(
                    range(-2, 3), rng.integers(1, 6), replace=False)]
            if rng.random() < 0.5:
                filters["optical_spin_transition"] = list(
                    rng.choice(trans, rng.integers(1, 3), replace=False))
            option = None
            if rng.random() < 0.7:
                option = list(rng.choice(NUMERIC_OPTION_KEYS,
                                         rng.integers(1, 4), replace=False))
            value_range = None
            if option is not None and len(option) == 1 and rng.random() < 0.5:
                lo = float(rng.uniform(0, 3))
                value_range = (lo, lo + float(rng.uniform(0.5, 4)))

            result = store.query(option=option, value_range=value_range,
                                 **filters)

            expect = []
            for rec in records:
                if "host" in filters and rec.host not in filters["host"]:
                    continue
                if ("spin_multiplicity" in filters
                        and rec.spin_multiplicity
                        not in filters["spin_multiplicity"]):
                    continue
                if ("charge_state" in filters
                        and rec.charge_state not in filters["charge_state"]):
                    continue
                if ("optical_spin_transition" in filters
                        and rec.optical_spin_transition
                        not in filters["optical_spin_transition"]):
                    continue
                if value_range is not None:
                    v = getattr(rec, option[0])
                    if v is None or not value_range[0] <= v <= value_range[1]:
                        continue
                expect.append(tuple(getattr(rec, c) for c in result.columns))
            assert list(result.rows) == expect


class TestSqliteRoundTrip:
    def test_empty_store_exports_valid_db(self, tmp_path):
        path = tmp_path / "empty.db"
        DefectStore().export_sqlite(path)
        conn = sqlite3.connect(path)
        names = [row[1] for row in conn.execute("PRAGMA table_info(updated_data)")]
        count = conn.execute("SELECT COUNT(*) FROM updated_data").fetchone()[0]
        conn.close()
        assert tuple(names) == COLUMN_NAMES
        assert count == 0

    def test_round_trip_preserves_rows_and_blobs(self, tmp_path):
        store = fill_store(DefectStore(), n=3, seed=13)
        first = tmp_path / "one.db"
        store.export_sqlite(first)
        reloaded = DefectStore.from_sqlite(first)
        assert [r.as_row() for r in reloaded.records()] == \
            [r.as_row() for r in store.records()]
        second = tmp_path / "two.db"
        reloaded.export_sqlite(second)
        assert first.read_bytes() == second.read_bytes()

    def test_blob_bytes_identical(self, tmp_path):
        blob = bytes(range(256)) * 3
        store = DefectStore()
        store.ingest(make_record(structure_ground=blob, PL=b"1.0 0.5\n"))
        path = tmp_path / "blob.db"
        store.export_sqlite(path)
        conn = sqlite3.connect(path)
        row = conn.execute(
            "SELECT structure_ground, PL FROM updated_data").fetchone()
        conn.close()
        assert row[0] == blob
        assert row[1] == b"1.0 0.5\n"

    def test_sql_types_match_schema(self, tmp_path):
        path = tmp_path / "typed.db"
        fill_store(DefectStore(), n=2).export_sqlite(path)
        conn = sqlite3.connect(path)
        types = {row[1]: row[2] for row in
                 conn.execute("PRAGMA table_info(updated_data)")}
        conn.close()
        for name, sqltype in ALL_COLUMNS:
            assert types[name] == sqltype

    def test_every_stored_record_keeps_invariants(self):
        store = fill_store(DefectStore(), n=30, seed=2)
        for rec in store.records():
            if rec.HR is not None and rec.DW is not None:
                assert abs(rec.DW - math.exp(-rec.HR)) <= 1e-6
            if rec.ZPL is not None and rec.ZPL_nm is not None:
                assert abs(rec.ZPL * rec.ZPL_nm - 1239.841984) <= 0.01
