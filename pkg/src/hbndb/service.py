"""Read-only HTTP service over a sealed database snapshot.

Endpoints (versioned under /api/v1):

    GET  /db                       raw SQLite bytes with a checksum header
    GET  /api/v1/defects           filtered rows as json, csv, or sqlite
    POST /api/v1/lifetime/rescale  refractive-index what-if for lifetimes

The snapshot is loaded once and never mutated, so every response is a pure
function of (snapshot, request) and concurrent reads are safe. List query
parameters are comma-separated; validation failures return 400 with the
offending field named.
"""

import base64
import hashlib
import io
import json
import os
import tempfile

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from . import emission
from .errors import HbnDbError
from .store import DefectStore

SQLITE_MEDIA_TYPE = "application/vnd.sqlite3"


class Snapshot:
    """Immutable view of one exported database file."""

    def __init__(self, db_bytes, store):
        self.db_bytes = db_bytes
        self.sha256 = hashlib.sha256(db_bytes).hexdigest()
        self.store = store
        self.records = store.records()

    @classmethod
    def load(cls, db_path):
        with open(db_path, "rb") as fh:
            db_bytes = fh.read()
        return cls(db_bytes, DefectStore.from_sqlite(db_path))

    def record_by_row(self, row_id):
        if not 1 <= row_id <= len(self.records):
            return None
        return self.records[row_id - 1]


def create_app(db_path=None, snapshot=None,
               default_refractive_index=emission.DEFAULT_REFRACTIVE_INDEX,
               cors_origins=None, static_dir=None):
    """Build the FastAPI app. With no snapshot the endpoints answer 503."""
    if snapshot is None and db_path is not None and os.path.exists(db_path):
        snapshot = Snapshot.load(db_path)

    app = FastAPI(title="hbndb query service", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot
    app.state.default_refractive_index = default_refractive_index

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    def _snapshot_or_503():
        snap = app.state.snapshot
        if snap is None:
            return None, JSONResponse(
                status_code=503,
                content={"error": "no snapshot",
                         "reason": "no database snapshot has been sealed"})
        return snap, None

    @app.get("/db")
    def raw_db():
        snap, err = _snapshot_or_503()
        if err:
            return err
        return Response(
            content=snap.db_bytes,
            media_type=SQLITE_MEDIA_TYPE,
            headers={"X-Content-SHA256": snap.sha256,
                     "ETag": f'"{snap.sha256}"',
                     "Content-Disposition":
                         'attachment; filename="hbn_defects_database.db"'})

    @app.get("/api/v1/defects")
    def defects(request: Request):
        snap, err = _snapshot_or_503()
        if err:
            return err
        try:
            filters, fmt = _parse_query_params(request.query_params)
        except _BadRequest as exc:
            return exc.response
        try:
            result = snap.store.query(**filters)
        except HbnDbError as exc:
            return _error(400, str(exc), field=getattr(exc, "field", None))
        if fmt == "json":
            return JSONResponse(content=_result_json(snap, result))
        if fmt == "csv":
            return PlainTextResponse(_result_csv(result), media_type="text/csv")
        return _result_sqlite(snap, result, filters)

    @app.post("/api/v1/lifetime/rescale")
    async def rescale(request: Request):
        snap = app.state.snapshot
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(400, "request body is not valid JSON")
        batch = isinstance(payload, dict) and "items" in payload
        items = payload["items"] if batch else [payload]
        if not isinstance(items, list):
            return _error(400, "items must be a list", field="items")
        results = []
        for item in items:
            try:
                results.append(_rescale_one(snap, item,
                                            app.state.default_refractive_index))
            except (_BadRequest, _NotFound) as exc:
                return exc.response
        return JSONResponse(content={"items": results} if batch else results[0])

    if static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


class _BadRequest(Exception):
    def __init__(self, message, field=None):
        self.response = _error(400, message, field=field)


class _NotFound(Exception):
    def __init__(self, message):
        self.response = _error(404, message)


def _error(status, message, field=None):
    body = {"error": message}
    if field:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def _parse_query_params(params):
    known = {"option", "host", "spin_multiplicity", "charge_state",
             "optical_spin_transition", "value_range", "format"}
    for key in params:
        if key not in known:
            raise _BadRequest(f"unknown query parameter {key!r}", field=key)

    def comma_list(key):
        raw = params.get(key)
        if raw is None or raw == "":
            return None
        return [tok.strip() for tok in raw.split(",") if tok.strip()]

    filters = {
        "option": comma_list("option"),
        "host": comma_list("host"),
        "spin_multiplicity": comma_list("spin_multiplicity"),
        "optical_spin_transition": comma_list("optical_spin_transition"),
    }
    charge = comma_list("charge_state")
    if charge is not None:
        try:
            filters["charge_state"] = [int(q) for q in charge]
        except ValueError:
            raise _BadRequest("charge_state entries must be integers",
                              field="charge_state") from None
    else:
        filters["charge_state"] = None
    vrange = comma_list("value_range")
    if vrange is not None:
        if len(vrange) != 2:
            raise _BadRequest("value_range must be 'lo,hi'", field="value_range")
        try:
            filters["value_range"] = (float(vrange[0]), float(vrange[1]))
        except ValueError:
            raise _BadRequest("value_range bounds must be numbers",
                              field="value_range") from None
    else:
        filters["value_range"] = None

    fmt = params.get("format", "json")
    if fmt not in ("json", "csv", "sqlite"):
        raise _BadRequest(f"unknown format {fmt!r}", field="format")
    return filters, fmt


def _cell_json(column, value):
    if isinstance(value, bytes):
        return base64.b64encode(value).decode("ascii")
    return value


def _result_json(snap, result):
    # _row is the 1-based position in the sealed snapshot's deterministic
    # ordering; it addresses records in the rescale endpoint.
    row_index = {rec.identity: i + 1 for i, rec in enumerate(snap.records)}
    rows = []
    for row in result.rows:
        identity = (row[0], row[1], row[3], row[4], row[5])
        entry = {c: _cell_json(c, v) for c, v in zip(result.columns, row)}
        entry["_row"] = row_index[identity]
        rows.append(entry)
    return {"columns": list(result.columns), "count": len(rows),
            "records": rows}


def _result_csv(result):
    buf = io.StringIO()
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        cells = []
        for column, value in zip(result.columns, row):
            if value is None:
                cells.append("")
            elif isinstance(value, bytes):
                cells.append(base64.b64encode(value).decode("ascii"))
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value).replace(",", ";"))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _result_sqlite(snap, result, filters):
    """Row-filtered copy of the database (all columns retained)."""
    matched = set()
    for row in result.rows:
        matched.add((row[0], row[1], row[3], row[4], row[5]))
    filtered = DefectStore()
    for record in snap.records:
        if record.identity in matched:
            filtered.ingest(record)
    options = filters.get("option") or []
    suffix = "_".join(options) if options else "identity"
    filename = f"hbn_defects_{suffix}.db"
    with tempfile.NamedTemporaryFile(suffix=".db", delete=False) as tmp:
        path = tmp.name
    try:
        filtered.export_sqlite(path)
        with open(path, "rb") as fh:
            payload = fh.read()
    finally:
        os.unlink(path)
    return Response(content=payload, media_type=SQLITE_MEDIA_TYPE,
                    headers={"Content-Disposition":
                             f'attachment; filename="{filename}"'})


def _rescale_one(snap, item, default_n):
    if not isinstance(item, dict):
        raise _BadRequest("each rescale item must be an object")
    if "n_d_new" not in item:
        raise _BadRequest("n_d_new is required", field="n_d_new")
    try:
        n_new = float(item["n_d_new"])
    except (TypeError, ValueError):
        raise _BadRequest("n_d_new must be a number", field="n_d_new") from None
    if n_new < 1:
        raise _BadRequest("n_d_new must be >= 1", field="n_d_new")

    if "record" in item:
        if snap is None:
            raise _BadRequest("no snapshot loaded; pass explicit lifetime data")
        try:
            row_id = int(item["record"])
        except (TypeError, ValueError):
            raise _BadRequest("record must be an integer row id",
                              field="record") from None
        record = snap.record_by_row(row_id)
        if record is None:
            raise _NotFound(f"no record with row id {row_id}")
        if record.lifetime is None:
            raise _BadRequest(f"record {row_id} has no stored lifetime",
                              field="record")
        n_old = float(item.get("n_d_old", default_n))
        tau_old = record.lifetime
        base = {"record": row_id, "defect": record.defect,
                "charge_state": record.charge_state}
    elif "tau_old_ns" in item:
        try:
            tau_old = float(item["tau_old_ns"])
            n_old = float(item.get("n_d_old", default_n))
        except (TypeError, ValueError):
            raise _BadRequest("tau_old_ns and n_d_old must be numbers") from None
        base = {}
    elif "e0_ev" in item and "mu_sq_debye2" in item:
        try:
            e0 = float(item["e0_ev"])
            mu_sq = float(item["mu_sq_debye2"])
        except (TypeError, ValueError):
            raise _BadRequest("e0_ev and mu_sq_debye2 must be numbers") from None
        try:
            fresh = emission.radiative_rate(e0, mu_sq, refractive_index=n_new)
        except HbnDbError as exc:
            raise _BadRequest(str(exc)) from None
        old = emission.radiative_rate(e0, mu_sq,
                                      refractive_index=float(
                                          item.get("n_d_old", default_n)))
        return {"n_d_old": old.refractive_index, "tau_old_ns": old.lifetime_ns,
                "n_d_new": n_new, "tau_new_ns": fresh.lifetime_ns,
                "rate_new_per_s": fresh.rate_per_s}
    else:
        raise _BadRequest(
            "provide 'record', 'tau_old_ns', or ('e0_ev', 'mu_sq_debye2')")

    if n_old < 1:
        raise _BadRequest("n_d_old must be >= 1", field="n_d_old")
    tau_new = tau_old * (n_old / n_new)
    base.update({"n_d_old": n_old, "tau_old_ns": tau_old,
                 "n_d_new": n_new, "tau_new_ns": tau_new})
    return base
