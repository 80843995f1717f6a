"""Operator CLI: compute, build-db, query, analyze, serve.

Query flags mirror the published retrieval function's keyword arguments
(option, host, spin_multiplicity, charge_state, optical_spin_transition,
value_range, download_db). Configuration comes from an optional JSON file,
overridden by flags, overridden by HBNDB_* environment variables where
marked. Non-zero exit codes signal failures; per-defect errors during a
batch compute are reported but do not abort the run.
"""

import json
import os
import sys

import click

from . import analysis
from .errors import HbnDbError
from .pipeline import PipelineConfig, build_store
from .store import DEFAULT_DB_FILENAME, DefectStore


def _config_from(config_path, **overrides):
    base = PipelineConfig.from_file(config_path) if config_path else PipelineConfig()
    return base.override(**overrides)


def _fail(exc):
    raise click.ClickException(str(exc))


@click.group()
def main():
    """hBN defect photophysics: compute, store, query, analyze, serve."""


_config_options = [
    click.option("--config", "config_path", type=click.Path(exists=True),
                 default=None, help="JSON pipeline configuration."),
    click.option("--sigma", "smearing_sigma_mev", type=float, default=None,
                 help="Spectral density smearing in meV."),
    click.option("--gamma", "gamma_ev", type=float, default=None,
                 help="Lineshape broadening in eV."),
    click.option("--time-step", "time_step_fs", type=float, default=None),
    click.option("--time-span", "time_span_fs", type=float, default=None),
    click.option("--refractive-index", "refractive_index", type=float,
                 default=None, envvar="HBNDB_REFRACTIVE_INDEX"),
]


def _with_config_options(cmd):
    for opt in reversed(_config_options):
        cmd = opt(cmd)
    return cmd


@main.command()
@click.argument("manifest", type=click.Path(exists=True, file_okay=False))
@click.argument("outdir", type=click.Path(file_okay=False))
@_with_config_options
def compute(manifest, outdir, config_path, **overrides):
    """Run the full pipeline on MANIFEST and write results into OUTDIR.

    Produces records.db (SQLite snapshot), report.json (per-defect status),
    and profiles/<defect>.json charge-state profiles where charge scans were
    supplied.
    """
    try:
        config = _config_from(config_path, **overrides)
        db, report = build_store(manifest, config)
    except HbnDbError as exc:
        _fail(exc)
    os.makedirs(outdir, exist_ok=True)
    db_path = os.path.join(outdir, "records.db")
    db.export_sqlite(db_path)
    profile_dir = os.path.join(outdir, "profiles")
    for name, profile in report.profiles.items():
        os.makedirs(profile_dir, exist_ok=True)
        with open(os.path.join(profile_dir, f"{name}.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(profile, fh, indent=2, sort_keys=True)
    report_payload = {
        "records": len(report.records),
        "failures": [{"defect": name, "error": message}
                     for name, message in report.failures],
    }
    with open(os.path.join(outdir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report_payload, fh, indent=2, sort_keys=True)
    click.echo(report.summary())
    for name, message in report.failures:
        click.echo(f"  FAILED {name}: {message}", err=True)


@main.command("build-db")
@click.argument("manifest", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "-o", "out_path", type=click.Path(dir_okay=False),
              default=DEFAULT_DB_FILENAME, show_default=True,
              help="Output SQLite file (hbn_defects_structure.db is the "
                   "published alias; any name works).")
@click.option("--strict/--no-strict", default=False,
              help="Fail if any defect in the manifest fails to compute.")
@_with_config_options
def build_db(manifest, out_path, strict, config_path, **overrides):
    """Compute MANIFEST and emit a single database file."""
    try:
        config = _config_from(config_path, **overrides)
        db, report = build_store(manifest, config)
    except HbnDbError as exc:
        _fail(exc)
    for name, message in report.failures:
        click.echo(f"FAILED {name}: {message}", err=True)
    if strict and report.failures:
        raise click.ClickException(f"{len(report.failures)} defects failed")
    db.export_sqlite(out_path)
    click.echo(f"{len(db)} records -> {out_path}")


@main.command()
@click.argument("db", type=click.Path(exists=True, dir_okay=False))
@click.option("--option", multiple=True,
              help="Option keys (repeatable or comma-separated); 'all' for "
                   "every column.")
@click.option("--host", multiple=True)
@click.option("--spin-multiplicity", "spin_multiplicity", multiple=True)
@click.option("--charge-state", "charge_state", multiple=True, type=int)
@click.option("--optical-spin-transition", "optical_spin_transition",
              multiple=True)
@click.option("--value-range", "value_range", nargs=2, type=float, default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--download-db", "download_db", type=click.Path(dir_okay=False),
              default=None, help="Also write the row-filtered database here.")
def query(db, option, host, spin_multiplicity, charge_state,
          optical_spin_transition, value_range, fmt, download_db):
    """Filtered retrieval from a database file, printed to stdout."""
    options = []
    for entry in option:
        options.extend(tok.strip() for tok in entry.split(",") if tok.strip())
    try:
        store = DefectStore.from_sqlite(db)
        result = store.query(
            option=options or None,
            host=list(host) or None,
            spin_multiplicity=list(spin_multiplicity) or None,
            charge_state=list(charge_state) or None,
            optical_spin_transition=list(optical_spin_transition) or None,
            value_range=tuple(value_range) if value_range else None,
        )
    except HbnDbError as exc:
        _fail(exc)
    if fmt == "json":
        from .service import _cell_json
        rows = [{c: _cell_json(c, v) for c, v in zip(result.columns, row)}
                for row in result.rows]
        click.echo(json.dumps({"columns": list(result.columns),
                               "count": len(rows), "records": rows}, indent=2))
    else:
        from .service import _result_csv
        sys.stdout.write(_result_csv(result))
    if download_db:
        matched = {(r[0], r[1], r[3], r[4], r[5]) for r in result.rows}
        filtered = DefectStore()
        for record in store.records():
            if record.identity in matched:
                filtered.ingest(record)
        filtered.export_sqlite(download_db)
        click.echo(f"filtered database -> {download_db}", err=True)


@main.command()
@click.argument("db", type=click.Path(exists=True, dir_okay=False))
@click.option("--matrix", "matrix_path", type=click.Path(dir_okay=False),
              default=None, help="Write the Spearman correlation matrix CSV.")
@click.option("--properties", default=None,
              help="Comma-separated numeric columns for the matrix "
                   "(default: all).")
@click.option("--histogram", "histogram_prop", default=None,
              help="Numeric column to histogram per vacancy class.")
@click.option("--bins", type=int, default=10, show_default=True)
@click.option("--out", "-o", "out_path", type=click.Path(dir_okay=False),
              default=None, help="Histogram output (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True,
              help="Serialization for the matrix and histogram files.")
def analyze(db, matrix_path, properties, histogram_prop, bins, out_path, fmt):
    """Dataset statistics: correlation matrix and per-class histograms."""
    if not matrix_path and not histogram_prop:
        raise click.ClickException("nothing to do: pass --matrix and/or "
                                   "--histogram")
    try:
        records = DefectStore.from_sqlite(db).records()
        if matrix_path:
            props = ([p.strip() for p in properties.split(",")]
                     if properties else analysis.DEFAULT_CORRELATION_PROPERTIES)
            matrix = analysis.correlation_matrix(records, properties=props)
            payload = (matrix.to_csv() if fmt == "csv"
                       else json.dumps(matrix.to_dict(), indent=2) + "\n")
            with open(matrix_path, "w", encoding="utf-8") as fh:
                fh.write(payload)
            click.echo(f"correlation matrix -> {matrix_path}")
        if histogram_prop:
            edges, counts = analysis.histogram(records, histogram_prop,
                                               bins=bins)
            if fmt == "csv":
                text = analysis.histogram_to_csv(edges, counts)
            else:
                text = json.dumps(analysis.histogram_to_dict(edges, counts),
                                  indent=2) + "\n"
            if out_path:
                with open(out_path, "w", encoding="utf-8") as fh:
                    fh.write(text)
                click.echo(f"histogram -> {out_path}")
            else:
                sys.stdout.write(text)
    except HbnDbError as exc:
        _fail(exc)


@main.command()
@click.argument("db", type=click.Path(exists=True, dir_okay=False))
@click.option("--host", "bind_host", default="127.0.0.1", show_default=True,
              envvar="HBNDB_HOST")
@click.option("--port", type=int, default=8080, show_default=True,
              envvar="HBNDB_PORT")
@click.option("--refractive-index", type=float, default=1.85,
              show_default=True, envvar="HBNDB_REFRACTIVE_INDEX",
              help="n_D the stored lifetimes were computed with.")
@click.option("--cors-origin", "cors_origins", multiple=True,
              envvar="HBNDB_CORS_ORIGINS",
              help="Allowed CORS origins for the browser UI (repeatable).")
@click.option("--static", "static_dir", type=click.Path(file_okay=False),
              default=None, help="Serve a built web UI from this directory.")
def serve(db, bind_host, port, refractive_index, cors_origins, static_dir):
    """Serve /db and /api/v1 over a sealed snapshot."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(db_path=db, default_refractive_index=refractive_index,
                         cors_origins=cors_origins or None,
                         static_dir=static_dir)
    except HbnDbError as exc:
        _fail(exc)
    uvicorn.run(app, host=bind_host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
