"""Sampled spectra: a shared container for energy-domain data.

A Spectrum is an immutable pair of (strictly increasing energy grid in eV,
values), tagged with what it is and which units the values carry. Lineshape
exports (two-column text, CSV) live here because the PL blob stored in the
database is exactly the two-column serialization.
"""

import io

import numpy as np

from .errors import ValidationError

SPECTRUM_KINDS = (
    "spectral_density",
    "pl_lineshape",
    "absorption_lineshape",
    "optical_spectral_function",
)


class Spectrum:
    """A sampled function of energy.

    Parameters
    ----------
    grid : array, shape (n,)
        Strictly increasing energies in eV.
    values : array, shape (n,)
        Real samples (complex is allowed only for intermediate time-domain
        work and not for the named kinds).
    kind : str
        One of ``SPECTRUM_KINDS``.
    units : str
        Free-form label for the values axis.
    metadata : dict, optional
        Provenance (broadening, normalization, approximation flags).
    """

    __slots__ = ("grid", "values", "kind", "units", "metadata")

    def __init__(self, grid, values, kind, units, metadata=None):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values)
        if kind not in SPECTRUM_KINDS:
            raise ValidationError(f"unknown spectrum kind {kind!r}", field="kind")
        if grid.ndim != 1 or grid.size < 2:
            raise ValidationError("grid must be 1-D with at least 2 samples",
                                  field="grid")
        if values.shape != grid.shape:
            raise ValidationError("grid and values must have the same length",
                                  field="values")
        if not np.all(np.diff(grid) > 0):
            raise ValidationError("grid must be strictly increasing", field="grid")
        if not np.all(np.isfinite(grid)):
            raise ValidationError("grid contains non-finite entries", field="grid")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values contain non-finite entries", field="values")
        if np.iscomplexobj(values):
            values = values.astype(complex)
        else:
            values = values.astype(float)
        grid.setflags(write=False)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.kind = kind
        self.units = units
        self.metadata = dict(metadata or {})

    def integral(self):
        """Trapezoidal integral over the full grid."""
        return float(np.trapezoid(self.values.real, self.grid))

    def integral_between(self, lo, hi):
        """Trapezoidal integral restricted to [lo, hi] (grid units)."""
        mask = (self.grid >= lo) & (self.grid <= hi)
        if mask.sum() < 2:
            return 0.0
        return float(np.trapezoid(self.values.real[mask], self.grid[mask]))

    def max_position(self):
        """Energy of the largest sample."""
        return float(self.grid[int(np.argmax(self.values.real))])

    def __len__(self):
        return self.grid.size

    def __repr__(self):
        return (f"Spectrum(kind={self.kind!r}, n={len(self)}, "
                f"range=[{self.grid[0]:.4g}, {self.grid[-1]:.4g}] eV)")


def to_two_column_text(spectrum, header=True):
    """Serialize as two-column text (energy eV, value), one sample per line.

    This is the PL blob format stored in the database: '#'-prefixed header
    lines with the kind, units and metadata, then '%.10e %.10e' rows.
    """
    buf = io.StringIO()
    if header:
        buf.write(f"# kind: {spectrum.kind}\n")
        buf.write(f"# columns: energy_eV {spectrum.units}\n")
        for key in sorted(spectrum.metadata):
            buf.write(f"# {key}: {spectrum.metadata[key]}\n")
    for e, v in zip(spectrum.grid, spectrum.values.real):
        buf.write(f"{e:.10e} {v:.10e}\n")
    return buf.getvalue()


def to_csv(spectrum):
    """Plot-ready CSV with a one-line header."""
    buf = io.StringIO()
    buf.write(f"energy_eV,{spectrum.units}\n")
    for e, v in zip(spectrum.grid, spectrum.values.real):
        buf.write(f"{e:.10e},{v:.10e}\n")
    return buf.getvalue()


def from_two_column_text(text, kind="pl_lineshape", units="arb"):
    """Parse a two-column blob back into a Spectrum (header lines optional)."""
    grid = []
    values = []
    metadata = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, val = body.partition(":")
                metadata[key.strip()] = val.strip()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"expected two columns, got {len(parts)}: {line!r}",
                                  field="blob")
        grid.append(float(parts[0]))
        values.append(float(parts[1]))
    kind = metadata.pop("kind", kind)
    units_label = metadata.pop("columns", None)
    if units_label is not None:
        units = units_label.split()[-1]
    return Spectrum(grid, values, kind=kind, units=units, metadata=metadata)
