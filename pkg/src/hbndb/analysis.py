"""Dataset-level statistics over stored defect records.

Spearman rank correlations (mid-rank tie handling), the pairwise correlation
matrix over the numeric columns, vacancy-content classification of defect
formulas, and per-class histograms. Everything operates on an immutable
record snapshot and returns plain data, ready for CSV/JSON export.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import ConstantSeriesError, ParseError, ValidationError
from .masses import ATOMIC_MASS_AMU
from .store import NUMERIC_OPTION_KEYS

VACANCY_CLASSES = (
    "no-vacancy-single-impurity",
    "no-vacancy-complex",
    "one-vacancy",
    "two-vacancy",
)

# Default property set for the correlation matrix: every numeric column of
# the schema. Callers reproducing a specific figure can pass any subset.
DEFAULT_CORRELATION_PROPERTIES = NUMERIC_OPTION_KEYS

_TOKEN_RE = re.compile(r"([A-Z][a-z]?)_([BN])")


def midranks(values):
    """Ranks 1..n with ties assigned the average of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y):
    """Spearman rank correlation: Pearson correlation of mid-ranks.

    Pairs where either value is missing (None/NaN) are dropped. A series
    that is constant after dropping has undefined rank correlation and
    raises ConstantSeriesError rather than returning NaN.
    """
    x = np.asarray([np.nan if v is None else v for v in x], dtype=float)
    y = np.asarray([np.nan if v is None else v for v in y], dtype=float)
    if x.size != y.size:
        raise ValidationError("series must have equal length")
    keep = ~(np.isnan(x) | np.isnan(y))
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise ValidationError("need at least two complete pairs")
    rx = midranks(x)
    ry = midranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    if denom == 0:
        raise ConstantSeriesError("rank correlation undefined for constant series")
    return float(np.dot(rx, ry) / denom)


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple
    rho: np.ndarray              # NaN marks undefined pairs
    undefined_pairs: tuple

    def to_csv(self):
        lines = ["," + ",".join(self.labels)]
        for label, row in zip(self.labels, self.rho):
            cells = ["" if np.isnan(v) else f"{v:.6f}" for v in row]
            lines.append(label + "," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "labels": list(self.labels),
            "rho": [[None if np.isnan(v) else float(v) for v in row]
                    for row in self.rho],
            "undefined_pairs": [list(pair) for pair in self.undefined_pairs],
        }


def correlation_matrix(records, properties=DEFAULT_CORRELATION_PROPERTIES):
    """Pairwise Spearman matrix over numeric record columns.

    Missing values are dropped pairwise. Pairs with fewer than two complete
    observations or with a constant series are flagged undefined (NaN entry)
    instead of leaking NaN silently.
    """
    if len(records) < 2:
        raise ValidationError("need at least two records")
    for p in properties:
        if p not in NUMERIC_OPTION_KEYS:
            raise ValidationError(f"not a numeric column: {p!r}", field="properties")
    series = {p: [getattr(r, p) for r in records] for p in properties}
    n = len(properties)
    rho = np.eye(n)
    undefined = []
    for i in range(n):
        for j in range(i + 1, n):
            try:
                r = spearman(series[properties[i]], series[properties[j]])
            except (ConstantSeriesError, ValidationError):
                r = np.nan
                undefined.append((properties[i], properties[j]))
            rho[i, j] = rho[j, i] = r
    # a column with no defined off-diagonal entries is itself undefined
    for i in range(n):
        vals = [v for v in series[properties[i]] if v is not None]
        if len(set(vals)) < 2:
            rho[i, i] = np.nan
            undefined.append((properties[i], properties[i]))
    return CorrelationMatrix(labels=tuple(properties), rho=rho,
                             undefined_pairs=tuple(undefined))


def classify_vacancy(formula):
    """Vacancy-content class of a defect formula like ``C_B V_N``.

    The token grammar is element-underscore-site (site B or N), with ``V``
    as the vacancy pseudo-element; tokens are whitespace-separated. Zero
    vacancies split into single impurity vs complex; one and two vacancies
    map to their own classes.
    """
    tokens = []
    pos = 0
    text = formula.strip()
    if not text:
        raise ParseError("empty defect formula", source=formula, column=1)
    for chunk in text.split():
        at = formula.index(chunk, pos)
        pos = at + len(chunk)
        m = _TOKEN_RE.fullmatch(chunk)
        if not m:
            raise ParseError(f"bad defect token {chunk!r}", source=formula,
                             column=at + 1)
        element = m.group(1)
        if element != "V" and element not in ATOMIC_MASS_AMU:
            raise ParseError(f"unknown element {element!r} in token {chunk!r}",
                             source=formula, column=at + 1)
        tokens.append(element)
    vacancies = sum(1 for e in tokens if e == "V")
    impurities = len(tokens) - vacancies
    if vacancies == 0:
        return VACANCY_CLASSES[0] if impurities == 1 else VACANCY_CLASSES[1]
    if vacancies == 1:
        return VACANCY_CLASSES[2]
    if vacancies == 2:
        return VACANCY_CLASSES[3]
    raise ParseError(f"more than two vacancies in {formula!r}", source=formula,
                     column=1)


def histogram(records, prop, bins=10, value_range=None):
    """Per-vacancy-class histogram of one numeric property.

    Returns (bin_edges, {class_label: counts}). Records missing the property
    are skipped; the counts over all classes sum to the number of values
    kept.
    """
    if prop not in NUMERIC_OPTION_KEYS:
        raise ValidationError(f"not a numeric column: {prop!r}", field="prop")
    values = {label: [] for label in VACANCY_CLASSES}
    pooled = []
    for record in records:
        v = getattr(record, prop)
        if v is None:
            continue
        label = classify_vacancy(record.defect)
        values[label].append(v)
        pooled.append(v)
    if value_range is None:
        if pooled:
            value_range = (min(pooled), max(pooled))
        else:
            value_range = (0.0, 1.0)
    edges = np.histogram_bin_edges(pooled if pooled else [0.0], bins=bins,
                                   range=value_range)
    counts = {}
    for label in VACANCY_CLASSES:
        counts[label], _ = np.histogram(values[label], bins=edges)
    return edges, counts


def histogram_to_csv(edges, counts):
    header = "bin_lo,bin_hi," + ",".join(VACANCY_CLASSES)
    lines = [header]
    for i in range(len(edges) - 1):
        row = [f"{edges[i]:.10g}", f"{edges[i + 1]:.10g}"]
        row += [str(int(counts[label][i])) for label in VACANCY_CLASSES]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def histogram_to_dict(edges, counts):
    return {
        "bin_edges": [float(e) for e in edges],
        "counts": {label: [int(c) for c in counts[label]]
                   for label in VACANCY_CLASSES},
    }
