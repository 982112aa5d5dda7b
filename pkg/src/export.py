"""
Output renderers: JSON, CSV, OEIS b-file and plain text.

Every result is first turned into a ``Document`` (a kind, metadata and one
table), then rendered. JSON documents carry ``"schema": "1"``. Exact values
stay exact: integers as integers, rationals as ``"p/q"`` strings; floats only
appear for high-precision constants, printed with the configured digits.
"""

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath

from .asymptotics import AsymptoticReport
from .dpcount import CountTable, HeightProfile, LayerCounts
from .paths import Path
from .sampler import SamplerSpec, SampleStatistics
from .series import MarkPoly, TruncatedSeries
from .verify import VerificationReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
FORMATS = ("json", "csv", "bfile", "text")


@dataclass
class Document:
    """
    A renderable result.

    Attributes:
        kind (str): What the document holds (``series``, ``count`` ...).
        columns (Tuple[str, ...]): Column names of the main table.
        rows (List[Tuple]): The main table.
        meta (Dict[str, Any]): Scalar metadata, emitted as JSON fields or text header.
        extra (Dict[str, Any]): Additional JSON-only payload.
        text (Optional[str]): Replacement body for text output.
        digits (int): Digits used for high-precision floats.
    """

    kind: str
    columns: Tuple[str, ...]
    rows: List[Tuple] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    text: Optional[str] = None
    digits: int = 20


def format_value(value: Any, digits: int = 20) -> Any:
    """Convert a value to something JSON and CSV can carry without losing exactness."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, digits)
    if isinstance(value, MarkPoly):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows(doc: Document) -> List[List[Any]]:
    return [[format_value(v, doc.digits) for v in row] for row in doc.rows]


def render_json(doc: Document) -> str:
    payload: Dict[str, Any] = {"schema": SCHEMA_VERSION, "kind": doc.kind}
    payload.update({k: format_value(v, doc.digits) for k, v in doc.meta.items()})
    payload["columns"] = list(doc.columns)
    payload["rows"] = _rows(doc)
    payload.update(doc.extra)
    return json.dumps(payload, indent=2)


def render_csv(doc: Document) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(doc.columns)
    writer.writerows(_rows(doc))
    return buffer.getvalue().rstrip("\n")


def render_bfile(doc: Document) -> str:
    """
    Render a single integer sequence as ``n a(n)`` lines, offset 0.

    Raises:
        ValueError: If the document is not a two-column integer sequence.
    """
    if len(doc.columns) != 2:
        raise ValueError(f"b-file output needs a single sequence, not a {doc.kind} table")
    lines = []
    for n, value in doc.rows:
        if isinstance(value, Fraction) and value.denominator == 1:
            value = int(value)
        if not isinstance(value, int):
            raise ValueError(f"b-file output needs integer terms, got {value}")
        lines.append(f"{n} {value}")
    return "\n".join(lines)


def render_text(doc: Document) -> str:
    if doc.text is not None:
        return doc.text
    lines = [f"{k}: {format_value(v, doc.digits)}" for k, v in doc.meta.items()]
    if lines:
        lines.append("")
    lines.append("\t".join(doc.columns))
    lines.extend("\t".join(str(v) for v in row) for row in _rows(doc))
    return "\n".join(lines)


_RENDERERS = {
    "json": render_json,
    "csv": render_csv,
    "bfile": render_bfile,
    "text": render_text,
}


def render(doc: Document, fmt: str) -> str:
    """
    Render a document in one of ``json``, ``csv``, ``bfile`` or ``text``.

    Raises:
        ValueError: For an unknown format or a document the format cannot hold.
    """
    try:
        renderer = _RENDERERS[fmt]
    except KeyError:
        raise ValueError(f"Unknown output format {fmt!r}; expected one of {FORMATS}") from None
    logger.debug(f"Rendering {doc.kind} document as {fmt}")
    return renderer(doc)


def series_document(name: str, series: TruncatedSeries) -> Document:
    """Coefficients of ``z^0`` up to the precision of ``series``."""
    coeffs = series.coefficients()
    marked = any(isinstance(c, MarkPoly) for c in coeffs)
    if marked:
        text = "\n".join(f"z^{n}: {c}" for n, c in enumerate(coeffs))
    else:
        text = ",".join(str(format_value(c)) for c in coeffs)
    return Document(
        kind="series",
        columns=("n", "coefficient"),
        rows=list(enumerate(coeffs)),
        meta={"generator": name, "order": series.precision - 1},
        extra=series.to_json(),
        text=text,
    )


def value_document(kind: str, name: str, value: Any, meta: Optional[Dict[str, Any]] = None) -> Document:
    """A single exact value, printed bare in text mode."""
    meta = dict(meta or {})
    return Document(
        kind=kind,
        columns=(name,),
        rows=[(value,)],
        meta=meta,
        text=str(format_value(value)),
    )


def layer_counts_document(n: int, j: int, counts: LayerCounts) -> Document:
    return Document(
        kind="layer-counts",
        columns=("n", "j", "F", "G", "H", "K", "total"),
        rows=[(n, j, counts.f, counts.g, counts.h, counts.k, counts.total)],
    )


def count_table_document(table: CountTable) -> Document:
    return Document(
        kind="count-table",
        columns=("n", "j", "F", "G", "H", "K", "total"),
        rows=list(table.export_rows()),
        meta={"N": table.N, "height_cap": table.height_cap},
    )


def height_profile_document(profile: HeightProfile, expected: bool = False) -> Document:
    """Rows ``(n, H, at_most)`` and a closing ``(n, expected_height, p/q)`` summary row."""
    rows: List[Tuple] = [(profile.n, h, a) for h, a in enumerate(profile.at_most)]
    rows.append((profile.n, "expected_height", profile.expected_height))
    meta: Dict[str, Any] = {"n": profile.n, "total": profile.total}
    if expected:
        meta["expected_height"] = profile.expected_height
    return Document(
        kind="height-profile",
        columns=("n", "H", "at_most"),
        rows=rows,
        meta=meta,
    )


def marked_distribution_document(n: int, level: int, dist: Dict[Tuple[int, int], int]) -> Document:
    return Document(
        kind="marked-distribution",
        columns=("flats", "lefts", "count"),
        rows=[(a, b, c) for (a, b), c in sorted(dist.items())],
        meta={"n": n, "level": level, "total": sum(dist.values())},
    )


def report_document(report: AsymptoticReport) -> Document:
    """
    The count table goes in the main rows; the constants ride along in JSON
    and text output.
    """
    digits = report.digits
    rows = [(e.n, e.exact, e.estimate, e.rel_error) for e in report.estimates]
    checks = report.checks()
    constants = [
        {
            "name": c.name,
            "value": format_value(c.value, digits),
            "target": format_value(c.target, digits),
            "delta": mpmath.nstr(c.delta, 5),
        }
        for c in checks
    ]
    text_lines = [f"digits: {digits}", ""]
    text_lines += [
        f"{c.name}: {mpmath.nstr(c.value, digits)} (target {mpmath.nstr(c.target, 25)}, |delta| {mpmath.nstr(c.delta, 3)})"
        for c in checks
    ]
    text_lines += ["", "n\texact\testimate\trel_error"]
    text_lines += [
        f"{e.n}\t{e.exact}\t{mpmath.nstr(e.estimate, 15)}\t{mpmath.nstr(e.rel_error, 6)}"
        for e in report.estimates
    ]
    return Document(
        kind="asymptotics",
        columns=("n", "exact", "estimate", "rel_error"),
        rows=rows,
        meta={"digits": digits},
        extra={"constants": constants},
        text="\n".join(text_lines),
        digits=digits,
    )


def samples_document(
    spec: SamplerSpec, samples: Sequence[Path], stats: Optional[SampleStatistics] = None
) -> Document:
    records = [p.to_dict() for p in samples]
    extra: Dict[str, Any] = {"paths": records}
    if stats is not None:
        extra["statistics"] = stats.to_dict()
    return Document(
        kind="samples",
        columns=("word", "level", "height", "flats", "lefts", "layer"),
        rows=[tuple(r.values()) for r in records],
        meta=spec.metadata(),
        extra=extra,
        text="\n".join(p.word for p in samples),
    )


def paths_document(n: int, level: Optional[int], paths: Sequence[Path], listing: bool) -> Document:
    records = [p.to_dict() for p in paths] if listing else []
    return Document(
        kind="enumeration",
        columns=("word", "level", "height", "flats", "lefts", "layer"),
        rows=[tuple(r.values()) for r in records],
        meta={"n": n, "level": level, "count": len(paths)},
        extra={"paths": records} if listing else {},
        text="\n".join([p.word for p in paths] + [str(len(paths))]) if listing else str(len(paths)),
    )


def verification_document(report: VerificationReport) -> Document:
    rows: List[Tuple] = []
    for r in report.results:
        e = r.error
        rows.append(
            (
                r.name,
                r.status,
                r.compared,
                e.generator if e else None,
                e.n if e else None,
                e.j if e else None,
                str(e.expected) if e else None,
                str(e.got) if e else None,
            )
        )
    return Document(
        kind="verification",
        columns=("check", "status", "compared", "generator", "n", "j", "expected", "got"),
        rows=rows,
        meta={"max_length": report.max_length, "passed": report.passed},
        text=report.digest(),
    )
