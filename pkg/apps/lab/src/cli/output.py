from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from packages.shared.shared.errors import InvalidParameterError, ValidationFailure
from schemas.documents import Number, ResultDocument, ResultTable, RunRequest


@dataclass
class Outcome:
    """A result document plus the numerical checks that failed while producing it."""

    document: ResultDocument
    failures: List[ValidationFailure] = field(default_factory=list)


def round_number(value: Any, digits: int = 9) -> Number:
    """Booleans become 0/1, ints pass through, floats keep `digits` significant digits, undefined is None."""
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    x = float(value)
    if not math.isfinite(x):
        return None
    # fold -0.0 into 0.0
    return float(f"{x:.{digits}g}") + 0.0


def build_document(
    request: RunRequest,
    results: Mapping[str, Any],
    *,
    columns: Optional[Sequence[str]] = None,
    rows: Optional[Iterable[Sequence[Any]]] = None,
    notes: Optional[List[str]] = None,
    digits: int = 9,
) -> ResultDocument:
    table: Optional[ResultTable] = None
    if columns is not None:
        table = ResultTable(
            columns=list(columns),
            rows=[[round_number(v, digits) for v in row] for row in (rows or [])],
        )
    return ResultDocument(
        request=request.echo(),
        results={name: round_number(v, digits) for name, v in results.items()},
        table=table,
        notes=list(notes or []),
    )


def render_json(doc: ResultDocument) -> str:
    return json.dumps(doc.model_dump(mode="json"), ensure_ascii=False, indent=2)


def _cell(value: Number) -> str:
    return "" if value is None else repr(value)


def render_csv(doc: ResultDocument) -> str:
    if doc.table is None:
        raise InvalidParameterError("format", "this command produces no table; use --format json")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(doc.table.columns)
    for row in doc.table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render(doc: ResultDocument, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(doc)
    return render_json(doc) + "\n"


def parse_document(text: str) -> ResultDocument:
    return ResultDocument.model_validate(json.loads(text))
