"""Machine-readable CLI records (JSON and CSV) with exact rationals.

Every :class:`~fractions.Fraction` cell ``x`` is written as an exact string
(``"147/4"``) and accompanied by an ``x_decimal`` cell.  Columns holding
floating-point estimates are listed under ``approximate_fields``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction

FORMAT_VERSION = "1"
DECIMAL_DIGITS = 20


def decimal_string(x: Fraction, digits: int = DECIMAL_DIGITS) -> str:
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


def _expand_row(row: dict) -> dict:
    out = {}
    for key, value in row.items():
        if isinstance(value, Fraction):
            out[key] = str(value)
            out[f"{key}_decimal"] = decimal_string(value)
        else:
            out[key] = value
    return out


@dataclass
class OutputRecord:
    command: str
    parameters: dict
    rows: list[dict]
    approximate_fields: list[str] = field(default_factory=list)
    exact_fields: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.exact_fields:
            seen = []
            for row in self.rows:
                for key, value in row.items():
                    if isinstance(value, Fraction) and key not in seen:
                        seen.append(key)
            self.exact_fields = seen

    def to_json(self) -> str:
        payload = {
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "parameters": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.parameters.items()},
            "exact_fields": self.exact_fields,
            "approximate_fields": self.approximate_fields,
            "rows": [_expand_row(r) for r in self.rows],
        }
        return json.dumps(payload, indent=2, allow_nan=True)

    def to_csv(self) -> str:
        expanded = [_expand_row(r) for r in self.rows]
        columns: list[str] = []
        for row in expanded:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n")
        writer.writeheader()
        for row in expanded:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return value


def parse_json_record(text: str) -> dict:
    """Load a JSON record, turning its exact fields back into fractions."""
    payload = json.loads(text)
    exact = set(payload.get("exact_fields", []))
    for row in payload["rows"]:
        for key in exact & row.keys():
            row[key] = Fraction(row[key])
    return payload


def parse_csv_rows(text: str, exact_fields) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for key in exact_fields:
            if row.get(key):
                row[key] = Fraction(row[key])
    return rows
