"""Delimited-text ingestion and report emission.

Everything is CSV with a header row.  Floats are emitted with repr(), so
parsing an emitted report reproduces every scalar bit for bit; integers
are emitted bare.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable

import numpy as np

from .domain import CampaignAggregate, PredictiveValues, QualityReport, validate_aggregate
from .econ import PrecisionTable
from .errors import InputError, ParseError, ValidationError
from .rank import RankEntry

CAMPAIGN_COLUMNS = (
    "source_id",
    "campaign_id",
    "population",
    "d_plus",
    "d_minus",
    "g_plus",
    "g_minus",
)

_VALUE_COLUMNS = tuple(
    f"{row}{i}" for row in ("alpha", "beta", "gamma") for i in (1, 2, 3)
)
QUALITY_COLUMNS = (
    ("source_id", "rank", "n_campaigns", "mean_relative_err", "ci_level")
    + _VALUE_COLUMNS
    + tuple(f"ci_{c}" for c in _VALUE_COLUMNS)
)

RANK_COLUMNS = ("rank", "source_id", "mean_relative_err", "n_campaigns_used", "n_skipped")


def _cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _open_rows(source):
    if hasattr(source, "read"):
        yield from csv.reader(source)
    else:
        with open(source, "r", encoding="utf-8", newline="") as handle:
            yield from csv.reader(handle)


def _check_header(row, expected, line):
    if tuple(row) != tuple(expected):
        raise ParseError(line, row[0] if row else "", f"expected header {','.join(expected)}")


def _parse_int(text, line, field):
    try:
        return int(text)
    except ValueError:
        raise ParseError(line, field, f"not an integer: {text!r}") from None


def _parse_float(text, line, field):
    try:
        return float(text)
    except ValueError:
        raise ParseError(line, field, f"not a number: {text!r}") from None


def parse_campaign_file(source) -> dict[str, list[CampaignAggregate]]:
    """Read campaign records grouped by source.

    An empty file parses to an empty mapping.  Errors carry the line of
    the offending record.
    """
    per_source: dict[str, list[CampaignAggregate]] = {}
    line = 0
    for row in _open_rows(source):
        line += 1
        if line == 1:
            _check_header(row, CAMPAIGN_COLUMNS, line)
            continue
        if not row:
            continue
        if len(row) != len(CAMPAIGN_COLUMNS):
            raise ParseError(line, "", f"expected {len(CAMPAIGN_COLUMNS)} fields, got {len(row)}")
        record = {
            "campaign_id": row[1],
            "population": _parse_int(row[2], line, "population"),
            "d_plus": _parse_int(row[3], line, "d_plus"),
            "d_minus": _parse_int(row[4], line, "d_minus"),
            "g_plus": _parse_int(row[5], line, "g_plus"),
            "g_minus": _parse_int(row[6], line, "g_minus"),
        }
        try:
            agg = validate_aggregate(record)
        except InputError as exc:
            raise ValidationError(line, exc) from None
        per_source.setdefault(row[0], []).append(agg)
    return per_source


def emit_campaigns(rows: Iterable[tuple[str, CampaignAggregate]]) -> str:
    """CSV for (source_id, aggregate) pairs, parseable by parse_campaign_file."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CAMPAIGN_COLUMNS)
    for source_id, agg in rows:
        writer.writerow(
            [
                source_id,
                agg.campaign_id,
                _cell(agg.population),
                _cell(agg.d_plus),
                _cell(agg.d_minus),
                _cell(agg.g_plus),
                _cell(agg.g_minus),
            ]
        )
    return out.getvalue()


def emit_rank_table(entries: Iterable[RankEntry]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RANK_COLUMNS)
    for position, entry in enumerate(entries, start=1):
        writer.writerow(
            [
                position,
                entry.source_id,
                _cell(entry.mean_err),
                len(entry.per_campaign_err),
                entry.skipped,
            ]
        )
    return out.getvalue()


def parse_rank_table(source) -> list[dict]:
    rows = []
    line = 0
    for row in _open_rows(source):
        line += 1
        if line == 1:
            _check_header(row, RANK_COLUMNS, line)
            continue
        if not row:
            continue
        rows.append(
            {
                "rank": _parse_int(row[0], line, "rank"),
                "source_id": row[1],
                "mean_relative_err": _parse_float(row[2], line, "mean_relative_err"),
                "n_campaigns_used": _parse_int(row[3], line, "n_campaigns_used"),
                "n_skipped": _parse_int(row[4], line, "n_skipped"),
            }
        )
    return rows


def emit_quality_reports(reports: Iterable[QualityReport]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(QUALITY_COLUMNS)
    for report in reports:
        flat = [v for row in report.inferred.as_array() for v in row]
        ci = report.ci_half_widths
        writer.writerow(
            [
                report.source_id,
                "" if report.rank is None else str(report.rank),
                report.n_campaigns,
                _cell(report.mean_relative_err),
                _cell(report.ci_level),
            ]
            + [_cell(v) for v in flat]
            + (["" for _ in range(9)] if ci is None else [_cell(w) for w in ci])
        )
    return out.getvalue()


def parse_quality_reports(source) -> list[QualityReport]:
    reports = []
    line = 0
    for row in _open_rows(source):
        line += 1
        if line == 1:
            _check_header(row, QUALITY_COLUMNS, line)
            continue
        if not row:
            continue
        values = [_parse_float(row[5 + i], line, _VALUE_COLUMNS[i]) for i in range(9)]
        ci_cells = row[14:23]
        ci = (
            None
            if all(cell == "" for cell in ci_cells)
            else tuple(_parse_float(c, line, "ci") for c in ci_cells)
        )
        reports.append(
            QualityReport(
                source_id=row[0],
                mean_relative_err=_parse_float(row[3], line, "mean_relative_err"),
                inferred=PredictiveValues(
                    alpha=tuple(values[0:3]),
                    beta=tuple(values[3:6]),
                    gamma=tuple(values[6:9]),
                ),
                ci_half_widths=ci,
                ci_level=_parse_float(row[4], line, "ci_level"),
                n_campaigns=_parse_int(row[2], line, "n_campaigns"),
                rank=None if row[1] == "" else _parse_int(row[1], line, "rank"),
            )
        )
    return reports


def emit_grid(header: tuple[str, ...], rows: Iterable[tuple]) -> str:
    """Generic delimited grid with full-precision numeric cells."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else _cell(cell) for cell in row])
    return out.getvalue()


def parse_grid(source) -> tuple[tuple[str, ...], list[tuple]]:
    """Parse a grid back; numeric cells become int or float as written."""
    header: tuple[str, ...] | None = None
    rows = []
    for row in _open_rows(source):
        if header is None:
            header = tuple(row)
            continue
        if not row:
            continue
        parsed = []
        for cell in row:
            try:
                parsed.append(int(cell))
            except ValueError:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
        rows.append(tuple(parsed))
    return header or (), rows


def parse_tag_file(source) -> list[tuple[str, tuple[str, ...]]]:
    """Per-user tag sets: columns user_id, tags (semicolon separated)."""
    users = []
    line = 0
    for row in _open_rows(source):
        line += 1
        if line == 1:
            _check_header(row, ("user_id", "tags"), line)
            continue
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(line, "", f"expected 2 fields, got {len(row)}")
        tags = tuple(t for t in row[1].split(";") if t)
        users.append((row[0], tags))
    return users


def parse_precision_table(source) -> PrecisionTable:
    """Columns category, precision; one row per source category."""
    precisions = {}
    line = 0
    for row in _open_rows(source):
        line += 1
        if line == 1:
            _check_header(row, ("category", "precision"), line)
            continue
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(line, "", f"expected 2 fields, got {len(row)}")
        try:
            precisions[row[0]] = _parse_float(row[1], line, "precision")
        except InputError:
            raise
    try:
        return PrecisionTable(precisions=precisions)
    except InputError as exc:
        raise ValidationError(line, exc) from None
