"""Panel loading and result persistence.

Two input layouts are supported: the wide per-frequency competition format
(one row per series: id followed by observations, trailing blanks ignored)
and a generic long format with columns (series_id, step, value), step dense
from 1. Series with non-numeric or non-finite cells are dropped with a
recorded reason, never silently. Loaded panels are returned sorted by id
and all output tables are written deterministically: stable row order,
shortest round-trip float formatting, LF line endings.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .analytics import StratumRow, TercileRow, TriageLabel, ValidationSummary
from .core import Frequency, TimeSeries
from .errors import EmptyPanel, FormatError
from .evaluation import EvalRecord

logger = logging.getLogger(__name__)

M4_WIDE = "m4-wide"
LONG = "long"

REJECT_PARSE = "parse"


@dataclass(frozen=True)
class PanelSource:
    path: Path
    format: str
    frequency: Frequency

    def __post_init__(self) -> None:
        if self.format not in (M4_WIDE, LONG):
            raise FormatError(f"unknown panel format {self.format!r}")
        object.__setattr__(self, "path", Path(self.path))


@dataclass(frozen=True)
class ParseReject:
    series_id: str
    reason: str


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _parse_value(cell: str, sid: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"series {sid!r}: non-numeric cell {cell!r}") from None
    if not math.isfinite(value):
        raise FormatError(f"series {sid!r}: non-finite cell {cell!r}")
    return value


def load_panel(source: PanelSource) -> tuple[list[TimeSeries], list[ParseReject]]:
    """Load a panel; unparseable series become rejects, not exceptions.

    Raises FormatError for file-level damage and EmptyPanel when nothing
    usable was found. The returned panel is sorted by id.
    """
    with open(source.path, newline="") as fh:
        rows = list(csv.reader(fh))
    if source.format == M4_WIDE:
        series, rejects = _parse_m4_wide(rows, source.frequency)
    else:
        series, rejects = _parse_long(rows, source.frequency)
    if not series:
        raise EmptyPanel(f"{source.path}: no usable series")
    series.sort(key=lambda s: s.id)
    for rej in rejects:
        logger.warning("dropped series %s: %s", rej.series_id, rej.reason)
    return series, rejects


def _parse_m4_wide(rows, frequency):
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyPanel("file has no data rows")
    # header row detected by a non-numeric second cell
    if len(rows[0]) >= 2 and not _is_number(rows[0][1].strip()):
        rows = rows[1:]
    series: list[TimeSeries] = []
    rejects: list[ParseReject] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows, start=1):
        sid = row[0].strip()
        if not sid:
            rejects.append(ParseReject(f"<row {lineno}>", "missing id"))
            continue
        if sid in seen:
            rejects.append(ParseReject(sid, "duplicate id"))
            continue
        cells = [c.strip() for c in row[1:]]
        while cells and cells[-1] == "":
            cells.pop()
        try:
            if not cells:
                raise FormatError(f"series {sid!r}: no observations")
            values = [_parse_value(c, sid) for c in cells]
        except FormatError as exc:
            rejects.append(ParseReject(sid, str(exc)))
            continue
        seen.add(sid)
        series.append(TimeSeries(id=sid, values=values, frequency=frequency))
    return series, rejects


def _parse_long(rows, frequency):
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyPanel("file has no data rows")
    if len(rows[0]) >= 2 and not _is_number(rows[0][1].strip()):
        rows = rows[1:]
    by_id: dict[str, list[tuple[int, str]]] = {}
    bad: dict[str, str] = {}
    for lineno, row in enumerate(rows, start=1):
        if len(row) < 3:
            raise FormatError(f"row {lineno}: expected (series_id, step, value)")
        sid = row[0].strip()
        if not sid:
            raise FormatError(f"row {lineno}: missing series_id")
        try:
            step = int(row[1].strip())
        except ValueError:
            bad.setdefault(sid, f"non-integer step {row[1]!r}")
            continue
        by_id.setdefault(sid, []).append((step, row[2].strip()))
    series: list[TimeSeries] = []
    rejects = [ParseReject(sid, reason) for sid, reason in bad.items()]
    for sid, pairs in by_id.items():
        if sid in bad:
            continue
        pairs.sort(key=lambda p: p[0])
        if [p[0] for p in pairs] != list(range(1, len(pairs) + 1)):
            rejects.append(ParseReject(sid, "steps are not dense from 1"))
            continue
        try:
            values = [_parse_value(cell, sid) for _, cell in pairs]
        except FormatError as exc:
            rejects.append(ParseReject(sid, str(exc)))
            continue
        series.append(TimeSeries(id=sid, values=values, frequency=frequency))
    return series, rejects


def write_panel_long(path: Path, panel: list[TimeSeries]) -> None:
    """Write a panel in the long format (round-trips exactly)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series_id", "step", "value"])
        for series in sorted(panel, key=lambda s: s.id):
            for step, value in enumerate(series.values, start=1):
                writer.writerow([series.id, step, repr(float(value))])


_SCHEMAS = {
    "survivors": ("survivors.csv", ["series_id", "frequency", "t_base", "scale0"]),
    "rejects": ("rejects.csv", ["series_id", "gate", "reason"]),
    "ami_profiles": ("ami_profiles.csv", ["series_id", "frequency", "h", "n_eff", "ami_nats"]),
    "smape": ("smape.csv", ["series_id", "frequency", "model", "h", "origin", "smape_pct"]),
    "smape_mean": ("smape_mean.csv", ["series_id", "frequency", "model", "h", "mean_smape_pct"]),
    "validation": ("validation.csv", ["frequency", "model", "h", "rho", "n_series"]),
    "validation_summary": (
        "validation_summary.csv",
        ["frequency", "model", "mean_rho", "median_rho", "pooled_rho"],
    ),
    "terciles": ("terciles.csv", ["frequency", "model", "tercile", "median_smape_pct"]),
    "strata": ("strata.csv", ["frequency", "model", "tercile_by_length", "rho"]),
    "heatmap": ("heatmap.csv", ["frequency", "model", "h", "rho"]),
    "triage": ("triage.csv", ["series_id", "frequency", "tercile", "action"]),
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ResultStore:
    """Writes the fixed output tables under one directory.

    Files are rewritten whole per run; given identical inputs, config and
    seed the bytes are identical.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path_of(self, table: str) -> Path:
        return self.out_dir / _SCHEMAS[table][0]

    def write_table(self, table: str, rows) -> Path:
        filename, header = _SCHEMAS[table]
        path = self.out_dir / filename
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        return path

    # -- typed helpers ----------------------------------------------------

    def write_survivors(self, frequency, survivors) -> Path:
        return self.write_table(
            "survivors",
            ((s.series.id, frequency, s.layout.t_base, s.scale0) for s in survivors),
        )

    def write_rejects(self, frequency, rows) -> Path:
        # rows: iterable of (series_id, gate, reason)
        return self.write_table("rejects", rows)

    def write_ami_profiles(self, frequency, profiles) -> Path:
        def rows():
            for prof in sorted(profiles, key=lambda p: p.series_id):
                for h in prof.horizons():
                    entry = prof.entries[h]
                    yield (prof.series_id, frequency, h, entry.n_eff, entry.ami_nats)

        return self.write_table("ami_profiles", rows())

    def write_smape(self, frequency, records: list[EvalRecord]) -> Path:
        def rows():
            for rec in sorted(records, key=lambda r: (r.series_id, r.model_name, r.h)):
                for origin, value in enumerate(rec.per_origin_smape, start=1):
                    yield (rec.series_id, frequency, rec.model_name, rec.h, origin, value)

        return self.write_table("smape", rows())

    def write_smape_mean(self, frequency, records: list[EvalRecord]) -> Path:
        ordered = sorted(records, key=lambda r: (r.series_id, r.model_name, r.h))
        return self.write_table(
            "smape_mean",
            ((r.series_id, frequency, r.model_name, r.h, r.mean_smape) for r in ordered),
        )

    def write_validation(self, summaries: list[ValidationSummary]) -> Path:
        def rows():
            for s in summaries:
                for h in sorted(s.per_h):
                    yield (s.frequency, s.model, h, s.per_h[h].rho, s.per_h[h].n_series)

        return self.write_table("validation", rows())

    def write_heatmap(self, summaries: list[ValidationSummary]) -> Path:
        def rows():
            for s in summaries:
                for h in sorted(s.per_h):
                    yield (s.frequency, s.model, h, s.per_h[h].rho)

        return self.write_table("heatmap", rows())

    def write_validation_summary(self, summaries: list[ValidationSummary]) -> Path:
        return self.write_table(
            "validation_summary",
            ((s.frequency, s.model, s.mean_rho, s.median_rho, s.pooled_rho) for s in summaries),
        )

    def write_terciles(self, frequency, by_model: dict[str, list[TercileRow]]) -> Path:
        def rows():
            for model in sorted(by_model):
                for row in by_model[model]:
                    yield (frequency, model, row.tercile, row.median_smape)

        return self.write_table("terciles", rows())

    def write_strata(self, frequency, by_model: dict[str, list[StratumRow]]) -> Path:
        def rows():
            for model in sorted(by_model):
                for row in by_model[model]:
                    yield (frequency, model, row.stratum, row.rho)

        return self.write_table("strata", rows())

    def write_triage(self, frequency, labels: list[TriageLabel]) -> Path:
        return self.write_table(
            "triage",
            ((t.series_id, frequency, t.tercile, t.action) for t in labels),
        )
