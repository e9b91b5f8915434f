"""Audit CSV ingestion/emission and report serialization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from fairaudit.confusion import ConfusionCounts
from fairaudit.errors import AuditError

CSV_COLUMNS = ("group", "y_true", "y_pred")

# accepted spellings of binary labels; "+"/"-" follow the usual confusion-matrix notation
_BINARY = {
    "1": 1, "true": 1, "+": 1,
    "0": 0, "false": 0, "-": 0, "−": 0,
}


class ConfigError(AuditError):
    """Malformed or invalid configuration (CLI exit code 2)."""


class DataError(AuditError):
    """Unreadable or invalid audit data (CLI exit code 3)."""


@dataclass(frozen=True)
class AuditRecord:
    group: str
    y_true: int | None
    y_pred: int


def parse_binary(text: str, *, column: str = "value", line: int | None = None) -> int:
    key = text.strip().lower()
    if key in _BINARY:
        return _BINARY[key]
    where = f" on line {line}" if line is not None else ""
    raise DataError(f"cannot parse {column}={text!r}{where}; expected one of 0/1/true/false/+/-")


def read_audit_csv(path: str | Path, *, require_labels: bool) -> tuple[list[AuditRecord], list[str]]:
    """Read ``group,y_true,y_pred`` rows.

    ``y_true`` may be absent from the header when labels are not required.
    Rows with an empty required field are rejected and reported in the
    returned warnings.
    """
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        header = [h.strip() for h in (reader.fieldnames or [])]
        reader.fieldnames = header
        required = ["group", "y_pred"] + (["y_true"] if require_labels else [])
        for col in required:
            if col not in header:
                raise DataError(f"{path.name}: missing required column {col!r} (header: {','.join(header)})")
        has_labels = "y_true" in header
        records: list[AuditRecord] = []
        rejected = 0
        for row in reader:
            line = reader.line_num
            values = {k: (row.get(k) or "").strip() for k in required}
            if any(v == "" for v in values.values()):
                rejected += 1
                continue
            y_true = None
            if has_labels and (row.get("y_true") or "").strip():
                y_true = parse_binary(row["y_true"], column="y_true", line=line)
            records.append(
                AuditRecord(values["group"], y_true, parse_binary(values["y_pred"], column="y_pred", line=line))
            )
    warnings = []
    if rejected:
        warnings.append(f"{rejected} row(s) with missing required fields were rejected")
    if not records:
        raise DataError(f"{path.name}: no usable rows")
    return records, warnings


def tally(records: Iterable[AuditRecord], group: str) -> ConfusionCounts:
    """Confusion counts of one group.

    Records without a true label are tallied as negatives, which leaves the
    positive-prediction rate (the only label-free metric) intact.
    """
    tp = fp = fn = tn = 0
    for rec in records:
        if rec.group != group:
            continue
        if rec.y_true == 1:
            if rec.y_pred:
                tp += 1
            else:
                fn += 1
        else:
            if rec.y_pred:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def group_labels(records: Iterable[AuditRecord]) -> list[str]:
    return sorted({r.group for r in records})


def synthesize_records(counts: dict[str, ConfusionCounts], seed: int = 0) -> list[AuditRecord]:
    """Expand per-group confusion counts into shuffled individual records."""
    rows = []
    for label, c in counts.items():
        rows += [AuditRecord(label, 1, 1)] * c.tp
        rows += [AuditRecord(label, 0, 1)] * c.fp
        rows += [AuditRecord(label, 1, 0)] * c.fn
        rows += [AuditRecord(label, 0, 0)] * c.tn
    order = np.random.default_rng(seed).permutation(len(rows))
    return [rows[i] for i in order]


def write_audit_csv(path: str | Path, records: Iterable[AuditRecord]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow((r.group, "" if r.y_true is None else r.y_true, r.y_pred))


def write_curve_csv(path: str | Path, rows: Iterable[tuple[int, float]]) -> None:
    try:
        fh = Path(path).open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("n", "power"))
        for n, p in rows:
            w.writerow((n, format_number(p)))


def round_sig(x: float, digits: int = 10) -> float:
    return float(f"{x:.{digits}g}")


def format_number(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    return repr(round_sig(x))


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return round_sig(x) if math.isfinite(x) else None
    return str(obj)


@dataclass
class ReportDocument:
    """What a CLI command reports: an echo of its inputs plus computed outputs."""

    command: str
    inputs: dict
    outputs: dict
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return _normalize(
            {"command": self.command, "inputs": self.inputs, "outputs": self.outputs, "warnings": self.warnings}
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"fairaudit {d['command']}"]
        for section in ("inputs", "outputs"):
            lines.append(f"[{section}]")
            lines += [f"  {k} = {v}" for k, v in _flatten(d[section])]
        if d["warnings"]:
            lines.append("[warnings]")
            lines += [f"  - {w}" for w in d["warnings"]]
        return "\n".join(lines) + "\n"


def _flatten(d: dict, prefix: str = ""):
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                yield from _flatten(item, f"{key}[{i}].")
        elif isinstance(v, str):
            yield key, v
        elif isinstance(v, list):
            yield key, json.dumps(v)
        else:
            yield key, format_number(v)
