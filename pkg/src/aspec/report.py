"""Check verdicts, report records, and report serialization.

A Verdict is the outcome of a single mathematical check; a CheckRecord ties a
verdict to a scenario, check name, and item label.  Reports serialize to a
versioned JSON document or a fixed-width text table.  The ``elapsed_ms``
field on a record is the wall time of the check invocation that produced it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
ERROR = "error"

REPORT_VERSION = 1

_STATUSES = (PASS, FAIL, NOT_APPLICABLE, ERROR)


@dataclass
class Verdict:
    """Outcome of one check: a status, an optional witness, computed values."""

    status: str
    witness: str | None = None
    values: dict = field(default_factory=dict)

    @classmethod
    def ok(cls, **values) -> Verdict:
        return cls(PASS, None, values)

    @classmethod
    def fail(cls, witness: str, **values) -> Verdict:
        return cls(FAIL, witness, values)

    @classmethod
    def not_applicable(cls, reason: str, **values) -> Verdict:
        return cls(NOT_APPLICABLE, reason, values)

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class CheckRecord:
    scenario: str
    check: str
    item: str
    status: str
    witness: str | None = None
    values: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "check": self.check,
            "item": self.item,
            "status": self.status,
            "witness": self.witness,
            "values": self.values,
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CheckRecord:
        return cls(
            scenario=d["scenario"],
            check=d["check"],
            item=d["item"],
            status=d["status"],
            witness=d.get("witness"),
            values=d.get("values", {}),
            elapsed_ms=d.get("elapsed_ms", 0.0),
        )

    def sort_key(self) -> tuple:
        return (self.scenario, self.check, self.item)


@dataclass
class Report:
    records: list[CheckRecord] = field(default_factory=list)
    version: int = REPORT_VERSION

    @property
    def passed(self) -> bool:
        return not any(r.status in (FAIL, ERROR) for r in self.records)

    def sorted(self) -> Report:
        return Report(sorted(self.records, key=CheckRecord.sort_key), self.version)

    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in _STATUSES}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out


def emit(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        doc = {
            "report_version": report.version,
            "records": [r.to_dict() for r in report.sorted().records],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        return _emit_text(report)
    raise ValueError(f"unknown report format {fmt!r}")


def load_report(text: str) -> Report:
    doc = json.loads(text)
    records = [CheckRecord.from_dict(d) for d in doc["records"]]
    return Report(records, doc["report_version"])


_COLS = (("scenario", 18), ("check", 24), ("item", 34), ("status", 14))


def _emit_text(report: Report) -> str:
    lines = []
    header = "".join(name.ljust(width) for name, width in _COLS)
    lines.append(header)
    lines.append("-" * len(header))
    for rec in report.sorted().records:
        row = {
            "scenario": rec.scenario,
            "check": rec.check,
            "item": rec.item,
            "status": rec.status,
        }
        lines.append(
            "".join(str(row[name])[:width - 1].ljust(width) for name, width in _COLS)
        )
        if rec.status in (FAIL, ERROR) and rec.witness:
            lines.append("    witness: " + rec.witness)
    counts = report.counts()
    summary = ", ".join(f"{k}={v}" for k, v in counts.items() if v)
    lines.append("-" * len(header))
    lines.append(summary or "empty report")
    return "\n".join(lines) + "\n"
