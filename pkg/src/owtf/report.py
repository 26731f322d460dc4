"""Deterministic experiment reports (rows of checked quantities plus metadata)."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

from . import __version__, constants

__all__ = ["Row", "ReportRecord", "config_hash"]

PASS, FAIL, SKIP = "pass", "fail", "skip"


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def config_hash(config: dict) -> str:
    blob = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class Row:
    name: str
    value: float | str | None
    tolerance: float | None = None
    status: str = PASS

    def __post_init__(self):
        # numpy scalars would leak their repr into CSV output
        if hasattr(self.value, "item"):
            self.value = self.value.item()
        if self.tolerance is not None:
            self.tolerance = float(self.tolerance)

    @classmethod
    def check(cls, name: str, residual: float, tolerance: float) -> "Row":
        ok = math.isfinite(residual) and residual <= tolerance
        return cls(name, float(residual), tolerance, PASS if ok else FAIL)

    @classmethod
    def info(cls, name: str, value) -> "Row":
        return cls(name, value, None, PASS)

    @classmethod
    def skip(cls, name: str, reason: str) -> "Row":
        return cls(name, reason, None, SKIP)


@dataclass
class ReportRecord:
    command: str
    config: dict
    N: int | None = None
    seed: int | None = None
    rows: list[Row] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    threads: int | None = None

    def add(self, row: Row) -> Row:
        self.rows.append(row)
        return row

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.rows)

    def metadata(self) -> dict:
        meta = {
            "tool": "owtf",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "seed": self.seed,
            "threads": self.threads,
        }
        if self.N is not None:
            meta["N"] = self.N
            meta["constants"] = constants.ledger(self.N)
        return meta

    def to_dict(self) -> dict:
        return _clean({
            "metadata": self.metadata(),
            "rows": [
                {"name": r.name, "value": r.value, "tolerance": r.tolerance, "status": r.status}
                for r in self.rows
            ],
            **self.extra,
            "passed": self.passed,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Metadata as ``# key=value`` comment lines, then the row table."""
        out = io.StringIO()
        meta = _clean(self.metadata())
        for key in sorted(meta):
            val = meta[key]
            text = json.dumps(val, sort_keys=True, separators=(",", ":")) if isinstance(val, (dict, list)) else val
            out.write(f"# {key}={text}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name", "value", "tolerance", "status"])
        for r in self.rows:
            value = repr(r.value) if isinstance(r.value, float) else r.value
            tol = "" if r.tolerance is None else repr(r.tolerance)
            w.writerow([r.name, value, tol, r.status])
        return out.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_json()
