"""Check records and the verification report with text and JSON renderings."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckRecord:
    name: str
    parameters: dict
    residual: float
    tolerance: float
    passed: bool
    note: str = ""

    @classmethod
    def compare(cls, name: str, parameters: dict, residual: float, tolerance: float,
                note: str = "") -> "CheckRecord":
        residual = float(residual)
        ok = math.isfinite(residual) and residual <= tolerance
        return cls(name, dict(parameters), residual, float(tolerance), ok, note)


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def extend(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_text(self) -> str:
        lines = []
        for r in self.records:
            params = " ".join(f"{k}={_fmt(v)}" for k, v in r.parameters.items())
            tag = "PASS" if r.passed else "FAIL"
            line = f"{tag} {r.name} {params} residual={r.residual:.3e} tol={r.tolerance:.1e}"
            if r.note:
                line += f" ({r.note})"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({len(self.records)} checks)")
        return "\n".join(lines) + "\n"

    def to_json(self, meta: dict | None = None) -> str:
        payload: dict[str, Any] = {
            **(meta or {}),
            "passed": self.passed,
            "records": [
                {**asdict(r), "residual": _json_float(r.residual)} for r in self.records
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _json_float(v: float):
    return v if math.isfinite(v) else str(v)
