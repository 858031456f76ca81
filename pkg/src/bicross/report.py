"""Pass/fail reports with pinpointed counterexamples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator


def fmt_scalar(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def jsonable(obj: Any) -> Any:
    """Convert nested values (Fractions, tuples, numpy ints) into plain JSON data."""
    if isinstance(obj, Fraction):
        return fmt_scalar(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    counterexample: dict | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = jsonable(self.counterexample)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    title: str = ""
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, counterexample: dict | None = None, detail: str = "") -> bool:
        passed = bool(passed)
        if not passed and counterexample is None:
            counterexample = {}
        if passed:
            counterexample = None
        self.checks.append(Check(name, passed, counterexample, detail))
        return passed

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.counterexample, c.detail))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __len__(self) -> int:
        return len(self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"title": self.title, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)"]
        for c in self.checks:
            line = f"  [{'pass' if c.passed else 'FAIL'}] {c.name}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
            if not c.passed and c.counterexample:
                lines.append(f"      counterexample: {json.dumps(jsonable(c.counterexample))[:400]}")
        return "\n".join(lines)
