"""Verification reports shared by every checker in the package."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of one named identity check.

    ``equation`` states the identity in plain text (what was checked, e.g.
    ``"d(H) = 0"``); ``residual`` serializes the nonzero witness on failure.
    """

    name: str
    equation: str
    status: str  # "pass" | "fail" | "skipped"
    residual: str | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "equation": self.equation,
            "status": self.status,
            "residual": self.residual,
            "wall_time": self.wall_time,
        }


@dataclass
class VerificationReport:
    """Ordered list of check results; passes iff nothing failed."""

    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def add(self, name: str, equation: str, ok: bool, residual: str | None = None,
            wall_time: float = 0.0) -> CheckResult:
        result = CheckResult(
            name=name,
            equation=equation,
            status="pass" if ok else "fail",
            residual=None if ok else residual,
            wall_time=wall_time,
        )
        self.checks.append(result)
        return result

    def add_skipped(self, name: str, equation: str, reason: str) -> CheckResult:
        result = CheckResult(name=name, equation=equation, status="skipped",
                             residual=reason)
        self.checks.append(result)
        return result

    def extend(self, other: VerificationReport) -> None:
        self.checks.extend(other.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]

    def to_dict(self) -> dict:
        return {
            "overall": "pass" if self.passed else "fail",
            "checks": [c.to_dict() for c in self.checks],
        }


class timed_check:
    """Context manager measuring one check's wall time."""

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._t0
        return False
