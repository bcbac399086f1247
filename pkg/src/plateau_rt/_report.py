"""Check/suite result containers shared by the verify suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    name: str
    instance: str
    ok: bool
    detail: str = ""

    def __post_init__(self) -> None:
        # suites often hand in numpy bools; normalize for serializers
        object.__setattr__(self, "ok", bool(self.ok))

    def __str__(self) -> str:
        status = "ok" if self.ok else "FAIL"
        tail = f" ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name} @ {self.instance}{tail}"


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> str:
        n_fail = len(self.failures)
        status = "PASS" if n_fail == 0 else f"FAIL ({n_fail} failing)"
        return f"suite {self.suite}: {len(self.checks)} checks, {status}"
