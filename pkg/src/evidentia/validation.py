"""Report-style validation results.

Validators collect findings instead of raising, so a malformed hand-authored
file produces one readable report rather than dying at the first problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    subject: str | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "message": self.message}
        if self.subject is not None:
            out["subject"] = self.subject
        return out


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.findings

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.findings)

    def kinds(self) -> tuple[str, ...]:
        """Distinct finding kinds, sorted for stable comparisons."""
        return tuple(sorted({f.kind for f in self.findings}))

    def as_dict(self) -> dict:
        return {"ok": self.ok, "findings": [f.as_dict() for f in self.findings]}
