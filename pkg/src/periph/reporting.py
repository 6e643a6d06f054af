"""Uniform check records emitted by the verification routines.

Every verifier in this package reduces to a list of named numeric checks,
each carrying the identity it probes (``anchor``), the measured value, and
the threshold it was held to.  A check may also be skipped, in which case
``passed`` is None and ``reason`` explains why.  The CLI serializes these
records verbatim, so field values must stay plain Python scalars.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    value: float
    threshold: float
    passed: bool | None
    reason: str = ""


@dataclass
class VerificationReport:
    """A titled batch of checks plus the inputs that produced them."""

    title: str
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name: str, anchor: str, value: float, threshold: float,
            passed: bool | None = None) -> Check:
        """Record a check; pass/fail defaults to value <= threshold."""
        if passed is None:
            passed = bool(value <= threshold)
        check = Check(name, anchor, float(value), float(threshold), passed)
        self.checks.append(check)
        return check

    def add_skipped(self, name: str, anchor: str, reason: str) -> Check:
        check = Check(name, anchor, float("nan"), float("nan"), None, reason)
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)
        for key, value in other.meta.items():
            self.meta.setdefault(key, value)

    @property
    def passed(self) -> bool:
        """True when no check failed.  Skipped checks do not fail a report."""
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False]
