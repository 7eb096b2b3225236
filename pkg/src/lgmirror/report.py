"""Verification reports shared by the theorem checkers."""

from __future__ import annotations


class Report:
    __slots__ = ("check", "passed", "details", "mismatches")

    def __init__(self, check: str, passed: bool, details=None, mismatches=None):
        self.check = check
        self.passed = bool(passed)
        self.details = dict(details or {})
        self.mismatches = list(mismatches or [])

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"check": self.check, "pass": self.passed}
        out.update(self.details)
        out["mismatches"] = self.mismatches
        return out

    def __repr__(self):
        state = "pass" if self.passed else "FAIL"
        return f"Report({self.check}: {state}, {self.details})"
