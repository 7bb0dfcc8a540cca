"""Exception types shared by the algorithmic modules and the CLI."""

from __future__ import annotations


class PreconditionError(ValueError):
    """Input fails a documented precondition; ``check`` names the failing test."""

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}" if detail else check)


class ReductionError(RuntimeError):
    """An internal reduction step did not reach its promised postcondition."""
