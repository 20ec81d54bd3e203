from __future__ import annotations


class RcgError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(RcgError, ValueError):
    """An object violates a structural invariant of the model."""


class FormatError(RcgError, ValueError):
    """A text file could not be parsed.

    ``kind`` is a short machine-readable tag (``"self-loop"``, ``"budget"``, ...)
    so callers can tell diagnostics apart without matching on messages.
    """

    def __init__(self, message: str, line: int | None = None, kind: str = "format"):
        self.line = line
        self.kind = kind
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class RefereeViolation(RcgError):
    """A player attempted an illegal announcement or move."""

    def __init__(self, rule: str, detail: str, round_index: int | None = None):
        self.rule = rule
        self.round_index = round_index
        prefix = f"round {round_index}: " if round_index is not None else ""
        super().__init__(f"{prefix}{rule}: {detail}")


class ReplayError(RcgError):
    """A transcript failed to replay; ``round_index`` is 1-based when known."""

    def __init__(self, message: str, round_index: int | None = None):
        self.round_index = round_index
        prefix = f"round {round_index}: " if round_index is not None else ""
        super().__init__(prefix + message)


class ResourceLimitError(RcgError):
    """A configured state or size cap was exceeded; no verdict was produced."""


class PolicyError(RcgError):
    """A strategy was queried at a state where it has no winning choice."""


class InterpretationError(RcgError):
    """A transcript does not decode to a consistent truth assignment."""
