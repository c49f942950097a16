"""Exception types raised across the engine."""
from __future__ import annotations


class RepNetError(Exception):
    """Base class for every engine error."""


class ParseError(RepNetError):
    """The domain file is not valid JSON."""


class SchemaError(RepNetError):
    """A key is missing, unknown, or an array has the wrong shape."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(RepNetError):
    """One or more probabilistic / range invariants do not hold."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            lines += f"; ... ({more} more)"
        super().__init__(lines)


class RangeError(RepNetError, ValueError):
    """A scalar argument lies outside its admissible interval."""


class ImpossibleObservation(RepNetError):
    """An observation has zero probability under the current model and belief."""

    def __init__(self, message: str, agent: int | None = None):
        self.agent = agent
        super().__init__(message)


class ZeroLikelihood(RepNetError):
    """Some action-model rows have zero posterior mass; ``rows`` lists ``(h, s)``."""

    def __init__(self, rows):
        self.rows = list(rows)
        super().__init__(f"zero posterior mass for (agent, state) rows {self.rows}")


class SimulationFault(RepNetError):
    """Wraps an update error raised during a simulation step."""

    def __init__(self, step: int, agent: int, cause: Exception):
        self.step = step
        self.agent = agent
        self.cause = cause
        super().__init__(f"step {step}, agent {agent}: {cause}")
