"""
Exception hierarchy for morsecraft.

Every error is a ValueError so callers that only expect bad-input
failures keep working.
"""

from typing import Any, Optional


class MorsecraftError(ValueError):
    """Base class for all morsecraft errors."""


class ComplexError(MorsecraftError):
    """Malformed complex input, missing faces, or purity violations."""


class ResourceLimitError(MorsecraftError):
    """Face poset materialization exceeded the configured cap."""


class MatchingError(MorsecraftError):
    """A matching that must be valid is not."""


class CancellationError(MorsecraftError):
    """Forman cancellation refused (zero or several gradient paths)."""


class SubdivisionError(MorsecraftError):
    """Subdivision, flip or prism preconditions failed."""


class LiftDefectError(MorsecraftError):
    """A stellar lift could not endo-collapse a subdivided region."""


class GluingError(MorsecraftError):
    """Identification is not simplicial or collides faces."""


class ConstructionError(MorsecraftError):
    """A local-construction step violated its invariants."""


class CompositionError(MorsecraftError):
    """Boundary-critical composition preconditions or construction failed."""


class FormatError(MorsecraftError):
    """Parse error in a facet file or JSON artifact."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SearchInconclusive(MorsecraftError):
    """A budgeted search ran out of node expansions."""

    def __init__(self, message: str, stage: Optional[str] = None, partial: Any = None):
        self.stage = stage
        self.partial = partial
        if stage:
            message = f"[{stage}] {message}"
        super().__init__(message)
