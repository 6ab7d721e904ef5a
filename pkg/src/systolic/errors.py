"""Exception types shared across the package."""


class InputDomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class ConstructionError(RuntimeError):
    """A surface or fundamental polygon could not be built at the requested
    precision (degenerate data, non-closing polygon, overflow)."""


class ElementCapError(RuntimeError):
    """Group-ball enumeration exceeded its element cap."""

    def __init__(self, cap: int, message: str | None = None):
        self.cap = cap
        super().__init__(message or f"group-ball element cap exceeded (cap={cap})")
