"""Exceptions raised by cavitydetector."""
from __future__ import annotations

from typing import Optional


class CavityError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CavityError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class QuadratureError(CavityError, RuntimeError):
    """An integral did not converge within its panel budget.

    Attributes:
        estimate: Absolute error estimate reached before giving up
        cell: (l, n) of the mode being integrated, when known
    """

    def __init__(
        self,
        message: str,
        estimate: float = float("nan"),
        cell: Optional[tuple[int, int]] = None,
    ) -> None:
        super().__init__(message)
        self.estimate = estimate
        self.cell = cell

    def __reduce__(self):
        # Keep estimate and cell when the error crosses a process boundary.
        return (type(self), (self.args[0], self.estimate, self.cell))

    def for_cell(self, l: int, n: int) -> "QuadratureError":
        """Return a copy of this error that names the failing mode."""
        return QuadratureError(
            f"mode (l={l}, n={n}): {self}", estimate=self.estimate, cell=(l, n)
        )


class ConfigError(CavityError, ValueError):
    """Invalid run configuration text.

    Attributes:
        key: ``section.key`` path of the offending entry (if any)
    """

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key
