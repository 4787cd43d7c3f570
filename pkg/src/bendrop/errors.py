"""Exception types shared across the package.

Every error carries a short machine-readable ``category`` so the command
line layer can map failures onto stable exit codes.
"""

from __future__ import annotations


class BendropError(Exception):
    """Base class for all package errors."""

    category = "internal"
    exit_code = 1


class UsageError(BendropError):
    """Bad flag combination or malformed configuration."""

    category = "usage"
    exit_code = 2


class InputError(BendropError):
    """Unreadable or inconsistent input file."""

    category = "input"
    exit_code = 3


class ShapeError(BendropError):
    """Shape outside the admissible class (self-intersection risk, etc.)."""

    category = "shape"
    exit_code = 4


class NumericalError(BendropError):
    """Solver breakdown: indefinite system, stagnation, resolution failure."""

    category = "numerical"
    exit_code = 5
