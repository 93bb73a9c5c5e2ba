"""Exception types and enumeration guards shared by every module."""

from __future__ import annotations

import os


class ScatterlabError(Exception):
    """Base class for library errors."""


class ValidationError(ScatterlabError, ValueError):
    """Invalid parameters or malformed input."""


class GuardError(ScatterlabError):
    """A requested enumeration exceeds its size guard."""


class VerificationError(ScatterlabError, AssertionError):
    """A construction failed its own post-condition check.

    This never signals bad input; it means an implementation bug.
    """


def guard_scale() -> float:
    raw = os.environ.get("SCATTERLAB_GUARD_SCALE", "1")
    try:
        scale = float(raw)
    except ValueError as exc:
        raise ValidationError(f"SCATTERLAB_GUARD_SCALE must be numeric, got {raw!r}") from exc
    if scale <= 0:
        raise ValidationError("SCATTERLAB_GUARD_SCALE must be positive")
    return scale


def check_guard(what: str, size: int, limit: int) -> None:
    """Raise GuardError when ``size`` exceeds ``limit`` times the env scale."""
    allowed = limit * guard_scale()
    if size > allowed:
        raise GuardError(f"{what}: size {size} exceeds guard {int(allowed)}")
