"""Small shared number-formatting helpers for reports and the CLI."""

from __future__ import annotations

__all__ = ["fmt"]


def fmt(x: float, precision: int | None = 6) -> str:
    """Format a float with the given number of significant digits.

    precision None means full (repr round trip).
    """
    if precision is None:
        return repr(float(x))
    return f"{float(x):.{precision}g}"
