"""Exact rational parsing and rendering.

Every probability in this package is a ``fractions.Fraction``. Input files
may write masses as fraction strings ("3/10") or decimal strings ("0.3",
".3"); both parse to the same exact value. Decimal rendering exists for
display only and never feeds back into computation.
"""
from __future__ import annotations

from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction

__all__ = ["parse_rational", "format_rational", "format_decimal"]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse "a/b", decimal, or integer notation into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError(
            f"refusing float probability {text!r}; pass a string or Fraction"
        )
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "a/b", or "a" when the denominator is 1."""
    return str(Fraction(value))


def format_decimal(value: Fraction, places: int = 6) -> str:
    """Fixed-point decimal rendering, for human-readable reports only."""
    value = Fraction(value)
    quantum = Decimal(1).scaleb(-places)
    dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.quantize(quantum, rounding=ROUND_HALF_EVEN))
