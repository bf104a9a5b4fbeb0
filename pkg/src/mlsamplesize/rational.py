"""Exact-rational parsing and ceiling helpers.

Split fractions, prevalences and dropout rates pass through here so that a
value typed as ``0.2`` behaves as exactly 1/5 when it divides a count.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

__all__ = ["to_fraction", "ceil_div", "format_fraction", "format_exact"]


def to_fraction(value) -> Fraction:
    """Convert user input to an exact :class:`~fractions.Fraction`.

    Accepts Fractions, integers, floats (read through their shortest decimal
    repr, so ``0.2`` becomes ``1/5``), and strings such as ``"3/4"``,
    ``"0.25"``, ``"25%"`` or ``"1e-3"``.
    """
    if isinstance(value, bool):
        raise TypeError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Real):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"expected a finite number, got {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("expected a number, got an empty string")
        scale = Fraction(1)
        if text.endswith("%"):
            text = text[:-1].strip()
            scale = Fraction(1, 100)
        try:
            return Fraction(text) * scale
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r} as an exact number") from exc
    raise TypeError(f"expected a number, got {type(value).__name__}")


def ceil_div(numerator: Fraction | int, denominator: Fraction | int) -> int:
    """``ceil(numerator / denominator)`` with no floating point involved."""
    q = Fraction(numerator) / Fraction(denominator)
    return -((-q.numerator) // q.denominator)


def format_fraction(value: Fraction) -> str:
    """``"3"`` for integers, ``"1/4"`` otherwise; parses back via :func:`to_fraction`."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_exact(value: Fraction) -> str:
    """Terminating decimals as ``"0.25"``, anything else as ``"1/3"``."""
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return format_fraction(value)
    places = max(twos, fives)
    scaled = value * 10**places
    text = str(abs(scaled.numerator)).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    if places == 0:
        return sign + text
    return f"{sign}{text[:-places]}.{text[-places:]}"
