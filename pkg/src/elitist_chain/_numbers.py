"""Scalar parsing and formatting shared by the file formats and reports."""
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

import numpy as np


def parse_number(value, exact=False):
    """Parse ``value`` (int, float, ``"0.75"``, ``"3/4"``, Fraction) as a scalar.

    With ``exact`` the result is a :class:`~fractions.Fraction`; decimal
    literals are read by their decimal expansion, so ``0.1`` becomes 1/10.
    Otherwise a float is returned.
    """
    if isinstance(value, bool):
        raise TypeError(f"expected a number, got {value!r}")
    if isinstance(value, (np.integer, np.floating)):
        value = value.item()
    if isinstance(value, str):
        text = value.strip()
        try:
            frac = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a number: {value!r}") from exc
        return frac if exact else float(frac)
    if isinstance(value, (int, Rational)):
        return Fraction(value) if exact else float(value)
    if isinstance(value, (float, Decimal)):
        if exact:
            if not np.isfinite(float(value)):
                raise ValueError(f"non-finite value {value!r} has no exact form")
            return Fraction(str(value))
        return float(value)
    raise TypeError(f"expected a number, got {type(value).__name__}")


def as_array(values, exact=False):
    """1-d or 2-d array of floats, or of Fractions (object dtype) when ``exact``."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object if exact else np.float64)
    for idx, v in np.ndenumerate(arr):
        out[idx] = parse_number(v, exact)
    return out


def is_exact(arr):
    return isinstance(arr, np.ndarray) and arr.dtype == object


def fmt(value):
    """Locale-independent text for a scalar: ``p/q`` for Fractions, repr for floats."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value == 0.0:
        return "0.0"
    return repr(value)
