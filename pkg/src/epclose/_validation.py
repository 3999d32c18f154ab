"""Input validation helpers used by the public entry points."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np


def as_fraction(value, name="value"):
    """Convert a threshold to an exact :class:`~fractions.Fraction`.

    Floats go through their shortest ``repr`` so that ``0.4`` becomes exactly
    ``2/5`` rather than the nearest binary double.  Strings may carry a
    trailing ``%``.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name} must be a number, got bool")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        scale = 1
        if text.endswith("%"):
            text = text[:-1].strip()
            scale = 100
        try:
            return Fraction(text) / scale
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{name} is not a number: {value!r}") from None
    raise TypeError(f"{name} must be a number or numeric string, got {type(value).__name__}")


def check_min_support(sigma):
    sigma = as_fraction(sigma, "min_support")
    if not 0 < sigma <= 1:
        raise ValueError(f"min_support must lie in (0, 1], got {sigma}")
    return sigma


def check_min_growth_rate(rho):
    rho = as_fraction(rho, "min_growth_rate")
    if rho <= 1:
        raise ValueError(f"min_growth_rate must be greater than 1, got {rho}")
    return rho


def min_count(fraction, n):
    """Smallest integer count ``c`` with ``c >= fraction * n``."""
    return -((-fraction.numerator * n) // fraction.denominator)


def check_transactions(X, name="X"):
    """Normalise an iterable of transactions to a list of frozensets.

    Accepts any iterable whose elements are iterables of hashable items, or a
    2-d 0/1 array-like (each truthy cell becomes the column index as item).
    Empty transactions are rejected.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise ValueError(f"{name} must be 2-d when given as an array, got ndim={X.ndim}")
        rows = [frozenset(np.flatnonzero(row).tolist()) for row in X]
    else:
        if isinstance(X, (str, bytes)):
            raise TypeError(f"{name} must be an iterable of transactions, not a string")
        rows = []
        for row in X:
            if isinstance(row, (str, bytes)):
                raise TypeError(f"{name} contains a bare string; wrap items in a list")
            rows.append(frozenset(row))
    for i, row in enumerate(rows):
        if not row:
            raise ValueError(f"{name}[{i}] is an empty transaction")
    return rows


def check_sides(y, n_samples):
    """Map a side indicator to booleans, ``True`` meaning target."""
    sides = [bool(v) for v in y]
    if len(sides) != n_samples:
        raise ValueError(f"y has {len(sides)} entries but X has {n_samples} transactions")
    return sides
