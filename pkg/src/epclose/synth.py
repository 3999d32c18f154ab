"""Seeded synthetic background/target transaction pairs for benchmarks.

Background rows include each item independently with probability
``density``.  Target rows do the same except for a seeded subset of "drifted"
items whose probability is raised by ``drift``, which plants contrast
structure.  ``duplicate_rate`` is the fraction of rows that repeat an
earlier row of the same side instead of being sampled afresh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SyntheticPair:
    background: list
    target: list
    drifted: tuple
    item_names: tuple


def item_names(n_items: int) -> tuple:
    width = len(str(max(n_items - 1, 0)))
    return tuple(f"i{k:0{width}d}" for k in range(n_items))


def _sample_side(rng, probs, n_rows, duplicate_rate):
    n_items = len(probs)
    n_fresh = n_rows if duplicate_rate == 0 else max(1, round(n_rows * (1 - duplicate_rate)))
    fresh = rng.random((n_fresh, n_items)) < probs
    empty = ~fresh.any(axis=1)
    if empty.any():
        fresh[np.flatnonzero(empty), rng.integers(0, n_items, size=int(empty.sum()))] = True
    if n_fresh == n_rows:
        return fresh
    copies = fresh[rng.integers(0, n_fresh, size=n_rows - n_fresh)]
    rows = np.concatenate([fresh, copies])
    return rows[rng.permutation(n_rows)]


def generate_pair(n_items: int, rows_b: int, rows_t: int, density: float, drift: float,
                  seed: int, duplicate_rate: float = 0.0,
                  drift_fraction: float = 0.1) -> SyntheticPair:
    """Sample a background/target pair; identical arguments give identical data."""
    if n_items < 1 or rows_b < 1 or rows_t < 1:
        raise ValueError("items and row counts must be positive")
    for name, value in (("density", density), ("duplicate_rate", duplicate_rate),
                        ("drift_fraction", drift_fraction)):
        if not 0 <= value <= 1:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    if not -1 <= drift <= 1 or not 0 <= density + drift <= 1:
        raise ValueError(f"density + drift must lie in [0, 1], got {density} + {drift}")
    if duplicate_rate == 1:
        raise ValueError("duplicate_rate must be below 1")

    rng = np.random.default_rng(seed)
    n_drifted = max(1, round(n_items * drift_fraction)) if drift else 0
    drifted = np.sort(rng.choice(n_items, size=n_drifted, replace=False))
    base = np.full(n_items, density)
    shifted = base.copy()
    shifted[drifted] += drift

    names = item_names(n_items)
    background = _sample_side(rng, base, rows_b, duplicate_rate)
    target = _sample_side(rng, shifted, rows_t, duplicate_rate)

    def to_rows(matrix):
        return [[names[k] for k in np.flatnonzero(row)] for row in matrix]

    return SyntheticPair(to_rows(background), to_rows(target),
                         tuple(names[k] for k in drifted), names)
