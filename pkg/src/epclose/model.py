"""Definitional objects: items, transactions, dual counts, growth rate, closure.

Supports are never stored as floats.  A pattern carries its integer counts in
the background and target datasets, and every threshold decision is made by
exact rational arithmetic against the dataset sizes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exceptions import InvalidDatasetError, NoSupportError

#: A growth rate is an exact nonnegative :class:`Fraction`, or ``math.inf``.
GrowthRate = Union[Fraction, float]

INFINITE = math.inf


class Origin(enum.Enum):
    BACKGROUND = "B"
    TARGET = "T"


class Label(enum.Enum):
    NORMAL = "normal"
    ATTACK = "attack"


@dataclass(frozen=True, slots=True)
class DualCount:
    """Occurrence counts of one pattern in the background and target datasets."""

    count_b: int
    count_t: int

    def __post_init__(self):
        if self.count_b < 0 or self.count_t < 0:
            raise ValueError(f"counts must be nonnegative, got {self}")

    @property
    def join(self) -> int:
        """Count in the join dataset (both sides together)."""
        return self.count_b + self.count_t

    def __add__(self, other: DualCount) -> DualCount:
        return DualCount(self.count_b + other.count_b, self.count_t + other.count_t)

    def __str__(self):
        # the (target:background) order used when reporting patterns
        return f"({self.count_t}:{self.count_b})"


@dataclass(frozen=True, slots=True)
class Transaction:
    items: tuple
    origin: Origin
    label: Label | None = None

    def __post_init__(self):
        items = self.items
        if not items:
            raise InvalidDatasetError("a transaction must contain at least one item")
        if any(a >= b for a, b in zip(items, items[1:])):
            raise InvalidDatasetError(f"transaction items must be strictly increasing ids: {items}")


@dataclass(frozen=True, slots=True)
class Pattern:
    items: tuple
    counts: DualCount


@dataclass(frozen=True, slots=True)
class CCP:
    """A closed contrast pattern together with its counts and growth rate."""

    items: tuple
    counts: DualCount
    growth_rate: GrowthRate

    @property
    def pattern(self) -> Pattern:
        return Pattern(self.items, self.counts)

    def key(self):
        """Identity used when comparing outputs of different miners."""
        return (self.items, self.counts.count_t, self.counts.count_b)


@dataclass(frozen=True)
class EncodedDatasetPair:
    """The join of a background and a target dataset over one item vocabulary.

    ``symbols[i]`` is the display string of item id ``i``.  Transactions keep
    their origin, so per-side counts survive the join.
    """

    symbols: tuple
    transactions: tuple

    def __post_init__(self):
        if self.n_b == 0:
            raise InvalidDatasetError("the background dataset is empty")
        if self.n_t == 0:
            raise InvalidDatasetError("the target dataset is empty")
        n_items = len(self.symbols)
        if len(set(self.symbols)) != n_items:
            raise InvalidDatasetError("item display strings must be unique")
        for t in self.transactions:
            if t.items[0] < 0 or t.items[-1] >= n_items:
                raise InvalidDatasetError(f"transaction {t.items} references an unknown item id")
            if t.label is not None and t.origin is Origin.BACKGROUND:
                raise InvalidDatasetError("labels are only allowed on target transactions")

    @classmethod
    def from_itemsets(cls, background: Iterable[Iterable], target: Iterable[Iterable],
                      target_labels: Sequence[Label | None] | None = None) -> EncodedDatasetPair:
        """Encode raw itemsets, assigning ids in first-seen order.

        Items are converted with ``str`` for display; background rows are
        scanned before target rows.
        """
        ids: dict = {}
        encoded = []
        background = list(background)
        target = list(target)
        if target_labels is not None and len(target_labels) != len(target):
            raise ValueError("target_labels must have one entry per target transaction")
        for origin, rows in ((Origin.BACKGROUND, background), (Origin.TARGET, target)):
            for pos, row in enumerate(rows):
                row_ids = set()
                for item in row:
                    key = str(item)
                    if key not in ids:
                        ids[key] = len(ids)
                    row_ids.add(ids[key])
                label = None
                if origin is Origin.TARGET and target_labels is not None:
                    label = target_labels[pos]
                encoded.append(Transaction(tuple(sorted(row_ids)), origin, label))
        return cls(tuple(ids), tuple(encoded))

    @cached_property
    def n_b(self) -> int:
        return sum(1 for t in self.transactions if t.origin is Origin.BACKGROUND)

    @cached_property
    def n_t(self) -> int:
        return sum(1 for t in self.transactions if t.origin is Origin.TARGET)

    @property
    def n_items(self) -> int:
        return len(self.symbols)

    @cached_property
    def background(self) -> list:
        return [t for t in self.transactions if t.origin is Origin.BACKGROUND]

    @cached_property
    def target(self) -> list:
        return [t for t in self.transactions if t.origin is Origin.TARGET]

    def item_id(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def encode(self, symbols: Iterable[str]) -> tuple:
        """Item ids of the given display strings, sorted."""
        lookup = {s: i for i, s in enumerate(self.symbols)}
        return tuple(sorted(lookup[s] for s in symbols))

    def decode(self, items: Iterable[int]) -> tuple:
        return tuple(self.symbols[i] for i in items)


def growth_rate(counts: DualCount, n_b: int, n_t: int) -> GrowthRate:
    """Ratio of target support to background support, exactly.

    Zero when the pattern occurs on neither side, infinite when it occurs only
    in the target.
    """
    if n_b <= 0 or n_t <= 0:
        raise InvalidDatasetError(f"dataset sizes must be positive, got n_b={n_b}, n_t={n_t}")
    if counts.count_b > n_b or counts.count_t > n_t:
        raise ValueError(f"counts {counts} exceed dataset sizes ({n_b}, {n_t})")
    if counts.count_b == 0:
        return Fraction(0) if counts.count_t == 0 else INFINITE
    return Fraction(counts.count_t * n_b, counts.count_b * n_t)


def format_growth_rate(gr: GrowthRate, places: int = 6) -> str:
    if gr == INFINITE:
        return "inf"
    return format_fraction(gr, places)


def format_fraction(value: Fraction, places: int = 6) -> str:
    """Decimal rendering of a fraction, rounded half-up, without float error."""
    scale = 10 ** places
    scaled = (value.numerator * scale * 2 + value.denominator) // (2 * value.denominator)
    whole, frac = divmod(scaled, scale)
    return f"{whole}.{frac:0{places}d}"


def meets_support_and_growth(counts: DualCount, sigma: Fraction, rho: Fraction,
                             n_b: int, n_t: int) -> bool:
    """Target-frequency and growth-rate test for a pattern already known closed.

    ``count_t >= sigma * n_t`` and ``growth_rate >= rho``, both exact
    (compared by cross-multiplying integers).
    """
    ct, cb = counts.count_t, counts.count_b
    if ct * sigma.denominator < sigma.numerator * n_t:
        return False
    if cb == 0:
        return ct > 0  # infinite growth; zero growth never reaches rho > 1
    return ct * n_b * rho.denominator >= rho.numerator * cb * n_t


def support_counts(items: Iterable[int], pair: EncodedDatasetPair) -> DualCount:
    """Dual count of a pattern by a direct scan of the join dataset."""
    wanted = frozenset(items)
    cb = ct = 0
    for t in pair.transactions:
        if wanted.issubset(t.items):
            if t.origin is Origin.TARGET:
                ct += 1
            else:
                cb += 1
    return DualCount(cb, ct)


def closure_of(items: Iterable[int], pair: EncodedDatasetPair) -> Pattern:
    """Intersection of every join-dataset transaction that contains ``items``."""
    wanted = frozenset(items)
    common = None
    cb = ct = 0
    for t in pair.transactions:
        if wanted.issubset(t.items):
            common = set(t.items) if common is None else common.intersection(t.items)
            if t.origin is Origin.TARGET:
                ct += 1
            else:
                cb += 1
    if common is None:
        raise NoSupportError(f"pattern {sorted(wanted)} occurs in no transaction")
    return Pattern(tuple(sorted(common)), DualCount(cb, ct))


def ccp_sort_key(ccp: CCP):
    """Canonical output order: growth rate descending (infinite first), then
    target count descending, then item ids ascending."""
    gr = ccp.growth_rate
    if gr == INFINITE:
        return (0, 0, -ccp.counts.count_t, ccp.items)
    return (1, -gr, -ccp.counts.count_t, ccp.items)


def sort_ccps(ccps: Iterable[CCP]) -> list:
    """Sort into :func:`ccp_sort_key` order.

    Growth rates repeat a lot, so the distinct rates are ranked once and the
    patterns are sorted on integer ranks instead of comparing fractions.
    """
    ccps = list(ccps)
    rates = sorted({c.growth_rate for c in ccps},
                   key=lambda gr: (0, 0) if gr == INFINITE else (1, -gr))
    rank = {gr: r for r, gr in enumerate(rates)}
    return sorted(ccps, key=lambda c: (rank[c.growth_rate], -c.counts.count_t, c.items))
